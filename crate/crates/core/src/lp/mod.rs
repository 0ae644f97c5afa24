//! Exact-rational linear programming and the separability program.

pub mod linalg;
mod separability;
mod simplex;

pub use separability::{
    build_separability_lp, is_separable, min_noise, min_noise_case, product_column, product_pair, rational_certificate,
    recombine, separable_decomposition, sparsify_support, CertificateError, CertificateTarget, NoiseOptimum,
    ProductTerm, SeparableCertificate, NOISE_COLUMN,
};
pub use simplex::{is_certified_optimal, reduced_costs, simplex_solve, BasicSolution, LinearProgram, LpError};

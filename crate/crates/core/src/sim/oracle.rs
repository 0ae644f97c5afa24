//! Exact outcome distributions by dense density-matrix evolution.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::circuit::{Circuit, Gate, Rotation};
use super::SimError;
use crate::dense::CMatrix;
use crate::pauli::{bloch_to_dense, PauliIndex};
use crate::scalar::to_f64;

pub const MAX_ORACLE_QUBITS: usize = 6;
const NORMALISATION_TOLERANCE: f64 = 1e-10;

/// `exp(−iθ/2 · n·σ)`, whose Bloch action is the right-handed rotation by
/// `θ` about `n`.
pub fn rotation_unitary(rotation: &Rotation) -> CMatrix {
    let (n, theta) = rotation.axis_angle();
    let (s, c) = (theta / 2.0).sin_cos();
    let mut u = CMatrix::identity(2).scale(Complex64::new(c, 0.0));
    for (k, nk) in n.iter().enumerate() {
        u = &u + &CMatrix::pauli(k + 1).scale(Complex64::new(0.0, -s * nk));
    }
    u
}

/// Bit of qubit `q` in a basis index; qubit 0 is the most significant.
fn bit(index: usize, q: usize, n: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

fn embed(single: &CMatrix, q: usize, n: usize) -> CMatrix {
    let mut full = CMatrix::identity(1);
    for k in 0..n {
        full = if k == q { full.kron(single) } else { full.kron(&CMatrix::identity(2)) };
    }
    full
}

/// `(1−λ)·CZ ρ CZ + λ·(I/4)_{ab} ⊗ Tr_{ab} ρ`.
fn noisy_cz(rho: &CMatrix, a: usize, b: usize, lambda: f64, n: usize) -> CMatrix {
    let dim = rho.dim();
    let sign = |i: usize| if bit(i, a, n) == 1 && bit(i, b, n) == 1 { -1.0 } else { 1.0 };
    let mask = (1 << (n - 1 - a)) | (1 << (n - 1 - b));
    let mut out = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let ideal = rho[(i, j)] * (sign(i) * sign(j));
            let mut mixed = Complex64::new(0.0, 0.0);
            if i & mask == j & mask {
                let (ri, rj) = (i & !mask, j & !mask);
                for x in [0, 1 << (n - 1 - a), 1 << (n - 1 - b), mask] {
                    mixed += rho[(ri | x, rj | x)];
                }
                mixed *= 0.25;
            }
            out[(i, j)] = ideal * (1.0 - lambda) + mixed * lambda;
        }
    }
    out
}

/// Rotates the measurement axis onto Z: `H` for X, `H·S†` for Y.
fn basis_change(axis: PauliIndex) -> CMatrix {
    let h = Rotation::from_name("H").expect("named");
    let sdg = Rotation::from_name("SDG").expect("named");
    match axis {
        PauliIndex::X => rotation_unitary(&h),
        PauliIndex::Y => &rotation_unitary(&h) * &rotation_unitary(&sdg),
        _ => CMatrix::identity(2),
    }
}

/// Final density matrix of the circuit (before measurement).
pub fn final_density(circuit: &Circuit) -> Result<CMatrix, SimError> {
    circuit.validate()?;
    let n = circuit.qubits();
    if n > MAX_ORACLE_QUBITS {
        return Err(SimError::TooManyQubits { qubits: n, max: MAX_ORACLE_QUBITS });
    }
    let mut rho = CMatrix::identity(1);
    for v in &circuit.init {
        rho = rho.kron(&bloch_to_dense(v));
    }
    for gate in &circuit.gates {
        match gate {
            Gate::Clifford { qubit, rotation } => {
                rho = rho.conjugate_by(&embed(&rotation_unitary(rotation), *qubit, n));
            }
            Gate::NoisyCz { qubits: (a, b), lambda } => {
                rho = noisy_cz(&rho, *a, *b, to_f64(lambda), n);
            }
        }
    }
    Ok(rho)
}

/// Probability of every outcome string over the measured qubits (all
/// `2^m` strings, `+` before `-`).
pub fn exact_distribution(circuit: &Circuit) -> Result<BTreeMap<String, f64>, SimError> {
    let mut rho = final_density(circuit)?;
    let n = circuit.qubits();
    for (q, axis) in circuit.measure.iter().enumerate() {
        if let Some(axis) = axis {
            rho = rho.conjugate_by(&embed(&basis_change(*axis), q, n));
        }
    }
    let measured = circuit.measured();
    let mut dist = BTreeMap::new();
    for bits in 0..(1usize << measured.len()) {
        let key: String = (0..measured.len()).map(|k| if bits >> k & 1 == 0 { '+' } else { '-' }).collect();
        dist.insert(key, 0.0);
    }
    let mut total = 0.0;
    for i in 0..rho.dim() {
        let p = rho[(i, i)].re;
        total += p;
        let key: String = measured.iter().map(|&q| if bit(i, q, n) == 0 { '+' } else { '-' }).collect();
        *dist.get_mut(&key).expect("all keys present") += p;
    }
    if (total - 1.0).abs() > NORMALISATION_TOLERANCE {
        return Err(SimError::Normalisation(total));
    }
    for p in dist.values_mut() {
        if *p < 0.0 && *p > -NORMALISATION_TOLERANCE {
            *p = 0.0;
        }
    }
    Ok(dist)
}

/// Pauli coefficients `Tr(ρ σ_i ⊗ σ_j)` of the reduced state of qubits
/// `(a, b)`.
pub fn reduced_pauli_coefficients(rho: &CMatrix, a: usize, b: usize, n: usize) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut op = CMatrix::identity(1);
            for q in 0..n {
                let factor = if q == a {
                    CMatrix::pauli(i)
                } else if q == b {
                    CMatrix::pauli(j)
                } else {
                    CMatrix::identity(2)
                };
                op = op.kron(&factor);
            }
            rho.trace_product_re(&op)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{apply_noisy_cz, product_operator, BlochVector};
    use crate::scalar::{int, ratio};

    #[test]
    fn unitaries_match_signed_permutations() {
        for rot in Rotation::all() {
            let u = rotation_unitary(&rot);
            let m = rot.matrix();
            for k in 0..3 {
                let image = CMatrix::pauli(k + 1).conjugate_by(&u);
                // U σ_k U† = Σ_j R_jk σ_j
                let mut expected = CMatrix::zeros(2);
                for j in 0..3 {
                    expected = &expected + &CMatrix::pauli(j + 1).scale(Complex64::new(f64::from(m[j][k]), 0.0));
                }
                assert!(image.max_abs_diff(&expected) < 1e-12, "{rot} axis {k}");
            }
        }
    }

    #[test]
    fn full_noise_is_uniform() {
        let c = Circuit {
            r: ratio(1, 2),
            init: vec![BlochVector::new(int(0), int(0), int(1)), BlochVector::new(int(1), int(0), int(0))],
            gates: vec![Gate::NoisyCz { qubits: (0, 1), lambda: int(1) }],
            measure: vec![Some(PauliIndex::X), Some(PauliIndex::X)],
        };
        for p in exact_distribution(&c).unwrap().values() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_cz_on_plus_states() {
        // CZ|++⟩ is a graph state: X⊗X has zero mean, each X marginal is uniform.
        let c = Circuit {
            r: ratio(1, 2),
            init: vec![BlochVector::new(int(1), int(0), int(0)); 2],
            gates: vec![Gate::NoisyCz { qubits: (0, 1), lambda: int(0) }],
            measure: vec![Some(PauliIndex::X), Some(PauliIndex::X)],
        };
        let d = exact_distribution(&c).unwrap();
        assert_eq!(d.keys().cloned().collect::<Vec<_>>(), ["++", "+-", "-+", "--"]);
        for p in d.values() {
            assert!((p - 0.25).abs() < 1e-12);
        }
        // Measuring X then Z on the second: X⊗Z stabilises CZ|++⟩.
        let c = Circuit { measure: vec![Some(PauliIndex::X), Some(PauliIndex::Z)], ..c };
        let d = exact_distribution(&c).unwrap();
        assert!((d["++"] - 0.5).abs() < 1e-12 && (d["--"] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn y_measurement() {
        let c = Circuit {
            r: int(1),
            init: vec![BlochVector::new(int(0), ratio(1, 2), int(0))],
            gates: vec![],
            measure: vec![Some(PauliIndex::Y)],
        };
        let d = exact_distribution(&c).unwrap();
        assert!((d["+"] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn reduced_state_matches_channel_with_spectator() {
        let va = BlochVector::new(ratio(1, 3), ratio(-1, 2), ratio(1, 4));
        let vb = BlochVector::new(ratio(-2, 3), ratio(1, 5), ratio(1, 2));
        let vc = BlochVector::new(int(0), int(1), int(0));
        let lambda = ratio(3, 5);
        let c = Circuit {
            r: int(1),
            init: vec![va.clone(), vc, vb.clone()],
            gates: vec![Gate::NoisyCz { qubits: (0, 2), lambda: lambda.clone() }],
            measure: vec![None, None, None],
        };
        let rho = final_density(&c).unwrap();
        let got = reduced_pauli_coefficients(&rho, 0, 2, 3);
        let expected = apply_noisy_cz(&product_operator(&va, &vb), &lambda).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((got[i][j] - to_f64(&expected.coeffs()[i][j])).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn refuses_large_circuits() {
        let c = Circuit { r: int(1), init: vec![BlochVector::origin(); 7], gates: vec![], measure: vec![None; 7] };
        assert!(matches!(exact_distribution(&c), Err(SimError::TooManyQubits { .. })));
    }
}

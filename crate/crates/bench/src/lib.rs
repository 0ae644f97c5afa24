//! Fixtures shared by the benchmarks.

use trunsep_core::scalar::ratio;
use trunsep_core::sim::{Circuit, Gate, Rotation};
use trunsep_core::{BlochVector, PauliIndex, Scalar};

/// A three-qubit chain of noisy CZ gates on magic-state inputs, measured in
/// X, Y and Z.
pub fn magic_chain(r: &Scalar) -> Circuit {
    let t = BlochVector::on_sphere_near([1.0, 1.0, 1.0], 1000);
    let lambda = ratio(3, 5);
    Circuit {
        r: r.clone(),
        init: vec![t; 3],
        gates: vec![
            Gate::NoisyCz { qubits: (0, 1), lambda: lambda.clone() },
            Gate::Clifford { qubit: 1, rotation: Rotation::from_name("H").expect("named rotation") },
            Gate::NoisyCz { qubits: (1, 2), lambda },
        ],
        measure: vec![Some(PauliIndex::X), Some(PauliIndex::Y), Some(PauliIndex::Z)],
    }
}

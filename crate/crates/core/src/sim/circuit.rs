use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::pauli::{BlochVector, PauliIndex};
use crate::scalar::Scalar;
use crate::state_sets::{SignedPermutation, TruncatedCube};

/// A proper rotation of the Bloch cube, i.e. a single-qubit Clifford up to
/// phase. Acts on Bloch vectors as `(g v)_k = s_k · v_{π(k)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rotation(SignedPermutation);

struct NamedRotation {
    name: &'static str,
    axis: [i8; 3],
    degrees: u16,
}

const fn named(name: &'static str, axis: [i8; 3], degrees: u16) -> NamedRotation {
    NamedRotation { name, axis, degrees }
}

/// The 24 rotations by name: the identity, quarter/half/three-quarter turns
/// about each axis, half turns about the six edge axes, and third turns about
/// the four body diagonals (axis signs written out, `D+-+` is `(1,-1,1)`).
const NAMED: [NamedRotation; 24] = [
    named("I", [0, 0, 1], 0),
    named("X90", [1, 0, 0], 90),
    named("X180", [1, 0, 0], 180),
    named("X270", [1, 0, 0], 270),
    named("Y90", [0, 1, 0], 90),
    named("Y180", [0, 1, 0], 180),
    named("Y270", [0, 1, 0], 270),
    named("Z90", [0, 0, 1], 90),
    named("Z180", [0, 0, 1], 180),
    named("Z270", [0, 0, 1], 270),
    named("XY180", [1, 1, 0], 180),
    named("X-Y180", [1, -1, 0], 180),
    named("XZ180", [1, 0, 1], 180),
    named("X-Z180", [1, 0, -1], 180),
    named("YZ180", [0, 1, 1], 180),
    named("Y-Z180", [0, 1, -1], 180),
    named("D+++120", [1, 1, 1], 120),
    named("D+++240", [1, 1, 1], 240),
    named("D-++120", [-1, 1, 1], 120),
    named("D-++240", [-1, 1, 1], 240),
    named("D+-+120", [1, -1, 1], 120),
    named("D+-+240", [1, -1, 1], 240),
    named("D++-120", [1, 1, -1], 120),
    named("D++-240", [1, 1, -1], 240),
];

/// Common gate names.
const ALIASES: [(&str, &str); 6] =
    [("X", "X180"), ("Y", "Y180"), ("Z", "Z180"), ("S", "Z90"), ("SDG", "Z270"), ("H", "XZ180")];

/// Rodrigues' formula, rounded to the nearest integer matrix.
fn rotation_matrix(axis: [i8; 3], degrees: u16) -> [[i8; 3]; 3] {
    let norm = axis.iter().map(|&a| f64::from(a).powi(2)).sum::<f64>().sqrt();
    let n = axis.map(|a| f64::from(a) / norm);
    let theta = f64::from(degrees).to_radians();
    let (s, c) = theta.sin_cos();
    let cross = [[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let id = if i == j { 1.0 } else { 0.0 };
            let v = c * id + s * cross[i][j] + (1.0 - c) * n[i] * n[j];
            v.round() as i8
        })
    })
}

/// Name, rotation, axis and angle.
type RotationEntry = (&'static str, Rotation, [f64; 3], f64);

fn table() -> &'static [RotationEntry] {
    static TABLE: OnceLock<Vec<RotationEntry>> = OnceLock::new();
    TABLE.get_or_init(|| {
        NAMED
            .iter()
            .map(|nr| {
                let g = SignedPermutation::from_matrix(rotation_matrix(nr.axis, nr.degrees))
                    .expect("rotation by a cube symmetry is a signed permutation");
                let norm = nr.axis.iter().map(|&a| f64::from(a).powi(2)).sum::<f64>().sqrt();
                (nr.name, Rotation(g), nr.axis.map(|a| f64::from(a) / norm), f64::from(nr.degrees).to_radians())
            })
            .collect()
    })
}

impl Rotation {
    pub const IDENTITY: Self = Self(SignedPermutation::IDENTITY);

    /// All 24, in the order of their names (identity first).
    pub fn all() -> Vec<Self> {
        table().iter().map(|e| e.1).collect()
    }

    pub fn from_permutation(g: SignedPermutation) -> Option<Self> {
        (g.determinant() == 1).then_some(Self(g))
    }

    pub fn from_matrix(m: [[i8; 3]; 3]) -> Option<Self> {
        SignedPermutation::from_matrix(m).and_then(Self::from_permutation)
    }

    /// Accepts the canonical names and the aliases `X Y Z S SDG H`,
    /// case-insensitively.
    pub fn from_name(name: &str) -> Option<Self> {
        let upper = name.to_ascii_uppercase();
        let target = ALIASES.iter().find(|(a, _)| *a == upper).map_or(upper.as_str(), |(_, n)| n);
        table().iter().find(|e| e.0 == target).map(|e| e.1)
    }

    pub fn name(&self) -> &'static str {
        self.entry().0
    }

    fn entry(&self) -> &'static RotationEntry {
        table().iter().find(|e| e.1 == *self).expect("every rotation is named")
    }

    /// Unit axis and angle in radians (right-handed).
    pub fn axis_angle(&self) -> ([f64; 3], f64) {
        let e = self.entry();
        (e.2, e.3)
    }

    pub fn permutation(&self) -> SignedPermutation {
        self.0
    }

    pub fn matrix(&self) -> [[i8; 3]; 3] {
        self.0.matrix()
    }

    pub fn apply(&self, v: &BlochVector) -> BlochVector {
        self.0.apply(v)
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    Clifford { qubit: usize, rotation: Rotation },
    NoisyCz { qubits: (usize, usize), lambda: Scalar },
}

/// A magic-state circuit: product initial states, single-qubit Cliffords
/// and noisy CZ gates, then terminal Pauli measurements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub r: Scalar,
    pub init: Vec<BlochVector>,
    pub gates: Vec<Gate>,
    /// Measurement axis per qubit (`X`, `Y` or `Z`), `None` to skip.
    pub measure: Vec<Option<PauliIndex>>,
}

impl Circuit {
    pub fn qubits(&self) -> usize {
        self.init.len()
    }

    /// Indices of measured qubits, in order.
    pub fn measured(&self) -> Vec<usize> {
        (0..self.measure.len()).filter(|&q| self.measure[q].is_some()).collect()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let n = self.qubits();
        let cube = TruncatedCube::new(self.r.clone())?;
        for (q, v) in self.init.iter().enumerate() {
            if !cube.contains(v) {
                return Err(SimError::InvalidCircuit(format!(
                    "initial state {v} of qubit {q} is outside TRUN({})",
                    self.r
                )));
            }
        }
        if self.measure.len() != n {
            return Err(SimError::InvalidCircuit(format!("{} measurement entries for {n} qubits", self.measure.len())));
        }
        if self.measure.iter().flatten().any(|p| *p == PauliIndex::I) {
            return Err(SimError::InvalidCircuit("measurement axis must be X, Y or Z".into()));
        }
        if self.measured().len() > 63 {
            return Err(SimError::InvalidCircuit("at most 63 measured qubits".into()));
        }
        for (k, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Clifford { qubit, .. } if *qubit >= n => {
                    return Err(SimError::InvalidCircuit(format!("gate {k}: qubit {qubit} out of range")));
                }
                Gate::NoisyCz { qubits: (a, b), lambda } => {
                    if *a >= n || *b >= n {
                        return Err(SimError::InvalidCircuit(format!("gate {k}: qubit out of range")));
                    }
                    if a == b {
                        return Err(SimError::InvalidCircuit(format!("gate {k}: CZ needs two distinct qubits")));
                    }
                    if *lambda < Scalar::from_integer(0.into()) || *lambda > Scalar::from_integer(1.into()) {
                        return Err(SimError::InvalidCircuit(format!("gate {k}: λ = {lambda} outside [0, 1]")));
                    }
                }
                Gate::Clifford { .. } => {}
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let repr: CircuitRepr = serde_json::from_str(text).map_err(|e| SimError::InvalidCircuit(e.to_string()))?;
        let circuit = repr.into_circuit()?;
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitRepr::from(self)).expect("circuit serialises")
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    #[serde(with = "crate::scalar::serde_scalar")]
    r: Scalar,
    qubits: usize,
    init: Vec<BlochVector>,
    #[serde(default)]
    gates: Vec<GateRepr>,
    measure: Vec<Option<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum GateRepr {
    Clifford {
        q: usize,
        rot: RotationRepr,
    },
    Cz {
        q: [usize; 2],
        #[serde(with = "crate::scalar::serde_scalar")]
        lambda: Scalar,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RotationRepr {
    Name(String),
    Matrix([[i8; 3]; 3]),
}

impl CircuitRepr {
    fn into_circuit(self) -> Result<Circuit, SimError> {
        if self.init.len() != self.qubits {
            return Err(SimError::InvalidCircuit(format!(
                "{} initial states for {} qubits",
                self.init.len(),
                self.qubits
            )));
        }
        let gates = self
            .gates
            .into_iter()
            .map(|g| match g {
                GateRepr::Clifford { q, rot } => {
                    let rotation = match &rot {
                        RotationRepr::Name(n) => Rotation::from_name(n),
                        RotationRepr::Matrix(m) => Rotation::from_matrix(*m),
                    }
                    .ok_or_else(|| SimError::InvalidCircuit(format!("unknown rotation {}", describe(&rot))))?;
                    Ok(Gate::Clifford { qubit: q, rotation })
                }
                GateRepr::Cz { q, lambda } => Ok(Gate::NoisyCz { qubits: (q[0], q[1]), lambda }),
            })
            .collect::<Result<_, SimError>>()?;
        let measure = self
            .measure
            .into_iter()
            .map(|m| match m.as_deref() {
                None => Ok(None),
                Some("X" | "x") => Ok(Some(PauliIndex::X)),
                Some("Y" | "y") => Ok(Some(PauliIndex::Y)),
                Some("Z" | "z") => Ok(Some(PauliIndex::Z)),
                Some(other) => Err(SimError::InvalidCircuit(format!("unknown measurement axis {other:?}"))),
            })
            .collect::<Result<_, _>>()?;
        Ok(Circuit { r: self.r, init: self.init, gates, measure })
    }
}

fn describe(rot: &RotationRepr) -> String {
    match rot {
        RotationRepr::Name(n) => format!("{n:?}"),
        RotationRepr::Matrix(m) => format!("{m:?}"),
    }
}

impl From<&Circuit> for CircuitRepr {
    fn from(c: &Circuit) -> Self {
        CircuitRepr {
            r: c.r.clone(),
            qubits: c.qubits(),
            init: c.init.clone(),
            gates: c
                .gates
                .iter()
                .map(|g| match g {
                    Gate::Clifford { qubit, rotation } => {
                        GateRepr::Clifford { q: *qubit, rot: RotationRepr::Name(rotation.name().into()) }
                    }
                    Gate::NoisyCz { qubits, lambda } => {
                        GateRepr::Cz { q: [qubits.0, qubits.1], lambda: lambda.clone() }
                    }
                })
                .collect(),
            measure: c.measure.iter().map(|m| m.map(|p| p.label().to_string())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use std::collections::BTreeSet;

    #[test]
    fn twenty_four_distinct_rotations() {
        let all = Rotation::all();
        assert_eq!(all.len(), 24);
        let set: BTreeSet<_> = all.iter().map(|r| r.permutation()).collect();
        assert_eq!(set.len(), 24);
        let proper: BTreeSet<_> = SignedPermutation::rotations().into_iter().collect();
        assert_eq!(set, proper);
        assert_eq!(all[0], Rotation::IDENTITY);
    }

    #[test]
    fn named_actions() {
        let v = BlochVector::new(int(1), int(2), int(3));
        let s = Rotation::from_name("S").unwrap();
        assert_eq!(s.apply(&v), BlochVector::new(int(-2), int(1), int(3)));
        let h = Rotation::from_name("h").unwrap();
        assert_eq!(h.apply(&v), BlochVector::new(int(3), int(-2), int(1)));
        let c = Rotation::from_name("D+++120").unwrap();
        assert_eq!(c.apply(&v), BlochVector::new(int(3), int(1), int(2)));
        assert_eq!(Rotation::from_name("X").unwrap().name(), "X180");
        assert!(Rotation::from_name("T").is_none());
        assert!(Rotation::from_matrix([[-1, 0, 0], [0, 1, 0], [0, 0, 1]]).is_none());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"r": "1/2", "qubits": 2, "init": [["1","0","0"], ["0","0","1"]],
            "gates": [{"type":"clifford","q":0,"rot":"H"},
                      {"type":"clifford","q":1,"rot":[[0,-1,0],[1,0,0],[0,0,1]]},
                      {"type":"cz","q":[0,1],"lambda":"3/5"}],
            "measure": ["X", null]}"#;
        let c = Circuit::from_json(text).unwrap();
        assert_eq!(c.qubits(), 2);
        assert_eq!(c.gates[1], Gate::Clifford { qubit: 1, rotation: Rotation::from_name("S").unwrap() });
        assert_eq!(c.gates[2], Gate::NoisyCz { qubits: (0, 1), lambda: ratio(3, 5) });
        assert_eq!(c.measured(), vec![0]);
        assert_eq!(Circuit::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn invalid_circuits() {
        let bad = [
            r#"{"r":"1/2","qubits":1,"init":[["1","1","1"]],"measure":["Z"]}"#,
            r#"{"r":"1/2","qubits":2,"init":[["0","0","1"],["0","0","1"]],"gates":[{"type":"cz","q":[0,0],"lambda":"1"}],"measure":["Z","Z"]}"#,
            r#"{"r":"1/2","qubits":1,"init":[["0","0","1"]],"gates":[{"type":"clifford","q":1,"rot":"H"}],"measure":["Z"]}"#,
            r#"{"r":"1/2","qubits":1,"init":[["0","0","1"]],"measure":["W"]}"#,
            r#"{"r":"1/2","qubits":2,"init":[["0","0","1"]],"measure":["Z","Z"]}"#,
            r#"{"r":"0","qubits":1,"init":[["0","0","0"]],"measure":["Z"]}"#,
        ];
        for text in bad {
            assert!(Circuit::from_json(text).is_err(), "{text}");
        }
    }
}

//! Monte Carlo sampling of product states through noisy CZ circuits.
//!
//! Every random choice compares one uniform `u64` draw against
//! `ceil(2^64 · P)` for an exact rational cumulative probability `P`, so each
//! sampled distribution equals the exact one to within `2^-64` per outcome.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::circuit::{Circuit, Gate, Rotation};
use super::table::{cumulative_thresholds, DecompositionTable};
use super::SimError;
use crate::pauli::{BlochVector, Outcome};
use crate::scalar::{probability_threshold, Scalar};

fn draw(thresholds: &[u128], rng: &mut dyn RngCore) -> usize {
    let u = u128::from(rng.next_u64());
    thresholds.iter().position(|&t| u < t).unwrap_or(thresholds.len() - 1)
}

fn bernoulli(threshold: u128, rng: &mut dyn RngCore) -> bool {
    u128::from(rng.next_u64()) < threshold
}

/// Samples an extremum index from the decomposition of `v`.
fn sample_extremum(table: &DecompositionTable, v: &BlochVector, rng: &mut dyn RngCore) -> Result<usize, SimError> {
    if let Some(k) = table.extremum_index(v) {
        return Ok(k);
    }
    let comb = table.cube().decompose(v)?;
    let thresholds = cumulative_thresholds(comb.terms.iter().map(|(w, _)| w));
    let (_, e) = &comb.terms[draw(&thresholds, rng)];
    Ok(table.extremum_index(e).expect("decompositions use extrema"))
}

/// One application of `C_λ` to the product `vA ⊗ vB`, returning a product
/// whose expected operator is exactly `C_λ(vA ⊗ vB)`.
pub fn sample_noisy_cz(
    table: &DecompositionTable,
    va: &BlochVector,
    vb: &BlochVector,
    lambda: &Scalar,
    rng: &mut dyn RngCore,
) -> Result<(BlochVector, BlochVector), SimError> {
    let excess = probability_threshold(&table.excess_probability(lambda)?);
    for v in [va, vb] {
        if !table.cube().contains(v) {
            return Err(SimError::InvalidCircuit(format!("state {v} is outside TRUN({})", table.r())));
        }
    }
    let a = sample_extremum(table, va, rng)?;
    let b = sample_extremum(table, vb, rng)?;
    if bernoulli(excess, rng) {
        return Ok((BlochVector::origin(), BlochVector::origin()));
    }
    let pair = table.pair(a, b);
    let t = &pair.terms[draw(&pair.thresholds, rng)];
    Ok((t.a.clone(), t.b.clone()))
}

/// Outcomes of one shot; `None` for unmeasured qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotResult {
    pub outcomes: Vec<Option<Outcome>>,
}

impl ShotResult {
    /// `+`/`-` per measured qubit, in qubit order.
    pub fn key(&self) -> String {
        self.outcomes.iter().flatten().map(|o| o.symbol()).collect()
    }
}

enum Step {
    Rotate { qubit: usize, map: Vec<u32> },
    Cz { a: usize, b: usize, excess: u128 },
}

/// A circuit bound to a table, with every reachable single-qubit state
/// enumerated up front: the extrema, the origin, and the rotation orbits of
/// the initial states. Shots then only move indices around.
pub struct CompiledCircuit<'t> {
    table: &'t DecompositionTable,
    qubits: usize,
    pool: Vec<BlochVector>,
    init: Vec<u32>,
    steps: Vec<Step>,
    origin: u32,
    /// Pool index of each extremum.
    extremum_pool: Vec<u32>,
    /// Per pool state: cumulative thresholds over extrema indices.
    decompositions: Vec<Vec<(u128, u32)>>,
    /// Per extremal pair: cumulative thresholds over pool index pairs.
    pair_terms: Vec<Vec<(u128, u32, u32)>>,
    /// Per measured qubit: its index and the `+` threshold for each pool state.
    measurements: Vec<(usize, Vec<u128>)>,
}

impl<'t> CompiledCircuit<'t> {
    pub fn new(circuit: &Circuit, table: &'t DecompositionTable) -> Result<Self, SimError> {
        circuit.validate()?;
        if circuit.r != *table.r() {
            return Err(SimError::InvalidCircuit(format!(
                "circuit uses r = {} but the table was built for r = {}",
                circuit.r,
                table.r()
            )));
        }
        let mut pool: Vec<BlochVector> = Vec::new();
        let mut index: HashMap<BlochVector, u32> = HashMap::new();
        fn intern(v: BlochVector, pool: &mut Vec<BlochVector>, index: &mut HashMap<BlochVector, u32>) -> u32 {
            *index.entry(v.clone()).or_insert_with(|| {
                pool.push(v);
                (pool.len() - 1) as u32
            })
        }
        let extremum_pool: Vec<u32> =
            table.extrema().iter().map(|e| intern(e.clone(), &mut pool, &mut index)).collect();
        let origin = intern(BlochVector::origin(), &mut pool, &mut index);
        let init: Vec<u32> = circuit.init.iter().map(|v| intern(v.clone(), &mut pool, &mut index)).collect();
        let rotations = Rotation::all();
        let mut k = 0;
        while k < pool.len() {
            let v = pool[k].clone();
            for rot in &rotations {
                intern(rot.apply(&v), &mut pool, &mut index);
            }
            k += 1;
        }
        let lookup = |v: &BlochVector| -> u32 { *index.get(v).expect("pool is closed under rotations") };

        let mut steps = Vec::with_capacity(circuit.gates.len());
        let mut rotation_maps: HashMap<Rotation, Vec<u32>> = HashMap::new();
        for gate in &circuit.gates {
            match gate {
                Gate::Clifford { qubit, rotation } => {
                    let map = rotation_maps
                        .entry(*rotation)
                        .or_insert_with(|| pool.iter().map(|v| lookup(&rotation.apply(v))).collect())
                        .clone();
                    steps.push(Step::Rotate { qubit: *qubit, map });
                }
                Gate::NoisyCz { qubits: (a, b), lambda } => {
                    let excess = probability_threshold(&table.excess_probability(lambda)?);
                    steps.push(Step::Cz { a: *a, b: *b, excess });
                }
            }
        }

        let mut decompositions = Vec::with_capacity(pool.len());
        for v in &pool {
            let entry = match table.extremum_index(v) {
                Some(e) => vec![(1u128 << 64, e as u32)],
                None => {
                    let comb = table.cube().decompose(v)?;
                    let thresholds = cumulative_thresholds(comb.terms.iter().map(|(w, _)| w));
                    thresholds
                        .into_iter()
                        .zip(&comb.terms)
                        .map(|(t, (_, e))| (t, table.extremum_index(e).expect("extremal") as u32))
                        .collect()
                }
            };
            decompositions.push(entry);
        }

        let n_ext = table.extrema().len();
        let pair_terms = (0..n_ext * n_ext)
            .map(|idx| {
                let pair = table.pair(idx / n_ext, idx % n_ext);
                pair.thresholds
                    .iter()
                    .zip(&pair.terms)
                    .map(|(&t, term)| (t, lookup(&term.a), lookup(&term.b)))
                    .collect()
            })
            .collect();

        let half = Scalar::new(1.into(), 2.into());
        let mut measurements = Vec::new();
        for q in circuit.measured() {
            let axis = circuit.measure[q].expect("measured").index() - 1;
            let thresholds = pool
                .iter()
                .map(|v| {
                    let p = &half * (Scalar::one() + v.axis(axis));
                    if p < Scalar::from_integer(0.into()) || p > Scalar::one() {
                        return Err(SimError::InvalidProbability { state: v.clone(), probability: p });
                    }
                    Ok(probability_threshold(&p))
                })
                .collect::<Result<Vec<_>, _>>()?;
            measurements.push((q, thresholds));
        }

        Ok(Self {
            table,
            qubits: circuit.qubits(),
            pool,
            init,
            steps,
            origin,
            extremum_pool,
            decompositions,
            pair_terms,
            measurements,
        })
    }

    pub fn table(&self) -> &DecompositionTable {
        self.table
    }

    fn sample_extremum(&self, state: u32, rng: &mut dyn RngCore) -> usize {
        let d = &self.decompositions[state as usize];
        if d.len() == 1 {
            return d[0].1 as usize;
        }
        let u = u128::from(rng.next_u64());
        d.iter().find(|(t, _)| u < *t).unwrap_or(&d[d.len() - 1]).1 as usize
    }

    /// Final single-qubit states of one run, before measurement.
    fn evolve(&self, rng: &mut dyn RngCore) -> Vec<u32> {
        let mut state = self.init.clone();
        for step in &self.steps {
            match step {
                Step::Rotate { qubit, map } => state[*qubit] = map[state[*qubit] as usize],
                Step::Cz { a, b, excess } => {
                    let ea = self.sample_extremum(state[*a], rng);
                    let eb = self.sample_extremum(state[*b], rng);
                    if bernoulli(*excess, rng) {
                        state[*a] = self.origin;
                        state[*b] = self.origin;
                    } else {
                        let terms = &self.pair_terms[ea * self.extremum_pool.len() + eb];
                        let u = u128::from(rng.next_u64());
                        let &(_, na, nb) = terms.iter().find(|(t, _, _)| u < *t).unwrap_or(&terms[terms.len() - 1]);
                        state[*a] = na;
                        state[*b] = nb;
                    }
                }
            }
        }
        state
    }

    /// Measured outcomes as a bit mask (bit `k` set for `-` on the `k`-th
    /// measured qubit).
    fn shot_bits(&self, rng: &mut dyn RngCore) -> u64 {
        let state = self.evolve(rng);
        let mut bits = 0u64;
        for (k, (q, thresholds)) in self.measurements.iter().enumerate() {
            if !bernoulli(thresholds[state[*q] as usize], rng) {
                bits |= 1 << k;
            }
        }
        bits
    }

    pub fn shot(&self, rng: &mut dyn RngCore) -> ShotResult {
        let bits = self.shot_bits(rng);
        let mut outcomes = vec![None; self.qubits];
        for (k, (q, _)) in self.measurements.iter().enumerate() {
            outcomes[*q] = Some(if bits >> k & 1 == 0 { Outcome::Plus } else { Outcome::Minus });
        }
        ShotResult { outcomes }
    }

    /// Bloch vectors after the gates of one run; for invariant checks.
    pub fn final_states(&self, rng: &mut dyn RngCore) -> Vec<BlochVector> {
        self.evolve(rng).into_iter().map(|k| self.pool[k as usize].clone()).collect()
    }

    fn key(&self, bits: u64) -> String {
        (0..self.measurements.len()).map(|k| if bits >> k & 1 == 0 { '+' } else { '-' }).collect()
    }
}

pub fn simulate_shot(
    circuit: &Circuit,
    table: &DecompositionTable,
    rng: &mut dyn RngCore,
) -> Result<ShotResult, SimError> {
    Ok(CompiledCircuit::new(circuit, table)?.shot(rng))
}

/// Random stream of shot `index` under `seed`.
pub fn shot_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeEstimate {
    pub outcome: String,
    pub count: u64,
    pub frequency: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub shots: u64,
    pub seed: u64,
    /// Measured qubit indices, in the order outcome strings list them.
    pub measured: Vec<usize>,
    /// Observed outcomes only, sorted by outcome string.
    pub outcomes: Vec<OutcomeEstimate>,
}

impl Estimate {
    pub fn counts(&self) -> BTreeMap<String, u64> {
        self.outcomes.iter().map(|o| (o.outcome.clone(), o.count)).collect()
    }

    pub fn frequency(&self, outcome: &str) -> f64 {
        self.outcomes.iter().find(|o| o.outcome == outcome).map_or(0.0, |o| o.frequency)
    }
}

/// Runs `shots` independent shots; shot `i` uses [`shot_rng`]`(seed, i)`,
/// so the result does not depend on scheduling. `jobs` bounds the worker
/// count (`None`: rayon's default).
pub fn estimate(
    circuit: &Circuit,
    table: &DecompositionTable,
    shots: u64,
    seed: u64,
    jobs: Option<usize>,
) -> Result<Estimate, SimError> {
    if shots == 0 {
        return Err(SimError::InvalidCircuit("shots must be at least 1".into()));
    }
    let compiled = CompiledCircuit::new(circuit, table)?;
    let run = || {
        (0..shots)
            .into_par_iter()
            .fold(BTreeMap::<u64, u64>::new, |mut acc, i| {
                let mut rng = shot_rng(seed, i);
                *acc.entry(compiled.shot_bits(&mut rng)).or_default() += 1;
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            })
    };
    let counts = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SimError::Internal(e.to_string()))?
            .install(run),
        None => run(),
    };
    let total = shots as f64;
    let mut outcomes: Vec<OutcomeEstimate> = counts
        .into_iter()
        .map(|(bits, count)| {
            let f = count as f64 / total;
            OutcomeEstimate {
                outcome: compiled.key(bits),
                count,
                frequency: f,
                std_error: (f * (1.0 - f) / total).sqrt(),
            }
        })
        .collect();
    outcomes.sort_by(|a, b| a.outcome.cmp(&b.outcome));
    Ok(Estimate { shots, seed, measured: circuit.measured(), outcomes })
}

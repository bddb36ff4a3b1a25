//! Schrödinger-style simulation and measurement directly on state diagrams.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::circuit::{Op, QuantumCircuit};
use crate::error::{DdError, Result};
use crate::gates::Gate;
use crate::matrix::OperatorDD;
use crate::package::{Edge, Manager, ManagerConfig, NodeId};
use crate::vector::StateDD;

/// Identifier of the generator behind every seeded run.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Shots are split into this many contiguous shards; shard `j` draws from
/// stream `j` of the seeded generator. Fixed so results do not depend on the
/// number of worker threads.
pub const SHOT_SHARDS: u64 = 16;

/// Bitstring (q_{n−1} leftmost) → count.
pub type Histogram = BTreeMap<String, u64>;

/// The seeded generator for shard `shard`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Number of shots handled by each shard.
pub fn shard_sizes(shots: u64) -> Vec<u64> {
    (0..SHOT_SHARDS)
        .map(|j| shots / SHOT_SHARDS + u64::from(j < shots % SHOT_SHARDS))
        .collect()
}

pub(crate) fn merge(parts: Vec<Histogram>) -> Histogram {
    let mut out = Histogram::new();
    for part in parts {
        for (k, v) in part {
            *out.entry(k).or_insert(0) += v;
        }
    }
    out
}

/// Outcome of measuring every qubit, with the probability of each drawn bit
/// (listed from q_{n−1} down to q₀).
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub outcome: String,
    pub probabilities: Vec<f64>,
}

/// Operator of every gate of `c`, in order, retained in `dd`.
pub(crate) fn gate_operators(dd: &mut Manager, c: &QuantumCircuit) -> Result<Vec<OperatorDD>> {
    let mut out = Vec::with_capacity(c.num_gates());
    for g in c.gates() {
        let u = dd.gate_operator(c.num_qubits, g)?;
        dd.retain(&u);
        out.push(u);
    }
    Ok(out)
}

pub(crate) fn release_all(dd: &mut Manager, ops: &[OperatorDD]) {
    for u in ops {
        let _ = dd.release(u);
    }
}

/// Applies `u` to `s`, moving the reference held on `s` to the result.
pub(crate) fn step(dd: &mut Manager, u: &OperatorDD, s: StateDD) -> Result<StateDD> {
    let next = dd.mat_vec_mul(u, &s)?;
    dd.retain(&next);
    dd.release(&s)?;
    dd.maybe_collect();
    Ok(next)
}

/// Applies every gate of `c` to `initial` in order.
pub fn simulate(dd: &mut Manager, c: &QuantumCircuit, initial: &StateDD) -> Result<StateDD> {
    if c.has_measurements() {
        return Err(DdError::MeasurementPresent(
            "use sampling for circuits with measurements",
        ));
    }
    if c.num_qubits != initial.num_qubits {
        return Err(DdError::QubitMismatch {
            left: c.num_qubits,
            right: initial.num_qubits,
        });
    }
    // The extra hold keeps the caller's initial state alive through collections.
    dd.retain(initial);
    let mut s = *initial;
    dd.retain(&s);
    for g in c.gates() {
        let u = dd.gate_operator(c.num_qubits, g)?;
        s = step(dd, &u, s)?;
    }
    dd.release(&s)?;
    dd.release(initial)?;
    Ok(s)
}

fn check_qubit(q: usize, n: usize) -> Result<()> {
    if q >= n {
        return Err(DdError::QubitOutOfRange {
            qubit: q,
            num_qubits: n,
        });
    }
    Ok(())
}

/// Unnormalized probability masses `(m0, m1)` of qubit `q`: the squared
/// norms of the two halves of the state.
fn qubit_masses(dd: &Manager, s: &StateDD, q: usize) -> Result<(f64, f64)> {
    check_qubit(q, s.num_qubits)?;
    if s.root.is_zero() {
        return Err(DdError::ZeroNorm);
    }
    let up = dd.upstream_probabilities(s.root);
    // Squared path weight flowing into each node, level by level.
    let mut down: FxHashMap<NodeId, f64> = FxHashMap::default();
    down.insert(s.root.node, s.root.weight.value().norm_sqr());
    for _ in q + 1..s.num_qubits {
        let mut next: FxHashMap<NodeId, f64> = FxHashMap::default();
        for (id, mass) in down {
            for e in dd.vector_successors(id) {
                if !e.is_zero() {
                    *next.entry(e.node).or_insert(0.0) += mass * e.weight.value().norm_sqr();
                }
            }
        }
        down = next;
    }
    let (mut m0, mut m1) = (0.0, 0.0);
    for (id, mass) in down {
        let [e0, e1] = dd.vector_successors(id);
        if !e0.is_zero() {
            m0 += mass * e0.weight.value().norm_sqr() * up[&e0.node];
        }
        if !e1.is_zero() {
            m1 += mass * e1.weight.value().norm_sqr() * up[&e1.node];
        }
    }
    if m0 + m1 <= 0.0 {
        return Err(DdError::ZeroNorm);
    }
    Ok((m0, m1))
}

/// Probabilities `(p0, p1)` of reading qubit `q` as 0 or 1.
pub fn qubit_probabilities(dd: &Manager, s: &StateDD, q: usize) -> Result<(f64, f64)> {
    let (m0, m1) = qubit_masses(dd, s, q)?;
    let t = m0 + m1;
    Ok((m0 / t, m1 / t))
}

/// Projects qubit `q` onto `outcome` and renormalizes the result to unit
/// norm by dividing the root weight by the square root of the outcome mass.
pub fn collapse(dd: &mut Manager, s: &StateDD, q: usize, outcome: bool) -> Result<StateDD> {
    let (m0, m1) = qubit_masses(dd, s, q)?;
    let mass = if outcome { m1 } else { m0 };
    if mass <= 0.0 {
        return Err(DdError::ZeroNorm);
    }
    let proj = if outcome { Gate::m1() } else { Gate::m0() };
    let m = dd.single_qubit_gate(s.num_qubits, q, &proj)?;
    let projected = dd.mat_vec_mul(&m, s)?;
    Ok(dd.scale_state(&projected, (1.0 / mass.sqrt()).into()))
}

/// Measures qubit `q`, returning the outcome, its probability and the
/// collapsed state.
pub fn measure_qubit<R: Rng + ?Sized>(
    dd: &mut Manager,
    s: &StateDD,
    q: usize,
    rng: &mut R,
) -> Result<(bool, f64, StateDD)> {
    let (p0, p1) = qubit_probabilities(dd, s, q)?;
    let u: f64 = rng.gen();
    let outcome = u >= p0;
    let p = if outcome { p1 } else { p0 };
    let collapsed = collapse(dd, s, q, outcome)?;
    Ok((outcome, p, collapsed))
}

/// Per-node branch probabilities of one state, reusable across shots.
pub(crate) struct ShotSampler {
    root: Edge,
    num_qubits: usize,
    p0: FxHashMap<NodeId, f64>,
}

impl ShotSampler {
    pub(crate) fn new(dd: &Manager, s: &StateDD) -> Result<ShotSampler> {
        if s.root.is_zero() {
            return Err(DdError::ZeroNorm);
        }
        let up = dd.upstream_probabilities(s.root);
        let mut p0 = FxHashMap::default();
        for &id in up.keys() {
            if id.is_terminal() {
                continue;
            }
            let [e0, e1] = dd.vector_successors(id);
            let m = |e: Edge| {
                if e.is_zero() {
                    0.0
                } else {
                    e.weight.value().norm_sqr() * up[&e.node]
                }
            };
            let (a, b) = (m(e0), m(e1));
            p0.insert(id, a / (a + b));
        }
        Ok(ShotSampler {
            root: s.root,
            num_qubits: s.num_qubits,
            p0,
        })
    }

    /// Walks from the root, drawing one uniform per level.
    pub(crate) fn draw<R: Rng + ?Sized>(&self, dd: &Manager, rng: &mut R) -> MeasurementRecord {
        let mut outcome = String::with_capacity(self.num_qubits);
        let mut probabilities = Vec::with_capacity(self.num_qubits);
        let mut node = self.root.node;
        while !node.is_terminal() {
            let p0 = self.p0[&node];
            let u: f64 = rng.gen();
            let bit = usize::from(u >= p0);
            outcome.push(if bit == 1 { '1' } else { '0' });
            probabilities.push(if bit == 1 { 1.0 - p0 } else { p0 });
            node = dd.vector_successors(node)[bit].node;
        }
        MeasurementRecord {
            outcome,
            probabilities,
        }
    }
}

/// Measures all qubits from q_{n−1} down to q₀.
pub fn measure_all_record<R: Rng + ?Sized>(
    dd: &Manager,
    s: &StateDD,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    Ok(ShotSampler::new(dd, s)?.draw(dd, rng))
}

/// Measures all qubits and returns the bitstring, q_{n−1} leftmost.
pub fn measure_all<R: Rng + ?Sized>(dd: &Manager, s: &StateDD, rng: &mut R) -> Result<String> {
    Ok(measure_all_record(dd, s, rng)?.outcome)
}

/// Draws `shots` full-register measurements of one state.
pub fn sample_state(dd: &Manager, s: &StateDD, shots: u64, seed: u64) -> Result<Histogram> {
    if shots == 0 {
        return Err(DdError::NoShots);
    }
    let sampler = ShotSampler::new(dd, s)?;
    let parts = shard_sizes(shots)
        .into_par_iter()
        .enumerate()
        .map(|(j, count)| {
            let mut rng = shard_rng(seed, j as u64);
            let mut h = Histogram::new();
            for _ in 0..count {
                *h.entry(sampler.draw(dd, &mut rng).outcome).or_insert(0) += 1;
            }
            h
        })
        .collect();
    Ok(merge(parts))
}

/// Runs `c` from `|0…0⟩` and measures every qubit at the end, `shots` times.
/// Measurements inside the circuit collapse the state per shot; trailing
/// measurements are subsumed by the final full-register readout.
pub fn sample(
    c: &QuantumCircuit,
    shots: u64,
    seed: u64,
    config: &ManagerConfig,
) -> Result<Histogram> {
    if shots == 0 {
        return Err(DdError::NoShots);
    }
    c.validate()?;
    if !c.has_mid_circuit_measurement() {
        let mut dd = Manager::new(config.clone());
        let init = dd.zero_state(c.num_qubits)?;
        let unitary = strip_measurements(c);
        let s = simulate(&mut dd, &unitary, &init)?;
        return sample_state(&dd, &s, shots, seed);
    }
    let parts: Result<Vec<Histogram>> = shard_sizes(shots)
        .into_par_iter()
        .enumerate()
        .map(|(j, count)| {
            let mut rng = shard_rng(seed, j as u64);
            let mut dd = Manager::new(config.clone());
            let ops = gate_operators(&mut dd, c)?;
            let mut h = Histogram::new();
            for _ in 0..count {
                let s = run_with_collapse(&mut dd, c, &ops, &mut rng)?;
                let bits = measure_all(&dd, &s, &mut rng)?;
                dd.release(&s)?;
                *h.entry(bits).or_insert(0) += 1;
            }
            release_all(&mut dd, &ops);
            Ok(h)
        })
        .collect();
    Ok(merge(parts?))
}

/// The circuit without measurement operations.
pub(crate) fn strip_measurements(c: &QuantumCircuit) -> QuantumCircuit {
    QuantumCircuit {
        num_qubits: c.num_qubits,
        num_clbits: c.num_clbits,
        ops: c
            .ops
            .iter()
            .filter(|op| !matches!(op, Op::Measure { .. }))
            .cloned()
            .collect(),
    }
}

/// One shot through a circuit with measurements; the returned state is
/// retained.
fn run_with_collapse<R: Rng + ?Sized>(
    dd: &mut Manager,
    c: &QuantumCircuit,
    ops: &[OperatorDD],
    rng: &mut R,
) -> Result<StateDD> {
    let mut s = dd.zero_state(c.num_qubits)?;
    dd.retain(&s);
    let mut next_gate = 0;
    for op in &c.ops {
        match op {
            Op::Gate(_) => {
                s = step(dd, &ops[next_gate], s)?;
                next_gate += 1;
            }
            Op::Barrier(_) => {}
            Op::Measure { qubit, .. } => {
                let (_, _, collapsed) = measure_qubit(dd, &s, *qubit, rng)?;
                dd.retain(&collapsed);
                dd.release(&s)?;
                s = collapsed;
            }
        }
    }
    Ok(s)
}

/// `n`-bit msb-first rendering of a basis index.
pub fn bitstring(index: u64, num_qubits: usize) -> String {
    (0..num_qubits)
        .rev()
        .map(|k| if k < 64 && (index >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

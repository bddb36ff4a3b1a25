//! Equivalence checking of two circuits: by comparing system matrices, by
//! the alternating `G → 𝕀 ← G′` scheme, and by simulation with random
//! basis-state stimuli.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use crate::circuit::{Op, QuantumCircuit};
use crate::error::{DdError, Result};
use crate::matrix::OperatorDD;
use crate::package::Manager;
use crate::simulator::simulate;

pub use crate::circuit::invert_gate;

/// Tolerance on root weights when comparing structurally identical diagrams.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Default fidelity threshold slack for simulation checks.
pub const DEFAULT_EPSILON: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    EquivalentUpToGlobalPhase,
    NonEquivalent,
    ProbablyEquivalent,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::EquivalentUpToGlobalPhase => "equivalent-up-to-global-phase",
            Verdict::NonEquivalent => "non-equivalent",
            Verdict::ProbablyEquivalent => "probably-equivalent",
        }
    }

    /// True for every verdict other than non-equivalent.
    pub fn is_equivalent(self) -> bool {
        self != Verdict::NonEquivalent
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A basis state on which the two circuits disagree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Counterexample {
    pub index: u64,
    pub fidelity: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckStats {
    /// Largest node count of any intermediate diagram.
    pub peak_nodes: usize,
    /// Node count of the final diagram.
    pub final_nodes: usize,
    /// Gates applied from the first circuit.
    pub applied_left: usize,
    /// Inverted gates applied from the second circuit.
    pub applied_right: usize,
    /// Stimuli simulated without finding a difference.
    pub stimuli_passed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceResult {
    pub verdict: Verdict,
    /// `α ∈ [0, 2π)` with `U′ = e^{iα}·U`, for the up-to-phase verdict.
    pub global_phase: Option<f64>,
    pub counterexample: Option<Counterexample>,
    pub stats: CheckStats,
}

/// When to apply gates from which side in [`check_alternating`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ApplicationStrategy {
    /// All of `G`, then all inverted gates of `G′`.
    Naive,
    /// Strict alternation; the longer side drains at the end.
    OneToOne,
    /// `⌈m′/m⌉` inverted `G′` gates per `G` gate.
    #[default]
    Proportional,
    /// The gates of `G′` up to its next barrier per `G` gate.
    BarrierGuided,
}

impl ApplicationStrategy {
    pub const ALL: [ApplicationStrategy; 4] = [
        ApplicationStrategy::Naive,
        ApplicationStrategy::OneToOne,
        ApplicationStrategy::Proportional,
        ApplicationStrategy::BarrierGuided,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ApplicationStrategy::Naive => "naive",
            ApplicationStrategy::OneToOne => "one2one",
            ApplicationStrategy::Proportional => "proportional",
            ApplicationStrategy::BarrierGuided => "barrier",
        }
    }
}

impl FromStr for ApplicationStrategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "naive" => Ok(ApplicationStrategy::Naive),
            "one2one" | "one-to-one" => Ok(ApplicationStrategy::OneToOne),
            "proportional" => Ok(ApplicationStrategy::Proportional),
            "barrier" | "barrier-guided" => Ok(ApplicationStrategy::BarrierGuided),
            other => Err(format!("unknown strategy '{other}'")),
        }
    }
}

fn same_size(a: &QuantumCircuit, b: &QuantumCircuit) -> Result<()> {
    if a.num_qubits != b.num_qubits {
        return Err(DdError::QubitMismatch {
            left: a.num_qubits,
            right: b.num_qubits,
        });
    }
    Ok(())
}

fn no_measurements(c: &QuantumCircuit) -> Result<()> {
    if c.has_measurements() {
        return Err(DdError::MeasurementPresent(
            "equivalence checking needs unitary circuits",
        ));
    }
    c.validate()
}

/// `U = U_{m−1} ⋯ U₀`.
pub fn system_matrix(dd: &mut Manager, c: &QuantumCircuit) -> Result<OperatorDD> {
    no_measurements(c)?;
    let mut u = dd.identity(c.num_qubits)?;
    dd.retain(&u);
    for g in c.gates() {
        let op = dd.gate_operator(c.num_qubits, g)?;
        let next = dd.mat_mat_mul(&op, &u)?;
        dd.retain(&next);
        dd.release(&u)?;
        dd.maybe_collect();
        u = next;
    }
    dd.release(&u)?;
    Ok(u)
}

fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU - 1e-12 {
        0.0
    } else {
        r
    }
}

/// Returns the verdict and, for equivalent operators, `α` with
/// `v = e^{iα}·u` (zero for an exact match).
///
/// Compares two operators built in the same manager (node identity is only
/// meaningful within one manager). Canonical normalization
/// makes the node structure independent of a global phase, so only the root
/// weights need comparing.
pub fn phase_equivalent(u: &OperatorDD, v: &OperatorDD) -> Result<(Verdict, Option<f64>)> {
    if u.num_qubits != v.num_qubits {
        return Err(DdError::QubitMismatch {
            left: u.num_qubits,
            right: v.num_qubits,
        });
    }
    if u.root.node != v.root.node || u.root.is_zero() != v.root.is_zero() {
        return Ok((Verdict::NonEquivalent, None));
    }
    if u.root.is_zero() {
        return Ok((Verdict::Equivalent, Some(0.0)));
    }
    let (wu, wv) = (u.root.weight.value(), v.root.weight.value());
    if (wu - wv).norm() <= ROOT_TOLERANCE {
        return Ok((Verdict::Equivalent, Some(0.0)));
    }
    if (wu.norm() - wv.norm()).abs() <= ROOT_TOLERANCE {
        let alpha = wrap_angle((wv / wu).arg());
        if alpha == 0.0 {
            return Ok((Verdict::Equivalent, Some(0.0)));
        }
        return Ok((Verdict::EquivalentUpToGlobalPhase, Some(alpha)));
    }
    Ok((Verdict::NonEquivalent, None))
}

/// Keeps `α` only for the up-to-phase verdict.
fn phase_only((verdict, alpha): (Verdict, Option<f64>)) -> (Verdict, Option<f64>) {
    match verdict {
        Verdict::EquivalentUpToGlobalPhase => (verdict, alpha),
        _ => (verdict, None),
    }
}

/// Builds both system matrices and compares them.
pub fn check_construct(
    dd: &mut Manager,
    g: &QuantumCircuit,
    g2: &QuantumCircuit,
) -> Result<EquivalenceResult> {
    same_size(g, g2)?;
    let u = system_matrix(dd, g)?;
    dd.retain(&u);
    let v = system_matrix(dd, g2)?;
    dd.release(&u)?;
    let (verdict, global_phase) = phase_only(phase_equivalent(&u, &v)?);
    let (nu, nv) = (dd.node_count(&u), dd.node_count(&v));
    Ok(EquivalenceResult {
        verdict,
        global_phase,
        counterexample: None,
        stats: CheckStats {
            peak_nodes: nu.max(nv),
            final_nodes: nv,
            applied_left: g.num_gates(),
            applied_right: g2.num_gates(),
            stimuli_passed: 0,
        },
    })
}

/// Side from which the next gate is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The order in which a strategy interleaves `G` and `G′`.
pub fn application_schedule(
    g: &QuantumCircuit,
    g2: &QuantumCircuit,
    strategy: ApplicationStrategy,
) -> Vec<Side> {
    let m = g.num_gates();
    let m2 = g2.num_gates();
    let mut out = Vec::with_capacity(m + m2);
    match strategy {
        ApplicationStrategy::Naive => {
            out.extend(std::iter::repeat_n(Side::Left, m));
            out.extend(std::iter::repeat_n(Side::Right, m2));
        }
        ApplicationStrategy::OneToOne => {
            for k in 0..m.max(m2) {
                if k < m {
                    out.push(Side::Left);
                }
                if k < m2 {
                    out.push(Side::Right);
                }
            }
        }
        ApplicationStrategy::Proportional => {
            let ratio = if m == 0 { m2 } else { m2.div_ceil(m) };
            let mut right = 0;
            for _ in 0..m {
                out.push(Side::Left);
                let take = ratio.min(m2 - right);
                out.extend(std::iter::repeat_n(Side::Right, take));
                right += take;
            }
            out.extend(std::iter::repeat_n(Side::Right, m2 - right));
        }
        ApplicationStrategy::BarrierGuided => {
            let mut batches: Vec<usize> = vec![0];
            for op in &g2.ops {
                match op {
                    Op::Gate(_) => *batches.last_mut().unwrap() += 1,
                    Op::Barrier(_) => batches.push(0),
                    Op::Measure { .. } => {}
                }
            }
            batches.retain(|&b| b > 0);
            let mut next = batches.into_iter();
            for _ in 0..m {
                out.push(Side::Left);
                if let Some(b) = next.next() {
                    out.extend(std::iter::repeat_n(Side::Right, b));
                }
            }
            for b in next {
                out.extend(std::iter::repeat_n(Side::Right, b));
            }
        }
    }
    out
}

/// Starting from the identity, multiplies gates of `g` from the left and
/// inverted gates of `g2` from the right in the order chosen by `strategy`,
/// then compares the result with the identity.
pub fn check_alternating(
    dd: &mut Manager,
    g: &QuantumCircuit,
    g2: &QuantumCircuit,
    strategy: ApplicationStrategy,
) -> Result<EquivalenceResult> {
    same_size(g, g2)?;
    no_measurements(g)?;
    no_measurements(g2)?;
    let n = g.num_qubits;
    let id = dd.identity(n)?;
    dd.retain(&id);
    let mut d = id;
    dd.retain(&d);
    let mut stats = CheckStats {
        peak_nodes: dd.node_count(&d),
        ..CheckStats::default()
    };
    let left: Vec<_> = g.gates().collect();
    let right: Vec<_> = g2.gates().collect();
    for side in application_schedule(g, g2, strategy) {
        let next = match side {
            Side::Left => {
                let u = dd.gate_operator(n, left[stats.applied_left])?;
                stats.applied_left += 1;
                dd.mat_mat_mul(&u, &d)?
            }
            Side::Right => {
                let u = dd.gate_operator(n, right[stats.applied_right])?;
                let inv = dd.conjugate_transpose(&u);
                stats.applied_right += 1;
                dd.mat_mat_mul(&d, &inv)?
            }
        };
        dd.retain(&next);
        dd.release(&d)?;
        dd.maybe_collect();
        d = next;
        stats.peak_nodes = stats.peak_nodes.max(dd.node_count(&d));
    }
    stats.final_nodes = dd.node_count(&d);
    let (verdict, global_phase) = phase_only(phase_equivalent(&id, &d)?);
    dd.release(&d)?;
    dd.release(&id)?;
    Ok(EquivalenceResult {
        verdict,
        global_phase,
        counterexample: None,
        stats,
    })
}

/// `num_stimuli` distinct basis indices below `2ⁿ`.
pub fn draw_stimuli(num_qubits: usize, num_stimuli: u64, seed: u64) -> Result<Vec<u64>> {
    let bad = DdError::BadStimulusCount {
        requested: num_stimuli,
        num_qubits,
    };
    if num_stimuli == 0 {
        return Err(bad);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if num_qubits < 32 {
        let space = 1usize << num_qubits;
        if num_stimuli > space as u64 {
            return Err(bad);
        }
        return Ok(rand::seq::index::sample(&mut rng, space, num_stimuli as usize)
            .into_iter()
            .map(|i| i as u64)
            .collect());
    }
    // Huge index space: rejection sampling never runs long.
    let mask = if num_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << num_qubits) - 1
    };
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    while (out.len() as u64) < num_stimuli {
        let i = rand::Rng::gen::<u64>(&mut rng) & mask;
        if seen.insert(i) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Simulates both circuits on distinct random basis states. Any fidelity
/// below `1 − ε` proves non-equivalence; otherwise the circuits are probably
/// equivalent.
pub fn check_simulation(
    dd: &mut Manager,
    g: &QuantumCircuit,
    g2: &QuantumCircuit,
    num_stimuli: u64,
    seed: u64,
    epsilon: f64,
) -> Result<EquivalenceResult> {
    same_size(g, g2)?;
    no_measurements(g)?;
    no_measurements(g2)?;
    let n = g.num_qubits;
    let mut stats = CheckStats::default();
    for i in draw_stimuli(n, num_stimuli, seed)? {
        let s = dd.basis_state(n, i)?;
        dd.retain(&s);
        let a = simulate(dd, g, &s)?;
        dd.retain(&a);
        let b = simulate(dd, g2, &s)?;
        let f = dd.fidelity(&a, &b)?;
        stats.peak_nodes = stats
            .peak_nodes
            .max(dd.node_count(&a))
            .max(dd.node_count(&b));
        dd.release(&a)?;
        dd.release(&s)?;
        if f < 1.0 - epsilon {
            return Ok(EquivalenceResult {
                verdict: Verdict::NonEquivalent,
                global_phase: None,
                counterexample: Some(Counterexample {
                    index: i,
                    fidelity: f,
                }),
                stats,
            });
        }
        stats.stimuli_passed += 1;
    }
    Ok(EquivalenceResult {
        verdict: Verdict::ProbablyEquivalent,
        global_phase: None,
        counterexample: None,
        stats,
    })
}

/// `D = U†·U′`, so that `U·D = U′`.
pub fn difference_matrix(
    dd: &mut Manager,
    g: &QuantumCircuit,
    g2: &QuantumCircuit,
) -> Result<OperatorDD> {
    same_size(g, g2)?;
    let u = system_matrix(dd, g)?;
    dd.retain(&u);
    let v = system_matrix(dd, g2)?;
    dd.retain(&v);
    let ud = dd.conjugate_transpose(&u);
    let d = dd.mat_mat_mul(&ud, &v)?;
    dd.release(&u)?;
    dd.release(&v)?;
    Ok(d)
}

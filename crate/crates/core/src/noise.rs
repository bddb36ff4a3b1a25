//! Noise-aware simulation with Kraus channels: exact density-matrix
//! evolution and Monte-Carlo unravelling over pure states.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::circuit::{GateKind, GateOp, Op, QuantumCircuit};
use crate::error::{DdError, Result};
use crate::gates::Gate;
use crate::matrix::OperatorDD;
use crate::package::{DdKind, Diagram, Edge, Manager, ManagerConfig, NodeId};
use crate::simulator::{
    gate_operators, measure_all, measure_qubit, merge, release_all, sample, shard_rng,
    shard_sizes, step, Histogram,
};
use crate::vector::StateDD;

/// Completeness tolerance for Kraus sets.
pub const CHANNEL_TOLERANCE: f64 = 1e-10;

/// A set of Kraus operators, all `2×2` or all `4×4`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    pub name: String,
    pub operators: Vec<Gate>,
    pub p: f64,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DdError::ProbabilityOutOfRange(p));
    }
    Ok(())
}

fn diag(a: f64, b: f64) -> Gate {
    let z = Complex64::new(0.0, 0.0);
    Gate::from_2x2([[a.into(), z], [z, b.into()]])
}

impl KrausChannel {
    /// `E₀ = diag(1, √(1−p))`, `E₁ = √p·|0⟩⟨1|`.
    pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
        check_p(p)?;
        let z = Complex64::new(0.0, 0.0);
        let e1 = Gate::from_2x2([[z, p.sqrt().into()], [z, z]]);
        Ok(KrausChannel {
            name: "amplitude_damping".into(),
            operators: vec![diag(1.0, (1.0 - p).sqrt()), e1],
            p,
        })
    }

    /// `{√(1−3p/4)·I, √(p/4)·X, √(p/4)·Y, √(p/4)·Z}`.
    pub fn depolarizing(p: f64) -> Result<KrausChannel> {
        check_p(p)?;
        let a = Complex64::from((1.0 - 0.75 * p).sqrt());
        let b = Complex64::from((p / 4.0).sqrt());
        Ok(KrausChannel {
            name: "depolarizing".into(),
            operators: vec![
                Gate::i().scaled(a),
                Gate::x().scaled(b),
                Gate::y().scaled(b),
                Gate::z().scaled(b),
            ],
            p,
        })
    }

    /// `{√(1−p)·I, √p·Z}`.
    pub fn phase_flip(p: f64) -> Result<KrausChannel> {
        check_p(p)?;
        Ok(KrausChannel {
            name: "phase_flip".into(),
            operators: vec![
                Gate::i().scaled((1.0 - p).sqrt().into()),
                Gate::z().scaled(p.sqrt().into()),
            ],
            p,
        })
    }

    /// Builds a channel by name (`amplitude_damping`, `depolarizing`, `phase_flip`).
    pub fn by_name(name: &str, p: f64) -> Result<KrausChannel> {
        match name {
            "amplitude_damping" | "damping" => KrausChannel::amplitude_damping(p),
            "depolarizing" | "depolarising" => KrausChannel::depolarizing(p),
            "phase_flip" | "dephasing" => KrausChannel::phase_flip(p),
            other => Err(DdError::InvalidChannel(format!("unknown channel '{other}'"))),
        }
    }

    /// Number of qubits each operator acts on.
    pub fn arity(&self) -> usize {
        self.operators.first().map_or(1, Gate::arity)
    }
}

/// Entries where `Σ Eᵢ†Eᵢ` departs from the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelViolation {
    pub channel: String,
    /// `(row, col, 𝕀 − Σ Eᵢ†Eᵢ)` for every entry off by more than the tolerance.
    pub deficits: Vec<(usize, usize, Complex64)>,
    pub message: Option<String>,
}

impl fmt::Display for ChannelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "channel '{}' violates completeness", self.channel)?;
        if let Some(m) = &self.message {
            write!(f, ": {m}")?;
        }
        for (r, c, d) in &self.deficits {
            write!(f, "; deficit {:.6}", d.re)?;
            if d.im != 0.0 {
                write!(f, "{:+.6}i", d.im)?;
            }
            write!(f, " at ({r},{c})")?;
        }
        Ok(())
    }
}

/// Checks `Σ Eᵢ†Eᵢ = 𝕀` within [`CHANNEL_TOLERANCE`].
pub fn validate_channel(c: &KrausChannel) -> std::result::Result<(), ChannelViolation> {
    let fail = |message: &str| ChannelViolation {
        channel: c.name.clone(),
        deficits: vec![],
        message: Some(message.into()),
    };
    let Some(first) = c.operators.first() else {
        return Err(fail("no operators"));
    };
    let d = first.dim();
    if c.operators.iter().any(|e| e.dim() != d) {
        return Err(fail("operators differ in dimension"));
    }
    let mut sum = Gate::identity_of(d).scaled(Complex64::new(0.0, 0.0));
    for e in &c.operators {
        let t = e.adjoint().matmul(e);
        let data: Vec<Complex64> = sum.entries().iter().zip(t.entries()).map(|(a, b)| a + b).collect();
        sum = Gate::new(data).map_err(|e| fail(&e.to_string()))?;
    }
    let mut deficits = Vec::new();
    for r in 0..d {
        for col in 0..d {
            let want = if r == col { 1.0 } else { 0.0 };
            let dev = Complex64::new(want, 0.0) - sum.get(r, col);
            if dev.norm() > CHANNEL_TOLERANCE {
                deficits.push((r, col, dev));
            }
        }
    }
    if deficits.is_empty() {
        Ok(())
    } else {
        Err(ChannelViolation {
            channel: c.name.clone(),
            deficits,
            message: None,
        })
    }
}

/// Which gates fire an attachment.
#[derive(Clone, Debug, PartialEq)]
pub enum Trigger {
    All,
    Kinds(Vec<GateKind>),
}

/// Which of the touched qubits an attachment applies to.
#[derive(Clone, Debug, PartialEq)]
pub enum Scope {
    All,
    Qubits(Vec<usize>),
}

impl Scope {
    fn contains(&self, q: usize) -> bool {
        match self {
            Scope::All => true,
            Scope::Qubits(qs) => qs.contains(&q),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseAttachment {
    pub trigger: Trigger,
    pub scope: Scope,
    pub channel: KrausChannel,
}

/// A list of channel attachments. After every gate, each attachment whose
/// trigger matches fires once per touched qubit (controls and targets) that
/// lies in its scope. Two-qubit channels fire once on the first two touched
/// qubits when both are in scope.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NoiseModel {
    pub attachments: Vec<NoiseAttachment>,
}

impl NoiseModel {
    pub fn new() -> Self {
        NoiseModel::default()
    }

    pub fn is_empty(&self) -> bool {
        self.attachments.is_empty()
    }

    pub fn attach(&mut self, trigger: Trigger, scope: Scope, channel: KrausChannel) -> &mut Self {
        self.attachments.push(NoiseAttachment {
            trigger,
            scope,
            channel,
        });
        self
    }

    /// Validates every channel and every scoped qubit against an `n`-qubit register.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for a in &self.attachments {
            check_p(a.channel.p)?;
            validate_channel(&a.channel).map_err(|v| DdError::InvalidChannel(v.to_string()))?;
            if let Scope::Qubits(qs) = &a.scope {
                if let Some(&q) = qs.iter().find(|&&q| q >= num_qubits) {
                    return Err(DdError::QubitOutOfRange {
                        qubit: q,
                        num_qubits,
                    });
                }
            }
        }
        Ok(())
    }

    /// `(attachment index, target qubits)` for every channel fired by `g`.
    pub fn firings(&self, g: &GateOp) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for (i, a) in self.attachments.iter().enumerate() {
            let fires = match &a.trigger {
                Trigger::All => true,
                Trigger::Kinds(ks) => ks.contains(&g.kind),
            };
            if !fires {
                continue;
            }
            let touched: Vec<usize> = g.qubits().filter(|&q| a.scope.contains(q)).collect();
            if a.channel.arity() == 2 {
                let all: Vec<usize> = g.qubits().collect();
                if all.len() >= 2 && a.scope.contains(all[0]) && a.scope.contains(all[1]) {
                    out.push((i, vec![all[0], all[1]]));
                }
            } else {
                out.extend(touched.into_iter().map(|q| (i, vec![q])));
            }
        }
        out
    }
}

fn parse_gate_kinds(list: &str) -> std::result::Result<Vec<GateKind>, String> {
    let mut kinds = Vec::new();
    for name in list.split(',').map(str::trim) {
        let k = match name {
            "cx" | "ccx" => GateKind::X,
            "cz" => GateKind::Z,
            "cp" => GateKind::Phase,
            other => other.parse::<GateKind>().map_err(|e| e.to_string())?,
        };
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    Ok(kinds)
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let bad = || format!("bad complex number '{s}'");
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(Complex64::from).map_err(|_| bad());
    };
    // split "a+bi" at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coef = |x: &str| -> std::result::Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            v => v.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(
            body[..k].parse::<f64>().map_err(|_| bad())?,
            coef(&body[k..])?,
        )),
        None => Ok(Complex64::new(0.0, coef(body)?)),
    }
}

fn parse_operators(text: &str) -> std::result::Result<Vec<Gate>, String> {
    text.split('|')
        .map(|m| {
            let entries = m
                .split(',')
                .map(parse_complex)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Gate::new(entries).map_err(|e| e.to_string())
        })
        .collect()
}

/// Error from reading a noise-model document.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ModelParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ModelParseError {}

impl FromStr for NoiseModel {
    type Err = ModelParseError;

    /// One attachment per line:
    /// `channel=<name> p=<float> on=<all|i,j,…> after=<all|kind,…>`.
    /// `channel=kraus ops=<m>|<m>…` gives explicit operators, each a
    /// row-major comma list of 4 or 16 complex entries (`0.5`, `-i`, `0.1+0.2i`).
    /// `#` starts a comment. `on` and `after` default to `all`.
    fn from_str(text: &str) -> std::result::Result<NoiseModel, ModelParseError> {
        let mut model = NoiseModel::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| ModelParseError {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields: FxHashMap<&str, &str> = FxHashMap::default();
            for tok in line.split_whitespace() {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected key=value, got '{tok}'")))?;
                if fields.insert(k, v).is_some() {
                    return Err(err(format!("duplicate key '{k}'")));
                }
            }
            for k in fields.keys() {
                if !matches!(*k, "channel" | "p" | "on" | "after" | "ops") {
                    return Err(err(format!("unknown key '{k}'")));
                }
            }
            let name = *fields
                .get("channel")
                .ok_or_else(|| err("missing 'channel'".into()))?;
            let p = match fields.get("p") {
                Some(v) => v
                    .parse::<f64>()
                    .map_err(|_| err(format!("bad probability '{v}'")))?,
                None if name == "kraus" => 0.0,
                None => return Err(err("missing 'p'".into())),
            };
            let channel = if name == "kraus" {
                let ops = fields
                    .get("ops")
                    .ok_or_else(|| err("channel=kraus needs ops=".into()))?;
                KrausChannel {
                    name: "kraus".into(),
                    operators: parse_operators(ops).map_err(err)?,
                    p,
                }
            } else {
                KrausChannel::by_name(name, p).map_err(|e| err(e.to_string()))?
            };
            let scope = match fields.get("on").copied().unwrap_or("all") {
                "all" => Scope::All,
                list => Scope::Qubits(
                    list.split(',')
                        .map(|q| q.trim().trim_start_matches('q').parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| err(format!("bad qubit list '{list}'")))?,
                ),
            };
            let trigger = match fields.get("after").copied().unwrap_or("all") {
                "all" => Trigger::All,
                list => Trigger::Kinds(parse_gate_kinds(list).map_err(err)?),
            };
            model.attach(trigger, scope, channel);
        }
        Ok(model)
    }
}

/// A density matrix stored on matrix nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DensityDD {
    pub root: Edge,
    pub num_qubits: usize,
}

impl Diagram for DensityDD {
    fn root(&self) -> Edge {
        self.root
    }
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    fn kind() -> DdKind {
        DdKind::Matrix
    }
}

impl DensityDD {
    /// The same diagram viewed as an operator, for read-back and algebra.
    pub fn as_operator(&self) -> OperatorDD {
        OperatorDD {
            root: self.root,
            num_qubits: self.num_qubits,
        }
    }

    fn from_operator(u: OperatorDD) -> DensityDD {
        DensityDD {
            root: u.root,
            num_qubits: u.num_qubits,
        }
    }
}

impl Manager {
    /// `|v⟩⟨v|`.
    pub fn density_from_state(&mut self, v: &StateDD) -> Result<DensityDD> {
        if v.root.is_zero() {
            return Err(DdError::ZeroNorm);
        }
        let r = self.outer_rec(v.root.node, v.root.node);
        let root = self.scale(r, Complex64::from(v.root.weight.value().norm_sqr()));
        Ok(DensityDD {
            root,
            num_qubits: v.num_qubits,
        })
    }

    /// `|a⟩⟨b|` on node level.
    fn outer_rec(&mut self, a: NodeId, b: NodeId) -> Edge {
        if a.is_terminal() {
            return Edge::ONE;
        }
        if let Some(r) = self.caches.outer.get(&(a, b)) {
            return r;
        }
        let na = self.vector_successors(a);
        let nb = self.vector_successors(b);
        let level = self.vector_level(a);
        let mut succ = [Edge::ZERO; 4];
        for r in 0..2 {
            for c in 0..2 {
                let (ea, eb) = (na[r], nb[c]);
                if ea.is_zero() || eb.is_zero() {
                    continue;
                }
                let sub = self.outer_rec(ea.node, eb.node);
                succ[2 * r + c] = self.scale(sub, ea.weight.value() * eb.weight.value().conj());
            }
        }
        let e = self.make_mnode(level, succ);
        self.caches.outer.insert((a, b), e);
        e
    }

    /// `u ρ u†`.
    pub fn apply_gate_density(&mut self, rho: &DensityDD, u: &OperatorDD) -> Result<DensityDD> {
        let ud = self.conjugate_transpose(u);
        let left = self.mat_mat_mul(u, &rho.as_operator())?;
        Ok(DensityDD::from_operator(self.mat_mat_mul(&left, &ud)?))
    }

    /// Lifts one Kraus operator onto `targets` of an `n`-qubit register.
    pub(crate) fn lift_kraus(&mut self, n: usize, e: &Gate, targets: &[usize]) -> Result<OperatorDD> {
        match (e.arity(), targets) {
            (1, [q]) => self.single_qubit_gate(n, *q, e),
            (2, [a, b]) => self.two_qubit_gate(n, *a, *b, e),
            _ => Err(DdError::InvalidChannel(format!(
                "{}-qubit operator applied to {} target(s)",
                e.arity(),
                targets.len()
            ))),
        }
    }

    /// `Σᵢ Eᵢ ρ Eᵢ†` with every `Eᵢ` lifted onto `targets`.
    pub fn apply_channel(
        &mut self,
        rho: &DensityDD,
        c: &KrausChannel,
        targets: &[usize],
    ) -> Result<DensityDD> {
        validate_channel(c).map_err(|v| DdError::InvalidChannel(v.to_string()))?;
        let mut acc = Edge::ZERO;
        for e in &c.operators {
            let lifted = self.lift_kraus(rho.num_qubits, e, targets)?;
            let term = self.apply_gate_density(rho, &lifted)?;
            acc = self.madd(acc, term.root);
        }
        Ok(DensityDD {
            root: acc,
            num_qubits: rho.num_qubits,
        })
    }

    /// Sum of the diagonal.
    pub fn density_trace(&self, rho: &DensityDD) -> f64 {
        self.trace(&rho.as_operator()).re
    }

    /// The `2ⁿ` diagonal entries, read along diagonal paths only.
    pub fn diagonal_probabilities(&self, rho: &DensityDD) -> Result<Vec<f64>> {
        let limit = self.config().dense_vector_limit;
        if rho.num_qubits > limit {
            return Err(DdError::DenseLimit {
                limit,
                num_qubits: rho.num_qubits,
            });
        }
        let mut out = vec![0.0; 1usize << rho.num_qubits];
        self.fill_diagonal(rho.root, Complex64::new(1.0, 0.0), 0, &mut out);
        Ok(out)
    }

    fn fill_diagonal(&self, e: Edge, acc: Complex64, offset: usize, out: &mut [f64]) {
        if e.is_zero() {
            return;
        }
        let w = acc * e.weight.value();
        if e.is_terminal() {
            out[offset] = w.re;
            return;
        }
        let s = self.matrix_successors(e.node);
        let stride = 1usize << self.matrix_level(e.node);
        self.fill_diagonal(s[0], w, offset, out);
        self.fill_diagonal(s[3], w, offset + stride, out);
    }
}

/// Evolves `|0…0⟩⟨0…0|` through `c`, applying the model's channels after
/// each triggering gate. Trailing measurements are ignored.
pub fn deterministic_simulate(
    dd: &mut Manager,
    c: &QuantumCircuit,
    model: &NoiseModel,
) -> Result<DensityDD> {
    c.validate()?;
    model.validate(c.num_qubits)?;
    if c.has_mid_circuit_measurement() {
        return Err(DdError::MeasurementPresent(
            "density evolution supports trailing measurements only",
        ));
    }
    let init = dd.zero_state(c.num_qubits)?;
    let mut rho = dd.density_from_state(&init)?;
    dd.retain(&rho);
    for g in c.gates() {
        let u = dd.gate_operator(c.num_qubits, g)?;
        let mut next = dd.apply_gate_density(&rho, &u)?;
        for (i, targets) in model.firings(g) {
            next = dd.apply_channel(&next, &model.attachments[i].channel, &targets)?;
        }
        dd.retain(&next);
        dd.release(&rho)?;
        dd.maybe_collect();
        rho = next;
    }
    dd.release(&rho)?;
    Ok(rho)
}

/// Per-manager cache of lifted Kraus operators.
struct LiftedChannels {
    map: FxHashMap<(usize, Vec<usize>), Vec<OperatorDD>>,
}

impl LiftedChannels {
    fn get(
        &mut self,
        dd: &mut Manager,
        model: &NoiseModel,
        n: usize,
        key: (usize, Vec<usize>),
    ) -> Result<Vec<OperatorDD>> {
        if let Some(v) = self.map.get(&key) {
            return Ok(v.clone());
        }
        let mut ops = Vec::new();
        for e in &model.attachments[key.0].channel.operators {
            let u = dd.lift_kraus(n, e, &key.1)?;
            dd.retain(&u);
            ops.push(u);
        }
        self.map.insert(key, ops.clone());
        Ok(ops)
    }

    fn release(self, dd: &mut Manager) {
        for ops in self.map.values() {
            release_all(dd, ops);
        }
    }
}

/// Picks one Kraus branch with probability `‖Eᵢφ‖²/‖φ‖²` and returns the
/// renormalized `Eᵢφ`. The input keeps its reference; the output is retained.
fn sample_branch<R: Rng + ?Sized>(
    dd: &mut Manager,
    ops: &[OperatorDD],
    s: &StateDD,
    rng: &mut R,
) -> Result<StateDD> {
    let total = dd.norm_sqr(s);
    if total <= 0.0 {
        return Err(DdError::ZeroNorm);
    }
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    let mut chosen: Option<(StateDD, f64)> = None;
    for e in ops {
        let branch = dd.mat_vec_mul(e, s)?;
        let mass = dd.norm_sqr(&branch);
        if mass <= 0.0 {
            continue;
        }
        cum += mass / total;
        chosen = Some((branch, mass));
        if u < cum {
            break;
        }
    }
    let (branch, mass) = chosen.ok_or(DdError::ZeroNorm)?;
    let out = dd.scale_state(&branch, Complex64::from(1.0 / mass.sqrt()));
    dd.retain(&out);
    Ok(out)
}

/// Monte-Carlo unravelling: each shot runs the pure-state simulator, samples
/// one Kraus branch per channel firing and ends with a full-register
/// measurement. Shots are sharded exactly as in [`sample`], so a model that
/// never fires reproduces `sample` for the same seed.
pub fn stochastic_simulate(
    c: &QuantumCircuit,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
    config: &ManagerConfig,
) -> Result<Histogram> {
    if shots == 0 {
        return Err(DdError::NoShots);
    }
    c.validate()?;
    model.validate(c.num_qubits)?;
    if c.gates().all(|g| model.firings(g).is_empty()) {
        return sample(c, shots, seed, config);
    }
    let parts: Result<Vec<Histogram>> = shard_sizes(shots)
        .into_par_iter()
        .enumerate()
        .map(|(j, count)| {
            let mut rng = shard_rng(seed, j as u64);
            let mut dd = Manager::new(config.clone());
            let gates = gate_operators(&mut dd, c)?;
            let mut lifted = LiftedChannels {
                map: FxHashMap::default(),
            };
            let mut h = Histogram::new();
            for _ in 0..count {
                let mut s = dd.zero_state(c.num_qubits)?;
                dd.retain(&s);
                let mut k = 0;
                for op in &c.ops {
                    match op {
                        Op::Gate(g) => {
                            s = step(&mut dd, &gates[k], s)?;
                            k += 1;
                            for key in model.firings(g) {
                                let ops = lifted.get(&mut dd, model, c.num_qubits, key)?;
                                let next = sample_branch(&mut dd, &ops, &s, &mut rng)?;
                                dd.release(&s)?;
                                s = next;
                            }
                        }
                        Op::Barrier(_) => {}
                        Op::Measure { qubit, .. } => {
                            if k < gates.len() {
                                let (_, _, t) = measure_qubit(&mut dd, &s, *qubit, &mut rng)?;
                                dd.retain(&t);
                                dd.release(&s)?;
                                s = t;
                            }
                        }
                    }
                }
                let bits = measure_all(&dd, &s, &mut rng)?;
                dd.release(&s)?;
                dd.maybe_collect();
                *h.entry(bits).or_insert(0) += 1;
            }
            lifted.release(&mut dd);
            release_all(&mut dd, &gates);
            Ok(h)
        })
        .collect();
    Ok(merge(parts?))
}

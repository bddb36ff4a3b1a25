//! `qdd` command-line driver: simulation, noise, verification and DOT export.
//!
//! Every command prints one JSON report on stdout. Exit codes: 0 success,
//! 1 non-equivalent, 2 unreadable or unparsable input, 3 size limit,
//! 4 invalid noise channel, 5 any other engine error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qdd::equivalence::{
    check_alternating, check_construct, check_simulation, ApplicationStrategy, EquivalenceResult,
    Verdict, DEFAULT_EPSILON, ROOT_TOLERANCE,
};
use qdd::noise::{
    deterministic_simulate, stochastic_simulate, validate_channel, ChannelViolation,
    CHANNEL_TOLERANCE,
};
use qdd::simulator::{bitstring, sample, sample_state, simulate, RNG_ALGORITHM, SHOT_SHARDS};
use qdd::{
    dot, qasm, DdError, GateKind, GateOp, Manager, ManagerConfig, NoiseModel, Op, QuantumCircuit,
    VectorNormScheme,
};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Largest register whose amplitudes `sim --amplitudes` will print.
const AMPLITUDE_LIMIT: usize = 20;

#[derive(Parser)]
#[command(name = "qdd", version, about = "Decision-diagram quantum circuit tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a circuit and sample it or dump its amplitudes.
    Sim(SimArgs),
    /// Simulate a circuit under a noise model.
    Noise(NoiseArgs),
    /// Check two circuits for equivalence.
    Verify(VerifyArgs),
    /// Write a decision diagram as Graphviz DOT.
    Dot(DotArgs),
}

#[derive(Args)]
struct SimArgs {
    circuit: PathBuf,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial basis state, most significant qubit first.
    #[arg(long)]
    initial: Option<String>,
    /// Print the final state vector instead of sampling.
    #[arg(long)]
    amplitudes: bool,
    #[arg(long, default_value = "l2")]
    scheme: VectorNormScheme,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseMode {
    Stochastic,
    Deterministic,
}

#[derive(Args)]
struct NoiseArgs {
    circuit: PathBuf,
    /// Noise-model file; without one the run is noiseless.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "stochastic")]
    mode: NoiseMode,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Construct,
    Alternate,
    Simulate,
}

#[derive(Args)]
struct VerifyArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long, value_enum, default_value = "alternate")]
    method: Method,
    #[arg(long, default_value = "proportional")]
    strategy: ApplicationStrategy,
    /// Random basis states for `--method simulate` (default min(16, 2^n)).
    #[arg(long)]
    stimuli: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DotArgs {
    circuit: PathBuf,
    /// Render the final state from `--initial` (the default).
    #[arg(long, conflicts_with = "matrix")]
    state: bool,
    /// Render the circuit's system matrix.
    #[arg(long)]
    matrix: bool,
    #[arg(long)]
    initial: Option<String>,
    #[arg(long, default_value = "l2")]
    scheme: VectorNormScheme,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Serialize)]
struct Digest256 {
    role: &'static str,
    sha256: String,
}

#[derive(Serialize)]
struct Engine {
    scheme: &'static str,
    tolerance: f64,
    root_tolerance: f64,
    channel_tolerance: f64,
    epsilon: Option<f64>,
    rng: &'static str,
    shot_shards: u64,
    nodes: Option<Value>,
}

#[derive(Serialize)]
struct RunReport {
    schema: u32,
    command: &'static str,
    inputs: Vec<Digest256>,
    seed: u64,
    wall_time_ms: f64,
    result: Value,
    engine: Engine,
}

/// A failed run: exit code, message for stderr and an optional JSON result.
struct Failure {
    code: u8,
    message: String,
    result: Option<Value>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            result: None,
        }
    }
}

impl From<DdError> for Failure {
    fn from(e: DdError) -> Self {
        let code = match e {
            DdError::DenseLimit { .. } => 3,
            DdError::InvalidChannel(_) | DdError::ProbabilityOutOfRange(_) => 4,
            DdError::QubitMismatch { .. }
            | DdError::QubitOutOfRange { .. }
            | DdError::MeasurementPresent(_)
            | DdError::BadStimulusCount { .. }
            | DdError::NoShots => 2,
            _ => 5,
        };
        Failure::new(code, e.to_string())
    }
}

/// Report fields shared by all commands, filled in as a run proceeds.
struct Run {
    command: &'static str,
    inputs: Vec<Digest256>,
    seed: u64,
    engine: Engine,
}

impl Run {
    fn new(command: &'static str, seed: u64) -> Self {
        Run {
            command,
            inputs: Vec::new(),
            seed,
            engine: Engine {
                scheme: VectorNormScheme::default().name(),
                tolerance: ManagerConfig::default().tolerance,
                root_tolerance: ROOT_TOLERANCE,
                channel_tolerance: CHANNEL_TOLERANCE,
                epsilon: None,
                rng: RNG_ALGORITHM,
                shot_shards: SHOT_SHARDS,
                nodes: None,
            },
        }
    }

    fn read(&mut self, role: &'static str, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = std::fs::read(path)
            .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
        self.inputs.push(Digest256 {
            role,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(bytes)
    }

    fn circuit(&mut self, role: &'static str, path: &Path) -> Result<QuantumCircuit, Failure> {
        let bytes = self.read(role, path)?;
        qasm::parse_bytes(&bytes).map_err(|e| {
            let lines: Vec<String> = e.0.iter().map(|d| format!("{}:{d}", path.display())).collect();
            Failure::new(2, lines.join("\n"))
        })
    }

    fn config(&mut self, scheme: VectorNormScheme) -> ManagerConfig {
        self.engine.scheme = scheme.name();
        ManagerConfig {
            scheme,
            ..ManagerConfig::default()
        }
    }

    fn node_stats(&mut self, dd: &Manager, final_nodes: usize) {
        let s = dd.stats();
        self.engine.nodes = Some(json!({
            "final": final_nodes,
            "peak_vector": s.peak_vector_nodes,
            "peak_matrix": s.peak_matrix_nodes,
        }));
    }

    fn finish(self, started: Instant, result: Value) -> RunReport {
        RunReport {
            schema: 1,
            command: self.command,
            inputs: self.inputs,
            seed: self.seed,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            result,
            engine: self.engine,
        }
    }
}

/// Parses an msb-first bitstring of exactly `n` characters.
fn basis_index(bits: Option<&str>, n: usize) -> Result<u64, Failure> {
    let Some(bits) = bits else { return Ok(0) };
    if bits.len() != n || n > 64 || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Failure::new(
            2,
            format!("--initial must be {n} characters of 0/1, got '{bits}'"),
        ));
    }
    Ok(if n == 0 { 0 } else { u64::from_str_radix(bits, 2).unwrap() })
}

fn without_measurements(c: &QuantumCircuit) -> Result<QuantumCircuit, Failure> {
    if c.has_mid_circuit_measurement() {
        return Err(Failure::new(2, "circuit measures before its last gate"));
    }
    let mut out = c.clone();
    out.ops.retain(|op| !matches!(op, Op::Measure { .. }));
    Ok(out)
}

/// `c` preceded by X gates that turn `|0…0⟩` into `|index⟩`.
fn prepared(c: &QuantumCircuit, index: u64) -> QuantumCircuit {
    let mut out = QuantumCircuit::new(c.num_qubits);
    out.num_clbits = c.num_clbits;
    for q in (0..c.num_qubits.min(64)).filter(|q| (index >> q) & 1 == 1) {
        out.ops.push(Op::Gate(GateOp::single(GateKind::X, q)));
    }
    out.ops.extend(c.ops.iter().cloned());
    out
}

fn amplitude_map(amps: &[Complex64], n: usize) -> Value {
    let m: BTreeMap<String, [f64; 2]> = amps
        .iter()
        .enumerate()
        .map(|(i, a)| (bitstring(i as u64, n), [a.re, a.im]))
        .collect();
    json!(m)
}

fn cmd_sim(a: &SimArgs, run: &mut Run) -> Result<Value, Failure> {
    let c = run.circuit("circuit", &a.circuit)?;
    let n = c.num_qubits;
    let index = basis_index(a.initial.as_deref(), n)?;
    let config = run.config(a.scheme);
    if a.amplitudes {
        if n > AMPLITUDE_LIMIT {
            return Err(Failure::new(
                3,
                format!("amplitude dump is limited to {AMPLITUDE_LIMIT} qubits, circuit has {n}"),
            ));
        }
        let unitary = without_measurements(&c)?;
        let mut dd = Manager::new(config);
        let init = dd.basis_state(n, index)?;
        let s = simulate(&mut dd, &unitary, &init)?;
        run.node_stats(&dd, dd.node_count(&s));
        let amps = dd.to_amplitudes(&s)?;
        return Ok(json!({ "qubits": n, "amplitudes": amplitude_map(&amps, n) }));
    }
    let histogram = if c.has_mid_circuit_measurement() {
        sample(&prepared(&c, index), a.shots, a.seed, &config)?
    } else {
        let unitary = without_measurements(&c)?;
        let mut dd = Manager::new(config);
        let init = dd.basis_state(n, index)?;
        let s = simulate(&mut dd, &unitary, &init)?;
        run.node_stats(&dd, dd.node_count(&s));
        sample_state(&dd, &s, a.shots, a.seed)?
    };
    Ok(json!({ "qubits": n, "shots": a.shots, "histogram": histogram }))
}

fn violation_json(v: &ChannelViolation) -> Value {
    json!({
        "channel": v.channel,
        "message": v.message,
        "deficits": v.deficits.iter().map(|(r, c, d)| json!([r, c, d.re, d.im])).collect::<Vec<_>>(),
        "report": v.to_string(),
    })
}

fn cmd_noise(a: &NoiseArgs, run: &mut Run) -> Result<Value, Failure> {
    let c = run.circuit("circuit", &a.circuit)?;
    let model = match &a.model {
        None => NoiseModel::new(),
        Some(path) => {
            let bytes = run.read("model", path)?;
            let text = String::from_utf8(bytes)
                .map_err(|_| Failure::new(2, format!("{}: not UTF-8", path.display())))?;
            text.parse::<NoiseModel>()
                .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?
        }
    };
    let violations: Vec<ChannelViolation> = model
        .attachments
        .iter()
        .filter_map(|at| validate_channel(&at.channel).err())
        .collect();
    if !violations.is_empty() {
        let message = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n");
        return Err(Failure {
            code: 4,
            message,
            result: Some(json!({ "violations": violations.iter().map(violation_json).collect::<Vec<_>>() })),
        });
    }
    model.validate(c.num_qubits)?;
    let n = c.num_qubits;
    let config = run.config(VectorNormScheme::default());
    match a.mode {
        NoiseMode::Deterministic => {
            let mut dd = Manager::new(config);
            let rho = deterministic_simulate(&mut dd, &c, &model)?;
            run.node_stats(&dd, dd.node_count(&rho));
            let probs = dd.diagonal_probabilities(&rho)?;
            let map: BTreeMap<String, f64> = probs
                .iter()
                .enumerate()
                .map(|(i, p)| (bitstring(i as u64, n), *p))
                .collect();
            Ok(json!({
                "qubits": n,
                "mode": "deterministic",
                "trace": dd.density_trace(&rho),
                "probabilities": map,
            }))
        }
        NoiseMode::Stochastic => {
            let histogram = stochastic_simulate(&c, &model, a.shots, a.seed, &config)?;
            Ok(json!({
                "qubits": n,
                "mode": "stochastic",
                "shots": a.shots,
                "histogram": histogram,
            }))
        }
    }
}

fn verdict_json(r: &EquivalenceResult, n: usize) -> Value {
    let alpha = match r.verdict {
        Verdict::Equivalent => Some(0.0),
        Verdict::EquivalentUpToGlobalPhase => r.global_phase,
        _ => None,
    };
    json!({
        "verdict": r.verdict.name(),
        "alpha": alpha,
        "counterexample": r.counterexample.map(|cx| json!({
            "index": cx.index,
            "bitstring": bitstring(cx.index, n),
            "fidelity": cx.fidelity,
        })),
        "stats": {
            "peak_nodes": r.stats.peak_nodes,
            "final_nodes": r.stats.final_nodes,
            "applied_left": r.stats.applied_left,
            "applied_right": r.stats.applied_right,
            "stimuli_passed": r.stats.stimuli_passed,
        },
    })
}

fn cmd_verify(a: &VerifyArgs, run: &mut Run) -> Result<(Value, bool), Failure> {
    let g = run.circuit("left", &a.left)?;
    let g2 = run.circuit("right", &a.right)?;
    if g.num_qubits != g2.num_qubits {
        return Err(Failure::new(
            2,
            format!("qubit count mismatch: {} vs {}", g.num_qubits, g2.num_qubits),
        ));
    }
    let n = g.num_qubits;
    let config = run.config(VectorNormScheme::default());
    let mut dd = Manager::new(config);
    let (method, r) = match a.method {
        Method::Construct => ("construct", check_construct(&mut dd, &g, &g2)?),
        Method::Alternate => ("alternate", check_alternating(&mut dd, &g, &g2, a.strategy)?),
        Method::Simulate => {
            run.engine.epsilon = Some(a.epsilon);
            let space = if n >= 64 { u64::MAX } else { 1u64 << n };
            let k = a.stimuli.unwrap_or(16.min(space));
            ("simulate", check_simulation(&mut dd, &g, &g2, k, a.seed, a.epsilon)?)
        }
    };
    run.node_stats(&dd, r.stats.final_nodes);
    let mut out = verdict_json(&r, n);
    out["method"] = json!(method);
    if matches!(a.method, Method::Alternate) {
        out["strategy"] = json!(a.strategy.name());
    }
    out["qubits"] = json!(n);
    Ok((out, r.verdict.is_equivalent()))
}

fn cmd_dot(a: &DotArgs, run: &mut Run) -> Result<Value, Failure> {
    let c = run.circuit("circuit", &a.circuit)?;
    let n = c.num_qubits;
    if n > dot::DOT_QUBIT_LIMIT {
        return Err(Failure::new(
            3,
            format!("DOT export is limited to {} qubits, circuit has {n}", dot::DOT_QUBIT_LIMIT),
        ));
    }
    let config = run.config(a.scheme);
    let mut dd = Manager::new(config);
    let (kind, nodes, text) = if a.matrix {
        let u = qdd::equivalence::system_matrix(&mut dd, &without_measurements(&c)?)?;
        ("matrix", dd.node_count(&u), dot::to_dot(&dd, &u)?)
    } else {
        let index = basis_index(a.initial.as_deref(), n)?;
        let init = dd.basis_state(n, index)?;
        let s = simulate(&mut dd, &without_measurements(&c)?, &init)?;
        ("state", dd.node_count(&s), dot::to_dot(&dd, &s)?)
    };
    run.node_stats(&dd, nodes);
    std::fs::write(&a.output, &text)
        .map_err(|e| Failure::new(5, format!("{}: {e}", a.output.display())))?;
    Ok(json!({
        "kind": kind,
        "qubits": n,
        "nodes": nodes,
        "output_sha256": hex::encode(Sha256::digest(text.as_bytes())),
    }))
}

fn emit(report: &RunReport) {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let (mut run, outcome) = match &cli.command {
        Command::Sim(a) => {
            let mut run = Run::new("sim", a.seed);
            let r = cmd_sim(a, &mut run).map(|v| (v, true));
            (run, r)
        }
        Command::Noise(a) => {
            let mut run = Run::new("noise", a.seed);
            let r = cmd_noise(a, &mut run).map(|v| (v, true));
            (run, r)
        }
        Command::Verify(a) => {
            let mut run = Run::new("verify", a.seed);
            let r = cmd_verify(a, &mut run);
            (run, r)
        }
        Command::Dot(a) => {
            let mut run = Run::new("dot", 0);
            let r = cmd_dot(a, &mut run).map(|v| (v, true));
            (run, r)
        }
    };
    match outcome {
        Ok((result, ok)) => {
            emit(&run.finish(started, result));
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some(result) = f.result {
                run.engine.nodes = None;
                emit(&run.finish(started, result));
            }
            ExitCode::from(f.code)
        }
    }
}

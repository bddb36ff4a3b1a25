//! In-memory circuit representation shared by the parser, simulators and
//! equivalence checkers.

use std::fmt;
use std::str::FromStr;

use crate::error::{DdError, Result};
use crate::gates::Gate;

/// Base operation of a gate; controls are carried separately on [`GateOp`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    Phase,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 14] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Phase,
        GateKind::Swap,
    ];

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Phase => 1,
            _ => 0,
        }
    }

    pub fn num_targets(self) -> usize {
        match self {
            GateKind::Swap => 2,
            _ => 1,
        }
    }

    /// Lower-case mnemonic used in reports and the noise-model format.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "id",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Phase => "p",
            GateKind::Swap => "swap",
        }
    }

    /// Dense matrix of the uncontrolled gate.
    pub fn matrix(self, params: &[f64]) -> Gate {
        let p = |i: usize| params.get(i).copied().unwrap_or(0.0);
        match self {
            GateKind::I => Gate::i(),
            GateKind::X => Gate::x(),
            GateKind::Y => Gate::y(),
            GateKind::Z => Gate::z(),
            GateKind::H => Gate::h(),
            GateKind::S => Gate::s(),
            GateKind::Sdg => Gate::sdg(),
            GateKind::T => Gate::t(),
            GateKind::Tdg => Gate::tdg(),
            GateKind::Rx => Gate::rx(p(0)),
            GateKind::Ry => Gate::ry(p(0)),
            GateKind::Rz => Gate::rz(p(0)),
            GateKind::Phase => Gate::phase(p(0)),
            GateKind::Swap => Gate::swap(),
        }
    }
}

impl FromStr for GateKind {
    type Err = DdError;
    fn from_str(s: &str) -> Result<GateKind> {
        Ok(match s {
            "id" | "i" => GateKind::I,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "rx" => GateKind::Rx,
            "ry" => GateKind::Ry,
            "rz" => GateKind::Rz,
            "p" | "u1" | "phase" => GateKind::Phase,
            "swap" => GateKind::Swap,
            other => return Err(DdError::UnsupportedGate(other.to_string())),
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A (possibly multi-controlled) gate application.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    /// Angles in radians.
    pub params: Vec<f64>,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, params: Vec<f64>, controls: Vec<usize>, targets: Vec<usize>) -> Self {
        GateOp {
            kind,
            params,
            controls,
            targets,
        }
    }

    pub fn single(kind: GateKind, target: usize) -> Self {
        GateOp::new(kind, vec![], vec![], vec![target])
    }

    pub fn rotation(kind: GateKind, theta: f64, target: usize) -> Self {
        GateOp::new(kind, vec![theta], vec![], vec![target])
    }

    pub fn controlled(kind: GateKind, params: Vec<f64>, controls: Vec<usize>, target: usize) -> Self {
        GateOp::new(kind, params, controls, vec![target])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        GateOp::new(GateKind::X, vec![], vec![control], vec![target])
    }

    pub fn cp(theta: f64, control: usize, target: usize) -> Self {
        GateOp::new(GateKind::Phase, vec![theta], vec![control], vec![target])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        GateOp::new(GateKind::Swap, vec![], vec![], vec![a, b])
    }

    /// Controls followed by targets.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    /// Checks arity and qubit ranges against an `n`-qubit register.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.params.len() != self.kind.num_params() {
            return Err(DdError::UnsupportedGate(format!(
                "{} expects {} parameter(s), got {}",
                self.kind,
                self.kind.num_params(),
                self.params.len()
            )));
        }
        if let Some(p) = self.params.iter().find(|p| !p.is_finite()) {
            return Err(DdError::NonFinite { re: *p, im: 0.0 });
        }
        if self.targets.len() != self.kind.num_targets() {
            return Err(DdError::UnsupportedGate(format!(
                "{} expects {} target(s), got {}",
                self.kind,
                self.kind.num_targets(),
                self.targets.len()
            )));
        }
        let mut seen = vec![false; num_qubits];
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(DdError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if seen[q] {
                return Err(if self.controls.contains(&q) && self.targets.contains(&q) {
                    DdError::ControlTargetOverlap(q)
                } else {
                    DdError::DuplicateQubit(q)
                });
            }
            seen[q] = true;
        }
        Ok(())
    }
}

/// One entry of a circuit's operation list.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate(GateOp),
    /// Barrier over the listed qubits (all qubits when written as a register).
    Barrier(Vec<usize>),
    Measure { qubit: usize, clbit: usize },
}

/// Qubit count plus an ordered operation list.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct QuantumCircuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub ops: Vec<Op>,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize) -> Self {
        QuantumCircuit {
            num_qubits,
            num_clbits: 0,
            ops: Vec::new(),
        }
    }

    /// Appends a gate after validating it.
    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.num_qubits)?;
        self.ops.push(Op::Gate(op));
        Ok(self)
    }

    pub fn barrier(&mut self) -> &mut Self {
        self.ops.push(Op::Barrier((0..self.num_qubits).collect()));
        self
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self> {
        if qubit >= self.num_qubits {
            return Err(DdError::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        self.num_clbits = self.num_clbits.max(clbit + 1);
        self.ops.push(Op::Measure { qubit, clbit });
        Ok(self)
    }

    /// Gate operations in order, skipping barriers and measurements.
    pub fn gates(&self) -> impl Iterator<Item = &GateOp> + '_ {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(g) => Some(g),
            _ => None,
        })
    }

    pub fn num_gates(&self) -> usize {
        self.gates().count()
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(|op| matches!(op, Op::Measure { .. }))
    }

    /// True when some gate follows a measurement.
    pub fn has_mid_circuit_measurement(&self) -> bool {
        let mut measured = false;
        for op in &self.ops {
            match op {
                Op::Measure { .. } => measured = true,
                Op::Gate(_) if measured => return true,
                _ => {}
            }
        }
        false
    }

    pub fn validate(&self) -> Result<()> {
        for op in &self.ops {
            match op {
                Op::Gate(g) => g.validate(self.num_qubits)?,
                Op::Barrier(qs) => {
                    if let Some(&q) = qs.iter().find(|&&q| q >= self.num_qubits) {
                        return Err(DdError::QubitOutOfRange {
                            qubit: q,
                            num_qubits: self.num_qubits,
                        });
                    }
                }
                Op::Measure { qubit, .. } => {
                    if *qubit >= self.num_qubits {
                        return Err(DdError::QubitOutOfRange {
                            qubit: *qubit,
                            num_qubits: self.num_qubits,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Inverse of a single gate: the operator of the result is the adjoint of
/// the operator of `g`.
pub fn invert_gate(g: &GateOp) -> GateOp {
    let (kind, params) = match g.kind {
        GateKind::S => (GateKind::Sdg, vec![]),
        GateKind::Sdg => (GateKind::S, vec![]),
        GateKind::T => (GateKind::Tdg, vec![]),
        GateKind::Tdg => (GateKind::T, vec![]),
        GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Phase => {
            (g.kind, g.params.iter().map(|p| -p).collect())
        }
        k => (k, g.params.clone()),
    };
    GateOp {
        kind,
        params,
        controls: g.controls.clone(),
        targets: g.targets.clone(),
    }
}

/// Reverses the operation order and inverts each gate. Barriers are kept in
/// their mirrored positions.
pub fn invert_circuit(c: &QuantumCircuit) -> Result<QuantumCircuit> {
    if c.has_measurements() {
        return Err(DdError::MeasurementPresent("cannot invert a measurement"));
    }
    let ops = c
        .ops
        .iter()
        .rev()
        .map(|op| match op {
            Op::Gate(g) => Op::Gate(invert_gate(g)),
            other => other.clone(),
        })
        .collect();
    Ok(QuantumCircuit {
        num_qubits: c.num_qubits,
        num_clbits: c.num_clbits,
        ops,
    })
}

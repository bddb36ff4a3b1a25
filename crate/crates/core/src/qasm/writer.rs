use std::fmt::Write;

use crate::circuit::{GateKind, GateOp, Op, QuantumCircuit};

/// Name for a gate whose control count matches a named QASM gate.
fn named(op: &GateOp) -> Option<&'static str> {
    Some(match (op.kind, op.controls.len()) {
        (k, 0) => k.name(),
        (GateKind::X, 1) => "cx",
        (GateKind::Z, 1) => "cz",
        (GateKind::Phase, 1) => "cp",
        (GateKind::X, 2) => "ccx",
        _ => return None,
    })
}

fn angle(v: f64) -> String {
    // 17 significant digits survive a decimal round trip exactly.
    format!("{v:.16e}")
}

fn qubit_list(qs: &[usize]) -> String {
    qs.iter()
        .map(|q| format!("q[{q}]"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes a circuit in the accepted QASM subset; parsing the output yields
/// the same operation list.
pub fn serialize(c: &QuantumCircuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.num_qubits);
    if c.num_clbits > 0 {
        let _ = writeln!(out, "creg c[{}];", c.num_clbits);
    }
    for op in &c.ops {
        match op {
            Op::Gate(g) => {
                match named(g) {
                    Some(name) => out.push_str(name),
                    None => {
                        let _ = write!(out, "ctrl({}) @ {}", g.controls.len(), g.kind.name());
                    }
                }
                if !g.params.is_empty() {
                    let ps: Vec<String> = g.params.iter().map(|&p| angle(p)).collect();
                    let _ = write!(out, "({})", ps.join(","));
                }
                let qs: Vec<usize> = g.qubits().collect();
                let _ = writeln!(out, " {};", qubit_list(&qs));
            }
            Op::Barrier(qs) => {
                if qs.iter().copied().eq(0..c.num_qubits) {
                    out.push_str("barrier q;\n");
                } else if !qs.is_empty() {
                    let _ = writeln!(out, "barrier {};", qubit_list(qs));
                }
            }
            Op::Measure { qubit, clbit } => {
                let _ = writeln!(out, "measure q[{qubit}] -> c[{clbit}];");
            }
        }
    }
    out
}

//! Graphviz export. Nodes are labelled with their qubit; every edge carries
//! its weight as magnitude and phase, is drawn with a pen width proportional
//! to the magnitude and coloured by the phase (hue = phase / 2π). Zero stubs
//! end in small point-shaped sinks.

use std::f64::consts::TAU;
use std::fmt::Write;

use rustc_hash::FxHashMap;

use crate::error::{DdError, Result};
use crate::package::{DdKind, Diagram, Edge, Manager, NodeId};

/// Largest diagram (in qubits) the exporter accepts.
pub const DOT_QUBIT_LIMIT: usize = 12;

const PEN_SCALE: f64 = 2.0;

/// Phase of a weight in `[0, 2π)`.
pub fn phase_of(w: num_complex::Complex64) -> f64 {
    let a = w.arg().rem_euclid(TAU);
    if a >= TAU - 1e-12 {
        0.0
    } else {
        a
    }
}

/// HSV colour string for a phase.
pub fn phase_color(phase: f64) -> String {
    format!("{:.3} 1.000 0.750", phase / TAU)
}

fn edge_attrs(w: num_complex::Complex64, prefix: &str) -> String {
    let mag = w.norm();
    let ph = phase_of(w);
    format!(
        "label=\"{prefix}{mag:.5} ∠{ph:.5}\", penwidth={:.4}, color=\"{}\"",
        (PEN_SCALE * mag).max(0.05),
        phase_color(ph)
    )
}

/// Renders any diagram to DOT.
pub fn to_dot<D: Diagram>(dd: &Manager, diagram: &D) -> Result<String> {
    if diagram.num_qubits() > DOT_QUBIT_LIMIT {
        return Err(DdError::DenseLimit {
            limit: DOT_QUBIT_LIMIT,
            num_qubits: diagram.num_qubits(),
        });
    }
    Ok(render(dd, D::kind(), diagram.root()))
}

fn render(dd: &Manager, kind: DdKind, root: Edge) -> String {
    let mut out = String::from("digraph dd {\n");
    out.push_str("  node [shape=circle, fontname=\"Helvetica\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\", fontsize=10];\n");
    out.push_str("  root [shape=none, label=\"\"];\n");
    if root.is_zero() {
        out.push_str("  zero0 [shape=point];\n");
        out.push_str("  root -> zero0 [label=\"0\", style=dotted];\n}\n");
        return out;
    }
    out.push_str("  t [shape=box, label=\"1\"];\n");
    let mut names: FxHashMap<NodeId, String> = FxHashMap::default();
    names.insert(NodeId::TERMINAL, "t".into());
    let mut order = Vec::new();
    let mut stack = vec![root.node];
    while let Some(id) = stack.pop() {
        if names.contains_key(&id) {
            continue;
        }
        names.insert(id, format!("n{}", order.len()));
        order.push(id);
        let succ = dd.successors(kind, id);
        stack.extend(succ.iter().rev().filter(|e| !e.is_zero()).map(|e| e.node));
    }
    for id in &order {
        let _ = writeln!(
            out,
            "  {} [label=\"q{}\"];",
            names[id],
            dd.level_of(kind, *id)
        );
    }
    let _ = writeln!(out, "  root -> {} [{}];", names[&root.node], edge_attrs(root.weight.value(), ""));
    let mut stubs = 0;
    for id in &order {
        let succ = dd.successors(kind, *id);
        for (k, e) in succ.iter().enumerate() {
            let tag = match kind {
                DdKind::Vector => format!("{k}: "),
                DdKind::Matrix => format!("{}{}: ", k >> 1, k & 1),
            };
            if e.is_zero() {
                let _ = writeln!(out, "  zero{stubs} [shape=point];");
                let _ = writeln!(
                    out,
                    "  {} -> zero{stubs} [label=\"{tag}0\", style=dotted];",
                    names[id]
                );
                stubs += 1;
            } else {
                let _ = writeln!(
                    out,
                    "  {} -> {} [{}];",
                    names[id],
                    names[&e.node],
                    edge_attrs(e.weight.value(), &tag)
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

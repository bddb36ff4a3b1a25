//! Dense reference implementations and shared fixtures for the integration
//! tests. Gate matrices here are written out independently of the library.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C;
use qdd::equivalence::invert_gate;
use qdd::{GateKind, GateOp, Op, QuantumCircuit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn cis(t: f64) -> C {
    C::from_polar(1.0, t)
}

/// The uncontrolled single-qubit matrix for a gate kind.
pub fn gate2(kind: GateKind, params: &[f64]) -> [[C; 2]; 2] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let th = params.first().copied().unwrap_or(0.0);
    let s = FRAC_1_SQRT_2;
    match kind {
        GateKind::I => [[l, o], [o, l]],
        GateKind::X => [[o, l], [l, o]],
        GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        GateKind::Z => [[l, o], [o, -l]],
        GateKind::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        GateKind::S => [[l, o], [o, c(0.0, 1.0)]],
        GateKind::Sdg => [[l, o], [o, c(0.0, -1.0)]],
        GateKind::T => [[l, o], [o, cis(PI / 4.0)]],
        GateKind::Tdg => [[l, o], [o, cis(-PI / 4.0)]],
        GateKind::Rx => {
            let (sn, cs) = (th / 2.0).sin_cos();
            [[c(cs, 0.0), c(0.0, -sn)], [c(0.0, -sn), c(cs, 0.0)]]
        }
        GateKind::Ry => {
            let (sn, cs) = (th / 2.0).sin_cos();
            [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]]
        }
        GateKind::Rz => [[cis(-th / 2.0), o], [o, cis(th / 2.0)]],
        GateKind::Phase => [[l, o], [o, cis(th)]],
        GateKind::Swap => unreachable!("swap is two-qubit"),
    }
}

fn bit(i: usize, q: usize) -> usize {
    (i >> q) & 1
}

/// Applies one gate to a dense state in place.
pub fn apply_dense(state: &mut [C], op: &GateOp) {
    let ctrl_ok = |i: usize| op.controls.iter().all(|&q| bit(i, q) == 1);
    if op.kind == GateKind::Swap {
        let (a, b) = (op.targets[0], op.targets[1]);
        for i in 0..state.len() {
            if ctrl_ok(i) && bit(i, a) == 1 && bit(i, b) == 0 {
                let j = i ^ (1 << a) ^ (1 << b);
                state.swap(i, j);
            }
        }
        return;
    }
    let m = gate2(op.kind, &op.params);
    let t = op.targets[0];
    for i in 0..state.len() {
        if bit(i, t) == 0 && ctrl_ok(i) {
            let j = i | (1 << t);
            let (a0, a1) = (state[i], state[j]);
            state[i] = m[0][0] * a0 + m[0][1] * a1;
            state[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

pub fn simulate_dense(c: &QuantumCircuit, initial: usize) -> Vec<C> {
    let mut s = vec![C::new(0.0, 0.0); 1 << c.num_qubits];
    s[initial] = C::new(1.0, 0.0);
    for op in &c.ops {
        if let Op::Gate(g) = op {
            apply_dense(&mut s, g);
        }
    }
    s
}

/// System matrix, built column by column.
pub fn unitary_dense(c: &QuantumCircuit) -> Mat {
    let d = 1 << c.num_qubits;
    let cols: Vec<Vec<C>> = (0..d).map(|j| simulate_dense(c, j)).collect();
    (0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

pub fn adjoint(a: &Mat) -> Mat {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![C::new(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn identity(d: usize) -> Mat {
    (0..d)
        .map(|i| (0..d).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

pub fn vec_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    let ip: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr()
}

/// `Some(α)` when `b = e^{iα}·a` entrywise within `tol`.
pub fn phase_relation(a: &Mat, b: &Mat, tol: f64) -> Option<f64> {
    let (i, j) = (0..a.len())
        .flat_map(|i| (0..a.len()).map(move |j| (i, j)))
        .max_by(|&(i, j), &(k, l)| a[i][j].norm().total_cmp(&a[k][l].norm()))?;
    let ph = b[i][j] / a[i][j];
    if (ph.norm() - 1.0).abs() > tol {
        return None;
    }
    let scaled: Mat = a.iter().map(|r| r.iter().map(|x| x * ph).collect()).collect();
    (max_diff(&scaled, b) <= tol).then(|| ph.arg())
}

pub fn random_single(rng: &mut ChaCha8Rng, q: usize) -> GateOp {
    let kinds = [
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
    ];
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let params = if kind.num_params() == 1 {
        vec![rng.gen_range(-PI..PI)]
    } else {
        vec![]
    };
    GateOp::new(kind, params, vec![], vec![q])
}

fn distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

/// One random gate on `n` qubits: single-qubit gates, CX, CZ, CP, Toffoli,
/// swap and occasionally a multi-controlled rotation.
pub fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> GateOp {
    let roll = if n == 1 { 0 } else { rng.gen_range(0..10) };
    match roll {
        0..=4 => {
            let q = rng.gen_range(0..n);
            random_single(rng, q)
        }
        5 | 6 => {
            let qs = distinct(rng, n, 2);
            GateOp::cx(qs[0], qs[1])
        }
        7 => {
            let qs = distinct(rng, n, 2);
            if rng.gen_bool(0.5) {
                GateOp::cp(rng.gen_range(-PI..PI), qs[0], qs[1])
            } else {
                GateOp::controlled(GateKind::Z, vec![], vec![qs[0]], qs[1])
            }
        }
        8 => {
            let qs = distinct(rng, n, 2);
            GateOp::swap(qs[0], qs[1])
        }
        _ => {
            if n >= 3 {
                let k = rng.gen_range(2..=n.min(4)) ;
                let qs = distinct(rng, n, k);
                let t = qs[k - 1];
                let g = random_single(rng, t);
                GateOp::new(g.kind, g.params, qs[..k - 1].to_vec(), vec![t])
            } else {
                let qs = distinct(rng, n, 2);
                GateOp::cx(qs[1], qs[0])
            }
        }
    }
}

pub fn random_circuit(seed: u64, n: usize, depth: usize) -> QuantumCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = QuantumCircuit::new(n);
    for _ in 0..depth {
        if rng.gen_bool(0.05) {
            c.barrier();
        } else {
            c.push(random_gate(&mut rng, n)).unwrap();
        }
    }
    c
}

/// A functionally equal rewrite: swaps become three CNOTs, CZ becomes
/// H·CX·H, uncontrolled phases become Rz (a global phase), and random
/// self-cancelling pairs are inserted.
pub fn equivalent_variant(c: &QuantumCircuit, rng: &mut ChaCha8Rng) -> QuantumCircuit {
    let mut out = QuantumCircuit::new(c.num_qubits);
    for op in &c.ops {
        let Op::Gate(g) = op else {
            out.barrier();
            continue;
        };
        match g.kind {
            GateKind::Swap if g.controls.is_empty() => {
                let (a, b) = (g.targets[0], g.targets[1]);
                for (x, y) in [(a, b), (b, a), (a, b)] {
                    out.push(GateOp::cx(x, y)).unwrap();
                }
            }
            GateKind::Z if g.controls.len() == 1 => {
                let t = g.targets[0];
                out.push(GateOp::single(GateKind::H, t)).unwrap();
                out.push(GateOp::cx(g.controls[0], t)).unwrap();
                out.push(GateOp::single(GateKind::H, t)).unwrap();
            }
            GateKind::Phase if g.controls.is_empty() => {
                out.push(GateOp::rotation(GateKind::Rz, g.params[0], g.targets[0]))
                    .unwrap();
            }
            _ => {
                out.push(g.clone()).unwrap();
            }
        }
        if rng.gen_bool(0.2) {
            let q = rng.gen_range(0..c.num_qubits);
            let g = random_single(rng, q);
            out.push(g.clone()).unwrap();
            out.push(invert_gate(&g)).unwrap();
        }
    }
    out
}

/// Changes one gate: a shifted angle, a dropped gate or an extra X.
pub fn perturbed(c: &QuantumCircuit, rng: &mut ChaCha8Rng) -> QuantumCircuit {
    let mut out = c.clone();
    let gates: Vec<usize> = (0..out.ops.len())
        .filter(|&i| matches!(out.ops[i], Op::Gate(_)))
        .collect();
    if gates.is_empty() {
        out.push(GateOp::single(GateKind::X, 0)).unwrap();
        return out;
    }
    let i = gates[rng.gen_range(0..gates.len())];
    match rng.gen_range(0..3) {
        0 => {
            out.ops.remove(i);
        }
        1 => {
            if let Op::Gate(g) = &mut out.ops[i] {
                if g.params.is_empty() {
                    *g = GateOp::new(GateKind::Rx, vec![0.3], g.controls.clone(), vec![g.targets[0]]);
                } else {
                    g.params[0] += 0.5;
                }
            }
        }
        _ => {
            let q = rng.gen_range(0..c.num_qubits);
            out.ops.insert(i, Op::Gate(GateOp::single(GateKind::Y, q)));
        }
    }
    out
}

pub fn dense_equivalent(a: &QuantumCircuit, b: &QuantumCircuit) -> bool {
    phase_relation(&unitary_dense(a), &unitary_dense(b), 1e-9).is_some()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Normalised histogram over all `2^n` outcomes, indexed by basis index.
pub fn histogram_distribution(h: &qdd::simulator::Histogram, n: usize) -> Vec<f64> {
    let total: u64 = h.values().sum();
    let mut out = vec![0.0; 1 << n];
    for (k, v) in h {
        out[usize::from_str_radix(k, 2).unwrap()] = *v as f64 / total as f64;
    }
    out
}

pub const BELL: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[2];
h q[1];
cx q[1],q[0];
";

/// Three-qubit QFT written with controlled phases and a closing swap.
pub const QFT3: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[3];
h q[2];
cp(pi/2) q[1],q[2];
cp(pi/4) q[0],q[2];
h q[1];
cp(pi/2) q[0],q[1];
h q[0];
swap q[2],q[0];
";

/// The same QFT with each controlled phase decomposed into CNOTs and phase
/// gates and the swap into three CNOTs; barriers separate the blocks that
/// correspond to one gate of [`QFT3`].
pub const QFT3_DECOMPOSED: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[3];
h q[2];
barrier q;
p(pi/4) q[2];
cx q[2],q[1];
p(-pi/4) q[1];
cx q[2],q[1];
p(pi/4) q[1];
barrier q;
p(pi/8) q[2];
cx q[2],q[0];
p(-pi/8) q[0];
cx q[2],q[0];
p(pi/8) q[0];
barrier q;
h q[1];
barrier q;
p(pi/4) q[1];
cx q[1],q[0];
p(-pi/4) q[0];
cx q[1],q[0];
p(pi/4) q[0];
barrier q;
h q[0];
barrier q;
cx q[2],q[0];
cx q[0],q[2];
cx q[2],q[0];
";

/// The three-qubit example state `[0, 0, ½, 0, ½, 0, −1/√2, 0]`.
pub fn example_psi() -> Vec<C> {
    let h = c(0.5, 0.0);
    let z = c(0.0, 0.0);
    vec![z, z, h, z, h, z, c(-FRAC_1_SQRT_2, 0.0), z]
}

/// A circuit preparing [`example_psi`] from `|000⟩`.
pub fn example_psi_program() -> String {
    let phi = 2.0 * (1.0f64 / 3.0).sqrt().acos();
    format!(
        "OPENQASM 2.0;\nqreg q[3];\nry(2*pi/3) q[2];\nctrl(1) @ ry({:.17}) q[2],q[1];\nx q[2];\ncx q[2],q[1];\nx q[2];\n",
        -phi
    )
}

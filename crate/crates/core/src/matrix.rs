//! Operator (matrix) decision diagrams: gate construction, Kronecker product,
//! multiplication, addition and conjugate transposition.
//!
//! Level `q_k` contributes bit `k` of both the row and the column index;
//! successor `2·r + c` holds the sub-matrix for row bit `r` and column bit `c`.

use num_complex::Complex64;

use crate::circuit::{GateKind, GateOp};
use crate::error::{DdError, Result};
use crate::gates::Gate;
use crate::package::{DdKind, Diagram, Edge, Manager, NodeId};
use crate::vector::{bit, check_index, check_qubits, StateDD};

/// A `2ⁿ × 2ⁿ` matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OperatorDD {
    pub root: Edge,
    pub num_qubits: usize,
}

impl Diagram for OperatorDD {
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

fn same_size(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(DdError::QubitMismatch { left: a, right: b });
    }
    Ok(())
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

impl Manager {
    /// Identity on levels `0..levels`; [`Edge::ONE`] when `levels == 0`.
    pub(crate) fn identity_edge(&mut self, levels: usize) -> Edge {
        let mut e = Edge::ONE;
        for l in 0..levels {
            e = self.make_mnode(l as i32, [e, Edge::ZERO, Edge::ZERO, e]);
        }
        e
    }

    pub fn identity(&mut self, num_qubits: usize) -> Result<OperatorDD> {
        check_qubits(num_qubits)?;
        Ok(OperatorDD {
            root: self.identity_edge(num_qubits),
            num_qubits,
        })
    }

    /// `𝕀 ⊗ … ⊗ g ⊗ … ⊗ 𝕀` with `g` on `target`.
    pub fn single_qubit_gate(
        &mut self,
        num_qubits: usize,
        target: usize,
        g: &Gate,
    ) -> Result<OperatorDD> {
        self.controlled_gate(num_qubits, &[], target, g)
    }

    /// Applies `g` to `target` when every qubit in `controls` is `|1⟩`.
    /// Built level by level without dense expansion.
    pub fn controlled_gate(
        &mut self,
        num_qubits: usize,
        controls: &[usize],
        target: usize,
        g: &Gate,
    ) -> Result<OperatorDD> {
        check_qubits(num_qubits)?;
        if g.dim() != 2 {
            return Err(DdError::BadGateShape {
                expected: 2,
                got: g.dim() * g.dim(),
            });
        }
        check_qubit(target, num_qubits)?;
        let mut is_control = vec![false; num_qubits];
        for &c in controls {
            check_qubit(c, num_qubits)?;
            if c == target {
                return Err(DdError::ControlTargetOverlap(c));
            }
            if is_control[c] {
                return Err(DdError::DuplicateQubit(c));
            }
            is_control[c] = true;
        }

        // One partial operator per entry of g, covering the levels below target.
        let mut em: [Edge; 4] = [Edge::ZERO; 4];
        for (i, e) in em.iter_mut().enumerate() {
            *e = self.terminal(g.get(i / 2, i % 2));
        }
        for z in 0..target {
            for (i, e) in em.iter_mut().enumerate() {
                let (r, c) = (i / 2, i % 2);
                *e = if is_control[z] {
                    let off = if r == c { self.identity_edge(z) } else { Edge::ZERO };
                    self.make_mnode(z as i32, [off, Edge::ZERO, Edge::ZERO, *e])
                } else {
                    self.make_mnode(z as i32, [*e, Edge::ZERO, Edge::ZERO, *e])
                };
            }
        }
        let mut e = self.make_mnode(target as i32, em);
        for z in target + 1..num_qubits {
            e = if is_control[z] {
                let id = self.identity_edge(z);
                self.make_mnode(z as i32, [id, Edge::ZERO, Edge::ZERO, e])
            } else {
                self.make_mnode(z as i32, [e, Edge::ZERO, Edge::ZERO, e])
            };
        }
        Ok(OperatorDD {
            root: e,
            num_qubits,
        })
    }

    /// Tensor product of single-qubit factors; unlisted qubits get the identity.
    fn product_operator(&mut self, num_qubits: usize, factors: &[(usize, &Gate)]) -> Edge {
        let mut e = Edge::ONE;
        for z in 0..num_qubits {
            e = match factors.iter().find(|(q, _)| *q == z) {
                Some((_, g)) => {
                    let mut succ = [Edge::ZERO; 4];
                    for (i, s) in succ.iter_mut().enumerate() {
                        *s = self.scale(e, g.get(i / 2, i % 2));
                    }
                    self.make_mnode(z as i32, succ)
                }
                None => self.make_mnode(z as i32, [e, Edge::ZERO, Edge::ZERO, e]),
            };
        }
        e
    }

    /// A `4×4` matrix on `(first, second)`; the row/column index of `g` is
    /// `2·bit(first) + bit(second)`.
    pub fn two_qubit_gate(
        &mut self,
        num_qubits: usize,
        first: usize,
        second: usize,
        g: &Gate,
    ) -> Result<OperatorDD> {
        check_qubits(num_qubits)?;
        check_qubit(first, num_qubits)?;
        check_qubit(second, num_qubits)?;
        if first == second {
            return Err(DdError::DuplicateQubit(first));
        }
        if g.dim() != 4 {
            return Err(DdError::BadGateShape {
                expected: 4,
                got: g.dim() * g.dim(),
            });
        }
        // Σ g[ab][cd] · |a⟩⟨c| ⊗ |b⟩⟨d|
        let mut acc = Edge::ZERO;
        for row in 0..4 {
            for col in 0..4 {
                let v = g.get(row, col);
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let unit = |r: usize, c: usize| {
                    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
                    m[r][c] = Complex64::new(1.0, 0.0);
                    Gate::from_2x2(m)
                };
                let ga = unit(row >> 1, col >> 1);
                let gb = unit(row & 1, col & 1);
                let term = self.product_operator(num_qubits, &[(first, &ga), (second, &gb)]);
                let term = self.scale(term, v);
                acc = self.madd(acc, term);
            }
        }
        Ok(OperatorDD {
            root: acc,
            num_qubits,
        })
    }

    /// Operator of a circuit gate on an `n`-qubit register.
    pub fn gate_operator(&mut self, num_qubits: usize, op: &GateOp) -> Result<OperatorDD> {
        op.validate(num_qubits)?;
        match op.kind {
            GateKind::Swap => {
                let (a, b) = (op.targets[0], op.targets[1]);
                if op.controls.is_empty() {
                    return self.two_qubit_gate(num_qubits, a, b, &Gate::swap());
                }
                // CX(b→a) · C-CX(controls ∪ {a} → b) · CX(b→a)
                let outer = self.controlled_gate(num_qubits, &[b], a, &Gate::x())?;
                let mut ctrl = op.controls.clone();
                ctrl.push(a);
                let mid = self.controlled_gate(num_qubits, &ctrl, b, &Gate::x())?;
                let t = self.mat_mat_mul(&mid, &outer)?;
                self.mat_mat_mul(&outer, &t)
            }
            kind => {
                let g = kind.matrix(&op.params);
                self.controlled_gate(num_qubits, &op.controls, op.targets[0], &g)
            }
        }
    }

    /// `a ⊗ b`, with `a` on the more significant qubits. Runs in time linear
    /// in the size of `a` by substituting `b`'s root for `a`'s terminal.
    pub fn kron(&mut self, a: &OperatorDD, b: &OperatorDD) -> OperatorDD {
        let n = a.num_qubits + b.num_qubits;
        if a.root.is_zero() || b.root.is_zero() {
            return OperatorDD {
                root: Edge::ZERO,
                num_qubits: n,
            };
        }
        let r = self.kron_rec(a.root.node, b.root.node, b.num_qubits as u32);
        let root = self.scale(r, a.root.weight.value() * b.root.weight.value());
        OperatorDD {
            root,
            num_qubits: n,
        }
    }

    fn kron_rec(&mut self, a: NodeId, b: NodeId, shift: u32) -> Edge {
        if a.is_terminal() {
            return Edge {
                node: b,
                weight: crate::CanonicalComplex::ONE,
            };
        }
        let key = (a, b, shift);
        if let Some(r) = self.caches.kron.get(&key) {
            return r;
        }
        let n = *self.mnode(a);
        let mut succ = [Edge::ZERO; 4];
        for (i, s) in n.succ.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            let sub = self.kron_rec(s.node, b, shift);
            succ[i] = self.scale(sub, s.weight.value());
        }
        let r = self.make_mnode(n.level + shift as i32, succ);
        self.caches.kron.insert(key, r);
        r
    }

    /// `u · v`.
    pub fn mat_vec_mul(&mut self, u: &OperatorDD, v: &StateDD) -> Result<StateDD> {
        same_size(u.num_qubits, v.num_qubits)?;
        let root = if u.root.is_zero() || v.root.is_zero() {
            Edge::ZERO
        } else {
            let r = self.mat_vec_rec(u.root.node, v.root.node);
            self.scale(r, u.root.weight.value() * v.root.weight.value())
        };
        Ok(StateDD {
            root,
            num_qubits: v.num_qubits,
        })
    }

    fn mat_vec_rec(&mut self, m: NodeId, v: NodeId) -> Edge {
        if m.is_terminal() {
            debug_assert!(v.is_terminal());
            return Edge::ONE;
        }
        if let Some(r) = self.caches.mat_vec.get(&(m, v)) {
            return r;
        }
        let nm = *self.mnode(m);
        let nv = *self.vnode(v);
        debug_assert_eq!(nm.level, nv.level);
        let mut out = [Edge::ZERO; 2];
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = Edge::ZERO;
            for col in 0..2 {
                let em = nm.succ[2 * row + col];
                let ev = nv.succ[col];
                if em.is_zero() || ev.is_zero() {
                    continue;
                }
                let p = self.mat_vec_rec(em.node, ev.node);
                let p = self.scale(p, em.weight.value() * ev.weight.value());
                acc = self.vadd(acc, p);
            }
            *o = acc;
        }
        let r = self.make_vnode(nm.level, out);
        self.caches.mat_vec.insert((m, v), r);
        r
    }

    /// `a · b`.
    pub fn mat_mat_mul(&mut self, a: &OperatorDD, b: &OperatorDD) -> Result<OperatorDD> {
        same_size(a.num_qubits, b.num_qubits)?;
        Ok(OperatorDD {
            root: self.mat_mat_edge(a.root, b.root),
            num_qubits: a.num_qubits,
        })
    }

    pub(crate) fn mat_mat_edge(&mut self, a: Edge, b: Edge) -> Edge {
        if a.is_zero() || b.is_zero() {
            return Edge::ZERO;
        }
        let r = self.mat_mat_rec(a.node, b.node);
        self.scale(r, a.weight.value() * b.weight.value())
    }

    fn mat_mat_rec(&mut self, a: NodeId, b: NodeId) -> Edge {
        if a.is_terminal() {
            debug_assert!(b.is_terminal());
            return Edge::ONE;
        }
        if let Some(r) = self.caches.mat_mat.get(&(a, b)) {
            return r;
        }
        let na = *self.mnode(a);
        let nb = *self.mnode(b);
        debug_assert_eq!(na.level, nb.level);
        let mut out = [Edge::ZERO; 4];
        for row in 0..2 {
            for col in 0..2 {
                let mut acc = Edge::ZERO;
                for k in 0..2 {
                    let ea = na.succ[2 * row + k];
                    let eb = nb.succ[2 * k + col];
                    if ea.is_zero() || eb.is_zero() {
                        continue;
                    }
                    let p = self.mat_mat_rec(ea.node, eb.node);
                    let p = self.scale(p, ea.weight.value() * eb.weight.value());
                    acc = self.madd(acc, p);
                }
                out[2 * row + col] = acc;
            }
        }
        let r = self.make_mnode(na.level, out);
        self.caches.mat_mat.insert((a, b), r);
        r
    }

    /// Elementwise sum.
    pub fn add_operators(&mut self, a: &OperatorDD, b: &OperatorDD) -> Result<OperatorDD> {
        same_size(a.num_qubits, b.num_qubits)?;
        Ok(OperatorDD {
            root: self.madd(a.root, b.root),
            num_qubits: a.num_qubits,
        })
    }

    pub(crate) fn madd(&mut self, x: Edge, y: Edge) -> Edge {
        if x.is_zero() {
            return y;
        }
        if y.is_zero() {
            return x;
        }
        if x.node == y.node {
            return self.edge(x.node, x.weight.value() + y.weight.value());
        }
        let key = if (x.node, x.weight.bits()) <= (y.node, y.weight.bits()) {
            (x, y)
        } else {
            (y, x)
        };
        if let Some(r) = self.caches.madd.get(&key) {
            return r;
        }
        let nx = *self.mnode(x.node);
        let ny = *self.mnode(y.node);
        debug_assert_eq!(nx.level, ny.level);
        let mut succ = [Edge::ZERO; 4];
        for (k, s) in succ.iter_mut().enumerate() {
            let a = self.scale(nx.succ[k], x.weight.value());
            let b = self.scale(ny.succ[k], y.weight.value());
            *s = self.madd(a, b);
        }
        let r = self.make_mnode(nx.level, succ);
        self.caches.madd.insert(key, r);
        r
    }

    /// `u†`.
    pub fn conjugate_transpose(&mut self, u: &OperatorDD) -> OperatorDD {
        OperatorDD {
            root: self.adjoint_edge(u.root),
            num_qubits: u.num_qubits,
        }
    }

    pub(crate) fn adjoint_edge(&mut self, e: Edge) -> Edge {
        if e.is_zero() {
            return Edge::ZERO;
        }
        let r = self.adjoint_rec(e.node);
        self.scale(r, e.weight.value().conj())
    }

    fn adjoint_rec(&mut self, id: NodeId) -> Edge {
        if id.is_terminal() {
            return Edge::ONE;
        }
        if let Some(r) = self.caches.adjoint.get(&id) {
            return r;
        }
        let n = *self.mnode(id);
        let mut succ = [Edge::ZERO; 4];
        for (i, &src) in [0usize, 2, 1, 3].iter().enumerate() {
            succ[i] = self.adjoint_edge(n.succ[src]);
        }
        let r = self.make_mnode(n.level, succ);
        self.caches.adjoint.insert(id, r);
        r
    }

    /// Multiplies the operator by a scalar.
    pub fn scale_operator(&mut self, u: &OperatorDD, f: Complex64) -> OperatorDD {
        OperatorDD {
            root: self.scale(u.root, f),
            num_qubits: u.num_qubits,
        }
    }

    /// Entry `(row, col)` as the product of weights along its path.
    pub fn get_entry(&self, u: &OperatorDD, row: u64, col: u64) -> Result<Complex64> {
        check_index(row, u.num_qubits)?;
        check_index(col, u.num_qubits)?;
        Ok(self.entry_edge(u.root, row, col))
    }

    pub(crate) fn entry_edge(&self, root: Edge, row: u64, col: u64) -> Complex64 {
        let mut e = root;
        let mut acc = Complex64::new(1.0, 0.0);
        loop {
            if e.is_zero() {
                return Complex64::new(0.0, 0.0);
            }
            acc *= e.weight.value();
            if e.is_terminal() {
                return acc;
            }
            let n = self.mnode(e.node);
            let l = n.level as usize;
            e = n.succ[2 * bit(row, l) + bit(col, l)];
        }
    }

    /// Dense read-back as rows.
    pub fn to_matrix(&self, u: &OperatorDD) -> Result<Vec<Vec<Complex64>>> {
        let limit = self.config.dense_matrix_limit;
        if u.num_qubits > limit {
            return Err(DdError::DenseLimit {
                limit,
                num_qubits: u.num_qubits,
            });
        }
        let dim = 1usize << u.num_qubits;
        let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        self.fill_matrix(u.root, Complex64::new(1.0, 0.0), 0, 0, &mut out);
        Ok(out)
    }

    fn fill_matrix(
        &self,
        e: Edge,
        acc: Complex64,
        row: usize,
        col: usize,
        out: &mut [Vec<Complex64>],
    ) {
        if e.is_zero() {
            return;
        }
        let w = acc * e.weight.value();
        if e.is_terminal() {
            out[row][col] = w;
            return;
        }
        let n = *self.mnode(e.node);
        let stride = 1usize << n.level;
        for (i, s) in n.succ.iter().enumerate() {
            self.fill_matrix(*s, w, row + (i >> 1) * stride, col + (i & 1) * stride, out);
        }
    }

    /// Sum of the diagonal entries.
    pub fn trace(&self, u: &OperatorDD) -> Complex64 {
        let mut memo = rustc_hash::FxHashMap::default();
        if u.root.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        u.root.weight.value() * self.trace_rec(u.root.node, &mut memo)
    }

    fn trace_rec(
        &self,
        id: NodeId,
        memo: &mut rustc_hash::FxHashMap<NodeId, Complex64>,
    ) -> Complex64 {
        if id.is_terminal() {
            return Complex64::new(1.0, 0.0);
        }
        if let Some(&v) = memo.get(&id) {
            return v;
        }
        let n = *self.mnode(id);
        let mut t = Complex64::new(0.0, 0.0);
        for k in [0, 3] {
            let s = n.succ[k];
            if !s.is_zero() {
                t += s.weight.value() * self.trace_rec(s.node, memo);
            }
        }
        memo.insert(id, t);
        t
    }

    /// Every interior node reachable from `u`, parents before children.
    pub fn reachable_matrix_nodes(&self, u: &OperatorDD) -> Vec<NodeId> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut order = Vec::new();
        let mut stack = vec![u.root.node];
        while let Some(id) = stack.pop() {
            if id.is_terminal() || !seen.insert(id) {
                continue;
            }
            order.push(id);
            stack.extend(self.mnode(id).succ.iter().map(|e| e.node));
        }
        order.sort_by_key(|id| std::cmp::Reverse(self.mnode(*id).level));
        order
    }
}

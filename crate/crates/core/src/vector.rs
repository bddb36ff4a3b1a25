//! State-vector decision diagrams: construction, read-back and inner products.

use num_complex::Complex64;

use crate::error::{DdError, Result};
use crate::package::{DdKind, Diagram, Edge, Manager, NodeId, MAX_QUBITS};

/// A state vector over `num_qubits` qubits. Qubit `q_{n−1}` is the most
/// significant bit of a basis index and labels the root node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StateDD {
    pub root: Edge,
    pub num_qubits: usize,
}

impl Diagram for StateDD {
    fn root(&self) -> Edge {
        self.root
    }
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    fn kind() -> DdKind {
        DdKind::Vector
    }
}

#[inline]
pub(crate) fn bit(index: u64, level: usize) -> usize {
    if level < 64 {
        ((index >> level) & 1) as usize
    } else {
        0
    }
}

pub(crate) fn check_index(index: u64, num_qubits: usize) -> Result<()> {
    if num_qubits < 64 && index >> num_qubits != 0 {
        return Err(DdError::IndexOutOfRange { index, num_qubits });
    }
    Ok(())
}

pub(crate) fn check_qubits(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(DdError::LevelOutOfRange {
            level: num_qubits,
            num_qubits: MAX_QUBITS,
        });
    }
    Ok(())
}

fn same_size(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(DdError::QubitMismatch { left: a, right: b });
    }
    Ok(())
}

impl Manager {
    /// Builds the diagram of a dense amplitude vector of length `2ⁿ`, n ≥ 1.
    pub fn from_amplitudes(&mut self, amps: &[Complex64]) -> Result<StateDD> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(DdError::NotPowerOfTwo(len));
        }
        if let Some(a) = amps.iter().find(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(DdError::NonFinite { re: a.re, im: a.im });
        }
        let n = len.trailing_zeros() as usize;
        let root = self.build_vector(amps, n as i32 - 1);
        Ok(StateDD { root, num_qubits: n })
    }

    fn build_vector(&mut self, amps: &[Complex64], level: i32) -> Edge {
        if level < 0 {
            return self.terminal(amps[0]);
        }
        let half = amps.len() / 2;
        let e0 = self.build_vector(&amps[..half], level - 1);
        let e1 = self.build_vector(&amps[half..], level - 1);
        self.make_vnode(level, [e0, e1])
    }

    /// The computational basis state `|index⟩`.
    pub fn basis_state(&mut self, num_qubits: usize, index: u64) -> Result<StateDD> {
        check_qubits(num_qubits)?;
        check_index(index, num_qubits)?;
        let mut e = Edge::ONE;
        for level in 0..num_qubits {
            e = if bit(index, level) == 0 {
                self.make_vnode(level as i32, [e, Edge::ZERO])
            } else {
                self.make_vnode(level as i32, [Edge::ZERO, e])
            };
        }
        Ok(StateDD {
            root: e,
            num_qubits,
        })
    }

    /// `|0…0⟩`.
    pub fn zero_state(&mut self, num_qubits: usize) -> Result<StateDD> {
        self.basis_state(num_qubits, 0)
    }

    /// Amplitude of `|index⟩` as the product of weights along its path.
    pub fn get_amplitude(&self, s: &StateDD, index: u64) -> Result<Complex64> {
        check_index(index, s.num_qubits)?;
        let mut e = s.root;
        let mut acc = Complex64::new(1.0, 0.0);
        loop {
            if e.is_zero() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            acc *= e.weight.value();
            if e.is_terminal() {
                return Ok(acc);
            }
            let n = self.vnode(e.node);
            e = n.succ[bit(index, n.level as usize)];
        }
    }

    /// Dense read-back of all `2ⁿ` amplitudes.
    pub fn to_amplitudes(&self, s: &StateDD) -> Result<Vec<Complex64>> {
        let limit = self.config.dense_vector_limit;
        if s.num_qubits > limit {
            return Err(DdError::DenseLimit {
                limit,
                num_qubits: s.num_qubits,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1usize << s.num_qubits];
        self.fill_vector(s.root, Complex64::new(1.0, 0.0), 0, &mut out);
        Ok(out)
    }

    fn fill_vector(&self, e: Edge, acc: Complex64, offset: usize, out: &mut [Complex64]) {
        if e.is_zero() {
            return;
        }
        let w = acc * e.weight.value();
        if e.is_terminal() {
            out[offset] = w;
            return;
        }
        let n = *self.vnode(e.node);
        let stride = 1usize << n.level;
        self.fill_vector(n.succ[0], w, offset, out);
        self.fill_vector(n.succ[1], w, offset + stride, out);
    }

    /// `⟨a|b⟩`, conjugating the first operand.
    pub fn inner_product(&mut self, a: &StateDD, b: &StateDD) -> Result<Complex64> {
        same_size(a.num_qubits, b.num_qubits)?;
        if a.root.is_zero() || b.root.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let inner = self.inner_rec(a.root.node, b.root.node);
        Ok(a.root.weight.value().conj() * b.root.weight.value() * inner)
    }

    fn inner_rec(&mut self, a: NodeId, b: NodeId) -> Complex64 {
        if a.is_terminal() {
            return Complex64::new(1.0, 0.0);
        }
        if let Some(v) = self.caches.inner.get(&(a, b)) {
            return v;
        }
        let na = *self.vnode(a);
        let nb = *self.vnode(b);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..2 {
            let (ea, eb) = (na.succ[k], nb.succ[k]);
            if ea.is_zero() || eb.is_zero() {
                continue;
            }
            sum += ea.weight.value().conj() * eb.weight.value() * self.inner_rec(ea.node, eb.node);
        }
        self.caches.inner.insert((a, b), sum);
        sum
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&mut self, a: &StateDD, b: &StateDD) -> Result<f64> {
        Ok(self.inner_product(a, b)?.norm_sqr())
    }

    /// Squared norm of the state.
    pub fn norm_sqr(&mut self, s: &StateDD) -> f64 {
        self.inner_product(s, s).map(|c| c.re).unwrap_or(0.0)
    }

    /// Elementwise sum of two state vectors.
    pub fn add_states(&mut self, a: &StateDD, b: &StateDD) -> Result<StateDD> {
        same_size(a.num_qubits, b.num_qubits)?;
        let root = self.vadd(a.root, b.root);
        Ok(StateDD {
            root,
            num_qubits: a.num_qubits,
        })
    }

    pub(crate) fn vadd(&mut self, x: Edge, y: Edge) -> Edge {
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
        if let Some(r) = self.caches.vadd.get(&key) {
            return r;
        }
        let nx = *self.vnode(x.node);
        let ny = *self.vnode(y.node);
        let mut succ = [Edge::ZERO; 2];
        for (k, s) in succ.iter_mut().enumerate() {
            let a = self.scale(nx.succ[k], x.weight.value());
            let b = self.scale(ny.succ[k], y.weight.value());
            *s = self.vadd(a, b);
        }
        let r = self.make_vnode(nx.level, succ);
        self.caches.vadd.insert(key, r);
        r
    }

    /// Multiplies the state by a scalar (root weight only).
    pub fn scale_state(&mut self, s: &StateDD, f: Complex64) -> StateDD {
        StateDD {
            root: self.scale(s.root, f),
            num_qubits: s.num_qubits,
        }
    }

    /// Upstream probability (squared norm of the represented sub-vector) of
    /// every node reachable from `root`, keyed by node id.
    pub(crate) fn upstream_probabilities(
        &self,
        root: Edge,
    ) -> rustc_hash::FxHashMap<NodeId, f64> {
        let mut memo = rustc_hash::FxHashMap::default();
        memo.insert(NodeId::TERMINAL, 1.0);
        if !root.is_zero() {
            self.upstream_rec(root.node, &mut memo);
        }
        memo
    }

    fn upstream_rec(&self, id: NodeId, memo: &mut rustc_hash::FxHashMap<NodeId, f64>) -> f64 {
        if let Some(&p) = memo.get(&id) {
            return p;
        }
        let n = *self.vnode(id);
        let mut p = 0.0;
        for e in n.succ {
            if !e.is_zero() {
                p += e.weight.value().norm_sqr() * self.upstream_rec(e.node, memo);
            }
        }
        memo.insert(id, p);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::package::VectorNormScheme;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn psi() -> Vec<Complex64> {
        vec![c(0.), c(0.), c(0.5), c(0.), c(0.5), c(0.), c(-FRAC_1_SQRT_2), c(0.)]
    }

    #[test]
    fn example_state_under_leftmost() {
        let mut m = Manager::with_scheme(VectorNormScheme::Leftmost);
        let s = m.from_amplitudes(&psi()).unwrap();
        assert_eq!(m.node_count(&s), 4);
        assert!((s.root.weight.value() - c(0.5)).norm() < 1e-12);
        // the right q1 node carries −√2 on its 1-edge
        let q2 = m.vector_successors(s.root.node);
        let right = m.vector_successors(q2[1].node);
        assert!((right[1].weight.value() - c(-2f64.sqrt())).norm() < 1e-12);
        assert_eq!(right[0].node, right[1].node);
        assert!((m.get_amplitude(&s, 6).unwrap() - c(-FRAC_1_SQRT_2)).norm() < 1e-12);
        assert_eq!(m.get_amplitude(&s, 0).unwrap(), c(0.0));
    }

    #[test]
    fn ket_zero_is_single_node() {
        let mut m = Manager::default();
        let s = m.from_amplitudes(&[c(1.0), c(0.0)]).unwrap();
        assert_eq!(m.node_count(&s), 1);
        let succ = m.vector_successors(s.root.node);
        assert!(succ[0].weight.is_one());
        assert!(succ[1].is_zero());
    }

    #[test]
    fn bad_lengths() {
        let mut m = Manager::default();
        assert_eq!(m.from_amplitudes(&[c(1.0); 3]), Err(DdError::NotPowerOfTwo(3)));
        assert_eq!(m.from_amplitudes(&[c(1.0)]), Err(DdError::NotPowerOfTwo(1)));
        let z = m.from_amplitudes(&[c(0.0); 4]).unwrap();
        assert!(z.root.is_zero());
    }

    #[test]
    fn basis_states() {
        let mut m = Manager::default();
        let s = m.basis_state(3, 6).unwrap();
        assert_eq!(m.node_count(&s), 3);
        for j in 0..8 {
            let a = m.get_amplitude(&s, j).unwrap();
            assert_eq!(a, if j == 6 { c(1.0) } else { c(0.0) });
        }
        let one = m.basis_state(1, 1).unwrap();
        assert_eq!(m.to_amplitudes(&one).unwrap(), vec![c(0.0), c(1.0)]);
        assert!(m.basis_state(3, 8).is_err());
        assert!(m.get_amplitude(&s, 9).is_err());
    }

    #[test]
    fn inner_products() {
        let mut m = Manager::default();
        let s = m.from_amplitudes(&psi()).unwrap();
        assert!((m.inner_product(&s, &s).unwrap() - c(1.0)).norm() < 1e-12);
        let a = m.basis_state(3, 0).unwrap();
        let b = m.basis_state(3, 6).unwrap();
        assert_eq!(m.inner_product(&a, &b).unwrap(), c(0.0));
        let zero = m.from_amplitudes(&[c(1.0), c(0.0)]).unwrap();
        let plus = m.from_amplitudes(&[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        assert!((m.inner_product(&zero, &plus).unwrap() - c(FRAC_1_SQRT_2)).norm() < 1e-12);
        assert!((m.fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-12);
        assert!((m.fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(m.fidelity(&a, &b).unwrap(), 0.0);
        assert!(m.inner_product(&a, &zero).is_err());
    }

    #[test]
    fn inner_product_conjugates_first_argument() {
        let mut m = Manager::default();
        let a = m.from_amplitudes(&[Complex64::new(0.0, 1.0), c(0.0)]).unwrap();
        let b = m.from_amplitudes(&[c(1.0), c(0.0)]).unwrap();
        let ip = m.inner_product(&a, &b).unwrap();
        assert!((ip - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn shared_halves() {
        let mut m = Manager::default();
        let s = m.from_amplitudes(&[c(0.3), c(0.4), c(0.3), c(0.4)]).unwrap();
        assert_eq!(m.node_count(&s), 2);
    }

    #[test]
    fn addition_with_zero_is_identity() {
        let mut m = Manager::default();
        let s = m.from_amplitudes(&psi()).unwrap();
        let z = m.from_amplitudes(&[c(0.0); 8]).unwrap();
        assert_eq!(m.add_states(&s, &z).unwrap(), s);
    }

    #[test]
    fn dense_limit_guard() {
        let mut m = Manager::new(crate::package::ManagerConfig {
            dense_vector_limit: 2,
            ..Default::default()
        });
        let s = m.basis_state(3, 0).unwrap();
        assert!(matches!(m.to_amplitudes(&s), Err(DdError::DenseLimit { .. })));
    }
}

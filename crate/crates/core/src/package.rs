//! The decision-diagram manager: node arenas, unique tables, compute tables
//! and reference-count based reclamation shared by every diagram kind.
//!
//! Vector nodes (two successors) and matrix nodes (four successors, also used
//! for density matrices) live in separate arenas. Slot 0 of each arena is the
//! shared terminal. Levels are qubit indices; the terminal sits at level −1 and
//! every non-zero edge out of a level-`k` node leads to a level-`k−1` node, so
//! diagrams never skip levels. Zero sub-vectors/sub-matrices are represented
//! by zero stubs: edges into the terminal carrying weight 0.

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use crate::cache::ComputeTable;
use crate::complex::{CanonicalComplex, ComplexTable, DEFAULT_TOLERANCE};
use crate::error::{DdError, Result};

/// Largest number of qubits (levels) a manager accepts.
pub const MAX_QUBITS: usize = 1024;

/// Index of a node inside one of the manager's arenas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub const TERMINAL: NodeId = NodeId(0);

    #[inline]
    pub fn is_terminal(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

/// A weighted reference to a node; the universal handle to a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub node: NodeId,
    pub weight: CanonicalComplex,
}

impl Edge {
    pub const ZERO: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: CanonicalComplex::ZERO,
    };
    pub const ONE: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: CanonicalComplex::ONE,
    };

    /// True for the zero stub (and only for it).
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.weight.is_zero()
    }

    #[inline]
    pub fn is_terminal(&self) -> bool {
        self.node.is_terminal()
    }
}

/// How the two outgoing weights of a vector node are normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VectorNormScheme {
    /// Divide by the leftmost non-zero weight.
    Leftmost,
    /// Divide by the Euclidean norm of the weight pair, then rotate so the
    /// first non-zero weight is real and positive.
    #[default]
    L2,
}

impl VectorNormScheme {
    pub fn name(self) -> &'static str {
        match self {
            VectorNormScheme::Leftmost => "leftmost",
            VectorNormScheme::L2 => "l2",
        }
    }
}

impl std::str::FromStr for VectorNormScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "leftmost" => Ok(VectorNormScheme::Leftmost),
            "l2" => Ok(VectorNormScheme::L2),
            other => Err(format!("unknown normalization scheme '{other}'")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ManagerConfig {
    pub scheme: VectorNormScheme,
    pub tolerance: f64,
    /// Entries per compute table; 0 disables caching.
    pub cache_capacity: usize,
    /// Largest qubit count for dense vector read-back.
    pub dense_vector_limit: usize,
    /// Largest qubit count for dense matrix read-back.
    pub dense_matrix_limit: usize,
    /// Live-node count above which [`Manager::maybe_collect`] reclaims.
    pub gc_threshold: usize,
}

impl Default for ManagerConfig {
    fn default() -> Self {
        ManagerConfig {
            scheme: VectorNormScheme::L2,
            tolerance: DEFAULT_TOLERANCE,
            cache_capacity: 1 << 16,
            dense_vector_limit: 20,
            dense_matrix_limit: 10,
            gc_threshold: 1 << 18,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct VNode {
    pub(crate) level: i32,
    pub(crate) succ: [Edge; 2],
    pub(crate) refs: u32,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct MNode {
    pub(crate) level: i32,
    pub(crate) succ: [Edge; 4],
    pub(crate) refs: u32,
}

const DEAD: i32 = -2;

/// Which arena a diagram lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DdKind {
    Vector,
    Matrix,
}

/// Common view of the typed diagram handles.
pub trait Diagram {
    fn root(&self) -> Edge;
    fn num_qubits(&self) -> usize;
    fn kind() -> DdKind;
}

pub(crate) struct Caches {
    pub(crate) vadd: ComputeTable<(Edge, Edge), Edge>,
    pub(crate) madd: ComputeTable<(Edge, Edge), Edge>,
    pub(crate) mat_vec: ComputeTable<(NodeId, NodeId), Edge>,
    pub(crate) mat_mat: ComputeTable<(NodeId, NodeId), Edge>,
    pub(crate) kron: ComputeTable<(NodeId, NodeId, u32), Edge>,
    pub(crate) adjoint: ComputeTable<NodeId, Edge>,
    pub(crate) inner: ComputeTable<(NodeId, NodeId), Complex64>,
    pub(crate) outer: ComputeTable<(NodeId, NodeId), Edge>,
}

impl Caches {
    fn new(cap: usize) -> Self {
        Caches {
            vadd: ComputeTable::new(cap),
            madd: ComputeTable::new(cap),
            mat_vec: ComputeTable::new(cap),
            mat_mat: ComputeTable::new(cap),
            kron: ComputeTable::new(cap),
            adjoint: ComputeTable::new(cap),
            inner: ComputeTable::new(cap),
            outer: ComputeTable::new(cap),
        }
    }

    fn clear(&mut self) {
        self.vadd.clear();
        self.madd.clear();
        self.mat_vec.clear();
        self.mat_mat.clear();
        self.kron.clear();
        self.adjoint.clear();
        self.inner.clear();
        self.outer.clear();
    }

    fn hit_ratio(&self) -> (u64, u64) {
        let tables = [
            (self.vadd.hits, self.vadd.lookups),
            (self.madd.hits, self.madd.lookups),
            (self.mat_vec.hits, self.mat_vec.lookups),
            (self.mat_mat.hits, self.mat_mat.lookups),
            (self.kron.hits, self.kron.lookups),
            (self.adjoint.hits, self.adjoint.lookups),
            (self.inner.hits, self.inner.lookups),
            (self.outer.hits, self.outer.lookups),
        ];
        tables
            .iter()
            .fold((0, 0), |(h, l), (th, tl)| (h + th, l + tl))
    }
}

/// Counters reported by [`Manager::stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ManagerStats {
    pub live_vector_nodes: usize,
    pub live_matrix_nodes: usize,
    pub peak_vector_nodes: usize,
    pub peak_matrix_nodes: usize,
    pub complex_entries: usize,
    pub cache_hits: u64,
    pub cache_lookups: u64,
    pub collections: usize,
}

/// Owner of all decision-diagram state. Single-threaded; edges must never be
/// mixed between managers.
pub struct Manager {
    pub(crate) config: ManagerConfig,
    pub(crate) complex: ComplexTable,
    pub(crate) vnodes: Vec<VNode>,
    vfree: Vec<u32>,
    vunique: Vec<FxHashMap<[Edge; 2], NodeId>>,
    pub(crate) mnodes: Vec<MNode>,
    mfree: Vec<u32>,
    munique: Vec<FxHashMap<[Edge; 4], NodeId>>,
    pub(crate) caches: Caches,
    peak_v: usize,
    peak_m: usize,
    collections: usize,
}

impl Default for Manager {
    fn default() -> Self {
        Manager::new(ManagerConfig::default())
    }
}

impl std::fmt::Debug for Manager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Manager")
            .field("config", &self.config)
            .field("stats", &self.stats())
            .finish()
    }
}

impl Manager {
    pub fn new(config: ManagerConfig) -> Self {
        let complex = ComplexTable::new(config.tolerance);
        let caches = Caches::new(config.cache_capacity);
        Manager {
            complex,
            vnodes: vec![VNode {
                level: -1,
                succ: [Edge::ZERO; 2],
                refs: 0,
            }],
            vfree: Vec::new(),
            vunique: Vec::new(),
            mnodes: vec![MNode {
                level: -1,
                succ: [Edge::ZERO; 4],
                refs: 0,
            }],
            mfree: Vec::new(),
            munique: Vec::new(),
            caches,
            peak_v: 0,
            peak_m: 0,
            collections: 0,
            config,
        }
    }

    pub fn with_scheme(scheme: VectorNormScheme) -> Self {
        Manager::new(ManagerConfig {
            scheme,
            ..ManagerConfig::default()
        })
    }

    pub fn config(&self) -> &ManagerConfig {
        &self.config
    }

    pub fn scheme(&self) -> VectorNormScheme {
        self.config.scheme
    }

    pub fn tolerance(&self) -> f64 {
        self.config.tolerance
    }

    // ---- complex numbers -------------------------------------------------

    /// Returns the canonical representative of `re + i·im`.
    pub fn intern_complex(&mut self, re: f64, im: f64) -> Result<CanonicalComplex> {
        self.complex.intern(re, im)
    }

    #[inline]
    pub(crate) fn cw(&mut self, c: Complex64) -> CanonicalComplex {
        if self.complex.approx_zero(c) {
            CanonicalComplex::ZERO
        } else {
            self.complex.intern_value(c)
        }
    }

    /// Builds a canonical edge, collapsing (near-)zero weights to the zero stub.
    #[inline]
    pub(crate) fn edge(&mut self, node: NodeId, w: Complex64) -> Edge {
        let weight = self.cw(w);
        if weight.is_zero() {
            Edge::ZERO
        } else {
            Edge { node, weight }
        }
    }

    /// Multiplies an edge's weight by `f`.
    #[inline]
    pub(crate) fn scale(&mut self, e: Edge, f: Complex64) -> Edge {
        if e.is_zero() {
            return Edge::ZERO;
        }
        self.edge(e.node, e.weight.value() * f)
    }

    /// Terminal edge with the given weight (zero stub for 0).
    pub fn terminal(&mut self, w: Complex64) -> Edge {
        self.edge(NodeId::TERMINAL, w)
    }

    // ---- node access -----------------------------------------------------

    #[inline]
    pub(crate) fn vnode(&self, id: NodeId) -> &VNode {
        &self.vnodes[id.0 as usize]
    }

    #[inline]
    pub(crate) fn mnode(&self, id: NodeId) -> &MNode {
        &self.mnodes[id.0 as usize]
    }

    /// Level of a vector node (−1 for the terminal).
    pub fn vector_level(&self, id: NodeId) -> i32 {
        self.vnode(id).level
    }

    /// Level of a matrix node (−1 for the terminal).
    pub fn matrix_level(&self, id: NodeId) -> i32 {
        self.mnode(id).level
    }

    pub fn vector_successors(&self, id: NodeId) -> [Edge; 2] {
        self.vnode(id).succ
    }

    pub fn matrix_successors(&self, id: NodeId) -> [Edge; 4] {
        self.mnode(id).succ
    }

    pub fn level_of(&self, kind: DdKind, id: NodeId) -> i32 {
        match kind {
            DdKind::Vector => self.vnode(id).level,
            DdKind::Matrix => self.mnode(id).level,
        }
    }

    /// Successor edges of any node as a slice-backed vector.
    pub fn successors(&self, kind: DdKind, id: NodeId) -> Vec<Edge> {
        match kind {
            DdKind::Vector => self.vnode(id).succ.to_vec(),
            DdKind::Matrix => self.mnode(id).succ.to_vec(),
        }
    }

    // ---- canonical node construction ------------------------------------

    fn check_children(&self, kind: DdKind, level: usize, succ: &[Edge]) -> Result<()> {
        if level >= MAX_QUBITS {
            return Err(DdError::LevelOutOfRange {
                level,
                num_qubits: MAX_QUBITS,
            });
        }
        for e in succ {
            if e.is_zero() {
                continue;
            }
            let child = self.level_of(kind, e.node);
            if child != level as i32 - 1 {
                return Err(DdError::LevelOutOfRange {
                    level: (child.max(0)) as usize,
                    num_qubits: level,
                });
            }
        }
        Ok(())
    }

    /// Normalizes `(e0, e1)` under the active scheme, hash-conses the node at
    /// `level` and returns the edge carrying the extracted common factor.
    pub fn make_vector_node(&mut self, level: usize, e0: Edge, e1: Edge) -> Result<Edge> {
        self.check_children(DdKind::Vector, level, &[e0, e1])?;
        Ok(self.make_vnode(level as i32, [e0, e1]))
    }

    /// Matrix counterpart of [`Manager::make_vector_node`]; successor order is
    /// (row 0/col 0, row 0/col 1, row 1/col 0, row 1/col 1).
    pub fn make_matrix_node(&mut self, level: usize, e: [Edge; 4]) -> Result<Edge> {
        self.check_children(DdKind::Matrix, level, &e)?;
        Ok(self.make_mnode(level as i32, e))
    }

    pub(crate) fn make_vnode(&mut self, level: i32, e: [Edge; 2]) -> Edge {
        let w0 = e[0].weight.value();
        let w1 = e[1].weight.value();
        let z0 = e[0].is_zero();
        let z1 = e[1].is_zero();
        if z0 && z1 {
            return Edge::ZERO;
        }
        let (top, n0, n1) = match self.config.scheme {
            VectorNormScheme::Leftmost => {
                if !z0 {
                    (w0, Complex64::new(1.0, 0.0), w1 / w0)
                } else {
                    (w1, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
                }
            }
            VectorNormScheme::L2 => {
                let m0 = w0.norm();
                let m1 = w1.norm();
                let norm = m0.hypot(m1);
                if !z0 {
                    let top = w0 * (norm / m0);
                    let rot = w0.conj() / m0;
                    (top, Complex64::new(m0 / norm, 0.0), w1 * rot / norm)
                } else {
                    let top = w1 * (norm / m1);
                    (top, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
                }
            }
        };
        let s0 = if z0 { Edge::ZERO } else { self.edge(e[0].node, n0) };
        let s1 = if z1 { Edge::ZERO } else { self.edge(e[1].node, n1) };
        if s0.is_zero() && s1.is_zero() {
            return Edge::ZERO;
        }
        let node = self.lookup_vnode(level, [s0, s1]);
        self.edge(node, top)
    }

    pub(crate) fn make_mnode(&mut self, level: i32, e: [Edge; 4]) -> Edge {
        let mags = e.map(|x| x.weight.value().norm());
        let max = mags.iter().cloned().fold(0.0_f64, f64::max);
        if e.iter().all(|x| x.is_zero()) {
            return Edge::ZERO;
        }
        let tol = self.config.tolerance;
        let pivot = (0..4)
            .find(|&i| !e[i].is_zero() && mags[i] >= max - tol)
            .expect("non-zero successor exists");
        let top = e[pivot].weight.value();
        let mut succ = [Edge::ZERO; 4];
        for i in 0..4 {
            if e[i].is_zero() {
                continue;
            }
            succ[i] = if i == pivot {
                Edge {
                    node: e[i].node,
                    weight: CanonicalComplex::ONE,
                }
            } else {
                let w = e[i].weight.value() / top;
                self.edge(e[i].node, w)
            };
        }
        let node = self.lookup_mnode(level, succ);
        self.edge(node, top)
    }

    fn lookup_vnode(&mut self, level: i32, succ: [Edge; 2]) -> NodeId {
        let l = level as usize;
        if self.vunique.len() <= l {
            self.vunique.resize_with(l + 1, FxHashMap::default);
        }
        if let Some(&id) = self.vunique[l].get(&succ) {
            return id;
        }
        let node = VNode {
            level,
            succ,
            refs: 0,
        };
        let id = match self.vfree.pop() {
            Some(i) => {
                self.vnodes[i as usize] = node;
                NodeId(i)
            }
            None => {
                self.vnodes.push(node);
                NodeId((self.vnodes.len() - 1) as u32)
            }
        };
        self.vunique[l].insert(succ, id);
        let live = self.vnodes.len() - 1 - self.vfree.len();
        self.peak_v = self.peak_v.max(live);
        id
    }

    fn lookup_mnode(&mut self, level: i32, succ: [Edge; 4]) -> NodeId {
        let l = level as usize;
        if self.munique.len() <= l {
            self.munique.resize_with(l + 1, FxHashMap::default);
        }
        if let Some(&id) = self.munique[l].get(&succ) {
            return id;
        }
        let node = MNode {
            level,
            succ,
            refs: 0,
        };
        let id = match self.mfree.pop() {
            Some(i) => {
                self.mnodes[i as usize] = node;
                NodeId(i)
            }
            None => {
                self.mnodes.push(node);
                NodeId((self.mnodes.len() - 1) as u32)
            }
        };
        self.munique[l].insert(succ, id);
        let live = self.mnodes.len() - 1 - self.mfree.len();
        self.peak_m = self.peak_m.max(live);
        id
    }

    // ---- inspection ------------------------------------------------------

    /// Number of distinct interior nodes reachable from `root`.
    pub fn node_count_edge(&self, kind: DdKind, root: Edge) -> usize {
        if root.is_terminal() {
            return 0;
        }
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack = vec![root.node];
        while let Some(id) = stack.pop() {
            if id.is_terminal() || !seen.insert(id) {
                continue;
            }
            match kind {
                DdKind::Vector => stack.extend(self.vnode(id).succ.iter().map(|e| e.node)),
                DdKind::Matrix => stack.extend(self.mnode(id).succ.iter().map(|e| e.node)),
            }
        }
        seen.len()
    }

    pub fn node_count<D: Diagram>(&self, dd: &D) -> usize {
        self.node_count_edge(D::kind(), dd.root())
    }

    /// Nodes currently registered in the unique tables.
    pub fn live_nodes(&self) -> (usize, usize) {
        (
            self.vnodes.len() - 1 - self.vfree.len(),
            self.mnodes.len() - 1 - self.mfree.len(),
        )
    }

    /// Every live vector node as (id, level, successors); used by invariant checks.
    pub fn vector_nodes(&self) -> Vec<(NodeId, i32, [Edge; 2])> {
        self.vunique
            .iter()
            .flat_map(|m| m.values())
            .map(|&id| {
                let n = self.vnode(id);
                (id, n.level, n.succ)
            })
            .collect()
    }

    /// Every live matrix node as (id, level, successors).
    pub fn matrix_nodes(&self) -> Vec<(NodeId, i32, [Edge; 4])> {
        self.munique
            .iter()
            .flat_map(|m| m.values())
            .map(|&id| {
                let n = self.mnode(id);
                (id, n.level, n.succ)
            })
            .collect()
    }

    pub fn stats(&self) -> ManagerStats {
        let (lv, lm) = self.live_nodes();
        let (hits, lookups) = self.caches.hit_ratio();
        ManagerStats {
            live_vector_nodes: lv,
            live_matrix_nodes: lm,
            peak_vector_nodes: self.peak_v,
            peak_matrix_nodes: self.peak_m,
            complex_entries: self.complex.len(),
            cache_hits: hits,
            cache_lookups: lookups,
            collections: self.collections,
        }
    }

    // ---- reference counting & reclamation --------------------------------

    pub fn retain<D: Diagram>(&mut self, dd: &D) {
        self.retain_edge(D::kind(), dd.root());
    }

    pub fn release<D: Diagram>(&mut self, dd: &D) -> Result<()> {
        self.release_edge(D::kind(), dd.root())
    }

    pub fn retain_edge(&mut self, kind: DdKind, e: Edge) {
        let mut stack = vec![e.node];
        while let Some(id) = stack.pop() {
            if id.is_terminal() {
                continue;
            }
            let first = match kind {
                DdKind::Vector => {
                    let n = &mut self.vnodes[id.0 as usize];
                    n.refs = n.refs.saturating_add(1);
                    n.refs == 1
                }
                DdKind::Matrix => {
                    let n = &mut self.mnodes[id.0 as usize];
                    n.refs = n.refs.saturating_add(1);
                    n.refs == 1
                }
            };
            if first {
                stack.extend(self.successors(kind, id).into_iter().map(|s| s.node));
            }
        }
    }

    pub fn release_edge(&mut self, kind: DdKind, e: Edge) -> Result<()> {
        if e.node.is_terminal() {
            return Ok(());
        }
        let refs = match kind {
            DdKind::Vector => self.vnode(e.node).refs,
            DdKind::Matrix => self.mnode(e.node).refs,
        };
        if refs == 0 {
            return Err(DdError::ReleaseUnderflow);
        }
        let mut stack = vec![e.node];
        while let Some(id) = stack.pop() {
            if id.is_terminal() {
                continue;
            }
            let last = match kind {
                DdKind::Vector => {
                    let n = &mut self.vnodes[id.0 as usize];
                    n.refs = n.refs.saturating_sub(1);
                    n.refs == 0
                }
                DdKind::Matrix => {
                    let n = &mut self.mnodes[id.0 as usize];
                    n.refs = n.refs.saturating_sub(1);
                    n.refs == 0
                }
            };
            if last {
                stack.extend(self.successors(kind, id).into_iter().map(|s| s.node));
            }
        }
        Ok(())
    }

    /// Removes every unreferenced node and drops all compute-table entries.
    /// Returns the number of nodes reclaimed. Diagrams that were not retained
    /// become invalid.
    pub fn collect_garbage(&mut self) -> usize {
        let mut freed = 0;
        for table in &mut self.vunique {
            let nodes = &mut self.vnodes;
            let free = &mut self.vfree;
            table.retain(|_, id| {
                let n = &mut nodes[id.0 as usize];
                if n.refs == 0 {
                    n.level = DEAD;
                    free.push(id.0);
                    freed += 1;
                    false
                } else {
                    true
                }
            });
        }
        for table in &mut self.munique {
            let nodes = &mut self.mnodes;
            let free = &mut self.mfree;
            table.retain(|_, id| {
                let n = &mut nodes[id.0 as usize];
                if n.refs == 0 {
                    n.level = DEAD;
                    free.push(id.0);
                    freed += 1;
                    false
                } else {
                    true
                }
            });
        }
        self.caches.clear();
        self.collections += 1;
        freed
    }

    /// Collects garbage if the live node count exceeds the configured threshold.
    pub fn maybe_collect(&mut self) -> usize {
        let (v, m) = self.live_nodes();
        if v + m > self.config.gc_threshold {
            self.collect_garbage()
        } else {
            0
        }
    }

    /// Clears all compute tables without touching nodes.
    pub fn clear_caches(&mut self) {
        self.caches.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_stubs_collapse() {
        let mut m = Manager::default();
        let e = m.make_vector_node(0, Edge::ZERO, Edge::ZERO).unwrap();
        assert_eq!(e, Edge::ZERO);
        let e = m.make_matrix_node(0, [Edge::ZERO; 4]).unwrap();
        assert_eq!(e, Edge::ZERO);
    }

    #[test]
    fn leftmost_extracts_first_weight() {
        let mut m = Manager::with_scheme(VectorNormScheme::Leftmost);
        let half = m.terminal(c(0.5, 0.0));
        let e = m.make_vector_node(0, half, Edge::ZERO).unwrap();
        assert_eq!(e.weight.value(), c(0.5, 0.0));
        let s = m.vector_successors(e.node);
        assert!(s[0].weight.is_one() && s[0].is_terminal());
        assert!(s[1].is_zero());
    }

    #[test]
    fn l2_extracts_norm() {
        let mut m = Manager::with_scheme(VectorNormScheme::L2);
        let one = m.terminal(c(1.0, 0.0));
        let e = m.make_vector_node(0, one, one).unwrap();
        assert!((e.weight.value() - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        let s = m.vector_successors(e.node);
        let sum: f64 = s.iter().map(|x| x.weight.value().norm_sqr()).sum();
        assert!((sum - 1.0).abs() < 1e-15);
        assert!((s[0].weight.re() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn l2_phase_rule_makes_first_weight_real() {
        let mut m = Manager::with_scheme(VectorNormScheme::L2);
        let a = m.terminal(c(0.0, 0.6));
        let b = m.terminal(c(-0.8, 0.0));
        let e = m.make_vector_node(0, a, b).unwrap();
        let s = m.vector_successors(e.node);
        assert_eq!(s[0].weight.im(), 0.0);
        assert!(s[0].weight.re() > 0.0);
        // read back
        let r0 = e.weight.value() * s[0].weight.value();
        let r1 = e.weight.value() * s[1].weight.value();
        assert!((r0 - c(0.0, 0.6)).norm() < 1e-15);
        assert!((r1 - c(-0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn matrix_pivot_is_leftmost_largest() {
        let mut m = Manager::default();
        let one = m.terminal(c(1.0, 0.0));
        let e = m.make_matrix_node(0, [one, Edge::ZERO, Edge::ZERO, one]).unwrap();
        assert!(e.weight.is_one());
        let s = m.matrix_successors(e.node);
        assert!(s[0].weight.is_one() && s[3].weight.is_one());
        assert!(s[1].is_zero() && s[2].is_zero());

        let small = m.terminal(c(0.5, 0.0));
        let big = m.terminal(c(0.0, -2.0));
        let e = m.make_matrix_node(0, [small, big, big, small]).unwrap();
        assert_eq!(e.weight.value(), c(0.0, -2.0));
        let s = m.matrix_successors(e.node);
        assert!(s[1].weight.is_one());
        assert!(s[2].weight.is_one());
        assert!((s[0].weight.value() - c(0.0, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn hash_consing_shares_nodes() {
        let mut m = Manager::default();
        let one = m.terminal(c(1.0, 0.0));
        let a = m.make_vector_node(0, one, Edge::ZERO).unwrap();
        let b = m.make_vector_node(0, one, Edge::ZERO).unwrap();
        assert_eq!(a, b);
        assert_eq!(m.live_nodes().0, 1);
    }

    #[test]
    fn child_level_is_checked() {
        let mut m = Manager::default();
        let one = m.terminal(c(1.0, 0.0));
        assert!(m.make_vector_node(1, one, one).is_err());
        assert!(m.make_vector_node(MAX_QUBITS, Edge::ZERO, Edge::ZERO).is_err());
    }

    #[test]
    fn release_underflow_is_an_error() {
        let mut m = Manager::default();
        let one = m.terminal(c(1.0, 0.0));
        let a = m.make_vector_node(0, one, Edge::ZERO).unwrap();
        assert_eq!(
            m.release_edge(DdKind::Vector, a),
            Err(DdError::ReleaseUnderflow)
        );
        m.retain_edge(DdKind::Vector, a);
        m.release_edge(DdKind::Vector, a).unwrap();
        assert_eq!(m.collect_garbage(), 1);
        assert_eq!(m.live_nodes(), (0, 0));
    }
}

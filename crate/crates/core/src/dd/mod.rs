//! Edge-weighted decision diagrams for state vectors and operator matrices.
//!
//! A vector node at level `i` splits its sub-vector on the value of qubit
//! `i` (successor 0, then 1). A matrix node splits into four blocks in
//! operator-basis order `|0⟩⟨0|, |0⟩⟨1|, |1⟩⟨0|, |1⟩⟨1|`, i.e. successor
//! `2·row_bit + col_bit`. Levels are never skipped except through zero
//! edges, so every non-zero path visits each qubit once.
//!
//! Every node is normalized: the first non-zero successor weight is exactly
//! `1`, and the factor is carried on the incoming edge. Together with the
//! unique table and weight snapping ([`DdConfig::tolerance`]) this makes
//! the representation canonical: equal objects share a root node and a
//! bit-identical root weight.
//!
//! Memory is reclaimed by reference counting. Handles that must survive a
//! [`DdPackage::garbage_collect`] call have to be registered with
//! [`DdPackage::inc_ref`] first; unreferenced nodes are only released by an
//! explicit collection.
//!
//! A package is single-writer. Run independent packages on separate
//! threads for parallel work; diagrams do not move between packages.

mod complex_table;
mod export;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{BasisState, Gate};
use crate::dense::Matrix;
use complex_table::ComplexTable;

pub type Weight = Complex64;

const ZERO_W: Complex64 = Complex64::new(0.0, 0.0);
const ONE_W: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdError {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("dense extraction of {qubits} qubits exceeds the cap of {cap}")]
    DenseCapExceeded { qubits: usize, cap: usize },
    #[error("gate acts on qubit {qubit}, but the register has {qubits} qubits")]
    GateOutOfRange { qubit: usize, qubits: usize },
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const TERMINAL: NodeId = NodeId(u32::MAX);

    pub fn is_terminal(self) -> bool {
        self == NodeId::TERMINAL
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

/// A weighted reference to a node or to the terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub node: NodeId,
    pub weight: Weight,
}

impl Edge {
    pub const ZERO: Edge = Edge {
        node: NodeId::TERMINAL,
        weight: ZERO_W,
    };

    pub fn terminal(weight: Weight) -> Edge {
        Edge {
            node: NodeId::TERMINAL,
            weight,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weight == ZERO_W
    }

    /// True when both edges have the same target and bit-identical weights.
    pub fn bit_eq(&self, other: &Edge) -> bool {
        self.node == other.node
            && self.weight.re.to_bits() == other.weight.re.to_bits()
            && self.weight.im.to_bits() == other.weight.im.to_bits()
    }

    fn key(&self) -> (u32, u64, u64) {
        (self.node.0, self.weight.re.to_bits(), self.weight.im.to_bits())
    }
}

/// Common view of [`VectorDd`] and [`MatrixDd`].
pub trait DdHandle {
    fn root(&self) -> Edge;
    fn qubits(&self) -> usize;
}

/// Decision diagram of a vector in `ℂ^(2^n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorDd {
    root: Edge,
    qubits: usize,
}

/// Decision diagram of a matrix in `ℂ^(2^n × 2^n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixDd {
    root: Edge,
    qubits: usize,
}

impl DdHandle for VectorDd {
    fn root(&self) -> Edge {
        self.root
    }
    fn qubits(&self) -> usize {
        self.qubits
    }
}

impl DdHandle for MatrixDd {
    fn root(&self) -> Edge {
        self.root
    }
    fn qubits(&self) -> usize {
        self.qubits
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdConfig {
    /// Weights closer than this are identified; smaller magnitudes are zero.
    pub tolerance: f64,
    /// Live-node count above which [`DdPackage::maybe_collect`] runs a collection.
    pub gc_threshold: usize,
    /// Memoize multiplication and addition results.
    pub use_compute_table: bool,
}

impl Default for DdConfig {
    fn default() -> Self {
        DdConfig {
            tolerance: 1e-10,
            gc_threshold: 250_000,
            use_compute_table: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DdStats {
    pub peak_live_nodes: usize,
    pub gc_runs: usize,
    pub collected_nodes: usize,
    pub compute_hits: usize,
    pub compute_misses: usize,
}

#[derive(Debug, Clone)]
struct Node {
    level: u32,
    arity: u8,
    succ: [Edge; 4],
    rc: u32,
    alive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct NodeKey {
    level: u32,
    arity: u8,
    succ: [(u32, u64, u64); 4],
}

impl Node {
    fn key(&self) -> NodeKey {
        NodeKey {
            level: self.level,
            arity: self.arity,
            succ: self.succ.map(|e| e.key()),
        }
    }
}

type AddKey = (NodeId, NodeId, u64, u64);

pub struct DdPackage {
    config: DdConfig,
    nodes: Vec<Node>,
    free: Vec<u32>,
    unique: HashMap<NodeKey, u32>,
    weights: ComplexTable,
    mv_table: HashMap<(NodeId, NodeId), Edge>,
    mm_table: HashMap<(NodeId, NodeId), Edge>,
    add_table: HashMap<AddKey, Edge>,
    identities: Vec<Edge>,
    stats: DdStats,
}

impl Default for DdPackage {
    fn default() -> Self {
        DdPackage::new(DdConfig::default())
    }
}

impl DdPackage {
    pub fn new(config: DdConfig) -> Self {
        DdPackage {
            config,
            nodes: Vec::new(),
            free: Vec::new(),
            unique: HashMap::default(),
            weights: ComplexTable::new(config.tolerance),
            mv_table: HashMap::default(),
            mm_table: HashMap::default(),
            add_table: HashMap::default(),
            identities: vec![Edge::terminal(ONE_W)],
            stats: DdStats::default(),
        }
    }

    pub fn config(&self) -> &DdConfig {
        &self.config
    }

    pub fn stats(&self) -> DdStats {
        self.stats
    }

    pub fn tolerance(&self) -> f64 {
        self.weights.tolerance()
    }

    /// Nodes currently held in the store, referenced or not.
    pub fn live_nodes(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    fn level(&self, e: Edge) -> i64 {
        if e.node.is_terminal() {
            -1
        } else {
            self.node(e.node).level as i64
        }
    }

    fn snap(&mut self, w: Weight) -> Weight {
        self.weights.snap(w)
    }

    fn scaled(&mut self, e: Edge, factor: Weight) -> Edge {
        if e.is_zero() {
            return Edge::ZERO;
        }
        if factor == ONE_W {
            return e;
        }
        let w = self.snap(e.weight * factor);
        if w == ZERO_W {
            Edge::ZERO
        } else {
            Edge { node: e.node, weight: w }
        }
    }

    /// Normalizes and hash-conses a node, returning the weighted edge to it.
    fn make_node(&mut self, level: u32, arity: u8, mut succ: [Edge; 4]) -> Edge {
        let arity_n = arity as usize;
        for e in succ[..arity_n].iter_mut() {
            let w = self.weights.snap(e.weight);
            *e = if w == ZERO_W {
                Edge::ZERO
            } else {
                Edge { node: e.node, weight: w }
            };
        }
        for e in succ[arity_n..].iter_mut() {
            *e = Edge::ZERO;
        }
        let Some(first) = succ[..arity_n].iter().position(|e| !e.is_zero()) else {
            return Edge::ZERO;
        };
        let norm = succ[first].weight;
        for (i, e) in succ[..arity_n].iter_mut().enumerate() {
            if norm == ONE_W {
                break;
            }
            if i == first {
                e.weight = ONE_W;
            } else if !e.is_zero() {
                let w = self.weights.snap(e.weight / norm);
                *e = if w == ZERO_W {
                    Edge::ZERO
                } else {
                    Edge { node: e.node, weight: w }
                };
            }
        }
        debug_assert!(succ
            .iter()
            .all(|e| e.is_zero() || e.node.is_terminal() || self.node(e.node).level < level));

        let node = Node {
            level,
            arity,
            succ,
            rc: 0,
            alive: true,
        };
        let key = node.key();
        let id = match self.unique.get(&key) {
            Some(&id) => id,
            None => {
                let id = match self.free.pop() {
                    Some(slot) => {
                        self.nodes[slot as usize] = node;
                        slot
                    }
                    None => {
                        self.nodes.push(node);
                        (self.nodes.len() - 1) as u32
                    }
                };
                self.unique.insert(key, id);
                let live = self.live_nodes();
                self.stats.peak_live_nodes = self.stats.peak_live_nodes.max(live);
                id
            }
        };
        Edge {
            node: NodeId(id),
            weight: norm,
        }
    }

    // ---------------------------------------------------------------------
    // construction

    /// `|b⟩` with one node per qubit.
    pub fn basis_state(&mut self, b: &BasisState) -> VectorDd {
        let mut e = Edge::terminal(ONE_W);
        for level in 0..b.len() {
            let succ = if b.bit(level) {
                [Edge::ZERO, e, Edge::ZERO, Edge::ZERO]
            } else {
                [e, Edge::ZERO, Edge::ZERO, Edge::ZERO]
            };
            e = self.make_node(level as u32, 2, succ);
        }
        VectorDd {
            root: e,
            qubits: b.len(),
        }
    }

    pub fn zero_vector(&self, qubits: usize) -> VectorDd {
        VectorDd {
            root: Edge::ZERO,
            qubits,
        }
    }

    fn identity_edge(&mut self, qubits: usize) -> Edge {
        while self.identities.len() <= qubits {
            let below = *self.identities.last().expect("identity on 0 qubits");
            let level = (self.identities.len() - 1) as u32;
            let e = self.make_node(level, 4, [below, Edge::ZERO, Edge::ZERO, below]);
            self.inc_ref_edge(e);
            self.identities.push(e);
        }
        self.identities[qubits]
    }

    pub fn identity(&mut self, qubits: usize) -> MatrixDd {
        MatrixDd {
            root: self.identity_edge(qubits),
            qubits,
        }
    }

    /// The full-register `2^n × 2^n` operator of `gate`, padded with
    /// identities on untouched qubits.
    pub fn gate(&mut self, gate: &Gate, qubits: usize) -> Result<MatrixDd, DdError> {
        if let Some(&q) = gate.qubits().find(|&&q| q >= qubits) {
            return Err(DdError::GateOutOfRange { qubit: q, qubits });
        }
        let root = match gate.target_unitary() {
            Some(u) => self.controlled_gate(qubits, gate.controls(), gate.targets()[0], u),
            None => {
                let active: Vec<usize> = gate.qubits().copied().collect();
                self.local_operator(qubits, &active, &gate.matrix())
            }
        };
        Ok(MatrixDd { root, qubits })
    }

    /// Bottom-up construction of a (multi-)controlled single-target gate.
    fn controlled_gate(
        &mut self,
        qubits: usize,
        controls: &[usize],
        target: usize,
        u: [Complex64; 4],
    ) -> Edge {
        let is_control = |q: usize| controls.contains(&q);
        let mut blocks = u.map(Edge::terminal);
        for level in 0..target {
            for (i, block) in blocks.iter_mut().enumerate() {
                let succ = if is_control(level) {
                    // Control off: identity on the diagonal blocks, zero elsewhere.
                    let off = if i == 0 || i == 3 {
                        self.identity_edge(level)
                    } else {
                        Edge::ZERO
                    };
                    [off, Edge::ZERO, Edge::ZERO, *block]
                } else {
                    [*block, Edge::ZERO, Edge::ZERO, *block]
                };
                *block = self.make_node(level as u32, 4, succ);
            }
        }
        let mut e = self.make_node(target as u32, 4, blocks);
        for level in target + 1..qubits {
            let succ = if is_control(level) {
                [self.identity_edge(level), Edge::ZERO, Edge::ZERO, e]
            } else {
                [e, Edge::ZERO, Edge::ZERO, e]
            };
            e = self.make_node(level as u32, 4, succ);
        }
        e
    }

    /// Builds the operator acting as `matrix` on `active` qubits (first
    /// entry most significant) and as identity elsewhere. Cost grows as
    /// `4^k`, so this is meant for small `k`.
    fn local_operator(&mut self, qubits: usize, active: &[usize], matrix: &Matrix) -> Edge {
        self.local_rec(qubits as i64 - 1, active, matrix, 0, 0)
    }

    fn local_rec(
        &mut self,
        level: i64,
        active: &[usize],
        matrix: &Matrix,
        row: usize,
        col: usize,
    ) -> Edge {
        if level < 0 {
            let w = self.snap(matrix[(row, col)]);
            return if w == ZERO_W {
                Edge::ZERO
            } else {
                Edge::terminal(w)
            };
        }
        let lvl = level as usize;
        match active.iter().position(|&q| q == lvl) {
            Some(p) => {
                let bit = active.len() - 1 - p;
                let mut succ = [Edge::ZERO; 4];
                for (i, s) in succ.iter_mut().enumerate() {
                    let (r, c) = (i >> 1, i & 1);
                    *s = self.local_rec(level - 1, active, matrix, row | (r << bit), col | (c << bit));
                }
                self.make_node(lvl as u32, 4, succ)
            }
            None => {
                let e = self.local_rec(level - 1, active, matrix, row, col);
                self.make_node(lvl as u32, 4, [e, Edge::ZERO, Edge::ZERO, e])
            }
        }
    }

    /// Imports a dense vector of length `2^n`.
    pub fn vector_from_dense(&mut self, amplitudes: &[Complex64]) -> Result<VectorDd, DdError> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(DdError::BadLength {
                expected: len.next_power_of_two().max(2),
                got: len,
            });
        }
        let qubits = len.trailing_zeros() as usize;
        let root = self.vector_rec(amplitudes);
        Ok(VectorDd { root, qubits })
    }

    fn vector_rec(&mut self, amps: &[Complex64]) -> Edge {
        if amps.len() == 1 {
            let w = self.snap(amps[0]);
            return if w == ZERO_W { Edge::ZERO } else { Edge::terminal(w) };
        }
        let half = amps.len() / 2;
        let lo = self.vector_rec(&amps[..half]);
        let hi = self.vector_rec(&amps[half..]);
        let level = half.trailing_zeros();
        self.make_node(level, 2, [lo, hi, Edge::ZERO, Edge::ZERO])
    }

    pub fn matrix_from_dense(&mut self, m: &Matrix) -> Result<MatrixDd, DdError> {
        let dim = m.dim();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(DdError::BadLength {
                expected: dim.next_power_of_two().max(2),
                got: dim,
            });
        }
        let qubits = dim.trailing_zeros() as usize;
        let root = self.matrix_rec(m, 0, 0, dim);
        Ok(MatrixDd { root, qubits })
    }

    fn matrix_rec(&mut self, m: &Matrix, row: usize, col: usize, size: usize) -> Edge {
        if size == 1 {
            let w = self.snap(m[(row, col)]);
            return if w == ZERO_W { Edge::ZERO } else { Edge::terminal(w) };
        }
        let half = size / 2;
        let mut succ = [Edge::ZERO; 4];
        for (i, s) in succ.iter_mut().enumerate() {
            *s = self.matrix_rec(m, row + (i >> 1) * half, col + (i & 1) * half, half);
        }
        self.make_node(half.trailing_zeros(), 4, succ)
    }

    // ---------------------------------------------------------------------
    // arithmetic

    pub fn scale_vector(&mut self, v: &VectorDd, factor: Weight) -> VectorDd {
        VectorDd {
            root: self.scaled(v.root, factor),
            qubits: v.qubits,
        }
    }

    pub fn scale_matrix(&mut self, m: &MatrixDd, factor: Weight) -> MatrixDd {
        MatrixDd {
            root: self.scaled(m.root, factor),
            qubits: m.qubits,
        }
    }

    pub fn add_vectors(&mut self, a: &VectorDd, b: &VectorDd) -> Result<VectorDd, DdError> {
        check_qubits(a.qubits, b.qubits)?;
        Ok(VectorDd {
            root: self.add(a.root, b.root),
            qubits: a.qubits,
        })
    }

    pub fn add_matrices(&mut self, a: &MatrixDd, b: &MatrixDd) -> Result<MatrixDd, DdError> {
        check_qubits(a.qubits, b.qubits)?;
        Ok(MatrixDd {
            root: self.add(a.root, b.root),
            qubits: a.qubits,
        })
    }

    fn add(&mut self, a: Edge, b: Edge) -> Edge {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.node == b.node {
            let w = self.snap(a.weight + b.weight);
            return if w == ZERO_W {
                Edge::ZERO
            } else {
                Edge { node: a.node, weight: w }
            };
        }
        debug_assert_eq!(self.level(a), self.level(b), "add across levels");
        // a.w·A + b.w·B = a.w·(A + (b.w/a.w)·B)
        let ratio = self.snap(b.weight / a.weight);
        let key = (a.node, b.node, ratio.re.to_bits(), ratio.im.to_bits());
        let unit = match self.lookup(Table::Add, &key) {
            Some(e) => e,
            None => {
                let (level, arity, sa, sb) = {
                    let na = self.node(a.node);
                    let nb = self.node(b.node);
                    (na.level, na.arity, na.succ, nb.succ)
                };
                let mut succ = [Edge::ZERO; 4];
                for i in 0..arity as usize {
                    let rhs = self.scaled(sb[i], ratio);
                    succ[i] = self.add(sa[i], rhs);
                }
                let e = self.make_node(level, arity, succ);
                self.store(Table::Add, key, e);
                e
            }
        };
        self.scaled(unit, a.weight)
    }

    /// Matrix–vector product, recursing on the 2×2 block structure.
    pub fn mv_multiply(&mut self, m: &MatrixDd, v: &VectorDd) -> Result<VectorDd, DdError> {
        check_qubits(m.qubits, v.qubits)?;
        Ok(VectorDd {
            root: self.multiply(m.root, v.root, false),
            qubits: v.qubits,
        })
    }

    /// Matrix–matrix product `a · b`.
    pub fn mm_multiply(&mut self, a: &MatrixDd, b: &MatrixDd) -> Result<MatrixDd, DdError> {
        check_qubits(a.qubits, b.qubits)?;
        Ok(MatrixDd {
            root: self.multiply(a.root, b.root, true),
            qubits: a.qubits,
        })
    }

    fn multiply(&mut self, a: Edge, b: Edge, matrix_rhs: bool) -> Edge {
        if a.is_zero() || b.is_zero() {
            return Edge::ZERO;
        }
        let w = a.weight * b.weight;
        if a.node.is_terminal() {
            debug_assert!(b.node.is_terminal());
            let w = self.snap(w);
            return if w == ZERO_W { Edge::ZERO } else { Edge::terminal(w) };
        }
        let table = if matrix_rhs { Table::Mm } else { Table::Mv };
        let key = (a.node, b.node);
        let unit = match self.lookup(table, &key) {
            Some(e) => e,
            None => {
                let (level, sa, sb) = {
                    let na = self.node(a.node);
                    let nb = self.node(b.node);
                    debug_assert_eq!(na.level, nb.level, "multiply across levels");
                    (na.level, na.succ, nb.succ)
                };
                let mut succ = [Edge::ZERO; 4];
                if matrix_rhs {
                    for i in 0..2 {
                        for k in 0..2 {
                            let mut acc = Edge::ZERO;
                            for j in 0..2 {
                                let t = self.multiply(sa[2 * i + j], sb[2 * j + k], true);
                                acc = self.add(acc, t);
                            }
                            succ[2 * i + k] = acc;
                        }
                    }
                } else {
                    for i in 0..2 {
                        let mut acc = Edge::ZERO;
                        for j in 0..2 {
                            let t = self.multiply(sa[2 * i + j], sb[j], false);
                            acc = self.add(acc, t);
                        }
                        succ[i] = acc;
                    }
                }
                let e = self.make_node(level, if matrix_rhs { 4 } else { 2 }, succ);
                self.store(table, key, e);
                e
            }
        };
        self.scaled(unit, w)
    }

    /// Kronecker product `a ⊗ b`; `a` occupies the more significant qubits.
    pub fn kron(&mut self, a: &MatrixDd, b: &MatrixDd) -> MatrixDd {
        let mut memo = HashMap::default();
        let root = self.kron_rec(a.root, b.root, b.qubits as u32, &mut memo);
        MatrixDd {
            root,
            qubits: a.qubits + b.qubits,
        }
    }

    pub fn kron_vectors(&mut self, a: &VectorDd, b: &VectorDd) -> VectorDd {
        let mut memo = HashMap::default();
        let root = self.kron_rec(a.root, b.root, b.qubits as u32, &mut memo);
        VectorDd {
            root,
            qubits: a.qubits + b.qubits,
        }
    }

    fn kron_rec(&mut self, a: Edge, b: Edge, shift: u32, memo: &mut HashMap<NodeId, Edge>) -> Edge {
        if a.is_zero() || b.is_zero() {
            return Edge::ZERO;
        }
        if a.node.is_terminal() {
            return self.scaled(b, a.weight);
        }
        let unit = match memo.get(&a.node) {
            Some(&e) => e,
            None => {
                let (level, arity, sa) = {
                    let n = self.node(a.node);
                    (n.level, n.arity, n.succ)
                };
                let mut succ = [Edge::ZERO; 4];
                for i in 0..arity as usize {
                    succ[i] = self.kron_rec(sa[i], b, shift, memo);
                }
                let e = self.make_node(level + shift, arity, succ);
                memo.insert(a.node, e);
                e
            }
        };
        self.scaled(unit, a.weight)
    }

    // ---------------------------------------------------------------------
    // queries

    /// Product of edge weights along the path selected by `index`.
    pub fn amplitude(&self, v: &VectorDd, index: &BasisState) -> Weight {
        assert_eq!(index.len(), v.qubits, "basis state length");
        let mut e = v.root;
        let mut w = e.weight;
        while !e.node.is_terminal() && w != ZERO_W {
            let n = self.node(e.node);
            e = n.succ[index.bit(n.level as usize) as usize];
            w *= e.weight;
        }
        w
    }

    /// Entry `⟨row| M |col⟩`.
    pub fn matrix_entry(&self, m: &MatrixDd, row: &BasisState, col: &BasisState) -> Weight {
        assert_eq!(row.len(), m.qubits, "row length");
        assert_eq!(col.len(), m.qubits, "column length");
        let mut e = m.root;
        let mut w = e.weight;
        while !e.node.is_terminal() && w != ZERO_W {
            let n = self.node(e.node);
            let l = n.level as usize;
            e = n.succ[2 * row.bit(l) as usize + col.bit(l) as usize];
            w *= e.weight;
        }
        w
    }

    /// Dense state vector; refused above `cap` qubits.
    pub fn statevector(&self, v: &VectorDd, cap: usize) -> Result<Vec<Complex64>, DdError> {
        if v.qubits > cap {
            return Err(DdError::DenseCapExceeded {
                qubits: v.qubits,
                cap,
            });
        }
        let mut out = vec![ZERO_W; 1usize << v.qubits];
        self.fill_vector(v.root, ONE_W, 0, &mut out);
        Ok(out)
    }

    fn fill_vector(&self, e: Edge, acc: Weight, index: usize, out: &mut [Complex64]) {
        if e.is_zero() {
            return;
        }
        let w = acc * e.weight;
        if e.node.is_terminal() {
            out[index] = w;
            return;
        }
        let n = self.node(e.node);
        for b in 0..2 {
            self.fill_vector(n.succ[b], w, index | (b << n.level), out);
        }
    }

    /// Up to `limit` non-zero amplitudes in ascending index order, found by
    /// walking only non-zero paths. Works for registers of up to 64 qubits.
    pub fn nonzero_amplitudes(&self, v: &VectorDd, limit: usize) -> Vec<(u64, Complex64)> {
        let mut out = Vec::new();
        self.collect_nonzero(v.root, ONE_W, 0, limit, &mut out);
        out
    }

    fn collect_nonzero(
        &self,
        e: Edge,
        acc: Weight,
        index: u64,
        limit: usize,
        out: &mut Vec<(u64, Complex64)>,
    ) {
        if e.is_zero() || out.len() >= limit {
            return;
        }
        let w = acc * e.weight;
        if e.node.is_terminal() {
            out.push((index, w));
            return;
        }
        let n = self.node(e.node);
        for b in 0..2u64 {
            self.collect_nonzero(n.succ[b as usize], w, index | (b << n.level), limit, out);
        }
    }

    pub fn dense_matrix(&self, m: &MatrixDd, cap: usize) -> Result<Matrix, DdError> {
        if m.qubits > cap {
            return Err(DdError::DenseCapExceeded {
                qubits: m.qubits,
                cap,
            });
        }
        let mut out = Matrix::zeros(1usize << m.qubits);
        self.fill_matrix(m.root, ONE_W, 0, 0, &mut out);
        Ok(out)
    }

    fn fill_matrix(&self, e: Edge, acc: Weight, row: usize, col: usize, out: &mut Matrix) {
        if e.is_zero() {
            return;
        }
        let w = acc * e.weight;
        if e.node.is_terminal() {
            out[(row, col)] = w;
            return;
        }
        let n = self.node(e.node);
        for i in 0..4 {
            let (r, c) = (i >> 1, i & 1);
            self.fill_matrix(n.succ[i], w, row | (r << n.level), col | (c << n.level), out);
        }
    }

    /// Distinct non-terminal nodes reachable from the root.
    pub fn node_count<D: DdHandle>(&self, d: &D) -> usize {
        let mut seen = HashSet::default();
        let mut stack = vec![d.root()];
        while let Some(e) = stack.pop() {
            if e.is_zero() || e.node.is_terminal() || !seen.insert(e.node) {
                continue;
            }
            let n = self.node(e.node);
            stack.extend_from_slice(&n.succ[..n.arity as usize]);
        }
        seen.len()
    }

    /// Whether `m` is the identity, or a unit-modulus multiple of it when
    /// `up_to_global_phase` is set.
    pub fn is_identity(&mut self, m: &MatrixDd, up_to_global_phase: bool) -> bool {
        let id = self.identity_edge(m.qubits);
        if m.root.node != id.node {
            return false;
        }
        let tol = self.tolerance();
        if up_to_global_phase {
            (m.root.weight.norm() - 1.0).abs() <= tol
        } else {
            (m.root.weight - ONE_W).norm() <= tol
        }
    }

    /// Walks every node reachable from `d` and checks the ordering and
    /// normalization invariants.
    pub fn is_normalized<D: DdHandle>(&self, d: &D) -> bool {
        let mut seen = HashSet::default();
        let mut stack = vec![d.root()];
        while let Some(e) = stack.pop() {
            if e.node.is_terminal() {
                continue;
            }
            if !seen.insert(e.node) {
                continue;
            }
            let n = self.node(e.node);
            let succ = &n.succ[..n.arity as usize];
            match succ.iter().find(|s| !s.is_zero()) {
                Some(first) if first.weight == ONE_W => {}
                _ => return false,
            }
            for s in succ {
                if s.is_zero() {
                    if !s.node.is_terminal() {
                        return false;
                    }
                } else if !s.node.is_terminal() && self.node(s.node).level >= n.level {
                    return false;
                }
                stack.push(*s);
            }
        }
        true
    }

    // ---------------------------------------------------------------------
    // compute tables

    fn lookup<K: CacheKey>(&mut self, table: Table, key: &K) -> Option<Edge> {
        if !self.config.use_compute_table {
            return None;
        }
        let hit = key.get(self, table);
        if hit.is_some() {
            self.stats.compute_hits += 1;
        } else {
            self.stats.compute_misses += 1;
        }
        hit
    }

    fn store<K: CacheKey>(&mut self, table: Table, key: K, value: Edge) {
        if self.config.use_compute_table {
            key.put(self, table, value);
        }
    }

    pub fn clear_compute_tables(&mut self) {
        self.mv_table.clear();
        self.mm_table.clear();
        self.add_table.clear();
    }

    // ---------------------------------------------------------------------
    // reference counting and collection

    pub fn inc_ref<D: DdHandle>(&mut self, d: &D) {
        self.inc_ref_edge(d.root());
    }

    pub fn dec_ref<D: DdHandle>(&mut self, d: &D) {
        self.dec_ref_edge(d.root());
    }

    fn inc_ref_edge(&mut self, e: Edge) {
        if e.node.is_terminal() {
            return;
        }
        let n = &mut self.nodes[e.node.0 as usize];
        n.rc += 1;
        if n.rc == 1 {
            let (arity, succ) = (n.arity as usize, n.succ);
            for s in &succ[..arity] {
                self.inc_ref_edge(*s);
            }
        }
    }

    fn dec_ref_edge(&mut self, e: Edge) {
        if e.node.is_terminal() {
            return;
        }
        let n = &mut self.nodes[e.node.0 as usize];
        assert!(n.rc > 0, "dec_ref on unreferenced node");
        n.rc -= 1;
        if n.rc == 0 {
            let (arity, succ) = (n.arity as usize, n.succ);
            for s in &succ[..arity] {
                self.dec_ref_edge(*s);
            }
        }
    }

    /// Collects if the live-node count exceeds the configured threshold.
    pub fn maybe_collect(&mut self) -> usize {
        if self.live_nodes() > self.config.gc_threshold {
            self.garbage_collect()
        } else {
            0
        }
    }

    /// Releases every node with a zero reference count and invalidates the
    /// compute tables. Returns the number of released nodes.
    pub fn garbage_collect(&mut self) -> usize {
        let mut collected = 0;
        for (i, n) in self.nodes.iter_mut().enumerate() {
            if n.alive && n.rc == 0 {
                n.alive = false;
                self.unique.remove(&n.key());
                self.free.push(i as u32);
                collected += 1;
            }
        }
        self.clear_compute_tables();
        // Keep only the weight representatives still used by live nodes.
        self.weights.reset();
        for n in self.nodes.iter().filter(|n| n.alive) {
            for s in &n.succ[..n.arity as usize] {
                self.weights.insert_exact(s.weight.re);
                self.weights.insert_exact(s.weight.im);
            }
        }
        for e in &self.identities {
            self.weights.insert_exact(e.weight.re);
        }
        self.stats.gc_runs += 1;
        self.stats.collected_nodes += collected;
        collected
    }

    pub fn weight_table_len(&self) -> usize {
        self.weights.len()
    }
}

fn check_qubits(left: usize, right: usize) -> Result<(), DdError> {
    if left == right {
        Ok(())
    } else {
        Err(DdError::QubitMismatch { left, right })
    }
}

#[derive(Clone, Copy)]
enum Table {
    Mv,
    Mm,
    Add,
}

trait CacheKey {
    fn get(&self, pkg: &DdPackage, table: Table) -> Option<Edge>;
    fn put(self, pkg: &mut DdPackage, table: Table, value: Edge);
}

impl CacheKey for (NodeId, NodeId) {
    fn get(&self, pkg: &DdPackage, table: Table) -> Option<Edge> {
        match table {
            Table::Mv => pkg.mv_table.get(self).copied(),
            Table::Mm => pkg.mm_table.get(self).copied(),
            Table::Add => None,
        }
    }
    fn put(self, pkg: &mut DdPackage, table: Table, value: Edge) {
        match table {
            Table::Mv => pkg.mv_table.insert(self, value),
            Table::Mm => pkg.mm_table.insert(self, value),
            Table::Add => None,
        };
    }
}

impl CacheKey for AddKey {
    fn get(&self, pkg: &DdPackage, _table: Table) -> Option<Edge> {
        pkg.add_table.get(self).copied()
    }
    fn put(self, pkg: &mut DdPackage, _table: Table, value: Edge) {
        pkg.add_table.insert(self, value);
    }
}

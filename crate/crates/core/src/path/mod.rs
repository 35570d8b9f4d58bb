//! Task graphs shared by both backends, simulation paths for the
//! decision-diagram backend, and the translation from contraction plans.
//!
//! A task graph lists the objects of a computation in circuit order: an
//! optional initial state followed by gates. A simulation path combines
//! neighbouring operands step by step. Combining `left` and `right` yields
//! `M_right · M_left` (or `M_right · v` when `left` holds the state), so
//! every path computes the same product; only the intermediate objects,
//! and therefore the diagram sizes, differ.

mod equivalence;
mod execute;
mod translate;

pub use equivalence::{check_equivalence, check_equivalence_with, EquivalenceVerdict, Planner, Strategy};
pub use execute::{execute_path, greedy_alternating, DdValue, PathOutcome};
pub use translate::plan_to_path;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{BasisState, Circuit, CircuitError, Gate};
use crate::dd::DdError;
use crate::tn::TnError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Tn(#[from] TnError),
    #[error("invalid simulation path: {0}")]
    InvalidPath(String),
    #[error("plan has {plan} leaves, but the circuit's network has {simple} or {projected}")]
    LeafMismatch {
        plan: usize,
        simple: usize,
        projected: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Leaf {
    State(BasisState),
    Gate(Gate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskGraph {
    qubits: usize,
    leaves: Vec<Leaf>,
}

impl TaskGraph {
    /// `[input, g_0, g_1, …]`: simulation of `circuit` on `input`.
    pub fn simulation(circuit: &Circuit, input: &BasisState) -> Result<Self, PathError> {
        if input.len() != circuit.num_qubits() {
            return Err(CircuitError::BasisLength {
                expected: circuit.num_qubits(),
                got: input.len(),
            }
            .into());
        }
        let mut leaves = vec![Leaf::State(input.clone())];
        leaves.extend(circuit.gates().iter().cloned().map(Leaf::Gate));
        Ok(TaskGraph {
            qubits: circuit.num_qubits(),
            leaves,
        })
    }

    /// Gates only; the product is the circuit's unitary.
    pub fn operator(circuit: &Circuit) -> Self {
        TaskGraph {
            qubits: circuit.num_qubits(),
            leaves: circuit.gates().iter().cloned().map(Leaf::Gate).collect(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn has_state(&self) -> bool {
        matches!(self.leaves.first(), Some(Leaf::State(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// Matrix times vector.
    Vector,
    /// Matrix times matrix.
    Operator,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Vector => "vector",
            StepKind::Operator => "operator",
        })
    }
}

/// Combines operand `left` with the operand `right` that immediately
/// follows it in circuit order. Ids below the leaf count are leaves; step
/// `i` produces id `leaves + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, StepKind)", into = "(usize, usize, StepKind)")]
pub struct Step {
    pub left: usize,
    pub right: usize,
    pub kind: StepKind,
}

impl From<(usize, usize, StepKind)> for Step {
    fn from((left, right, kind): (usize, usize, StepKind)) -> Self {
        Step { left, right, kind }
    }
}

impl From<Step> for (usize, usize, StepKind) {
    fn from(s: Step) -> Self {
        (s.left, s.right, s.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationPath {
    #[serde(rename = "leaves")]
    num_leaves: usize,
    steps: Vec<Step>,
}

impl SimulationPath {
    pub fn new(num_leaves: usize, steps: Vec<Step>) -> Self {
        SimulationPath { num_leaves, steps }
    }

    /// Left fold over all leaves: `((l_0 · l_1) · l_2) · …`.
    pub fn sequential(graph: &TaskGraph) -> Self {
        let mut builder = PathBuilder::new(graph);
        for leaf in 1..graph.len() {
            let acc = builder.segment_of(0);
            builder.combine(acc, leaf);
        }
        builder.finish()
    }

    pub fn num_leaves(&self) -> usize {
        self.num_leaves
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("path serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, PathError> {
        serde_json::from_str(s).map_err(|e| PathError::InvalidPath(e.to_string()))
    }

    /// Checks ids, operand adjacency, step kinds and completeness against
    /// `graph`. Returns the leaf range covered by every id.
    pub fn validate(&self, graph: &TaskGraph) -> Result<Vec<(usize, usize)>, PathError> {
        let bad = |msg: String| Err(PathError::InvalidPath(msg));
        let l = graph.len();
        if self.num_leaves != l {
            return bad(format!("path has {} leaves, graph has {l}", self.num_leaves));
        }
        if l > 0 && self.steps.len() != l - 1 {
            return bad(format!("expected {} steps, got {}", l - 1, self.steps.len()));
        }
        if l == 0 && !self.steps.is_empty() {
            return bad("steps on an empty graph".into());
        }
        let mut ranges: Vec<(usize, usize)> = (0..l).map(|i| (i, i)).collect();
        let mut used = vec![false; l + self.steps.len()];
        for (i, s) in self.steps.iter().enumerate() {
            let id = l + i;
            for operand in [s.left, s.right] {
                if operand >= id {
                    return bad(format!("step {i} uses id {operand} before it exists"));
                }
                if used[operand] {
                    return bad(format!("id {operand} consumed twice"));
                }
                used[operand] = true;
            }
            let (a, b) = (ranges[s.left], ranges[s.right]);
            if a.1 + 1 != b.0 {
                return bad(format!(
                    "step {i} combines leaves {}..={} with {}..={}, which are not adjacent",
                    a.0, a.1, b.0, b.1
                ));
            }
            let expected = step_kind(graph, a.0);
            if s.kind != expected {
                return bad(format!("step {i} should be a {expected} step"));
            }
            ranges.push((a.0, b.1));
        }
        Ok(ranges)
    }
}

fn step_kind(graph: &TaskGraph, left_start: usize) -> StepKind {
    if left_start == 0 && graph.has_state() {
        StepKind::Vector
    } else {
        StepKind::Operator
    }
}

/// Incremental path construction over contiguous leaf segments.
pub(crate) struct PathBuilder<'g> {
    graph: &'g TaskGraph,
    /// For each leaf, the id of the segment currently containing it.
    owner: Vec<usize>,
    /// Leaf range per id.
    ranges: Vec<(usize, usize)>,
    steps: Vec<Step>,
}

impl<'g> PathBuilder<'g> {
    pub(crate) fn new(graph: &'g TaskGraph) -> Self {
        PathBuilder {
            graph,
            owner: (0..graph.len()).collect(),
            ranges: (0..graph.len()).map(|i| (i, i)).collect(),
            steps: Vec::new(),
        }
    }

    pub(crate) fn segment_of(&self, leaf: usize) -> usize {
        self.owner[leaf]
    }

    pub(crate) fn range(&self, id: usize) -> (usize, usize) {
        self.ranges[id]
    }

    /// Combines two adjacent segments given in circuit order; returns the new id.
    pub(crate) fn combine(&mut self, left: usize, right: usize) -> usize {
        let (a, b) = (self.ranges[left], self.ranges[right]);
        debug_assert_eq!(a.1 + 1, b.0, "segments must be adjacent");
        let id = self.ranges.len();
        self.steps.push(Step {
            left,
            right,
            kind: step_kind(self.graph, a.0),
        });
        self.ranges.push((a.0, b.1));
        for o in &mut self.owner[a.0..=b.1] {
            *o = id;
        }
        id
    }

    /// Current segments from left to right.
    pub(crate) fn segments(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &o in &self.owner {
            if out.last() != Some(&o) {
                out.push(o);
            }
        }
        out
    }

    pub(crate) fn finish(self) -> SimulationPath {
        SimulationPath {
            num_leaves: self.graph.len(),
            steps: self.steps,
        }
    }
}

/// Plain simulation path for `circuit`: the state absorbs one gate at a time.
pub fn default_sequential_path(circuit: &Circuit) -> SimulationPath {
    let steps = (0..circuit.len())
        .map(|i| Step {
            left: if i == 0 { 0 } else { circuit.len() + i },
            right: i + 1,
            kind: StepKind::Vector,
        })
        .collect();
    SimulationPath::new(circuit.len() + 1, steps)
}

/// Path over `g` followed by `g2inv` (as in [`TaskGraph::operator`] of the
/// concatenation) that starts between the two halves. Each round applies
/// one gate of `g`, walking backwards from its end, then `ratio` gates of
/// `g2inv`, walking forwards from its start. A side that runs out is
/// skipped.
pub fn alternating_path(g: &Circuit, g2inv: &Circuit, ratio: usize) -> Result<SimulationPath, PathError> {
    let graph = TaskGraph::operator(&g.concatenate(g2inv)?);
    let ratio = ratio.max(1);
    let mut builder = PathBuilder::new(&graph);
    let mut acc: Option<usize> = None;
    let (mut next_g, mut next_h) = (g.len(), g.len());
    let end = graph.len();
    while next_g > 0 || next_h < end {
        if next_g > 0 {
            next_g -= 1;
            acc = Some(match acc {
                None => next_g,
                Some(a) => builder.combine(next_g, a),
            });
        }
        for _ in 0..ratio {
            if next_h < end {
                acc = Some(match acc {
                    None => next_h,
                    Some(a) => builder.combine(a, next_h),
                });
                next_h += 1;
            }
        }
    }
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    fn ghz() -> Circuit {
        parse_circuit("qubits 3; h 2; cx 2 1; cx 1 0").unwrap()
    }

    #[test]
    fn default_path_is_gate_order() {
        let c = ghz();
        let p = default_sequential_path(&c);
        let kinds: Vec<_> = p.steps().iter().map(|s| (s.left, s.right, s.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                (0, 1, StepKind::Vector),
                (4, 2, StepKind::Vector),
                (5, 3, StepKind::Vector)
            ]
        );
        let graph = TaskGraph::simulation(&c, &BasisState::zeros(3)).unwrap();
        assert!(p.validate(&graph).is_ok());
        assert_eq!(SimulationPath::sequential(&graph), p);
        let empty = Circuit::new(2).unwrap();
        assert!(default_sequential_path(&empty).steps().is_empty());
    }

    #[test]
    fn json_layout() {
        let p = default_sequential_path(&ghz());
        let text = p.to_json();
        assert_eq!(text, r#"{"leaves":4,"steps":[[0,1,"vector"],[4,2,"vector"],[5,3,"vector"]]}"#);
        assert_eq!(SimulationPath::from_json(&text).unwrap(), p);
    }

    #[test]
    fn validation_rejects_gaps_and_reuse() {
        let c = ghz();
        let graph = TaskGraph::simulation(&c, &BasisState::zeros(3)).unwrap();
        let gap = SimulationPath::new(
            4,
            vec![
                Step { left: 0, right: 2, kind: StepKind::Vector },
                Step { left: 4, right: 1, kind: StepKind::Vector },
                Step { left: 5, right: 3, kind: StepKind::Vector },
            ],
        );
        assert!(gap.validate(&graph).is_err());
        let wrong_kind = SimulationPath::new(
            4,
            vec![
                Step { left: 1, right: 2, kind: StepKind::Vector },
                Step { left: 0, right: 4, kind: StepKind::Vector },
                Step { left: 5, right: 3, kind: StepKind::Vector },
            ],
        );
        assert!(wrong_kind.validate(&graph).is_err());
        let fused = SimulationPath::new(
            4,
            vec![
                Step { left: 1, right: 2, kind: StepKind::Operator },
                Step { left: 0, right: 4, kind: StepKind::Vector },
                Step { left: 5, right: 3, kind: StepKind::Vector },
            ],
        );
        assert!(fused.validate(&graph).is_ok());
        let reuse = SimulationPath::new(
            4,
            vec![
                Step { left: 0, right: 1, kind: StepKind::Vector },
                Step { left: 0, right: 1, kind: StepKind::Vector },
                Step { left: 5, right: 3, kind: StepKind::Vector },
            ],
        );
        assert!(reuse.validate(&graph).is_err());
    }

    #[test]
    fn alternating_order() {
        let g = ghz();
        let p = alternating_path(&g, &g.inverse(), 1).unwrap();
        // Leaves 0..3 are G, 3..6 are G⁻¹. Start with G's last gate (2) and
        // the first inverted gate (3), then grow outwards.
        let steps: Vec<(usize, usize)> = p.steps().iter().map(|s| (s.left, s.right)).collect();
        assert_eq!(steps, vec![(2, 3), (1, 6), (7, 4), (0, 8), (9, 5)]);
        assert!(p.steps().iter().all(|s| s.kind == StepKind::Operator));
        let graph = TaskGraph::operator(&g.concatenate(&g.inverse()).unwrap());
        assert!(p.validate(&graph).is_ok());

        let p2 = alternating_path(&g, &g.inverse(), 2).unwrap();
        let steps: Vec<(usize, usize)> = p2.steps().iter().map(|s| (s.left, s.right)).collect();
        assert_eq!(steps, vec![(2, 3), (6, 4), (1, 7), (8, 5), (0, 9)]);

        let empty = Circuit::new(2).unwrap();
        assert!(alternating_path(&empty, &empty, 1).unwrap().steps().is_empty());
    }
}

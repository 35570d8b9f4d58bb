use super::{Leaf, PathBuilder, PathError, SimulationPath, StepKind, TaskGraph};
use crate::circuit::Circuit;
use crate::dd::{DdPackage, MatrixDd, VectorDd};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DdValue {
    Vector(VectorDd),
    Matrix(MatrixDd),
}

impl DdValue {
    fn node_count(&self, pkg: &DdPackage) -> usize {
        match self {
            DdValue::Vector(v) => pkg.node_count(v),
            DdValue::Matrix(m) => pkg.node_count(m),
        }
    }

    fn inc_ref(&self, pkg: &mut DdPackage) {
        match self {
            DdValue::Vector(v) => pkg.inc_ref(v),
            DdValue::Matrix(m) => pkg.inc_ref(m),
        }
    }

    fn dec_ref(&self, pkg: &mut DdPackage) {
        match self {
            DdValue::Vector(v) => pkg.dec_ref(v),
            DdValue::Matrix(m) => pkg.dec_ref(m),
        }
    }

    pub fn as_vector(&self) -> Option<&VectorDd> {
        match self {
            DdValue::Vector(v) => Some(v),
            DdValue::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&MatrixDd> {
        match self {
            DdValue::Matrix(m) => Some(m),
            DdValue::Vector(_) => None,
        }
    }
}

/// Result of running a path. The result stays referenced in the package;
/// release it with `dec_ref` when done.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub result: DdValue,
    /// Node count of each step's result, in step order.
    pub step_nodes: Vec<usize>,
    /// Largest node count over all step results and the final result.
    pub peak_nodes: usize,
    pub final_nodes: usize,
}

fn build_leaf(pkg: &mut DdPackage, leaf: &Leaf, qubits: usize) -> Result<DdValue, PathError> {
    Ok(match leaf {
        Leaf::State(b) => DdValue::Vector(pkg.basis_state(b)),
        Leaf::Gate(g) => DdValue::Matrix(pkg.gate(g, qubits)?),
    })
}

fn combine(pkg: &mut DdPackage, kind: StepKind, left: DdValue, right: DdValue) -> Result<DdValue, PathError> {
    match (kind, left, right) {
        (StepKind::Vector, DdValue::Vector(v), DdValue::Matrix(m)) => {
            Ok(DdValue::Vector(pkg.mv_multiply(&m, &v)?))
        }
        (StepKind::Operator, DdValue::Matrix(a), DdValue::Matrix(b)) => {
            Ok(DdValue::Matrix(pkg.mm_multiply(&b, &a)?))
        }
        _ => Err(PathError::InvalidPath(format!("operands do not fit a {kind} step"))),
    }
}

/// Runs `path` on `graph`. Leaf diagrams are built when first used, and
/// operands are released as soon as they are consumed. An empty graph
/// evaluates to the identity.
pub fn execute_path(
    pkg: &mut DdPackage,
    graph: &TaskGraph,
    path: &SimulationPath,
) -> Result<PathOutcome, PathError> {
    path.validate(graph)?;
    let n = graph.qubits();
    if graph.is_empty() {
        let id = DdValue::Matrix(pkg.identity(n));
        id.inc_ref(pkg);
        return Ok(PathOutcome {
            result: id,
            step_nodes: Vec::new(),
            peak_nodes: n,
            final_nodes: n,
        });
    }
    let l = graph.len();
    let mut values: Vec<Option<DdValue>> = vec![None; l + path.steps().len()];
    let mut step_nodes = Vec::with_capacity(path.steps().len());
    for (i, step) in path.steps().iter().enumerate() {
        let mut operand = |id: usize, pkg: &mut DdPackage| -> Result<DdValue, PathError> {
            match values[id].take() {
                Some(v) => Ok(v),
                None => {
                    let v = build_leaf(pkg, &graph.leaves()[id], n)?;
                    v.inc_ref(pkg);
                    Ok(v)
                }
            }
        };
        let a = operand(step.left, pkg)?;
        let b = operand(step.right, pkg)?;
        let r = combine(pkg, step.kind, a, b)?;
        r.inc_ref(pkg);
        a.dec_ref(pkg);
        b.dec_ref(pkg);
        pkg.maybe_collect();
        step_nodes.push(r.node_count(pkg));
        values[l + i] = Some(r);
    }
    let result = match values.pop().flatten() {
        Some(v) if !path.steps().is_empty() => v,
        _ => {
            let v = build_leaf(pkg, &graph.leaves()[0], n)?;
            v.inc_ref(pkg);
            v
        }
    };
    let final_nodes = result.node_count(pkg);
    let peak_nodes = step_nodes.iter().copied().max().unwrap_or(0).max(final_nodes);
    Ok(PathOutcome {
        result,
        step_nodes,
        peak_nodes,
        final_nodes,
    })
}

/// Alternating scheme that picks its next side on the fly: whenever both
/// `g` and `g2inv` have gates left, it applies the one giving the smaller
/// accumulator (ties go to `g`). Returns the path it took with the outcome.
pub fn greedy_alternating(
    pkg: &mut DdPackage,
    g: &Circuit,
    g2inv: &Circuit,
) -> Result<(SimulationPath, PathOutcome), PathError> {
    let miter = g.concatenate(g2inv)?;
    let graph = TaskGraph::operator(&miter);
    let n = miter.num_qubits();
    let mut builder = PathBuilder::new(&graph);
    let mut acc = pkg.identity(n);
    pkg.inc_ref(&acc);
    let mut acc_id: Option<usize> = None;
    let (mut next_g, mut next_h) = (g.len(), g.len());
    let end = graph.len();
    let mut step_nodes = Vec::new();

    while next_g > 0 || next_h < end {
        let cand_g = if next_g > 0 {
            let g = pkg.gate(&miter.gates()[next_g - 1], n)?;
            Some(pkg.mm_multiply(&acc, &g)?)
        } else {
            None
        };
        let cand_h = if next_h < end {
            let h = pkg.gate(&miter.gates()[next_h], n)?;
            Some(pkg.mm_multiply(&h, &acc)?)
        } else {
            None
        };
        let take_g = match (&cand_g, &cand_h) {
            (Some(a), Some(b)) => pkg.node_count(a) <= pkg.node_count(b),
            (Some(_), None) => true,
            _ => false,
        };
        let (next, leaf) = if take_g {
            next_g -= 1;
            (cand_g.expect("g candidate"), next_g)
        } else {
            next_h += 1;
            (cand_h.expect("g2inv candidate"), next_h - 1)
        };
        pkg.inc_ref(&next);
        pkg.dec_ref(&acc);
        acc = next;
        pkg.maybe_collect();
        acc_id = Some(match acc_id {
            None => leaf,
            Some(a) => {
                step_nodes.push(pkg.node_count(&acc));
                if take_g {
                    builder.combine(leaf, a)
                } else {
                    builder.combine(a, leaf)
                }
            }
        });
    }
    let final_nodes = pkg.node_count(&acc);
    let peak_nodes = step_nodes.iter().copied().max().unwrap_or(0).max(final_nodes);
    Ok((
        builder.finish(),
        PathOutcome {
            result: DdValue::Matrix(acc),
            step_nodes,
            peak_nodes,
            final_nodes,
        },
    ))
}

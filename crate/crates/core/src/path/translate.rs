use std::collections::VecDeque;

use super::{PathBuilder, PathError, SimulationPath, TaskGraph};
use crate::circuit::{BasisState, Circuit};
use crate::tn::ContractionPlan;

/// Turns a contraction plan for the network of `circuit` (see
/// [`crate::tn::circuit_to_network`], with or without output projection)
/// into a simulation path for `[input, g_0, g_1, …]`.
///
/// Input tensors all map to the state leaf, gate `i` to leaf `i + 1`, and
/// output tensors are dropped. Every internal plan node becomes a merge
/// request between the smallest leaves of its two subtrees, visited in
/// post-order. A request whose operands already share a segment is
/// dropped; one whose segments are adjacent is emitted; any other request
/// waits in a FIFO queue that is rescanned after every emitted step. The
/// segments left at the end are folded from left to right.
pub fn plan_to_path(plan: &ContractionPlan, circuit: &Circuit) -> Result<SimulationPath, PathError> {
    let n = circuit.num_qubits();
    let m = circuit.len();
    let leaves = plan.leaves().len();
    if leaves != n + m && leaves != 2 * n + m {
        return Err(PathError::LeafMismatch {
            plan: leaves,
            simple: n + m,
            projected: 2 * n + m,
        });
    }
    plan.validate(leaves)?;
    let task_leaf = |tensor: usize| -> Option<usize> {
        if tensor < n {
            Some(0)
        } else if tensor < n + m {
            Some(tensor - n + 1)
        } else {
            None
        }
    };

    let mut requests = Vec::new();
    collect_requests(plan, &task_leaf, &mut requests);

    let graph = TaskGraph::simulation(circuit, &BasisState::zeros(n))?;
    let mut builder = PathBuilder::new(&graph);
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for (x, y) in requests {
        match try_merge(&mut builder, x, y) {
            Merge::Done | Merge::Redundant => drain(&mut builder, &mut queue),
            Merge::Blocked => queue.push_back((x, y)),
        }
    }
    let segments = builder.segments();
    let mut acc = segments.first().copied();
    for &s in segments.iter().skip(1) {
        acc = Some(builder.combine(acc.expect("segment"), s));
    }
    Ok(builder.finish())
}

/// Post-order merge requests; returns the smallest task leaf of the subtree.
fn collect_requests(
    plan: &ContractionPlan,
    task_leaf: &dyn Fn(usize) -> Option<usize>,
    out: &mut Vec<(usize, usize)>,
) -> Option<usize> {
    match plan {
        ContractionPlan::Leaf(t) => task_leaf(*t),
        ContractionPlan::Pair(a, b) => {
            let x = collect_requests(a, task_leaf, out);
            let y = collect_requests(b, task_leaf, out);
            match (x, y) {
                (Some(x), Some(y)) => {
                    out.push((x, y));
                    Some(x.min(y))
                }
                (x, y) => x.or(y),
            }
        }
    }
}

enum Merge {
    Done,
    Redundant,
    Blocked,
}

fn try_merge(builder: &mut PathBuilder<'_>, x: usize, y: usize) -> Merge {
    let (sx, sy) = (builder.segment_of(x), builder.segment_of(y));
    if sx == sy {
        return Merge::Redundant;
    }
    let (rx, ry) = (builder.range(sx), builder.range(sy));
    if rx.1 + 1 == ry.0 {
        builder.combine(sx, sy);
        Merge::Done
    } else if ry.1 + 1 == rx.0 {
        builder.combine(sy, sx);
        Merge::Done
    } else {
        Merge::Blocked
    }
}

fn drain(builder: &mut PathBuilder<'_>, queue: &mut VecDeque<(usize, usize)>) {
    'rescan: loop {
        for i in 0..queue.len() {
            let (x, y) = queue[i];
            match try_merge(builder, x, y) {
                Merge::Blocked => {}
                Merge::Redundant | Merge::Done => {
                    queue.remove(i);
                    continue 'rescan;
                }
            }
        }
        return;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::path::{default_sequential_path, StepKind};
    use crate::tn::{circuit_to_network, plan_greedy};

    fn ghz() -> Circuit {
        parse_circuit("qubits 3; h 2; cx 2 1; cx 1 0").unwrap()
    }

    #[test]
    fn sequential_plan_gives_default_path() {
        let c = ghz();
        let plan = ContractionPlan::sequential(c.num_qubits() + c.len());
        assert_eq!(plan_to_path(&plan, &c).unwrap(), default_sequential_path(&c));
        // With output tensors appended the path is unchanged.
        let plan = ContractionPlan::sequential(2 * c.num_qubits() + c.len());
        assert_eq!(plan_to_path(&plan, &c).unwrap(), default_sequential_path(&c));
    }

    #[test]
    fn fusing_the_two_cx_gates_first() {
        let c = ghz();
        // Tensors: inputs 0..3, h = 3, cx = 4, cx = 5.
        let plan = ContractionPlan::pair(
            ContractionPlan::pair(
                ContractionPlan::sequential(3),
                ContractionPlan::Leaf(3),
            ),
            ContractionPlan::pair(ContractionPlan::Leaf(4), ContractionPlan::Leaf(5)),
        );
        let p = plan_to_path(&plan, &c).unwrap();
        let steps: Vec<_> = p.steps().iter().map(|s| (s.left, s.right, s.kind)).collect();
        assert_eq!(
            steps,
            vec![
                (0, 1, StepKind::Vector),
                (2, 3, StepKind::Operator),
                (4, 5, StepKind::Vector)
            ]
        );
    }

    #[test]
    fn non_adjacent_requests_are_deferred() {
        let c = ghz();
        // Merge h with the last cx first: not adjacent until the middle cx
        // has joined one of them.
        let plan = ContractionPlan::pair(
            ContractionPlan::pair(
                ContractionPlan::pair(ContractionPlan::Leaf(3), ContractionPlan::Leaf(5)),
                ContractionPlan::Leaf(4),
            ),
            ContractionPlan::sequential(3),
        );
        let p = plan_to_path(&plan, &c).unwrap();
        let graph = TaskGraph::simulation(&c, &BasisState::zeros(3)).unwrap();
        assert!(p.validate(&graph).is_ok());
        let steps: Vec<_> = p.steps().iter().map(|s| (s.left, s.right)).collect();
        assert_eq!(steps, vec![(1, 2), (4, 3), (0, 5)]);
    }

    #[test]
    fn greedy_plan_translates_to_a_valid_path() {
        let c = parse_circuit(
            "qubits 4; h 0; cx 0 3; rz 0.3 2; cx 2 1; h 3; swap 1 3; t 0; cx 3 0; ry 0.2 1",
        )
        .unwrap();
        let input = BasisState::zeros(4);
        for output in [None, Some(&input)] {
            let net = circuit_to_network(&c, &input, output).unwrap();
            let plan = plan_greedy(&net).unwrap();
            let p = plan_to_path(&plan, &c).unwrap();
            let graph = TaskGraph::simulation(&c, &input).unwrap();
            assert!(p.validate(&graph).is_ok());
        }
    }

    #[test]
    fn leaf_count_mismatch() {
        let c = ghz();
        assert!(matches!(
            plan_to_path(&ContractionPlan::sequential(4), &c),
            Err(PathError::LeafMismatch { plan: 4, .. })
        ));
    }
}

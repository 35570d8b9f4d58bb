use serde::Serialize;

use super::{
    alternating_path, default_sequential_path, execute_path, greedy_alternating, plan_to_path,
    DdValue, PathError, PathOutcome, TaskGraph,
};
use crate::circuit::{BasisState, Circuit, CircuitError};
use crate::dd::{DdConfig, DdPackage};
use crate::tn::{circuit_to_network, plan_exhaustive, plan_greedy, DEFAULT_EXHAUSTIVE_LIMIT};

pub const DEFAULT_EQ_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Planner {
    Greedy,
    Exhaustive,
}

/// Evaluation order for the circuit `G` followed by `G2⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Simulate the miter on the input state gate by gate.
    Sequential,
    /// Matrix accumulator: one gate of `G` per `r` gates of `G2⁻¹`.
    Alternating(usize),
    /// Matrix accumulator, choosing the side with the smaller result.
    GreedyAlt,
    /// Simulate the miter along a translated contraction plan.
    PlanTranslated(Planner),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub fidelity: f64,
    pub equivalent: bool,
    pub step_nodes: Vec<usize>,
    pub peak_nodes: usize,
    pub final_nodes: usize,
}

/// [`check_equivalence_with`] on a fresh package with default settings.
pub fn check_equivalence(
    g: &Circuit,
    g2: &Circuit,
    input: &BasisState,
    strategy: Strategy,
) -> Result<EquivalenceVerdict, PathError> {
    let mut pkg = DdPackage::new(DdConfig::default());
    check_equivalence_with(&mut pkg, g, g2, input, strategy, DEFAULT_EQ_TOLERANCE)
}

/// Decides whether `g` and `g2` act the same on `input` up to global phase.
/// With `M` the circuit `g` followed by `g2⁻¹`, the fidelity
/// `|⟨input| M |input⟩|²` must be within `eps_eq` of 1.
pub fn check_equivalence_with(
    pkg: &mut DdPackage,
    g: &Circuit,
    g2: &Circuit,
    input: &BasisState,
    strategy: Strategy,
    eps_eq: f64,
) -> Result<EquivalenceVerdict, PathError> {
    if g.num_qubits() != g2.num_qubits() {
        return Err(CircuitError::QubitCountMismatch {
            left: g.num_qubits(),
            right: g2.num_qubits(),
        }
        .into());
    }
    if input.len() != g.num_qubits() {
        return Err(CircuitError::BasisLength {
            expected: g.num_qubits(),
            got: input.len(),
        }
        .into());
    }
    let g2inv = g2.inverse();
    let miter = g.concatenate(&g2inv)?;
    let outcome: PathOutcome = match strategy {
        Strategy::Sequential => {
            let graph = TaskGraph::simulation(&miter, input)?;
            execute_path(pkg, &graph, &default_sequential_path(&miter))?
        }
        Strategy::PlanTranslated(planner) => {
            let net = circuit_to_network(&miter, input, None)?;
            let plan = match planner {
                Planner::Greedy => plan_greedy(&net)?,
                Planner::Exhaustive => plan_exhaustive(&net, DEFAULT_EXHAUSTIVE_LIMIT)?,
            };
            let graph = TaskGraph::simulation(&miter, input)?;
            execute_path(pkg, &graph, &plan_to_path(&plan, &miter)?)?
        }
        Strategy::Alternating(r) => {
            let graph = TaskGraph::operator(&miter);
            execute_path(pkg, &graph, &alternating_path(g, &g2inv, r)?)?
        }
        Strategy::GreedyAlt => greedy_alternating(pkg, g, &g2inv)?.1,
    };
    let overlap = match outcome.result {
        DdValue::Vector(v) => {
            let a = pkg.amplitude(&v, input);
            pkg.dec_ref(&v);
            a
        }
        DdValue::Matrix(m) => {
            let a = pkg.matrix_entry(&m, input, input);
            pkg.dec_ref(&m);
            a
        }
    };
    let fidelity = overlap.norm_sqr().min(1.0);
    Ok(EquivalenceVerdict {
        fidelity,
        equivalent: (1.0 - fidelity).abs() <= eps_eq,
        step_nodes: outcome.step_nodes,
        peak_nodes: outcome.peak_nodes,
        final_nodes: outcome.final_nodes,
    })
}

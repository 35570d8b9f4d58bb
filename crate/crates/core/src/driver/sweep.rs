use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::{check_gate_tensors, generate_benchmark, DriverError, Family};
use crate::circuit::{BasisState, Circuit};
use crate::dd::{DdConfig, DdPackage};
use crate::path::{default_sequential_path, execute_path, SimulationPath, TaskGraph};
use crate::tn::{circuit_to_network, plan_cost, plan_greedy, PlanCost};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Nodes of the DD for the whole circuit's unitary.
    DdGateNodes,
    /// Elements of all gate tensors, `Σ 4^arity`.
    TnGateTensorElements,
    /// Nodes of the final state DD from `|0…0⟩`.
    DdStateNodes,
    /// Largest intermediate state DD along the sequential path.
    DdPeakNodes,
    /// Multiply-adds of the greedy full-state contraction plan.
    TnPlanFlops,
    /// Largest intermediate of the greedy full-state contraction plan.
    TnMaxIntermediate,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::DdGateNodes,
        Metric::TnGateTensorElements,
        Metric::DdStateNodes,
        Metric::DdPeakNodes,
        Metric::TnPlanFlops,
        Metric::TnMaxIntermediate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::DdGateNodes => "dd-gate-nodes",
            Metric::TnGateTensorElements => "tn-gate-tensor-elements",
            Metric::DdStateNodes => "dd-state-nodes",
            Metric::DdPeakNodes => "dd-peak-nodes",
            Metric::TnPlanFlops => "tn-plan-flops",
            Metric::TnMaxIntermediate => "tn-max-intermediate",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = DriverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| DriverError::Usage(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: Family,
    pub n: usize,
    pub metric: Metric,
    pub value: u128,
    pub wall_ms: f64,
}

fn measure(circuit: &Circuit, metric: Metric) -> Result<u128, DriverError> {
    let n = circuit.num_qubits();
    let zeros = BasisState::zeros(n);
    Ok(match metric {
        Metric::TnGateTensorElements => circuit.gates().iter().map(|g| 1u128 << (2 * g.arity())).sum(),
        Metric::DdGateNodes => {
            let mut pkg = DdPackage::new(DdConfig::default());
            let graph = TaskGraph::operator(circuit);
            let out = execute_path(&mut pkg, &graph, &SimulationPath::sequential(&graph))?;
            out.final_nodes as u128
        }
        Metric::DdStateNodes | Metric::DdPeakNodes => {
            let mut pkg = DdPackage::new(DdConfig::default());
            let graph = TaskGraph::simulation(circuit, &zeros)?;
            let out = execute_path(&mut pkg, &graph, &default_sequential_path(circuit))?;
            if metric == Metric::DdStateNodes {
                out.final_nodes as u128
            } else {
                out.peak_nodes as u128
            }
        }
        Metric::TnPlanFlops | Metric::TnMaxIntermediate => {
            check_gate_tensors(circuit)?;
            let net = circuit_to_network(circuit, &zeros, None)?;
            let cost: PlanCost = plan_cost(&net, &plan_greedy(&net)?)?;
            if metric == Metric::TnPlanFlops {
                cost.flops
            } else {
                cost.max_intermediate
            }
        }
    })
}

/// Measures `metric` on `family` for every `n` in `ns`, in order. Each case
/// uses its own package or network.
pub fn scaling_sweep(
    family: Family,
    ns: RangeInclusive<usize>,
    metric: Metric,
    seed: u64,
) -> Result<Vec<SweepRow>, DriverError> {
    ns.map(|n| {
        let t0 = Instant::now();
        let circuit = generate_benchmark(family, n, seed)?;
        let value = measure(&circuit, metric)?;
        Ok(SweepRow {
            family,
            n,
            metric,
            value,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        })
    })
    .collect()
}

/// `family,n,metric,value,wall_ms` with a header line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("family,n,metric,value,wall_ms\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{:.3}\n", r.family, r.n, r.metric, r.value, r.wall_ms));
    }
    s
}

/// Least-squares line `y = slope·x + intercept` and its R².
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

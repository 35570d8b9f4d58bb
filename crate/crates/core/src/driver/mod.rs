//! Runs circuits on either backend (or both, cross-checked), and the
//! benchmark generators and sweeps built on top.

mod generate;
mod rewrite;
mod sweep;

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use generate::{generate_benchmark, ghz, grover_oracle, random_circuit, random_layered, Family};
pub use rewrite::{commuting_variant, equivalent_variant, mutate_single_gate};
pub use sweep::{linear_fit, scaling_sweep, sweep_csv, Metric, SweepRow};

use crate::circuit::{BasisState, Circuit, CircuitError, ParseError};
use crate::dd::{DdConfig, DdError, DdPackage};
use crate::path::{
    check_equivalence_with, default_sequential_path, execute_path, plan_to_path, DdValue, PathError,
    Planner, Strategy, TaskGraph,
};
use crate::tn::{
    circuit_to_network, contract_sliced, pick_slice_labels, plan_cost, plan_exhaustive, plan_greedy,
    ContractionPlan, PlanCost, TensorNetwork, TnError, DEFAULT_EXHAUSTIVE_LIMIT,
};

/// Largest tensor (in elements) the TN backend will materialize.
pub const TN_ELEMENT_LIMIT: u128 = 1 << 27;

/// Sparse DD payloads stop after this many non-zero amplitudes.
pub const SPARSE_LIMIT: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Dd(#[from] DdError),
    #[error(transparent)]
    Tn(#[from] TnError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("full-state tensor contraction refused: {qubits} qubits exceeds the dense cap of {cap}")]
    DenseCap { qubits: usize, cap: usize },
    #[error("tensor with {elements} elements exceeds the limit of {limit}")]
    TensorTooLarge { elements: u128, limit: u128 },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Weight identification in the DD package.
    pub eps_num: f64,
    /// Distance of the fidelity from 1 accepted as equivalent.
    pub eps_eq: f64,
    /// Largest deviation accepted between the two backends.
    pub eps_agree: f64,
    /// Qubit cap for dense full-state output.
    pub n_dense: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_num: 1e-10,
            eps_eq: 1e-9,
            eps_agree: 1e-9,
            n_dense: 20,
        }
    }
}

impl Tolerances {
    /// Defaults overridden by `DUALSIM_EPS_NUM`, `DUALSIM_EPS_EQ`,
    /// `DUALSIM_EPS_AGREE` and `DUALSIM_N_DENSE` when set.
    pub fn from_env() -> Result<Self, DriverError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, DriverError> {
        fn read<T: FromStr>(get: &impl Fn(&str) -> Option<String>, key: &str, slot: &mut T) -> Result<(), DriverError> {
            if let Some(v) = get(key) {
                *slot = v
                    .trim()
                    .parse()
                    .map_err(|_| DriverError::Usage(format!("{key}: cannot parse `{v}`")))?;
            }
            Ok(())
        }
        let mut t = Tolerances::default();
        read(&get, "DUALSIM_EPS_NUM", &mut t.eps_num)?;
        read(&get, "DUALSIM_EPS_EQ", &mut t.eps_eq)?;
        read(&get, "DUALSIM_EPS_AGREE", &mut t.eps_agree)?;
        read(&get, "DUALSIM_N_DENSE", &mut t.n_dense)?;
        for (name, v) in [("eps_num", t.eps_num), ("eps_eq", t.eps_eq), ("eps_agree", t.eps_agree)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DriverError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dd,
    Tn,
    Both,
}

impl Backend {
    fn runs_dd(self) -> bool {
        self != Backend::Tn
    }

    fn runs_tn(self) -> bool {
        self != Backend::Dd
    }
}

impl FromStr for Backend {
    type Err = DriverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dd" => Ok(Backend::Dd),
            "tn" => Ok(Backend::Tn),
            "both" => Ok(Backend::Both),
            _ => Err(DriverError::Usage(format!("unknown backend `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Full,
    Amplitude(BasisState),
    /// Fidelity against a second circuit, on the all-zero input.
    Fidelity(Circuit),
}

impl Mode {
    fn name(&self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Amplitude(_) => "amplitude",
            Mode::Fidelity(_) => "fidelity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyChoice {
    Sequential,
    Alternating(usize),
    GreedyAlt,
    /// Translate the TN planner's plan into a DD simulation path.
    Plan,
}

impl fmt::Display for StrategyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyChoice::Sequential => f.write_str("seq"),
            StrategyChoice::Alternating(r) => write!(f, "alt {r}"),
            StrategyChoice::GreedyAlt => f.write_str("greedy-alt"),
            StrategyChoice::Plan => f.write_str("plan"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub backend: Backend,
    pub mode: Mode,
    pub strategy: StrategyChoice,
    pub planner: Planner,
    /// Number of closed indices to slice on in the TN backend.
    pub slices: usize,
    pub workers: usize,
    /// Echoed in the report. Simulation itself is deterministic.
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: Backend::Dd,
            mode: Mode::Full,
            strategy: StrategyChoice::Sequential,
            planner: Planner::Greedy,
            slices: 0,
            workers: 1,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self, circuit: &Circuit) -> Result<(), DriverError> {
        let n = circuit.num_qubits();
        match &self.mode {
            Mode::Amplitude(b) if b.len() != n => {
                return Err(DriverError::Usage(format!(
                    "amplitude basis has {} bits, circuit has {n} qubits",
                    b.len()
                )))
            }
            Mode::Fidelity(g2) if g2.num_qubits() != n => {
                return Err(DriverError::Usage(format!(
                    "fidelity circuits differ in width: {n} vs {}",
                    g2.num_qubits()
                )))
            }
            _ => {}
        }
        let matrix_strategy = matches!(
            self.strategy,
            StrategyChoice::Alternating(_) | StrategyChoice::GreedyAlt
        );
        if matrix_strategy && !matches!(self.mode, Mode::Fidelity(_)) {
            return Err(DriverError::Usage(format!(
                "strategy `{}` needs fidelity mode",
                self.strategy
            )));
        }
        if self.strategy == StrategyChoice::Alternating(0) {
            return Err(DriverError::Usage("alternation ratio must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(DriverError::Usage("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// A complex number as `[re, im]`.
pub type Amp = [f64; 2];

fn amp(c: Complex64) -> Amp {
    [c.re, c.im]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    State {
        amplitudes: Vec<Amp>,
    },
    /// Non-zero amplitudes by basis index, for registers above the dense cap.
    SparseState {
        qubits: usize,
        entries: Vec<(u64, Amp)>,
        truncated: bool,
    },
    Amplitude {
        basis: String,
        value: Amp,
    },
    Fidelity {
        fidelity: f64,
        equivalent: bool,
    },
}

fn dist(a: Amp, b: Amp) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Payload {
    /// Largest elementwise distance, or `None` if the payloads are not
    /// comparable.
    pub fn max_deviation(&self, other: &Payload) -> Option<f64> {
        use Payload::*;
        match (self, other) {
            (State { amplitudes: a }, State { amplitudes: b }) if a.len() == b.len() => {
                Some(a.iter().zip(b).map(|(x, y)| dist(*x, *y)).fold(0.0, f64::max))
            }
            (Amplitude { value: a, .. }, Amplitude { value: b, .. }) => Some(dist(*a, *b)),
            (Fidelity { fidelity: a, .. }, Fidelity { fidelity: b, .. }) => Some((a - b).abs()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DdMetrics {
    pub steps: usize,
    pub peak_nodes: usize,
    pub final_nodes: usize,
    pub peak_live_nodes: usize,
    pub gc_runs: usize,
    pub compute_hits: usize,
    pub compute_misses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TnMetrics {
    pub tensors: usize,
    pub plan_flops: u128,
    pub max_intermediate: u128,
    pub max_rank: usize,
    pub sliced_labels: Vec<String>,
    pub slices: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackendResult {
    pub backend: Backend,
    pub wall_ms: f64,
    pub payload: Option<Payload>,
    /// Why the payload is missing (only in `both` mode).
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dd: Option<DdMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tn: Option<TnMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub reference: Backend,
    /// `None` when only the reference produced a payload.
    pub max_deviation: Option<f64>,
    pub tolerance: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub backend: Backend,
    pub mode: &'static str,
    pub basis: Option<String>,
    pub strategy: String,
    pub planner: Planner,
    pub slices: usize,
    pub workers: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub version: &'static str,
    pub config: ConfigEcho,
    pub qubits: usize,
    pub gates: usize,
    pub results: Vec<BackendResult>,
    pub cross_check: Option<CrossCheck>,
}

impl RunReport {
    pub fn diverged(&self) -> bool {
        self.cross_check.as_ref().is_some_and(|c| !c.agree)
    }

    pub fn result(&self, backend: Backend) -> Option<&BackendResult> {
        self.results.iter().find(|r| r.backend == backend)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Short human-readable rendering.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} qubits, {} gates, mode {}",
            self.qubits, self.gates, self.config.mode
        );
        for r in &self.results {
            let name = match r.backend {
                Backend::Dd => "dd",
                Backend::Tn => "tn",
                Backend::Both => "both",
            };
            let _ = write!(s, "[{name}] {:.3} ms: ", r.wall_ms);
            match (&r.payload, &r.skipped) {
                (Some(p), _) => describe(&mut s, p),
                (None, Some(why)) => s.push_str(&format!("skipped ({why})")),
                (None, None) => s.push_str("no result"),
            }
            if let Some(m) = &r.dd {
                let _ = write!(s, "; peak {} nodes, final {}", m.peak_nodes, m.final_nodes);
            }
            if let Some(m) = &r.tn {
                let _ = write!(
                    s,
                    "; {} flops, max intermediate {}, {} slice(s)",
                    m.plan_flops, m.max_intermediate, m.slices
                );
            }
            s.push('\n');
        }
        if let Some(c) = &self.cross_check {
            match c.max_deviation {
                Some(d) => {
                    let verdict = if c.agree { "agree" } else { "DIVERGE" };
                    let _ = writeln!(s, "cross-check: {verdict} (max deviation {d:.3e}, tolerance {:.1e})", c.tolerance);
                }
                None => {
                    let _ = writeln!(s, "cross-check: reference only");
                }
            }
        }
        s
    }
}

fn describe(s: &mut String, p: &Payload) {
    let fmt_c = |a: &Amp| {
        if a[1] == 0.0 {
            format!("{:.10}", a[0])
        } else {
            format!("{:.10}{:+.10}i", a[0], a[1])
        }
    };
    match p {
        Payload::State { amplitudes } => {
            let shown: Vec<String> = amplitudes.iter().take(8).map(fmt_c).collect();
            let more = if amplitudes.len() > 8 { ", …" } else { "" };
            let _ = write!(s, "state [{}{more}]", shown.join(", "));
        }
        Payload::SparseState { qubits, entries, truncated } => {
            let shown: Vec<String> = entries
                .iter()
                .take(8)
                .map(|(i, a)| format!("{}: {}", BasisState::from_index(*qubits, *i), fmt_c(a)))
                .collect();
            let more = if entries.len() > 8 || *truncated { ", …" } else { "" };
            let _ = write!(s, "{} non-zero amplitudes {{{}{more}}}", entries.len(), shown.join(", "));
        }
        Payload::Amplitude { basis, value } => {
            let _ = write!(s, "amplitude <{basis}> = {}", fmt_c(value));
        }
        Payload::Fidelity { fidelity, equivalent } => {
            let _ = write!(s, "fidelity {fidelity:.12} ({})", if *equivalent { "equivalent" } else { "not equivalent" });
        }
    }
}

/// Executes `circuit` as configured.
///
/// A failing backend fails the run, except that in `both` mode a TN
/// full-state refusal above the dense cap leaves DD as the only (reference)
/// result. Divergence between the backends is reported, not raised; see
/// [`RunReport::diverged`].
pub fn run(cfg: &RunConfig, circuit: &Circuit) -> Result<RunReport, DriverError> {
    cfg.validate(circuit)?;
    let mut results = Vec::new();
    if cfg.backend.runs_dd() {
        let t0 = Instant::now();
        let (payload, metrics) = run_dd(cfg, circuit)?;
        results.push(BackendResult {
            backend: Backend::Dd,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
            payload: Some(payload),
            skipped: None,
            dd: Some(metrics),
            tn: None,
        });
    }
    if cfg.backend.runs_tn() {
        let t0 = Instant::now();
        let outcome = run_tn(cfg, circuit);
        let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
        let (payload, tn, skipped) = match outcome {
            Ok((p, m)) => (Some(p), Some(m), None),
            Err(e @ DriverError::DenseCap { .. }) if cfg.backend == Backend::Both => {
                (None, None, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        };
        results.push(BackendResult {
            backend: Backend::Tn,
            wall_ms,
            payload,
            skipped,
            dd: None,
            tn,
        });
    }
    let cross_check = (cfg.backend == Backend::Both).then(|| {
        let dd = results[0].payload.as_ref().expect("dd payload");
        let tol = cfg.tolerances.eps_agree;
        match &results[1].payload {
            Some(tn) => {
                let d = dd.max_deviation(tn).unwrap_or(f64::INFINITY);
                CrossCheck {
                    reference: Backend::Tn,
                    max_deviation: Some(d),
                    tolerance: tol,
                    agree: d <= tol,
                }
            }
            None => CrossCheck {
                reference: Backend::Dd,
                max_deviation: None,
                tolerance: tol,
                agree: true,
            },
        }
    });
    Ok(RunReport {
        schema: 1,
        version: env!("CARGO_PKG_VERSION"),
        config: ConfigEcho {
            backend: cfg.backend,
            mode: cfg.mode.name(),
            basis: match &cfg.mode {
                Mode::Amplitude(b) => Some(b.to_string()),
                _ => None,
            },
            strategy: cfg.strategy.to_string(),
            planner: cfg.planner,
            slices: cfg.slices,
            workers: cfg.workers,
            seed: cfg.seed,
            tolerances: cfg.tolerances,
        },
        qubits: circuit.num_qubits(),
        gates: circuit.len(),
        results,
        cross_check,
    })
}

fn plan_for(net: &TensorNetwork, planner: Planner) -> Result<ContractionPlan, TnError> {
    match planner {
        Planner::Greedy => plan_greedy(net),
        Planner::Exhaustive => plan_exhaustive(net, DEFAULT_EXHAUSTIVE_LIMIT),
    }
}

/// Refuses circuits whose gate tensors alone would be too large to build.
fn check_gate_tensors(circuit: &Circuit) -> Result<(), DriverError> {
    for g in circuit.gates() {
        let elements = 1u128 << (2 * g.arity());
        if elements > TN_ELEMENT_LIMIT {
            return Err(DriverError::TensorTooLarge {
                elements,
                limit: TN_ELEMENT_LIMIT,
            });
        }
    }
    Ok(())
}

fn dd_metrics(pkg: &DdPackage, steps: usize, peak: usize, fin: usize) -> DdMetrics {
    let st = pkg.stats();
    DdMetrics {
        steps,
        peak_nodes: peak,
        final_nodes: fin,
        peak_live_nodes: st.peak_live_nodes,
        gc_runs: st.gc_runs,
        compute_hits: st.compute_hits,
        compute_misses: st.compute_misses,
    }
}

fn run_dd(cfg: &RunConfig, circuit: &Circuit) -> Result<(Payload, DdMetrics), DriverError> {
    let mut pkg = DdPackage::new(DdConfig {
        tolerance: cfg.tolerances.eps_num,
        ..DdConfig::default()
    });
    let n = circuit.num_qubits();
    if let Mode::Fidelity(g2) = &cfg.mode {
        let strategy = match cfg.strategy {
            StrategyChoice::Sequential => Strategy::Sequential,
            StrategyChoice::Alternating(r) => Strategy::Alternating(r),
            StrategyChoice::GreedyAlt => Strategy::GreedyAlt,
            StrategyChoice::Plan => Strategy::PlanTranslated(cfg.planner),
        };
        let v = check_equivalence_with(
            &mut pkg,
            circuit,
            g2,
            &BasisState::zeros(n),
            strategy,
            cfg.tolerances.eps_eq,
        )?;
        let m = dd_metrics(&pkg, v.step_nodes.len(), v.peak_nodes, v.final_nodes);
        return Ok((
            Payload::Fidelity {
                fidelity: v.fidelity,
                equivalent: v.equivalent,
            },
            m,
        ));
    }

    let input = BasisState::zeros(n);
    let path = match cfg.strategy {
        StrategyChoice::Plan => {
            check_gate_tensors(circuit)?;
            let net = circuit_to_network(circuit, &input, None)?;
            plan_to_path(&plan_for(&net, cfg.planner)?, circuit)?
        }
        _ => default_sequential_path(circuit),
    };
    let graph = TaskGraph::simulation(circuit, &input)?;
    let out = execute_path(&mut pkg, &graph, &path)?;
    let DdValue::Vector(v) = out.result else {
        unreachable!("simulation paths end in a vector")
    };
    let payload = match &cfg.mode {
        Mode::Amplitude(b) => Payload::Amplitude {
            basis: b.to_string(),
            value: amp(pkg.amplitude(&v, b)),
        },
        _ if n <= cfg.tolerances.n_dense => Payload::State {
            amplitudes: pkg.statevector(&v, cfg.tolerances.n_dense)?.into_iter().map(amp).collect(),
        },
        _ => {
            let entries = pkg.nonzero_amplitudes(&v, SPARSE_LIMIT + 1);
            let truncated = entries.len() > SPARSE_LIMIT;
            Payload::SparseState {
                qubits: n,
                entries: entries.into_iter().take(SPARSE_LIMIT).map(|(i, a)| (i, amp(a))).collect(),
                truncated,
            }
        }
    };
    pkg.dec_ref(&v);
    let m = dd_metrics(&pkg, out.step_nodes.len(), out.peak_nodes, out.final_nodes);
    Ok((payload, m))
}

fn run_tn(cfg: &RunConfig, circuit: &Circuit) -> Result<(Payload, TnMetrics), DriverError> {
    let n = circuit.num_qubits();
    if matches!(cfg.mode, Mode::Full) && n > cfg.tolerances.n_dense {
        return Err(DriverError::DenseCap {
            qubits: n,
            cap: cfg.tolerances.n_dense,
        });
    }
    let zeros = BasisState::zeros(n);
    let (net, miter) = match &cfg.mode {
        Mode::Full => {
            check_gate_tensors(circuit)?;
            (circuit_to_network(circuit, &zeros, None)?, None)
        }
        Mode::Amplitude(b) => {
            check_gate_tensors(circuit)?;
            (circuit_to_network(circuit, &zeros, Some(b))?, None)
        }
        Mode::Fidelity(g2) => {
            let m = circuit.miter(g2)?;
            check_gate_tensors(&m)?;
            (circuit_to_network(&m, &zeros, Some(&zeros))?, Some(m))
        }
    };
    let plan = plan_for(&net, cfg.planner)?;
    let cost: PlanCost = plan_cost(&net, &plan)?;
    if cost.max_intermediate > TN_ELEMENT_LIMIT {
        return Err(DriverError::TensorTooLarge {
            elements: cost.max_intermediate,
            limit: TN_ELEMENT_LIMIT,
        });
    }
    let labels = pick_slice_labels(&net, cfg.slices);
    let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let t = contract_sliced(&net, &label_refs, &plan, cfg.workers)?;
    let metrics = TnMetrics {
        tensors: net.len(),
        plan_flops: cost.flops,
        max_intermediate: cost.max_intermediate,
        max_rank: cost.max_rank,
        slices: 1 << labels.len(),
        sliced_labels: labels,
    };
    let payload = match &cfg.mode {
        Mode::Full => Payload::State {
            amplitudes: t.data().iter().copied().map(amp).collect(),
        },
        Mode::Amplitude(b) => Payload::Amplitude {
            basis: b.to_string(),
            value: amp(t.data()[0]),
        },
        Mode::Fidelity(_) => {
            debug_assert!(miter.is_some());
            let f = t.data()[0].norm_sqr().min(1.0);
            Payload::Fidelity {
                fidelity: f,
                equivalent: (1.0 - f).abs() <= cfg.tolerances.eps_eq,
            }
        }
    };
    Ok((payload, metrics))
}

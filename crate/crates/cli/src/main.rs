//! `dualsim simulate` runs a circuit file on the DD and/or TN backend;
//! `dualsim bench` sweeps a benchmark family and writes CSV.
//!
//! Exit codes: 0 on success, 2 when the backends disagree, 1 on usage,
//! parse or simulation errors.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dualsim_core::circuit::parse_circuit;
use dualsim_core::driver::{
    linear_fit, run, scaling_sweep, sweep_csv, Backend, DriverError, Family, Metric, Mode, RunConfig,
    StrategyChoice, Tolerances,
};
use dualsim_core::path::Planner;
use dualsim_core::{BasisState, Circuit};

#[derive(Parser, Debug)]
#[command(name = "dualsim", version, about = "Decision-diagram and tensor-network circuit simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a circuit file.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value = "dd", value_parser = ["dd", "tn", "both"])]
        backend: String,
        /// `full`, `amp <bits>` or `fidelity <file2>`.
        #[arg(long, num_args = 1..=2, value_names = ["MODE", "ARG"], default_values = ["full"])]
        mode: Vec<String>,
        /// `seq`, `alt <r>`, `greedy-alt` or `plan`.
        #[arg(long, num_args = 1..=2, value_names = ["STRATEGY", "R"], default_values = ["seq"])]
        strategy: Vec<String>,
        #[arg(long, default_value = "greedy", value_parser = ["greedy", "exhaustive"])]
        plan: String,
        /// Number of closed indices to slice on (TN backend).
        #[arg(long, default_value_t = 0)]
        slices: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the JSON report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure a scaling metric over a range of register sizes.
    Bench {
        #[arg(long)]
        family: String,
        /// Inclusive range `a..b`, or a single size.
        #[arg(long)]
        n: String,
        #[arg(long)]
        metric: String,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn usage(msg: impl Into<String>) -> DriverError {
    DriverError::Usage(msg.into())
}

fn read_circuit(path: &Path) -> Result<Circuit, DriverError> {
    let text = fs::read_to_string(path).map_err(|source| DriverError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_circuit(&text).map_err(|e| usage(format!("{}:{e}", path.display())))
}

fn write_out(path: &Path, contents: &str) -> Result<(), DriverError> {
    if path == Path::new("-") {
        print!("{contents}");
        return Ok(());
    }
    fs::write(path, contents).map_err(|source| DriverError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_mode(args: &[String], width: usize) -> Result<Mode, DriverError> {
    match (args[0].as_str(), args.get(1)) {
        ("full", None) => Ok(Mode::Full),
        ("amp" | "amplitude", Some(bits)) => Ok(Mode::Amplitude(BasisState::parse_with_len(bits, width)?)),
        ("fidelity", Some(file)) => Ok(Mode::Fidelity(read_circuit(Path::new(file))?)),
        ("amp" | "amplitude", None) => Err(usage("--mode amp needs a basis string")),
        ("fidelity", None) => Err(usage("--mode fidelity needs a second circuit file")),
        _ => Err(usage(format!("invalid --mode `{}`", args.join(" ")))),
    }
}

fn parse_strategy(args: &[String]) -> Result<StrategyChoice, DriverError> {
    match (args[0].as_str(), args.get(1)) {
        ("seq" | "sequential", None) => Ok(StrategyChoice::Sequential),
        ("alt" | "alternating", r) => {
            let r = match r {
                Some(r) => r.parse().map_err(|_| usage(format!("invalid alternation ratio `{r}`")))?,
                None => 1,
            };
            Ok(StrategyChoice::Alternating(r))
        }
        ("greedy-alt", None) => Ok(StrategyChoice::GreedyAlt),
        ("plan", None) => Ok(StrategyChoice::Plan),
        _ => Err(usage(format!("invalid --strategy `{}`", args.join(" ")))),
    }
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, DriverError> {
    let bad = || usage(format!("invalid range `{s}`, expected `a..b`"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn simulate(cmd: Command) -> Result<ExitCode, DriverError> {
    let Command::Simulate {
        file,
        backend,
        mode,
        strategy,
        plan,
        slices,
        workers,
        json,
        seed,
    } = cmd
    else {
        unreachable!()
    };
    let circuit = read_circuit(&file)?;
    let cfg = RunConfig {
        backend: backend.parse::<Backend>()?,
        mode: parse_mode(&mode, circuit.num_qubits())?,
        strategy: parse_strategy(&strategy)?,
        planner: if plan == "exhaustive" {
            Planner::Exhaustive
        } else {
            Planner::Greedy
        },
        slices,
        workers,
        seed,
        tolerances: Tolerances::from_env()?,
    };
    let report = run(&cfg, &circuit)?;
    if json.as_deref() != Some(Path::new("-")) {
        print!("{}", report.summary());
    }
    if let Some(path) = json {
        write_out(&path, &(report.to_json() + "\n"))?;
    }
    Ok(if report.diverged() {
        eprintln!("error: backend results diverge");
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn bench(cmd: Command) -> Result<ExitCode, DriverError> {
    let Command::Bench {
        family,
        n,
        metric,
        csv,
        seed,
    } = cmd
    else {
        unreachable!()
    };
    let family: Family = family.parse()?;
    let metric: Metric = metric.parse()?;
    let rows = scaling_sweep(family, parse_range(&n)?, metric, seed)?;
    let text = sweep_csv(&rows);
    match &csv {
        Some(path) => write_out(path, &text)?,
        None => print!("{text}"),
    }
    if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.value as f64).collect();
        let (a, b, r2) = linear_fit(&xs, &ys);
        eprintln!("linear fit: value = {a:.4}·n {b:+.4} (R² = {r2:.6})");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        cmd @ Command::Simulate { .. } => simulate(cmd),
        cmd @ Command::Bench { .. } => bench(cmd),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..16").unwrap(), 2..=16);
        assert_eq!(parse_range("2..=4").unwrap(), 2..=4);
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert!(parse_range("4..2").is_err());
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn strategies() {
        let s = |v: &[&str]| parse_strategy(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        assert_eq!(s(&["alt", "3"]).unwrap(), StrategyChoice::Alternating(3));
        assert_eq!(s(&["alt"]).unwrap(), StrategyChoice::Alternating(1));
        assert_eq!(s(&["plan"]).unwrap(), StrategyChoice::Plan);
        assert!(s(&["seq", "2"]).is_err());
        assert!(s(&["alt", "x"]).is_err());
    }
}

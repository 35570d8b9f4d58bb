use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DriverError;
use crate::circuit::{Circuit, Gate, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Ghz,
    GroverOracle,
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Ghz => "ghz",
            Family::GroverOracle => "grover-oracle",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = DriverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ghz" => Ok(Family::Ghz),
            "grover-oracle" | "grover" => Ok(Family::GroverOracle),
            "random" => Ok(Family::Random),
            other => Err(DriverError::Usage(format!("unsupported family `{other}`"))),
        }
    }
}

/// `H(q_{n-1})` followed by the chain `CX(q_{n-1}, q_{n-2}) … CX(q_1, q_0)`.
pub fn ghz(n: usize) -> Result<Circuit, DriverError> {
    let mut gates = vec![Gate::h(n.saturating_sub(1))];
    for q in (1..n).rev() {
        gates.push(Gate::cx(q, q - 1)?);
    }
    Ok(Circuit::from_gates(n, gates)?)
}

/// A single `MCX(q_{n-1} … q_1 → q_0)`. At `n = 2` this is a CX.
pub fn grover_oracle(n: usize) -> Result<Circuit, DriverError> {
    if n < 2 {
        return Err(DriverError::Usage(format!(
            "grover-oracle needs at least 2 qubits, got {n}"
        )));
    }
    Ok(Circuit::from_gates(n, vec![Gate::mcx((1..n).rev().collect(), 0)?])?)
}

/// Gates drawn uniformly from the gate library. Multi-qubit gates pick a
/// first qubit uniformly and the rest within `locality` of it (`None` for
/// unbounded). Rotation angles are uniform in `[-π, π)`.
pub fn random_circuit(n: usize, gates: usize, seed: u64, locality: Option<usize>) -> Result<Circuit, DriverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds: Vec<GateKind> = GateKind::ALL
        .iter()
        .copied()
        .filter(|k| n >= 2 || single_qubit(*k))
        .collect();
    let mut c = Circuit::new(n)?;
    for _ in 0..gates {
        let kind = *kinds.choose(&mut rng).expect("non-empty gate library");
        c.push(random_gate(&mut rng, kind, n, locality)?)?;
    }
    Ok(c)
}

fn single_qubit(kind: GateKind) -> bool {
    !matches!(kind, GateKind::Swap | GateKind::Cx | GateKind::Cz | GateKind::Mcx)
}

fn pick_qubits(rng: &mut ChaCha8Rng, n: usize, count: usize, locality: Option<usize>) -> Vec<usize> {
    let first = rng.gen_range(0..n);
    let d = locality.unwrap_or(n).max(1);
    let lo = first.saturating_sub(d);
    let hi = (first + d).min(n - 1);
    let mut pool: Vec<usize> = (lo..=hi).filter(|&q| q != first).collect();
    pool.shuffle(rng);
    let mut out = vec![first];
    out.extend(pool.into_iter().take(count - 1));
    out
}

fn random_params(rng: &mut ChaCha8Rng, kind: GateKind) -> Vec<f64> {
    (0..kind.num_params()).map(|_| rng.gen_range(-PI..PI)).collect()
}

fn random_gate(
    rng: &mut ChaCha8Rng,
    kind: GateKind,
    n: usize,
    locality: Option<usize>,
) -> Result<Gate, DriverError> {
    let params = random_params(rng, kind);
    let gate = match kind {
        GateKind::Swap => {
            let q = pick_qubits(rng, n, 2, locality);
            Gate::new(kind, params, vec![], q)?
        }
        GateKind::Cx | GateKind::Cz => {
            let q = pick_qubits(rng, n, 2, locality);
            Gate::new(kind, params, vec![q[0]], vec![q[1]])?
        }
        GateKind::Mcx => {
            let window = locality.map_or(n, |d| (2 * d + 1).min(n));
            let max = window.min(4);
            let total = rng.gen_range(2..=max.max(2));
            let mut q = pick_qubits(rng, n, total, locality);
            let target = q.pop().expect("mcx target");
            Gate::new(kind, params, q, vec![target])?
        }
        _ => Gate::new(kind, params, vec![], vec![rng.gen_range(0..n)])?,
    };
    Ok(gate)
}

/// `depth` layers; each layer pairs up a random subset of qubits with CX or
/// CZ and gives every other qubit a random single-qubit gate from
/// `{H, S, T, RX, RY, RZ}`.
pub fn random_layered(n: usize, depth: usize, seed: u64) -> Result<Circuit, DriverError> {
    const SINGLE: [GateKind; 6] = [
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n)?;
    for _ in 0..depth {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let pairs = rng.gen_range(0..=n / 2);
        for p in 0..pairs {
            let (a, b) = (order[2 * p], order[2 * p + 1]);
            let g = if rng.gen_bool(0.5) { Gate::cx(a, b)? } else { Gate::cz(a, b)? };
            c.push(g)?;
        }
        for &q in &order[2 * pairs..] {
            let kind = *SINGLE.choose(&mut rng).expect("gate kinds");
            let params = random_params(&mut rng, kind);
            c.push(Gate::new(kind, params, vec![], vec![q])?)?;
        }
    }
    Ok(c)
}

/// Benchmark circuit of the given family. The random family draws `4n`
/// gates with unbounded locality.
pub fn generate_benchmark(family: Family, n: usize, seed: u64) -> Result<Circuit, DriverError> {
    if n == 0 {
        return Err(DriverError::Usage("benchmarks need at least one qubit".into()));
    }
    match family {
        Family::Ghz => ghz(n),
        Family::GroverOracle => grover_oracle(n),
        Family::Random => random_circuit(n, 4 * n, seed, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    #[test]
    fn ghz3_is_the_textbook_circuit() {
        assert_eq!(
            ghz(3).unwrap(),
            parse_circuit("qubits 3; h 2; cx 2 1; cx 1 0").unwrap()
        );
        assert_eq!(ghz(1).unwrap().len(), 1);
    }

    #[test]
    fn grover_oracle_is_one_mcx() {
        let c = grover_oracle(4).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.gates()[0].controls(), &[3, 2, 1]);
        assert_eq!(c.gates()[0].targets(), &[0]);
        assert_eq!(grover_oracle(2).unwrap().gates()[0].controls(), &[1]);
        assert!(grover_oracle(1).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        let a = generate_benchmark(Family::Random, 5, 7).unwrap();
        let b = generate_benchmark(Family::Random, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_benchmark(Family::Random, 5, 8).unwrap());
        assert_eq!(a.len(), 20);
    }

    #[test]
    fn locality_bounds_two_qubit_gates() {
        let c = random_circuit(10, 300, 3, Some(1)).unwrap();
        for g in c.gates() {
            let qs: Vec<usize> = g.qubits().copied().collect();
            let lo = *qs.iter().min().unwrap();
            let hi = *qs.iter().max().unwrap();
            assert!(hi - lo <= 2, "{g}");
        }
        let single = random_circuit(1, 50, 3, None).unwrap();
        assert!(single.gates().iter().all(|g| g.arity() == 1));
    }

    #[test]
    fn layered_circuit_shape() {
        let c = random_layered(8, 40, 1).unwrap();
        assert!(c.len() >= 40 * 4);
        assert_eq!(c, random_layered(8, 40, 1).unwrap());
    }

    #[test]
    fn family_names() {
        for f in [Family::Ghz, Family::GroverOracle, Family::Random] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("qft".parse::<Family>().is_err());
    }
}

//! Circuit intermediate representation shared by both simulation backends.
//!
//! Qubit `0` is the least-significant bit of a state-vector index, so the
//! basis state printed as `q2 q1 q0 = 110` has index 6.

mod gate;
mod parse;

pub use gate::{gate_matrix, Gate, GateKind};
pub use parse::{parse_circuit, ParseError, ParseErrorKind};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("{kind} expects {expected}, got {controls} control(s) and {targets} target(s)")]
    Arity {
        kind: GateKind,
        expected: &'static str,
        controls: usize,
        targets: usize,
    },
    #[error("{kind} expects {expected} parameter(s), got {got}")]
    ParamCount {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate parameter must be finite, got {0}")]
    NonFiniteParam(f64),
    #[error("qubit {0} used more than once in a single gate")]
    DuplicateQubit(usize),
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("invalid basis state {0:?}: expected a string of 0/1 characters")]
    BadBasisState(String),
    #[error("basis state has {got} bits, expected {expected}")]
    BasisLength { expected: usize, got: usize },
}

/// An `n`-qubit circuit: an ordered gate sequence applied to `n` wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        Ok(Circuit {
            num_qubits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(num_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    /// Appends a gate, rejecting qubit indices outside the register.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&index) = gate.qubits().find(|&&q| q >= self.num_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                index,
                num_qubits: self.num_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Reverses the gate order and replaces every gate by its inverse.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Gates of `self` followed by gates of `other`.
    pub fn concatenate(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.num_qubits != other.num_qubits {
            return Err(CircuitError::QubitCountMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Ok(Circuit {
            num_qubits: self.num_qubits,
            gates,
        })
    }

    /// The miter circuit `G · G2⁻¹` used for equivalence checking.
    pub fn miter(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        self.concatenate(&other.inverse())
    }
}

/// Free-function form of [`Circuit::inverse`].
pub fn invert_circuit(circuit: &Circuit) -> Circuit {
    circuit.inverse()
}

/// Free-function form of [`Circuit::concatenate`].
pub fn concatenate(first: &Circuit, second: &Circuit) -> Result<Circuit, CircuitError> {
    first.concatenate(second)
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_circuit(s)
    }
}

/// A computational basis state `|b_{n-1} … b_1 b_0⟩`.
///
/// `bits[i]` is the value of qubit `i`. The textual form lists qubit `n-1`
/// first, so `"110"` on three qubits sets qubits 2 and 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    bits: Vec<bool>,
}

impl BasisState {
    pub fn zeros(n: usize) -> Self {
        BasisState {
            bits: vec![false; n],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BasisState { bits }
    }

    /// Builds the `n`-bit state whose index is `index` (qubit 0 = LSB).
    pub fn from_index(n: usize, index: u64) -> Self {
        BasisState {
            bits: (0..n).map(|q| q < 64 && (index >> q) & 1 == 1).collect(),
        }
    }

    pub fn parse_with_len(s: &str, n: usize) -> Result<Self, CircuitError> {
        let b: BasisState = s.parse()?;
        if b.len() != n {
            return Err(CircuitError::BasisLength {
                expected: n,
                got: b.len(),
            });
        }
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, qubit: usize) -> bool {
        self.bits[qubit]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// State-vector index; only meaningful for `n <= 64`.
    pub fn index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0u64, |acc, (q, _)| acc | (1u64 << q))
    }
}

impl FromStr for BasisState {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(CircuitError::BadBasisState(s.to_string()));
        }
        Ok(BasisState {
            bits: s.chars().rev().map(|c| c == '1').collect(),
        })
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.bits.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

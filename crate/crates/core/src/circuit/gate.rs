use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CircuitError;
use crate::dense::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    P,
    Swap,
    Cx,
    Cz,
    Mcx,
}

impl GateKind {
    pub const ALL: [GateKind; 17] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::P,
        GateKind::Swap,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Mcx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::P => "p",
            GateKind::Swap => "swap",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Mcx => "mcx",
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::P => 1,
            _ => 0,
        }
    }

    /// True for gates whose matrix is diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(
            self,
            GateKind::I
                | GateKind::Z
                | GateKind::S
                | GateKind::Sdg
                | GateKind::T
                | GateKind::Tdg
                | GateKind::Rz
                | GateKind::P
                | GateKind::Cz
        )
    }

    fn check_arity(self, controls: usize, targets: usize) -> Result<(), CircuitError> {
        let (ok, expected) = match self {
            GateKind::Swap => (controls == 0 && targets == 2, "0 controls and 2 targets"),
            GateKind::Cx | GateKind::Cz => (controls == 1 && targets == 1, "1 control and 1 target"),
            GateKind::Mcx => (controls >= 1 && targets == 1, "at least 1 control and 1 target"),
            _ => (controls == 0 && targets == 1, "0 controls and 1 target"),
        };
        if ok {
            Ok(())
        } else {
            Err(CircuitError::Arity {
                kind: self,
                expected,
                controls,
                targets,
            })
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == lower)
            .ok_or_else(|| s.to_string())
    }
}

/// A gate application. Controls and targets are disjoint qubit indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    params: Vec<f64>,
    controls: Vec<usize>,
    targets: Vec<usize>,
}

impl Gate {
    pub fn new(
        kind: GateKind,
        params: Vec<f64>,
        controls: Vec<usize>,
        targets: Vec<usize>,
    ) -> Result<Self, CircuitError> {
        if params.len() != kind.num_params() {
            return Err(CircuitError::ParamCount {
                kind,
                expected: kind.num_params(),
                got: params.len(),
            });
        }
        if let Some(&p) = params.iter().find(|p| !p.is_finite()) {
            return Err(CircuitError::NonFiniteParam(p));
        }
        kind.check_arity(controls.len(), targets.len())?;
        let mut seen = controls.iter().chain(&targets).copied().collect::<Vec<_>>();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(CircuitError::DuplicateQubit(w[0]));
        }
        Ok(Gate {
            kind,
            params,
            controls,
            targets,
        })
    }

    /// Unparameterized single-qubit gate. Panics for other kinds.
    pub fn single(kind: GateKind, target: usize) -> Self {
        Gate::new(kind, vec![], vec![], vec![target]).expect("single-qubit gate kind")
    }

    pub fn h(target: usize) -> Self {
        Gate::single(GateKind::H, target)
    }

    pub fn x(target: usize) -> Self {
        Gate::single(GateKind::X, target)
    }

    pub fn rotation(kind: GateKind, angle: f64, target: usize) -> Result<Self, CircuitError> {
        Gate::new(kind, vec![angle], vec![], vec![target])
    }

    pub fn cx(control: usize, target: usize) -> Result<Self, CircuitError> {
        Gate::new(GateKind::Cx, vec![], vec![control], vec![target])
    }

    pub fn cz(control: usize, target: usize) -> Result<Self, CircuitError> {
        Gate::new(GateKind::Cz, vec![], vec![control], vec![target])
    }

    pub fn swap(a: usize, b: usize) -> Result<Self, CircuitError> {
        Gate::new(GateKind::Swap, vec![], vec![], vec![a, b])
    }

    pub fn mcx(controls: Vec<usize>, target: usize) -> Result<Self, CircuitError> {
        Gate::new(GateKind::Mcx, vec![], controls, vec![target])
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Controls followed by targets: the qubit order of [`Gate::matrix`].
    pub fn qubits(&self) -> impl Iterator<Item = &usize> {
        self.controls.iter().chain(&self.targets)
    }

    pub fn arity(&self) -> usize {
        self.controls.len() + self.targets.len()
    }

    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            k => k,
        };
        Gate {
            kind,
            params: self.params.iter().map(|p| -p).collect(),
            controls: self.controls.clone(),
            targets: self.targets.clone(),
        }
    }

    /// The 2×2 matrix applied to the single target when all controls are
    /// set. `None` for multi-target gates (SWAP).
    pub fn target_unitary(&self) -> Option<[Complex64; 4]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let half = || self.params[0] / 2.0;
        Some(match self.kind {
            GateKind::I => [one, z, z, one],
            GateKind::X | GateKind::Cx | GateKind::Mcx => [z, one, one, z],
            GateKind::Y => [z, c(0.0, -1.0), c(0.0, 1.0), z],
            GateKind::Z | GateKind::Cz => [one, z, z, c(-1.0, 0.0)],
            GateKind::H => {
                let s = FRAC_1_SQRT_2;
                [c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]
            }
            GateKind::S => [one, z, z, c(0.0, 1.0)],
            GateKind::Sdg => [one, z, z, c(0.0, -1.0)],
            GateKind::T => [one, z, z, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)],
            GateKind::Tdg => [one, z, z, c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)],
            GateKind::Rx => {
                let (s, co) = half().sin_cos();
                [c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]
            }
            GateKind::Ry => {
                let (s, co) = half().sin_cos();
                [c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]
            }
            GateKind::Rz => {
                let h = half();
                [Complex64::from_polar(1.0, -h), z, z, Complex64::from_polar(1.0, h)]
            }
            GateKind::P => [one, z, z, Complex64::from_polar(1.0, self.params[0])],
            GateKind::Swap => return None,
        })
    }

    /// Dense `2^k × 2^k` unitary. Row/column bits follow [`Gate::qubits`],
    /// first qubit most significant.
    pub fn matrix(&self) -> Matrix {
        let k = self.arity();
        let dim = 1usize << k;
        match self.target_unitary() {
            Some(u) => {
                // Block-diagonal: identity everywhere except the all-controls-set block.
                let mut m = Matrix::identity(dim);
                let base = dim - 2;
                m[(base, base)] = u[0];
                m[(base, base + 1)] = u[1];
                m[(base + 1, base)] = u[2];
                m[(base + 1, base + 1)] = u[3];
                m
            }
            None => Matrix::from_real_rows(&[
                &[1.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 1.0],
            ]),
        }
    }
}

/// Free-function form of [`Gate::matrix`].
pub fn gate_matrix(gate: &Gate) -> Matrix {
    gate.matrix()
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for p in &self.params {
            write!(f, " {p}")?;
        }
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

//! Brute-force reference simulator used as a test oracle. It works from the
//! textbook action of each gate on basis indices and never touches the
//! library's matrices.

#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;

use dualsim_core::{Circuit, Complex64, Gate, GateKind};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `[[a, b], [c, d]]` for the single-qubit kinds.
fn single_qubit(kind: GateKind, params: &[f64]) -> [Complex64; 4] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let s = FRAC_1_SQRT_2;
    let phase = |t: f64| Complex64::from_polar(1.0, t);
    match kind {
        GateKind::I => [l, o, o, l],
        GateKind::X => [o, l, l, o],
        GateKind::Y => [o, c(0.0, -1.0), c(0.0, 1.0), o],
        GateKind::Z => [l, o, o, -l],
        GateKind::H => [c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
        GateKind::S => [l, o, o, c(0.0, 1.0)],
        GateKind::Sdg => [l, o, o, c(0.0, -1.0)],
        GateKind::T => [l, o, o, phase(std::f64::consts::FRAC_PI_4)],
        GateKind::Tdg => [l, o, o, phase(-std::f64::consts::FRAC_PI_4)],
        GateKind::Rx => {
            let (sn, cs) = (params[0] / 2.0).sin_cos();
            [c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)]
        }
        GateKind::Ry => {
            let (sn, cs) = (params[0] / 2.0).sin_cos();
            [c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)]
        }
        GateKind::Rz => [phase(-params[0] / 2.0), o, o, phase(params[0] / 2.0)],
        GateKind::P => [l, o, o, phase(params[0])],
        other => panic!("{other} is not a single-qubit kind"),
    }
}

fn bit(i: usize, q: usize) -> bool {
    (i >> q) & 1 == 1
}

pub fn apply(state: &mut [Complex64], g: &Gate) {
    let dim = state.len();
    match g.kind() {
        GateKind::Cx | GateKind::Mcx => {
            let t = g.targets()[0];
            for i in 0..dim {
                if !bit(i, t) && g.controls().iter().all(|&q| bit(i, q)) {
                    state.swap(i, i | (1 << t));
                }
            }
        }
        GateKind::Cz => {
            let (a, b) = (g.controls()[0], g.targets()[0]);
            for (i, x) in state.iter_mut().enumerate() {
                if bit(i, a) && bit(i, b) {
                    *x = -*x;
                }
            }
        }
        GateKind::Swap => {
            let (a, b) = (g.targets()[0], g.targets()[1]);
            for i in 0..dim {
                if bit(i, a) && !bit(i, b) {
                    state.swap(i, (i & !(1 << a)) | (1 << b));
                }
            }
        }
        kind => {
            let m = single_qubit(kind, g.params());
            let t = g.targets()[0];
            for i in 0..dim {
                if !bit(i, t) {
                    let j = i | (1 << t);
                    let (a0, a1) = (state[i], state[j]);
                    state[i] = m[0] * a0 + m[1] * a1;
                    state[j] = m[2] * a0 + m[3] * a1;
                }
            }
        }
    }
}

/// Final state of `circuit` on basis input `input` (qubit 0 = bit 0).
pub fn simulate(circuit: &Circuit, input: usize) -> Vec<Complex64> {
    let mut state = vec![c(0.0, 0.0); 1 << circuit.num_qubits()];
    state[input] = c(1.0, 0.0);
    for g in circuit.gates() {
        apply(&mut state, g);
    }
    state
}

/// Column-major unitary: `unitary(c)[col][row]`.
pub fn unitary_columns(circuit: &Circuit) -> Vec<Vec<Complex64>> {
    (0..1 << circuit.num_qubits()).map(|i| simulate(circuit, i)).collect()
}

pub fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `|⟨in| G2⁻¹ G |in⟩|²` for the all-zero input.
pub fn miter_fidelity(g: &Circuit, g2: &Circuit) -> f64 {
    let a = simulate(g, 0);
    let b = simulate(g2, 0);
    let overlap: Complex64 = a.iter().zip(&b).map(|(x, y)| y.conj() * x).sum();
    overlap.norm_sqr()
}

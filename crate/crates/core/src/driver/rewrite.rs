//! Randomized circuit rewrites for equivalence-checking workloads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind};

fn disjoint(a: &Gate, b: &Gate) -> bool {
    !a.qubits().any(|q| b.qubits().any(|r| r == q))
}

fn plain_target(g: &Gate) -> Option<usize> {
    (g.arity() == 1).then(|| g.targets()[0])
}

fn single(kind: GateKind, q: usize) -> Gate {
    Gate::single(kind, q)
}

fn rotation(kind: GateKind, angle: f64, q: usize) -> Gate {
    Gate::rotation(kind, angle, q).expect("finite rotation angle")
}

/// Swaps gates `i` and `i + 1` when they commute structurally: disjoint
/// supports, or both diagonal.
fn commute(gates: &mut [Gate], i: usize) -> bool {
    if i + 1 >= gates.len() {
        return false;
    }
    let (a, b) = (&gates[i], &gates[i + 1]);
    if disjoint(a, b) || (a.kind().is_diagonal() && b.kind().is_diagonal()) {
        gates.swap(i, i + 1);
        true
    } else {
        false
    }
}

fn flip_cz(gates: &mut [Gate], i: usize) -> bool {
    let g = &gates[i];
    if g.kind() != GateKind::Cz {
        return false;
    }
    gates[i] = Gate::cz(g.targets()[0], g.controls()[0]).expect("distinct qubits");
    true
}

fn fuse(gates: &mut Vec<Gate>, i: usize) -> bool {
    if i + 1 >= gates.len() {
        return false;
    }
    let (a, b) = (&gates[i], &gates[i + 1]);
    let q = match (plain_target(a), plain_target(b)) {
        (Some(p), Some(q)) if p == q => q,
        _ => return false,
    };
    use GateKind::*;
    let fused = match (a.kind(), b.kind()) {
        (T, T) => single(S, q),
        (Tdg, Tdg) => single(Sdg, q),
        (S, S) | (Sdg, Sdg) => single(Z, q),
        (k @ (Rx | Ry | Rz | P), l) if k == l => rotation(k, a.params()[0] + b.params()[0], q),
        _ => return false,
    };
    gates.splice(i..i + 2, [fused]);
    true
}

fn expand(gates: &mut Vec<Gate>, i: usize) -> bool {
    use GateKind::*;
    let g = &gates[i];
    let replacement = match g.kind() {
        Z => vec![single(S, g.targets()[0]); 2],
        S => vec![single(T, g.targets()[0]); 2],
        Sdg => vec![single(Tdg, g.targets()[0]); 2],
        Rx | Ry | Rz | P => vec![rotation(g.kind(), g.params()[0] / 2.0, g.targets()[0]); 2],
        X => {
            let q = g.targets()[0];
            vec![Gate::h(q), single(Z, q), Gate::h(q)]
        }
        Cz => {
            let (c, t) = (g.controls()[0], g.targets()[0]);
            vec![Gate::h(t), Gate::cx(c, t).expect("distinct"), Gate::h(t)]
        }
        Swap => {
            let (a, b) = (g.targets()[0], g.targets()[1]);
            let ab = Gate::cx(a, b).expect("distinct");
            let ba = Gate::cx(b, a).expect("distinct");
            vec![ab.clone(), ba, ab]
        }
        _ => return false,
    };
    gates.splice(i..i + 1, replacement);
    true
}

fn insert_pair(gates: &mut Vec<Gate>, i: usize, rng: &mut ChaCha8Rng, n: usize) -> bool {
    let q = rng.gen_range(0..n);
    let g = if rng.gen_bool(0.5) { Gate::x(q) } else { Gate::h(q) };
    gates.splice(i..i, [g.clone(), g]);
    true
}

/// Applies `rewrites` random unitary-preserving rewrites: commutation of
/// disjoint or diagonal neighbours, CZ symmetry, fusion (`T·T = S`,
/// `S·S = Z`, rotation angle sums), expansion (`Z = S·S`, `S = T·T`,
/// `X = H·Z·H`, `CZ = H·CX·H`, `SWAP = CX·CX·CX`, split rotations) and
/// insertion of self-cancelling `X·X` or `H·H` pairs.
pub fn equivalent_variant(c: &Circuit, rewrites: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = c.gates().to_vec();
    let n = c.num_qubits();
    let mut applied = 0;
    let mut attempts = 0;
    while applied < rewrites && attempts < 100 * rewrites.max(1) {
        attempts += 1;
        if gates.is_empty() {
            insert_pair(&mut gates, 0, &mut rng, n);
            applied += 1;
            continue;
        }
        let i = rng.gen_range(0..gates.len());
        let ok = match rng.gen_range(0..5) {
            0 => commute(&mut gates, i),
            1 => flip_cz(&mut gates, i),
            2 => fuse(&mut gates, i),
            3 => expand(&mut gates, i),
            _ => insert_pair(&mut gates, i, &mut rng, n),
        };
        applied += ok as usize;
    }
    Circuit::from_gates(n, gates).expect("rewrites keep qubits in range")
}

/// Rewrites that keep the gate count and position of every gate up to
/// swaps of commuting neighbours: commutation and CZ symmetry only.
pub fn commuting_variant(c: &Circuit, rewrites: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = c.gates().to_vec();
    if gates.is_empty() {
        return c.clone();
    }
    let mut applied = 0;
    let mut attempts = 0;
    while applied < rewrites && attempts < 100 * rewrites.max(1) {
        attempts += 1;
        let i = rng.gen_range(0..gates.len());
        let ok = if rng.gen_bool(0.5) {
            commute(&mut gates, i)
        } else {
            flip_cz(&mut gates, i)
        };
        applied += ok as usize;
    }
    Circuit::from_gates(c.num_qubits(), gates).expect("rewrites keep qubits in range")
}

/// Changes the circuit by exactly one gate: a Hadamard on a random qubit at
/// a random position.
///
/// H is chosen because its eigenvectors are not stabilizer states: on any
/// state reachable with Clifford gates, `|⟨ψ|H_q|ψ⟩|² ≤ 1/2`, so a fixed
/// basis-state input sees the change unless the qubit happens to sit, pure
/// and unentangled, within a few degrees of the H axis. Inserting X or Y,
/// or deleting a controlled gate, goes unseen far more often (on `|+⟩` or
/// `|±i⟩` qubits, or whenever a control is still `|0⟩`).
pub fn mutate_single_gate(c: &Circuit, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = c.gates().to_vec();
    let q = rng.gen_range(0..c.num_qubits());
    let at = rng.gen_range(0..=gates.len());
    gates.insert(at, Gate::h(q));
    Circuit::from_gates(c.num_qubits(), gates).expect("mutation keeps qubits in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::Matrix;
    use crate::driver::random_circuit;

    fn unitary(c: &Circuit) -> Matrix {
        let n = c.num_qubits();
        let mut u = Matrix::identity(1 << n);
        for g in c.gates() {
            u = &embed(g, n) * &u;
        }
        u
    }

    /// Full-register matrix of `g` by explicit basis permutation.
    fn embed(g: &Gate, n: usize) -> Matrix {
        let qs: Vec<usize> = g.qubits().copied().collect();
        let k = qs.len();
        let m = g.matrix();
        let dim = 1 << n;
        let mut out = Matrix::zeros(dim);
        for col in 0..dim {
            let local_col = qs
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | (((col >> q) & 1) << (k - 1 - j)));
            for local_row in 0..(1 << k) {
                let mut row = col;
                for (j, &q) in qs.iter().enumerate() {
                    let bit = (local_row >> (k - 1 - j)) & 1;
                    row = (row & !(1 << q)) | (bit << q);
                }
                out[(row, col)] = m[(local_row, local_col)];
            }
        }
        out
    }

    #[test]
    fn variants_preserve_the_unitary() {
        for seed in 0..20 {
            let c = random_circuit(3, 12, seed, None).unwrap();
            let u = unitary(&c);
            let v = equivalent_variant(&c, 8, seed + 100);
            assert!(unitary(&v).approx_eq(&u, 1e-12), "seed {seed}");
            let w = commuting_variant(&c, 8, seed + 200);
            assert_eq!(w.len(), c.len());
            assert!(unitary(&w).approx_eq(&u, 1e-12), "seed {seed}");
        }
    }

    #[test]
    fn mutation_changes_the_unitary() {
        for seed in 0..20 {
            let c = random_circuit(3, 12, seed, None).unwrap();
            let m = mutate_single_gate(&c, seed);
            assert_eq!((m.len() as i64 - c.len() as i64).abs(), 1);
            assert!(!unitary(&m).approx_eq(&unitary(&c), 1e-6), "seed {seed}");
        }
    }
}

//! Fixed workloads shared by the criterion benches.

use dualsim_core::driver::{commuting_variant, generate_benchmark, random_layered, Family};
use dualsim_core::Circuit;

pub const SEED: u64 = 7;

pub fn family(family: Family, n: usize) -> Circuit {
    generate_benchmark(family, n, SEED).expect("benchmark sizes are valid")
}

/// A layered random circuit and a commuted copy of it, for miter checks.
pub fn equivalence_pair(n: usize, depth: usize) -> (Circuit, Circuit) {
    let g = random_layered(n, depth, SEED).expect("valid size");
    let g2 = commuting_variant(&g, 4 * depth, SEED + 1);
    (g, g2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_has_equal_length() {
        let (g, g2) = equivalence_pair(6, 10);
        assert_eq!(g.len(), g2.len());
        assert_eq!(g.num_qubits(), 6);
    }
}

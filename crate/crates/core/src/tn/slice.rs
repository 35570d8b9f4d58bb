use rayon::prelude::*;

use super::{ContractionPlan, Tensor, TensorNetwork, TnError};

/// One sub-network of a sliced network together with the fixed values of
/// the sliced labels.
#[derive(Debug, Clone)]
pub struct Slice {
    pub assignment: Vec<usize>,
    pub network: TensorNetwork,
}

/// Fixes every assignment of the closed indices `labels`. Assignments are
/// enumerated with the first label most significant. Sub-networks keep the
/// original tensor ids, so any plan for `net` applies to each of them.
pub fn slice(net: &TensorNetwork, labels: &[&str]) -> Result<Vec<Slice>, TnError> {
    let mut dims = Vec::with_capacity(labels.len());
    for (i, &l) in labels.iter().enumerate() {
        if labels[..i].contains(&l) {
            return Err(TnError::DuplicateIndex(l.to_string()));
        }
        if net.open_indices().iter().any(|o| o.label == l) {
            return Err(TnError::OpenLabel(l.to_string()));
        }
        let dim = net
            .tensors()
            .iter()
            .flat_map(|t| t.indices())
            .find(|idx| idx.label == l)
            .map(|idx| idx.dim)
            .ok_or_else(|| TnError::UnknownLabel(l.to_string()))?;
        dims.push(dim);
    }
    let count: usize = dims.iter().product();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut assignment = vec![0; dims.len()];
        let mut rest = k;
        for (a, &d) in assignment.iter_mut().zip(&dims).rev() {
            *a = rest % d;
            rest /= d;
        }
        let tensors = net
            .tensors()
            .iter()
            .map(|t| {
                let mut t = t.clone();
                for (&l, &v) in labels.iter().zip(&assignment) {
                    if t.position(l).is_some() {
                        t = t.fix(l, v)?;
                    }
                }
                Ok(t)
            })
            .collect::<Result<Vec<_>, TnError>>()?;
        out.push(Slice {
            assignment,
            network: net.replace_tensors(tensors),
        });
    }
    Ok(out)
}

/// Up to `k` closed labels to slice on, in order of first appearance.
pub fn pick_slice_labels(net: &TensorNetwork, k: usize) -> Vec<String> {
    net.closed_labels().into_iter().take(k).collect()
}

/// Contracts every slice with `plan` on a pool of `workers` threads and sums
/// the results in assignment order, so the value does not depend on the
/// worker count.
pub fn contract_sliced(
    net: &TensorNetwork,
    labels: &[&str],
    plan: &ContractionPlan,
    workers: usize,
) -> Result<Tensor, TnError> {
    plan.validate(net.len())?;
    let slices = slice(net, labels)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| TnError::Pool(e.to_string()))?;
    let parts: Vec<Tensor> = pool.install(|| {
        slices
            .par_iter()
            .map(|s| s.network.contract(plan))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut parts = parts.into_iter();
    let first = parts.next().expect("at least one slice");
    let indices = first.indices().to_vec();
    let mut data = first.into_data();
    for p in parts {
        for (acc, x) in data.iter_mut().zip(p.data()) {
            *acc += x;
        }
    }
    Tensor::new(indices, data)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::circuit::{parse_circuit, BasisState};
    use crate::tn::circuit_to_network;

    fn ghz_scalar() -> TensorNetwork {
        let z = BasisState::zeros(3);
        let c = parse_circuit("qubits 3; h 2; cx 2 1; cx 1 0").unwrap();
        circuit_to_network(&c, &z, Some(&z)).unwrap()
    }

    #[test]
    fn one_internal_wire() {
        let net = ghz_scalar();
        let slices = slice(&net, &["q1.1"]).unwrap();
        assert_eq!(slices.len(), 2);
        let plan = ContractionPlan::sequential(net.len());
        let sum: num_complex::Complex64 = slices
            .iter()
            .map(|s| s.network.contract(&plan).unwrap().scalar_value().unwrap())
            .sum();
        assert!((sum.re - FRAC_1_SQRT_2).abs() < 1e-15);
        let direct = contract_sliced(&net, &["q1.1", "q2.1"], &plan, 2).unwrap();
        assert!((direct.scalar_value().unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn empty_label_set_is_identity() {
        let net = ghz_scalar();
        let slices = slice(&net, &[]).unwrap();
        assert_eq!(slices.len(), 1);
        assert_eq!(slices[0].network, net);
    }

    #[test]
    fn open_and_unknown_labels_are_rejected() {
        let c = parse_circuit("qubits 2; h 1; cx 1 0").unwrap();
        let net = circuit_to_network(&c, &BasisState::zeros(2), None).unwrap();
        assert!(matches!(slice(&net, &["q0.1"]), Err(TnError::OpenLabel(_))));
        assert!(matches!(slice(&net, &["zz"]), Err(TnError::UnknownLabel(_))));
        assert_eq!(pick_slice_labels(&net, 5), vec!["q0.0", "q1.0", "q1.1"]);
    }
}

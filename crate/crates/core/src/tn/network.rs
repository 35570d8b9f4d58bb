use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::{contract_pair_counted, ContractionPlan, Index, Tensor, TnError};
use crate::circuit::{BasisState, Circuit};

/// Where a tensor of a circuit-derived network came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorOrigin {
    Input { qubit: usize },
    Gate { position: usize },
    Output { qubit: usize },
    Other,
}

/// Tensors connected by shared index labels. Tensor ids are positions in
/// [`TensorNetwork::tensors`].
#[derive(Debug, Clone, PartialEq)]
pub struct TensorNetwork {
    tensors: Vec<Tensor>,
    origins: Vec<TensorOrigin>,
    open: Vec<Index>,
}

impl TensorNetwork {
    /// Builds a network; the open indices are the labels used exactly once,
    /// in order of first appearance.
    pub fn new(tensors: Vec<Tensor>) -> Result<Self, TnError> {
        let open = open_indices(&tensors)?;
        let origins = vec![TensorOrigin::Other; tensors.len()];
        Ok(TensorNetwork {
            tensors,
            origins,
            open,
        })
    }

    /// Like [`TensorNetwork::new`] with an explicit open-index order, which
    /// must be a permutation of the labels used exactly once.
    pub fn with_open_order(tensors: Vec<Tensor>, order: &[&str]) -> Result<Self, TnError> {
        let mut net = TensorNetwork::new(tensors)?;
        net.set_open_order(order)?;
        Ok(net)
    }

    fn set_open_order(&mut self, order: &[&str]) -> Result<(), TnError> {
        if order.len() != self.open.len() {
            return Err(TnError::LabelOrder);
        }
        let mut reordered = Vec::with_capacity(order.len());
        for l in order {
            let idx = self
                .open
                .iter()
                .find(|i| i.label == *l)
                .ok_or(TnError::LabelOrder)?;
            reordered.push(idx.clone());
        }
        self.open = reordered;
        Ok(())
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensor(&self, id: usize) -> &Tensor {
        &self.tensors[id]
    }

    pub fn origin(&self, id: usize) -> TensorOrigin {
        self.origins[id]
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn open_indices(&self) -> &[Index] {
        &self.open
    }

    /// Labels shared by two tensors, in order of first appearance.
    pub fn closed_labels(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for t in &self.tensors {
            for idx in t.indices() {
                if !self.open.iter().any(|o| o.label == idx.label) && !seen.contains(&idx.label) {
                    seen.push(idx.label.clone());
                }
            }
        }
        seen
    }

    /// Same origins and open indices over a new set of tensors.
    pub(crate) fn replace_tensors(&self, tensors: Vec<Tensor>) -> TensorNetwork {
        TensorNetwork {
            tensors,
            origins: self.origins.clone(),
            open: self.open.clone(),
        }
    }

    /// Contracts the network following `plan` and returns a tensor over the
    /// open indices in [`TensorNetwork::open_indices`] order.
    pub fn contract(&self, plan: &ContractionPlan) -> Result<Tensor, TnError> {
        self.contract_counted(plan).map(|(t, _)| t)
    }

    /// [`TensorNetwork::contract`] plus the number of multiply-adds executed.
    pub fn contract_counted(&self, plan: &ContractionPlan) -> Result<(Tensor, u128), TnError> {
        plan.validate(self.len())?;
        let (t, ops) = self.eval(plan)?;
        Ok((self.finish(t)?, ops))
    }

    /// Contracts independent subtrees of `plan` on the rayon pool.
    pub fn contract_par(&self, plan: &ContractionPlan) -> Result<Tensor, TnError> {
        plan.validate(self.len())?;
        let t = self.eval_par(plan)?;
        self.finish(t)
    }

    fn finish(&self, t: Tensor) -> Result<Tensor, TnError> {
        let order: Vec<&str> = self.open.iter().map(|i| i.label.as_str()).collect();
        t.permute_labels(&order)
    }

    fn eval(&self, plan: &ContractionPlan) -> Result<(Tensor, u128), TnError> {
        match plan {
            ContractionPlan::Leaf(id) => Ok((self.tensors[*id].clone(), 0)),
            ContractionPlan::Pair(l, r) => {
                let (a, oa) = self.eval(l)?;
                let (b, ob) = self.eval(r)?;
                let (t, o) = contract_pair_counted(&a, &b)?;
                Ok((t, oa + ob + o))
            }
        }
    }

    fn eval_par(&self, plan: &ContractionPlan) -> Result<Tensor, TnError> {
        match plan {
            ContractionPlan::Leaf(id) => Ok(self.tensors[*id].clone()),
            ContractionPlan::Pair(l, r) => {
                let (a, b) = rayon::join(|| self.eval_par(l), || self.eval_par(r));
                contract_pair_counted(&a?, &b?).map(|(t, _)| t)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct JsonTensor<'a> {
            id: usize,
            origin: TensorOrigin,
            indices: Vec<&'a str>,
            dims: Vec<usize>,
            data: Vec<[f64; 2]>,
        }
        let tensors: Vec<JsonTensor> = self
            .tensors
            .iter()
            .enumerate()
            .map(|(id, t)| JsonTensor {
                id,
                origin: self.origins[id],
                indices: t.indices().iter().map(|i| i.label.as_str()).collect(),
                dims: t.indices().iter().map(|i| i.dim).collect(),
                data: t.data().iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect();
        serde_json::json!({
            "tensors": tensors,
            "open_indices": self.open.iter().map(|i| i.label.as_str()).collect::<Vec<_>>(),
        })
    }
}

fn open_indices(tensors: &[Tensor]) -> Result<Vec<Index>, TnError> {
    let mut uses: HashMap<&str, (usize, usize)> = HashMap::new();
    let mut order: Vec<&Index> = Vec::new();
    for t in tensors {
        for idx in t.indices() {
            let entry = uses.entry(&idx.label).or_insert_with(|| {
                order.push(idx);
                (0, idx.dim)
            });
            if entry.1 != idx.dim {
                return Err(TnError::DimMismatch {
                    label: idx.label.clone(),
                    left: entry.1,
                    right: idx.dim,
                });
            }
            entry.0 += 1;
            if entry.0 > 2 {
                return Err(TnError::IndexOveruse(idx.label.clone()));
            }
        }
    }
    Ok(order
        .into_iter()
        .filter(|i| uses[i.label.as_str()].0 == 1)
        .cloned()
        .collect())
}

fn basis_tensor(label: &str, bit: bool) -> Tensor {
    let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let data = if bit { vec![zero, one] } else { vec![one, zero] };
    Tensor::new(vec![Index::qubit(label)], data).expect("rank-1 basis tensor")
}

fn wire_label(qubit: usize, step: usize) -> String {
    format!("q{qubit}.{step}")
}

/// Translates a circuit into a network.
///
/// Tensor ids: input tensors for qubits `0..n`, then one tensor per gate in
/// circuit order, then (if `output` is given) one output tensor per qubit.
/// Wire labels are `q<qubit>.<step>`, where the step counts the gates that
/// touched the qubit so far. Gate tensors list their outgoing wires, then
/// their incoming wires, both in [`crate::circuit::Gate::qubits`] order, so
/// the tensor data is the gate matrix in row-major order. Without an output
/// projection the open indices are the final wires of qubits `n-1 … 0`,
/// which makes the contracted tensor's data the state vector.
pub fn circuit_to_network(
    circuit: &Circuit,
    input: &BasisState,
    output: Option<&BasisState>,
) -> Result<TensorNetwork, TnError> {
    let n = circuit.num_qubits();
    if input.len() != n {
        return Err(TnError::BasisLength {
            expected: n,
            got: input.len(),
        });
    }
    if let Some(out) = output {
        if out.len() != n {
            return Err(TnError::BasisLength {
                expected: n,
                got: out.len(),
            });
        }
    }
    let mut steps = vec![0usize; n];
    let mut tensors = Vec::with_capacity(2 * n + circuit.len());
    let mut origins = Vec::with_capacity(tensors.capacity());
    for q in 0..n {
        tensors.push(basis_tensor(&wire_label(q, 0), input.bit(q)));
        origins.push(TensorOrigin::Input { qubit: q });
    }
    for (position, gate) in circuit.gates().iter().enumerate() {
        let qubits: Vec<usize> = gate.qubits().copied().collect();
        let ins: Vec<Index> = qubits
            .iter()
            .map(|&q| Index::qubit(wire_label(q, steps[q])))
            .collect();
        let outs: Vec<Index> = qubits
            .iter()
            .map(|&q| {
                steps[q] += 1;
                Index::qubit(wire_label(q, steps[q]))
            })
            .collect();
        let m = gate.matrix();
        let indices = outs.into_iter().chain(ins).collect();
        tensors.push(Tensor::new(indices, m.as_slice().to_vec())?);
        origins.push(TensorOrigin::Gate { position });
    }
    let finals: Vec<String> = (0..n).map(|q| wire_label(q, steps[q])).collect();
    if let Some(out) = output {
        for (q, label) in finals.iter().enumerate() {
            tensors.push(basis_tensor(label, out.bit(q)));
            origins.push(TensorOrigin::Output { qubit: q });
        }
    }
    let mut net = TensorNetwork::new(tensors)?;
    net.origins = origins;
    if output.is_none() {
        let order: Vec<&str> = finals.iter().rev().map(String::as_str).collect();
        net.set_open_order(&order)?;
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::circuit::{parse_circuit, Gate};

    fn ghz() -> Circuit {
        parse_circuit("qubits 3; h 2; cx 2 1; cx 1 0").unwrap()
    }

    #[test]
    fn ghz_scalar_network_shape() {
        let z = BasisState::zeros(3);
        let net = circuit_to_network(&ghz(), &z, Some(&z)).unwrap();
        assert_eq!(net.len(), 9);
        assert!(net.open_indices().is_empty());
        let ranks: Vec<usize> = net.tensors().iter().map(Tensor::rank).collect();
        assert_eq!(ranks, vec![1, 1, 1, 2, 4, 4, 1, 1, 1]);
        assert_eq!(net.origin(4), TensorOrigin::Gate { position: 1 });
        let s = net
            .contract(&ContractionPlan::sequential(net.len()))
            .unwrap()
            .scalar_value()
            .unwrap();
        assert!((s - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ghz_state_tensor() {
        let net = circuit_to_network(&ghz(), &BasisState::zeros(3), None).unwrap();
        let labels: Vec<&str> = net.open_indices().iter().map(|i| i.label.as_str()).collect();
        assert_eq!(labels, vec!["q2.2", "q1.2", "q0.1"]);
        let t = net.contract(&ContractionPlan::sequential(net.len())).unwrap();
        assert_eq!(t.rank(), 3);
        for (i, a) in t.data().iter().enumerate() {
            let expected = if i == 0 || i == 7 { FRAC_1_SQRT_2 } else { 0.0 };
            assert!((a - Complex64::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn empty_circuit_is_disconnected_inputs() {
        let c = Circuit::new(3).unwrap();
        let b: BasisState = "101".parse().unwrap();
        let net = circuit_to_network(&c, &b, None).unwrap();
        assert_eq!(net.len(), 3);
        assert_eq!(net.open_indices().len(), 3);
        let t = net.contract(&ContractionPlan::sequential(3)).unwrap();
        assert_eq!(t.data()[5], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn single_h_projected_on_one() {
        let c = Circuit::from_gates(1, vec![Gate::h(0)]).unwrap();
        let net = circuit_to_network(&c, &"0".parse().unwrap(), Some(&"1".parse().unwrap())).unwrap();
        let s = net.contract(&ContractionPlan::sequential(3)).unwrap();
        assert!((s.scalar_value().unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn parallel_contraction_matches() {
        let net = circuit_to_network(&ghz(), &BasisState::zeros(3), None).unwrap();
        let plan = ContractionPlan::sequential(net.len());
        let a = net.contract(&plan).unwrap();
        let b = net.contract_par(&plan).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn index_used_three_times_is_rejected() {
        let t = || Tensor::new(vec![Index::qubit("a")], vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        assert!(matches!(
            TensorNetwork::new(vec![t(), t(), t()]),
            Err(TnError::IndexOveruse(_))
        ));
    }

    #[test]
    fn json_export_fields() {
        let z = BasisState::zeros(3);
        let net = circuit_to_network(&ghz(), &z, Some(&z)).unwrap();
        let v = net.to_json();
        assert_eq!(v["tensors"].as_array().unwrap().len(), 9);
        assert_eq!(v["tensors"][3]["dims"], serde_json::json!([2, 2]));
        assert_eq!(v["tensors"][3]["data"][0][0].as_f64().unwrap(), FRAC_1_SQRT_2);
        assert_eq!(v["open_indices"], serde_json::json!([]));
    }
}

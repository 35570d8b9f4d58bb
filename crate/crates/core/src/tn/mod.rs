//! Tensor-network backend: circuit translation, pairwise contraction,
//! plan search and slicing.

mod network;
mod plan;
mod slice;
mod tensor;

pub use network::{circuit_to_network, TensorNetwork, TensorOrigin};
pub use plan::{
    plan_cost, plan_exhaustive, plan_greedy, ContractionPlan, PlanCost, DEFAULT_EXHAUSTIVE_LIMIT,
};
pub use slice::{contract_sliced, pick_slice_labels, slice, Slice};
pub use tensor::{contract_pair, contract_pair_counted, Index, Tensor};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TnError {
    #[error("index {label} has dimension {left} on one side and {right} on the other")]
    DimMismatch {
        label: String,
        left: usize,
        right: usize,
    },
    #[error("tensor data has {got} entries, expected {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("index {0} appears twice in one tensor")]
    DuplicateIndex(String),
    #[error("index {0} has dimension 0")]
    ZeroDim(String),
    #[error("index {0} is shared by more than two tensors")]
    IndexOveruse(String),
    #[error("label order does not match the tensor's indices")]
    LabelOrder,
    #[error("malformed contraction plan: {0}")]
    MalformedPlan(String),
    #[error("network has {count} tensors; exhaustive search is limited to {limit}")]
    TooManyTensors { count: usize, limit: usize },
    #[error("network has no tensors")]
    EmptyNetwork,
    #[error("unknown index label {0}")]
    UnknownLabel(String),
    #[error("cannot slice open index {0}")]
    OpenLabel(String),
    #[error("basis state has {got} bits, expected {expected}")]
    BasisLength { expected: usize, got: usize },
    #[error("thread pool: {0}")]
    Pool(String),
}

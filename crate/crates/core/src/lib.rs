//! Circuit simulation and equivalence checking with two interchangeable
//! backends: edge-weighted decision diagrams and tensor-network
//! contraction.
//!
//! * [`circuit`] holds the shared gate-level representation and text format.
//! * [`dd`] is the decision-diagram package.
//! * [`tn`] builds and contracts tensor networks.
//! * [`path`] turns contraction plans into decision-diagram execution
//!   orders and runs them, including equivalence checks.
//! * [`driver`] wires everything into runs, benchmarks and reports.

pub mod circuit;
pub mod dd;
pub mod dense;
pub mod driver;
pub mod path;
pub mod tn;

pub use num_complex::Complex64;

pub use circuit::{BasisState, Circuit, CircuitError, Gate, GateKind};
pub use dd::{DdConfig, DdError, DdPackage, MatrixDd, VectorDd};

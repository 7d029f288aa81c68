//! Dense state-vector simulation of small multi-qubit blocks.

pub mod basis;
pub mod gate;
pub mod measure;
pub mod state;

pub use basis::{BasisName, MeasurementBasis};
pub use gate::Gate;
pub use measure::{measure_enumerate, measure_sampled, OutcomeDistribution, OutcomeEntry};
pub use state::{StateVector, MAX_BLOCK_QUBITS, TOL};

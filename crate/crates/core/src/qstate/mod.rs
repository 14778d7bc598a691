//! Dense state-vector kernel: states, small unitaries, projective
//! measurement, density matrices and partial traces.
//!
//! Everything here is a pure function of its inputs; randomness only enters
//! through the caller-supplied generator handed to [`measure`].

mod basis;
mod density;
mod measure;
mod state;

pub use basis::{BasisName, MeasurementBasis};
pub use density::{
    fidelity_pure, partial_trace, purity, to_density, trace_distance_1q, DensityMatrix,
};
pub use measure::{measure, outcome_distribution, project_outcome, OutcomeRecord};
pub use state::{
    equal_up_to_global_phase, StateVector, UnitaryMatrix, ASSERT_TOL, MAX_QUBITS, NORM_TOL,
};

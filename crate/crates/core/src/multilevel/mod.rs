//! Three-level and hub-coupled systems.

pub mod lambda;
pub mod modulated;

pub use lambda::{
    lambda_n_period_state, lambda_period_unitary, lambda_propagator, lambda_propagator_any,
    superposition_time, LambdaPeriodDecomposition, LambdaSystem, PropagatorPath,
};
pub use modulated::{
    as_photon_storage, n_level_superposition, three_level_modulated_evolution, SuperpositionRun,
    ThreeLevelSchedule, ThreeLevelSegment, TwoSegmentDrive,
};

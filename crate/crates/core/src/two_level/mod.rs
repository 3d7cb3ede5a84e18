//! Periodically driven two-level systems.

pub mod gaussian;
pub mod schedule;
pub mod smooth;
pub mod square_well;

pub use gaussian::{gaussian_decomposition, pulses_for_inversion, GaussianPulse, GaussianTrain};
pub use schedule::{Piece, PiecewiseSchedule};
pub use smooth::{noisy_square_well, NoiseTrack, SmoothSquareWell};
pub use square_well::{
    effective_coupling, inversion_time, minimal_time_first_order, one_period_unitary,
    plateau_residual, plateau_scan, stroboscopic_state, Modulation, PeriodDecomposition, Segment,
    SquareWellDrive,
};

use crate::error::Result;
use crate::integrate::population_trajectory;
use crate::linalg::CVector;
use crate::state::level_labels;
use crate::trajectory::Trajectory;

/// Exact trajectory of a piecewise-constant drive.
pub fn schedule_trajectory(
    schedule: &PiecewiseSchedule,
    psi0: &CVector,
    times: &[f64],
) -> Result<Trajectory> {
    let states = schedule.evolve(psi0, times)?;
    let pops: Vec<Vec<f64>> = states
        .iter()
        .map(|v| v.iter().map(|a| a.norm_sqr()).collect())
        .collect();
    let mut tr = population_trajectory(times, &pops, &level_labels(2));
    tr.meta.method = Some("closed_form".into());
    Ok(tr)
}

//! Lindblad dynamics of the driven two-level system with spontaneous emission
//! `|1> -> |0>` and pure dephasing of `|1>`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{
    evolve_density, population_trajectory, Generator, Hamiltonian, Span, TimeGrid, STEP_RULE,
};
use crate::linalg::{hermiticity_error, CMatrix, I};
use crate::state::{min_eigenvalue, QuantumState};
use crate::trajectory::Trajectory;
use crate::two_level::{inversion_time, SquareWellDrive};

/// Eigenvalue floor accepted for evolved density matrices.
pub const POSITIVITY_FLOOR: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LindbladChannels {
    /// Dissipation rate `gamma_01`.
    pub gamma01: f64,
    /// Dephasing rate `gamma_11`.
    pub gamma11: f64,
}

impl LindbladChannels {
    pub fn new(gamma01: f64, gamma11: f64) -> Result<Self> {
        for (name, g) in [("gamma01", gamma01), ("gamma11", gamma11)] {
            if !(g >= 0.0) || !g.is_finite() {
                return Err(Error::invalid(
                    name,
                    format!("rate must be finite and >= 0, got {g}"),
                ));
            }
        }
        Ok(Self { gamma01, gamma11 })
    }

    pub fn is_closed(&self) -> bool {
        self.gamma01 == 0.0 && self.gamma11 == 0.0
    }
}

/// `-i[H, rho] + L01(rho) + L11(rho)` with
/// `L01 = g01/2 (2 s01 rho s10 - s10 s01 rho - rho s10 s01)` and
/// `L11 = g11/2 (2 s11 rho s11 - s11 rho - rho s11)`, `s_ij = |i><j|`.
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, ch: &LindbladChannels) -> Result<CMatrix> {
    for m in [rho, h] {
        if m.shape() != (2, 2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: if m.nrows() != 2 { m.nrows() } else { m.ncols() },
            });
        }
    }
    Ok(rhs(rho, h, ch))
}

fn rhs(rho: &CMatrix, h: &CMatrix, ch: &LindbladChannels) -> CMatrix {
    let mut out = (h * rho - rho * h) * (-I);
    let (r01, r10, r11) = (rho[(0, 1)], rho[(1, 0)], rho[(1, 1)]);
    if ch.gamma01 != 0.0 {
        let g = ch.gamma01;
        out[(0, 0)] += r11 * g;
        out[(1, 1)] -= r11 * g;
        out[(0, 1)] -= r01 * (g / 2.0);
        out[(1, 0)] -= r10 * (g / 2.0);
    }
    if ch.gamma11 != 0.0 {
        let g = ch.gamma11;
        out[(0, 1)] -= r01 * (g / 2.0);
        out[(1, 0)] -= r10 * (g / 2.0);
    }
    out
}

/// Master-equation generator for a time-dependent Hamiltonian.
pub struct Lindblad<'a, H: ?Sized> {
    pub hamiltonian: &'a H,
    pub channels: LindbladChannels,
}

impl<H: Hamiltonian + ?Sized> Generator for Lindblad<'_, H> {
    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, t: f64, span: Span, rho: &CMatrix) -> CMatrix {
        let mut h = CMatrix::zeros(2, 2);
        self.hamiltonian.fill(t, span, &mut h);
        rhs(rho, &h, &self.channels)
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.hamiltonian.breakpoints(t0, t1)
    }
}

/// Integrates the master equation and checks trace, Hermiticity and
/// positivity at every sample.
pub fn evolve_open_with<H: Hamiltonian + ?Sized>(
    h: &H,
    ch: &LindbladChannels,
    rho0: &QuantumState,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    if rho0.dim() != 2 || h.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: if rho0.dim() != 2 { rho0.dim() } else { h.dim() },
        });
    }
    let gen = Lindblad {
        hamiltonian: h,
        channels: *ch,
    };
    let hist = evolve_density(&gen, &rho0.density_matrix(), grid)?;
    let mut min_eig = f64::INFINITY;
    let mut herm: f64 = 0.0;
    for rho in &hist.states {
        let e = min_eigenvalue(rho)?;
        if e < POSITIVITY_FLOOR {
            return Err(Error::PositivityViolation(e));
        }
        min_eig = min_eig.min(e);
        herm = herm.max(hermiticity_error(rho));
    }
    let pops: Vec<Vec<f64>> = hist
        .states
        .iter()
        .map(|r| r.diagonal().iter().map(|z| z.re).collect())
        .collect();
    let mut tr = population_trajectory(&hist.times, &pops, rho0.labels());
    tr.meta.step = Some(hist.step);
    tr.meta.method = Some("rk4_lindblad".into());
    tr.meta
        .diagnostics
        .insert("max_trace_drift".into(), hist.max_trace_drift);
    tr.meta.diagnostics.insert("min_eigenvalue".into(), min_eig);
    tr.meta
        .diagnostics
        .insert("max_hermiticity_error".into(), herm);
    Ok(tr)
}

/// Step from the rule `h * max(|d_j|, gamma) <= 1e-2`.
pub fn open_step(drive: &SquareWellDrive, ch: &LindbladChannels) -> f64 {
    let rate = drive
        .d1()
        .norm()
        .max(drive.d2().norm())
        .max(ch.gamma01)
        .max(ch.gamma11);
    TimeGrid::step_for(rate, STEP_RULE, 0.01)
}

/// Square-well drive under the master equation on `samples` points of `[0, t_max]`.
pub fn evolve_open(
    drive: &SquareWellDrive,
    ch: &LindbladChannels,
    rho0: &QuantumState,
    t_max: f64,
    samples: usize,
) -> Result<Trajectory> {
    let grid = TimeGrid::uniform(t_max, samples, open_step(drive, ch))?;
    evolve_open_with(&drive.schedule(), ch, rho0, &grid)
}

/// `P1` on a `(gamma01, gamma11)` grid: at the evaluation time and the
/// maximum over `[0, 2 t_eval]`. Rows follow `gamma01`, columns `gamma11`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceGrid {
    pub gamma01: Vec<f64>,
    pub gamma11: Vec<f64>,
    pub t_eval: f64,
    pub final_p1: Vec<Vec<f64>>,
    pub peak_p1: Vec<Vec<f64>>,
}

/// Samples per `t_eval` used by the sweep.
const SWEEP_SAMPLES: usize = 200;

/// Sweeps both rates; `t_eval` defaults to the closed-system inversion time.
pub fn decoherence_sweep(
    drive: &SquareWellDrive,
    gamma01: &[f64],
    gamma11: &[f64],
    rho0: &QuantumState,
    t_eval: Option<f64>,
) -> Result<DecoherenceGrid> {
    if let Some(g) = gamma01.iter().chain(gamma11).find(|g| !(**g >= 0.0)) {
        return Err(Error::invalid(
            "gamma",
            format!("rates must be >= 0, got {g}"),
        ));
    }
    let t_eval = match t_eval {
        Some(t) => t,
        None => inversion_time(drive, 0)?,
    };
    let cells: Vec<(usize, usize)> = (0..gamma01.len())
        .flat_map(|i| (0..gamma11.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let ch = LindbladChannels::new(gamma01[i], gamma11[j])?;
            let tr = evolve_open(drive, &ch, rho0, 2.0 * t_eval, 2 * SWEEP_SAMPLES + 1)?;
            let p1 = tr
                .get("P_1")
                .or_else(|| tr.series.get(1).map(|s| s.values.as_slice()))
                .unwrap();
            let peak = p1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok((p1[SWEEP_SAMPLES], peak))
        })
        .collect::<Result<_>>()?;
    let mut final_p1 = vec![vec![0.0; gamma11.len()]; gamma01.len()];
    let mut peak_p1 = final_p1.clone();
    for (&(i, j), &(f, p)) in cells.iter().zip(&results) {
        final_p1[i][j] = f;
        peak_p1[i][j] = p;
    }
    Ok(DecoherenceGrid {
        gamma01: gamma01.to_vec(),
        gamma11: gamma11.to_vec(),
        t_eval,
        final_p1,
        peak_p1,
    })
}

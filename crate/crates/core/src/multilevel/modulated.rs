//! Periodic two-segment modulation of multilevel Hamiltonians, propagated
//! exactly segment by segment.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::integrate::{population_trajectory, Hamiltonian, Span};
use crate::linalg::{c, from_real, CMatrix, CVector, HermitianEigen};
use crate::multilevel::lambda::LambdaSystem;
use crate::state::{level_labels, QuantumState};
use crate::trajectory::Trajectory;

/// Repeats `H_a` for `t1` then `H_b` for `t2`.
#[derive(Debug, Clone)]
pub struct TwoSegmentDrive {
    h_a: CMatrix,
    h_b: CMatrix,
    eig_a: HermitianEigen,
    eig_b: HermitianEigen,
    pub t1: f64,
    pub t2: f64,
}

impl TwoSegmentDrive {
    pub fn new(h_a: CMatrix, h_b: CMatrix, t1: f64, t2: f64) -> Result<Self> {
        if h_a.shape() != h_b.shape() {
            return Err(Error::DimensionMismatch {
                expected: h_a.nrows(),
                got: h_b.nrows(),
            });
        }
        for (name, t) in [("t1", t1), ("t2", t2)] {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::invalid(
                    name,
                    format!("segment duration must be positive, got {t}"),
                ));
            }
        }
        Ok(Self {
            eig_a: HermitianEigen::new(&h_a)?,
            eig_b: HermitianEigen::new(&h_b)?,
            h_a,
            h_b,
            t1,
            t2,
        })
    }

    pub fn dim(&self) -> usize {
        self.h_a.nrows()
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn period_unitary(&self) -> CMatrix {
        self.eig_b.propagator(self.t2) * self.eig_a.propagator(self.t1)
    }

    /// States at the given non-decreasing times.
    pub fn evolve(&self, psi0: &CVector, times: &[f64]) -> Result<Vec<CVector>> {
        let cols = CMatrix::from_columns(std::slice::from_ref(psi0));
        Ok(self
            .evolve_columns(&cols, times)?
            .into_iter()
            .map(|m| m.column(0).into_owned())
            .collect())
    }

    /// Evolves every column of `psi0`; exact, no time stepping.
    pub fn evolve_columns(&self, psi0: &CMatrix, times: &[f64]) -> Result<Vec<CMatrix>> {
        if psi0.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi0.nrows(),
            });
        }
        let period = self.period();
        let mut out = Vec::with_capacity(times.len());
        // state at the start of period `n`
        let mut n = 0u64;
        let mut start = psi0.clone();
        let mut after_a: Option<CMatrix> = None;
        for &t in times {
            if !(t >= 0.0) {
                return Err(Error::invalid("t", "times must be >= 0"));
            }
            let target = (t / period).floor() as u64;
            if target < n {
                return Err(Error::invalid("t", "times must be non-decreasing"));
            }
            while n < target {
                let mid = self.eig_a.apply(self.t1, &start);
                start = self.eig_b.apply(self.t2, &mid);
                after_a = None;
                n += 1;
            }
            let tp = t - n as f64 * period;
            let psi = if tp <= self.t1 {
                self.eig_a.apply(tp, &start)
            } else {
                let mid = after_a.get_or_insert_with(|| self.eig_a.apply(self.t1, &start));
                self.eig_b.apply(tp - self.t1, mid)
            };
            out.push(psi);
        }
        Ok(out)
    }
}

impl Hamiltonian for TwoSegmentDrive {
    fn dim(&self) -> usize {
        self.h_a.nrows()
    }

    fn fill(&self, _t: f64, span: Span, out: &mut CMatrix) {
        if span.mid().rem_euclid(self.period()) < self.t1 {
            out.copy_from(&self.h_a);
        } else {
            out.copy_from(&self.h_b);
        }
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let p = self.period();
        let mut out = Vec::new();
        let mut k = (t0 / p).floor();
        loop {
            for b in [k * p, k * p + self.t1] {
                if b > t0 && b < t1 {
                    out.push(b);
                }
            }
            if k * p >= t1 {
                break;
            }
            k += 1.0;
        }
        out
    }
}

/// Hub-coupled Hamiltonian: levels `0..N` couple to level `N` with `omegas`,
/// the hub has detuning `detuning`.
pub fn hub_hamiltonian(omegas: &[f64], detuning: f64) -> CMatrix {
    let n = omegas.len();
    let mut h = CMatrix::zeros(n + 1, n + 1);
    for (k, &w) in omegas.iter().enumerate() {
        h[(k, n)] = c(w, 0.0);
        h[(n, k)] = c(w, 0.0);
    }
    h[(n, n)] = c(detuning, 0.0);
    h
}

/// Outcome of the `N`-level superposition protocol.
#[derive(Debug, Clone)]
pub struct SuperpositionRun {
    pub trajectory: Trajectory,
    /// Periods `round(pi / (2 a))`.
    pub periods: u64,
    pub time: f64,
    pub fidelity: f64,
    pub target: CVector,
}

/// Frequency modulation of a hub-coupled system started in the hub level;
/// after `pi/(2a)` periods the state is `~ sum_k W_k |k>`.
pub fn n_level_superposition(
    omegas: &[f64],
    delta_a: f64,
    delta_b: f64,
    t_max: f64,
    samples: usize,
) -> Result<SuperpositionRun> {
    if omegas.len() < 2 {
        return Err(Error::invalid("omegas", "need at least two couplings"));
    }
    if omegas.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("omegas", "couplings must be finite"));
    }
    let s: f64 = omegas.iter().map(|w| w * w).sum();
    if !(s > 0.0) {
        return Err(Error::invalid(
            "omegas",
            "at least one coupling must be nonzero",
        ));
    }
    let ya = (4.0 * s + delta_a * delta_a).sqrt();
    let yb = (4.0 * s + delta_b * delta_b).sqrt();
    let drive = TwoSegmentDrive::new(
        hub_hamiltonian(omegas, delta_a),
        hub_hamiltonian(omegas, delta_b),
        PI / ya,
        PI / yb,
    )?;
    let d1 = -4.0 * s - delta_a * delta_b;
    let d2 = 2.0 * (delta_a - delta_b) * s.sqrt();
    let a = d2.abs().atan2(d1.abs());
    if a < 1e-15 {
        return Err(Error::InfiniteTime);
    }
    let periods = (FRAC_PI_2 / a).round() as u64;
    let time = periods as f64 * drive.period();
    let n = omegas.len();
    let psi0 = crate::linalg::basis_vector(n + 1, n);
    let target = CVector::from_iterator(
        n + 1,
        omegas
            .iter()
            .map(|&w| c(w / s.sqrt(), 0.0))
            .chain([c(0.0, 0.0)]),
    );
    let fin = drive.evolve(&psi0, &[time])?;
    let fidelity = target.dotc(&fin[0]).norm_sqr();
    let times = uniform(t_max, samples)?;
    let states = drive.evolve(&psi0, &times)?;
    let pops: Vec<Vec<f64>> = states
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).collect())
        .collect();
    let mut trajectory = population_trajectory(&times, &pops, &level_labels(n + 1));
    trajectory.meta.method = Some("eigen".into());
    trajectory
        .meta
        .diagnostics
        .insert("superposition_time".into(), time);
    trajectory
        .meta
        .diagnostics
        .insert("superposition_fidelity".into(), fidelity);
    Ok(SuperpositionRun {
        trajectory,
        periods,
        time,
        fidelity,
        target,
    })
}

fn uniform(t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0) || samples < 2 {
        return Err(Error::invalid(
            "time",
            "need t_max > 0 and at least 2 samples",
        ));
    }
    Ok((0..samples)
        .map(|k| t_max * k as f64 / (samples - 1) as f64)
        .collect())
}

/// Constant parameters of one segment of a three-level schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelSegment {
    pub omega1: f64,
    pub omega2: f64,
    pub detuning: f64,
    pub delta: f64,
}

impl ThreeLevelSegment {
    pub fn system(&self) -> LambdaSystem {
        LambdaSystem::new(self.omega1, self.omega2, self.detuning).with_delta(self.delta)
    }

    /// Half-period rule `y t = pi`; `y` ignores `delta`.
    pub fn rule_duration(&self) -> f64 {
        PI / self.system().y()
    }
}

/// Two-segment three-level schedule: detuning switch, offset switch or
/// coupling switch are all special cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelSchedule {
    pub a: ThreeLevelSegment,
    pub b: ThreeLevelSegment,
    /// Overrides of the rule durations.
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

impl ThreeLevelSchedule {
    pub fn new(a: ThreeLevelSegment, b: ThreeLevelSegment) -> Self {
        Self {
            a,
            b,
            t1: None,
            t2: None,
        }
    }

    /// `Delta` switches between `delta_alpha` and `delta_beta`.
    pub fn detuning_switch(
        omega1: f64,
        omega2: f64,
        delta_alpha: f64,
        delta_beta: f64,
        delta: f64,
    ) -> Self {
        Self::new(
            ThreeLevelSegment {
                omega1,
                omega2,
                detuning: delta_alpha,
                delta,
            },
            ThreeLevelSegment {
                omega1,
                omega2,
                detuning: delta_beta,
                delta,
            },
        )
    }

    /// `delta` switches between `offset_alpha` and `offset_beta`.
    pub fn offset_switch(
        omega1: f64,
        omega2: f64,
        detuning: f64,
        offset_alpha: f64,
        offset_beta: f64,
    ) -> Self {
        Self::new(
            ThreeLevelSegment {
                omega1,
                omega2,
                detuning,
                delta: offset_alpha,
            },
            ThreeLevelSegment {
                omega1,
                omega2,
                detuning,
                delta: offset_beta,
            },
        )
    }

    /// `W2` switches to `W2'`.
    pub fn coupling_switch(
        omega1: f64,
        omega2: f64,
        omega2_prime: f64,
        detuning: f64,
        delta: f64,
    ) -> Self {
        Self::new(
            ThreeLevelSegment {
                omega1,
                omega2,
                detuning,
                delta,
            },
            ThreeLevelSegment {
                omega1,
                omega2: omega2_prime,
                detuning,
                delta,
            },
        )
    }

    pub fn with_durations(mut self, t1: Option<f64>, t2: Option<f64>) -> Self {
        self.t1 = t1;
        self.t2 = t2;
        self
    }

    pub fn durations(&self) -> (f64, f64) {
        (
            self.t1.unwrap_or_else(|| self.a.rule_duration()),
            self.t2.unwrap_or_else(|| self.b.rule_duration()),
        )
    }

    pub fn has_offset(&self) -> bool {
        self.a.delta != 0.0 || self.b.delta != 0.0
    }

    pub fn drive(&self) -> Result<TwoSegmentDrive> {
        let (t1, t2) = self.durations();
        TwoSegmentDrive::new(
            self.a.system().hamiltonian(),
            self.b.system().hamiltonian(),
            t1,
            t2,
        )
    }
}

/// Populations of a three-level schedule on `samples` points of `[0, t_max]`.
pub fn three_level_modulated_evolution(
    schedule: &ThreeLevelSchedule,
    psi0: &QuantumState,
    t_max: f64,
    samples: usize,
) -> Result<Trajectory> {
    let drive = schedule.drive()?;
    let amps = psi0
        .amplitudes()
        .ok_or_else(|| Error::InvalidState("three-level evolution expects a pure state".into()))?;
    let times = uniform(t_max, samples)?;
    let states = drive.evolve(amps, &times)?;
    let pops: Vec<Vec<f64>> = states
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).collect())
        .collect();
    let mut tr = population_trajectory(&times, &pops, psi0.labels());
    tr.meta.method = Some("eigen".into());
    let (t1, t2) = (drive.t1, drive.t2);
    tr.meta.diagnostics.insert("t1".into(), t1);
    tr.meta.diagnostics.insert("t2".into(), t2);
    if schedule.has_offset() {
        tr.meta
            .notes
            .push("offset delta != 0: no closed form, eigendecomposition path".into());
    }
    Ok(tr)
}

/// Atom-cavity labels `|atom, photons>` of the three levels: `|0> = |0,1>`,
/// `|1> = |1,0>`, `|2> = |2,0>`. Series are named `P_01`, `P_10`, `P_20`.
pub fn photon_storage_labels() -> Vec<String> {
    vec!["01".into(), "10".into(), "20".into()]
}

/// Relabels a three-level trajectory in the atom-cavity basis; data untouched.
pub fn as_photon_storage(mut tr: Trajectory) -> Result<Trajectory> {
    let labels = photon_storage_labels();
    for (k, new) in labels.iter().enumerate() {
        let old = format!("P_{k}");
        if tr.get(&old).is_none() {
            return Err(Error::InvalidState(format!(
                "trajectory has no series {old}"
            )));
        }
        tr.rename(&old, &format!("P_{new}"));
    }
    Ok(tr)
}

/// Three-level Hamiltonian from plain numbers, for callers without a schedule.
pub fn three_level_hamiltonian(omega1: f64, omega2: f64, detuning: f64, delta: f64) -> CMatrix {
    from_real(
        3,
        3,
        &[
            0.0, 0.0, omega1, 0.0, delta, omega2, omega1, omega2, detuning,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::rk4_unitary;
    use crate::linalg::max_abs_diff;
    use crate::multilevel::lambda::{lambda_n_period_state, lambda_period_unitary};

    #[test]
    fn exact_segments_match_rk4() {
        let s = ThreeLevelSchedule::detuning_switch(1.0, 1.0, 40.0, 20.0, 10.0);
        let d = s.drive().unwrap();
        let t = 2.5 * d.period();
        let cols: Vec<CVector> = (0..3)
            .map(|k| {
                d.evolve(&crate::linalg::basis_vector(3, k), &[t])
                    .unwrap()
                    .remove(0)
            })
            .collect();
        let u = CMatrix::from_columns(&cols);
        let oracle = rk4_unitary(&d, 0.0, t, 1e-5).unwrap();
        assert!(max_abs_diff(&u, &oracle) < 1e-8);
    }

    #[test]
    fn two_couplings_reduce_to_lambda_closed_form() {
        let run = n_level_superposition(&[1.0, 2.0], 50.0, 100.0, 1.0, 5).unwrap();
        let (_, dec) = lambda_period_unitary(1.0, 2.0, 50.0, 100.0).unwrap();
        let expected = lambda_n_period_state(&dec, run.periods).populations();
        let drive = TwoSegmentDrive::new(
            hub_hamiltonian(&[1.0, 2.0], 50.0),
            hub_hamiltonian(&[1.0, 2.0], 100.0),
            dec.t1,
            dec.t2,
        )
        .unwrap();
        let got = drive
            .evolve(&crate::linalg::basis_vector(3, 2), &[run.time])
            .unwrap();
        for k in 0..3 {
            assert!((got[0][k].norm_sqr() - expected[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn photon_storage_relabel_keeps_data() {
        let s = ThreeLevelSchedule::coupling_switch(1.0, 1.0, -1.0, 40.0, 0.0);
        let tr = three_level_modulated_evolution(&s, &QuantumState::basis(3, 2), 5.0, 11).unwrap();
        let relabeled = as_photon_storage(tr.clone()).unwrap();
        assert_eq!(relabeled.names(), vec!["P_01", "P_10", "P_20"]);
        for (a, b) in tr.series.iter().zip(&relabeled.series) {
            assert_eq!(a.values, b.values);
        }
    }

    #[test]
    fn rule_durations_ignore_offset() {
        let s = ThreeLevelSchedule::offset_switch(1.0, 1.0, 10.0, 0.0, 30.0);
        let (t1, t2) = s.durations();
        assert_eq!(t1, t2);
        assert!((t1 - PI / 108f64.sqrt()).abs() < 1e-15);
        let o = s.with_durations(Some(1.1412), Some(0.0795));
        assert_eq!(o.durations(), (1.1412, 0.0795));
    }

    #[test]
    fn breakpoints_cover_both_edges() {
        let d = TwoSegmentDrive::new(CMatrix::zeros(2, 2), CMatrix::zeros(2, 2), 0.3, 0.2).unwrap();
        assert_eq!(d.breakpoints(0.0, 1.0), vec![0.3, 0.5, 0.8]);
    }
}

//! Lambda-type three-level system: constant-drive propagator, one-period
//! product under detuning modulation and its `n`-period closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{c, expm_hermitian, from_real, CMatrix, CVector, C64, I};
use crate::state::QuantumState;

/// Three levels `|0>, |1>` coupled to `|2>` with detuning `delta` on `|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSystem {
    pub omega1: f64,
    pub omega2: f64,
    pub detuning: f64,
    pub delta: f64,
}

impl LambdaSystem {
    pub fn new(omega1: f64, omega2: f64, detuning: f64) -> Self {
        Self {
            omega1,
            omega2,
            detuning,
            delta: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// `[[0, 0, W1], [0, delta, W2], [W1, W2, Delta]]`.
    pub fn hamiltonian(&self) -> CMatrix {
        let (a, b) = (self.omega1, self.omega2);
        from_real(
            3,
            3,
            &[0.0, 0.0, a, 0.0, self.delta, b, a, b, self.detuning],
        )
    }

    /// `y = sqrt(4 W1^2 + 4 W2^2 + Delta^2)`.
    pub fn y(&self) -> f64 {
        (4.0 * (self.omega1.powi(2) + self.omega2.powi(2)) + self.detuning.powi(2)).sqrt()
    }

    /// Collective coupling `sqrt(W1^2 + W2^2)`.
    pub fn bright_coupling(&self) -> f64 {
        self.omega1.hypot(self.omega2)
    }
}

/// Which evaluation produced a propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorPath {
    ClosedForm,
    Eigen,
}

/// Closed form `e^{-i Delta t/2} [[B1, B2, B4], [B2, B3, B5], [B4, B5, B6]]`.
pub fn lambda_propagator(sys: &LambdaSystem, t: f64) -> Result<CMatrix> {
    if sys.delta != 0.0 {
        return Err(Error::ClosedFormUnavailable(format!(
            "second-level offset delta = {} has no closed form",
            sys.delta
        )));
    }
    let s = sys.omega1.powi(2) + sys.omega2.powi(2);
    if s == 0.0 {
        return expm_hermitian(&sys.hamiltonian(), t);
    }
    let (w1, w2, dd) = (sys.omega1, sys.omega2, sys.detuning);
    let y = sys.y();
    let (sn, cs) = (0.5 * y * t).sin_cos();
    let bright = c(cs, dd / y * sn);
    let dark = (I * (0.5 * dd * t)).exp();
    let b1 = dark * (w2 * w2 / s) + bright * (w1 * w1 / s);
    let b2 = -dark * (w1 * w2 / s) + bright * (w1 * w2 / s);
    let b3 = dark * (w1 * w1 / s) + bright * (w2 * w2 / s);
    let b4 = c(0.0, -2.0 * w1 / y * sn);
    let b5 = c(0.0, -2.0 * w2 / y * sn);
    let b6 = c(cs, -dd / y * sn);
    let m = CMatrix::from_row_slice(3, 3, &[b1, b2, b4, b2, b3, b5, b4, b5, b6]);
    Ok(m * (-I * (0.5 * dd * t)).exp())
}

/// Closed form when available, eigendecomposition otherwise.
pub fn lambda_propagator_any(sys: &LambdaSystem, t: f64) -> Result<(CMatrix, PropagatorPath)> {
    match lambda_propagator(sys, t) {
        Ok(u) => Ok((u, PropagatorPath::ClosedForm)),
        Err(Error::ClosedFormUnavailable(_)) => Ok((
            expm_hermitian(&sys.hamiltonian(), t)?,
            PropagatorPath::Eigen,
        )),
        Err(e) => Err(e),
    }
}

/// One period `exp(-i H_b t2) exp(-i H_a t1)` with `y_a t1 = y_b t2 = pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPeriodDecomposition {
    pub omega1: f64,
    pub omega2: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// `-4 W1^2 - 4 W2^2 - Delta_a Delta_b`.
    pub d1: f64,
    /// `2 (Delta_a - Delta_b) sqrt(W1^2 + W2^2)`.
    pub d2: f64,
    pub s1: C64,
    pub s2: C64,
    /// `atan2(d2, d1)`.
    pub varphi: f64,
    pub t1: f64,
    pub t2: f64,
    pub period: f64,
    /// `Delta_a t1 + Delta_b t2`; the period carries `e^{-i chi/2}`.
    pub chi: f64,
}

impl LambdaPeriodDecomposition {
    pub fn y_a(&self) -> f64 {
        LambdaSystem::new(self.omega1, self.omega2, self.delta_a).y()
    }

    pub fn y_b(&self) -> f64 {
        LambdaSystem::new(self.omega1, self.omega2, self.delta_b).y()
    }

    /// Population rotation angle per period, `atan |d2/d1|` in `[0, pi/2]`.
    pub fn angle(&self) -> f64 {
        self.d2.abs().atan2(self.d1.abs())
    }

    fn bright(&self) -> CVector {
        let s = self.omega1.hypot(self.omega2);
        CVector::from_vec(vec![
            c(self.omega1 / s, 0.0),
            c(self.omega2 / s, 0.0),
            c(0.0, 0.0),
        ])
    }

    /// One-period matrix from the `B'` entries.
    pub fn period_unitary(&self) -> CMatrix {
        let (w1, w2) = (self.omega1, self.omega2);
        let s = w1 * w1 + w2 * w2;
        let (ya, yb) = (self.y_a(), self.y_b());
        let e = (I * (0.5 * self.chi)).exp() * (ya * yb);
        let k = 4.0 * s + self.delta_a * self.delta_b;
        let b1 = (e * (w2 * w2) - w1 * w1 * k) / s;
        let b2 = -(e * (w1 * w2) + w1 * w2 * k) / s;
        let b3 = (e * (w1 * w1) - w2 * w2 * k) / s;
        let b4 = c(2.0 * w1 * (self.delta_b - self.delta_a), 0.0);
        let b5 = c(2.0 * w2 * (self.delta_b - self.delta_a), 0.0);
        let b6 = c(-k, 0.0);
        let m = CMatrix::from_row_slice(3, 3, &[b1, b2, b4, b2, b3, b5, -b4, -b5, b6]);
        m * ((-I * (0.5 * self.chi)).exp() / (ya * yb))
    }

    /// `U(nT, 0)`: the dark state `(W2|0> - W1|1>)/sqrt(S)` is untouched and
    /// the span of the bright state and `|2>` rotates by `n varphi`.
    pub fn n_period_unitary(&self, n: u64) -> CMatrix {
        let s = self.s1.norm();
        let (w1, w2) = (self.omega1, self.omega2);
        let ss = w1 * w1 + w2 * w2;
        let sq = ss.sqrt();
        let s1n = (self.s1 / s).powu(n as u32);
        let s2n = (self.s2 / s).powu(n as u32);
        let sum = (s1n + s2n) * 0.5;
        let dif = (s1n - s2n) * 0.5;
        let phase = (-I * (0.5 * self.chi * n as f64)).exp();
        let mut m = CMatrix::from_row_slice(
            3,
            3,
            &[
                sum * (w1 * w1 / ss),
                sum * (w1 * w2 / ss),
                I * dif * (w1 / sq),
                sum * (w1 * w2 / ss),
                sum * (w2 * w2 / ss),
                I * dif * (w2 / sq),
                -I * dif * (w1 / sq),
                -I * dif * (w2 / sq),
                sum,
            ],
        ) * phase;
        let dark = CVector::from_vec(vec![c(w2 / sq, 0.0), c(-w1 / sq, 0.0), c(0.0, 0.0)]);
        m += &dark * dark.adjoint();
        m
    }

    /// Target of the transfer out of `|2>`: the bright state.
    pub fn bright_state(&self) -> CVector {
        self.bright()
    }
}

pub fn lambda_period_unitary(
    omega1: f64,
    omega2: f64,
    delta_a: f64,
    delta_b: f64,
) -> Result<(CMatrix, LambdaPeriodDecomposition)> {
    let s = omega1 * omega1 + omega2 * omega2;
    if !(s > 0.0) {
        return Err(Error::invalid(
            "omega",
            "at least one coupling must be nonzero",
        ));
    }
    let ya = LambdaSystem::new(omega1, omega2, delta_a).y();
    let yb = LambdaSystem::new(omega1, omega2, delta_b).y();
    let (t1, t2) = (PI / ya, PI / yb);
    let d1 = -4.0 * s - delta_a * delta_b;
    let d2 = 2.0 * (delta_a - delta_b) * s.sqrt();
    let dec = LambdaPeriodDecomposition {
        omega1,
        omega2,
        delta_a,
        delta_b,
        d1,
        d2,
        s1: c(d1, d2),
        s2: c(d1, -d2),
        varphi: d2.atan2(d1),
        t1,
        t2,
        period: t1 + t2,
        chi: delta_a * t1 + delta_b * t2,
    };
    Ok((dec.period_unitary(), dec))
}

/// State after `n` periods starting from `|2>`:
/// `e^{-i n chi/2} (-W1 sin(n varphi)/sqrt(S), -W2 sin(n varphi)/sqrt(S), cos(n varphi))`.
pub fn lambda_n_period_state(dec: &LambdaPeriodDecomposition, n: u64) -> QuantumState {
    let sq = dec.omega1.hypot(dec.omega2);
    let a = n as f64 * dec.varphi;
    let phase = (-I * (0.5 * dec.chi * n as f64)).exp();
    let v = CVector::from_vec(vec![
        phase * (-dec.omega1 / sq * a.sin()),
        phase * (-dec.omega2 / sq * a.sin()),
        phase * a.cos(),
    ]);
    QuantumState::from_amplitudes(v).expect("closed-form state is normalised")
}

/// Time to reach `cos T |0> + sin T |1>` from `|2>`:
/// `pi / (2 atan|d2/d1|) * (pi/y_a + pi/y_b)`.
pub fn superposition_time(
    target: f64,
    omega1: f64,
    omega2: f64,
    delta_a: f64,
    delta_b: f64,
) -> Result<f64> {
    let expected = target.tan();
    let ratio = omega1 / omega2;
    let ok = if expected.is_finite() && ratio.is_finite() {
        (ratio - expected).abs() <= 1e-9 * expected.abs().max(1.0)
    } else {
        omega2 == 0.0 && (target - FRAC_PI_2).abs() < 1e-12
    };
    if !ok {
        return Err(Error::RatioMismatch { ratio, expected });
    }
    let (_, dec) = lambda_period_unitary(omega1, omega2, delta_a, delta_b)?;
    let a = dec.angle();
    if a < 1e-15 {
        return Err(Error::InfiniteTime);
    }
    Ok(FRAC_PI_2 / a * dec.period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, max_abs_diff_vec, unitarity_error};

    #[test]
    fn closed_form_matches_eigen() {
        for (w1, w2, d, t) in [
            (1.0, 2.0, 50.0, 0.37),
            (0.3, -1.2, 4.0, 2.9),
            (2.0, 0.5, -7.0, 1.1),
        ] {
            let sys = LambdaSystem::new(w1, w2, d);
            let u = lambda_propagator(&sys, t).unwrap();
            let e = expm_hermitian(&sys.hamiltonian(), t).unwrap();
            assert!(max_abs_diff(&u, &e) < 1e-12);
            assert!(unitarity_error(&u) < 1e-12);
        }
        assert!(
            max_abs_diff(
                &lambda_propagator(&LambdaSystem::new(1.0, 2.0, 5.0), 0.0).unwrap(),
                &CMatrix::identity(3, 3)
            ) < 1e-15
        );
    }

    #[test]
    fn offset_has_no_closed_form() {
        let sys = LambdaSystem::new(1.0, 1.0, 10.0).with_delta(3.0);
        assert!(matches!(
            lambda_propagator(&sys, 1.0),
            Err(Error::ClosedFormUnavailable(_))
        ));
        let (u, path) = lambda_propagator_any(&sys, 1.0).unwrap();
        assert_eq!(path, PropagatorPath::Eigen);
        assert!(unitarity_error(&u) < 1e-12);
    }

    #[test]
    fn large_detuning_bounds_transfer_amplitude() {
        let sys = LambdaSystem::new(1.0, 2.0, 400.0);
        let bound = 2.0 * 2.0 / 400.0;
        for k in 0..200 {
            let u = lambda_propagator(&sys, k as f64 * 0.013).unwrap();
            assert!(u[(0, 2)].norm() <= bound && u[(1, 2)].norm() <= bound);
        }
    }

    #[test]
    fn b_prime_form_matches_product() {
        let (u, dec) = lambda_period_unitary(1.0, 2.0, 50.0, 100.0).unwrap();
        let direct = expm_hermitian(&LambdaSystem::new(1.0, 2.0, 100.0).hamiltonian(), dec.t2)
            .unwrap()
            * expm_hermitian(&LambdaSystem::new(1.0, 2.0, 50.0).hamiltonian(), dec.t1).unwrap();
        assert!(max_abs_diff(&u, &direct) < 1e-12);
        assert!((dec.s1.norm() - dec.y_a() * dec.y_b()).abs() < 1e-9 * dec.s1.norm());
        assert!(dec.varphi != 0.0);
    }

    #[test]
    fn n_period_closed_form_matches_power() {
        let (u, dec) = lambda_period_unitary(1.0, 2.0, 50.0, 100.0).unwrap();
        let mut p = CMatrix::identity(3, 3);
        for n in 0..40u64 {
            assert!(
                max_abs_diff(&dec.n_period_unitary(n), &p) < 1e-11,
                "n = {n}"
            );
            let s = lambda_n_period_state(&dec, n);
            assert!(max_abs_diff_vec(s.amplitudes().unwrap(), &p.column(2).into_owned()) < 1e-11);
            p = &u * p;
        }
    }

    #[test]
    fn equal_detunings_freeze() {
        let (_, dec) = lambda_period_unitary(1.0, 1.0, 40.0, 40.0).unwrap();
        assert_eq!(dec.d2, 0.0);
        assert!(dec.varphi == 0.0 || (dec.varphi.abs() - PI).abs() < 1e-15);
        assert_eq!(
            superposition_time(PI / 4.0, 1.0, 1.0, 40.0, 40.0),
            Err(Error::InfiniteTime)
        );
    }

    #[test]
    fn quadrature_gives_bright_state() {
        let (_, mut dec) = lambda_period_unitary(1.0, 2.0, 50.0, 100.0).unwrap();
        dec.varphi = FRAC_PI_2 / 3.0;
        let p = lambda_n_period_state(&dec, 3).populations();
        assert!((p[0] - 0.2).abs() < 1e-12 && (p[1] - 0.8).abs() < 1e-12 && p[2] < 1e-24);
    }

    #[test]
    fn superposition_time_checks_ratio() {
        assert!(superposition_time(PI / 4.0, 1.0, 1.0, 50.0, 100.0)
            .unwrap()
            .is_finite());
        assert!(matches!(
            superposition_time(PI / 3.0, 1.0, 1.0, 50.0, 100.0),
            Err(Error::RatioMismatch { .. })
        ));
    }
}

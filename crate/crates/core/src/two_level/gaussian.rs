//! Trains of Gaussian pulses `A exp(-(t - 4 xi)^2 / (2 xi^2))` with period `8 xi`.

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::integrate::{Hamiltonian, Span};
use crate::linalg::{c, CMatrix, C64};

/// Step rule used for the one-period integration.
pub const GAUSSIAN_STEP_RULE: f64 = 2e-3;
/// `|R'|` below which no transfer is possible.
pub const NO_TRANSFER_TOL: f64 = 1e-9;

type M2 = Matrix2<C64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    pub amplitude: f64,
    pub width: f64,
    pub detuning: f64,
}

impl GaussianPulse {
    pub fn new(amplitude: f64, width: f64, detuning: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::invalid(
                "A",
                format!("amplitude must be >= 0, got {amplitude}"),
            ));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::invalid(
                "xi",
                format!("width must be > 0, got {width}"),
            ));
        }
        if !detuning.is_finite() {
            return Err(Error::invalid("delta", "detuning must be finite"));
        }
        Ok(Self {
            amplitude,
            width,
            detuning,
        })
    }

    pub fn period(&self) -> f64 {
        8.0 * self.width
    }

    pub fn coupling(&self, t: f64) -> f64 {
        let tau = t.rem_euclid(self.period()) - 4.0 * self.width;
        self.amplitude * (-tau * tau / (2.0 * self.width * self.width)).exp()
    }

    fn h(&self, t: f64) -> M2 {
        let o = c(self.coupling(t), 0.0);
        let z = c(self.detuning / 2.0, 0.0);
        M2::new(z, o, o, -z)
    }

    fn max_norm(&self) -> f64 {
        self.amplitude.hypot(self.detuning / 2.0)
    }

    /// RK4 propagator over `[0, duration]` with the traceless Hamiltonian.
    fn integrate(&self, duration: f64, rule: f64) -> Result<M2> {
        let radius = self.max_norm();
        let n = if radius > 0.0 {
            (duration * radius / rule).ceil().max(1.0) as usize
        } else {
            1
        };
        let h = duration / n as f64;
        let mi = c(0.0, -1.0);
        let mut u = M2::identity();
        for k in 0..n {
            let t = k as f64 * h;
            let (ha, hm, hb) = (self.h(t), self.h(t + 0.5 * h), self.h(t + h));
            let k1 = ha * u * mi;
            let k2 = hm * (u + k1 * c(0.5 * h, 0.0)) * mi;
            let k3 = hm * (u + k2 * c(0.5 * h, 0.0)) * mi;
            let k4 = hb * (u + k3 * c(h, 0.0)) * mi;
            u += (k1 + (k2 + k3) * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
        }
        let drift = (u.adjoint() * u - M2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if !(drift <= 1e-6) {
            return Err(Error::IntegrationFailure(format!(
                "Gaussian pulse propagator lost unitarity ({drift:.3e})"
            )));
        }
        Ok(u)
    }

    /// Transfer probability `|0> -> |1>` from direct integration over `n` pulses.
    pub fn simulate_transfer(&self, n: usize, rule: f64) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let u = self.integrate(n as f64 * self.period(), rule)?;
        Ok(u[(1, 0)].norm_sqr())
    }
}

/// One-period rotation data of a Gaussian train:
/// `U(T) = [[P' - iQ', -R' e^{i theta'}], [R' e^{-i theta'}, P' + iQ']]`,
/// `cos vartheta = P'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTrain {
    pub pulse: GaussianPulse,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub theta: f64,
    pub vartheta: f64,
    unitary: M2,
}

pub fn gaussian_decomposition(amplitude: f64, width: f64, detuning: f64) -> Result<GaussianTrain> {
    GaussianTrain::new(
        GaussianPulse::new(amplitude, width, detuning)?,
        GAUSSIAN_STEP_RULE,
    )
}

impl GaussianTrain {
    pub fn new(pulse: GaussianPulse, rule: f64) -> Result<Self> {
        let u = pulse.integrate(pulse.period(), rule)?;
        let p = u[(0, 0)].re;
        let q = -u[(0, 0)].im;
        let r = u[(1, 0)].norm();
        let theta = if r > 0.0 { -u[(1, 0)].arg() } else { 0.0 };
        Ok(Self {
            pulse,
            p,
            q,
            r,
            theta,
            vartheta: p.clamp(-1.0, 1.0).acos(),
            unitary: u,
        })
    }

    pub fn period(&self) -> f64 {
        self.pulse.period()
    }

    pub fn unitary(&self) -> CMatrix {
        CMatrix::from_row_slice(2, 2, self.unitary.transpose().as_slice())
    }

    /// `U(nT) = cos(n vartheta) 1 + sin(n vartheta)/sin(vartheta) (U - cos vartheta 1)`.
    pub fn n_pulse_unitary(&self, n: u64) -> CMatrix {
        let u = self.unitary();
        let s = self.vartheta.sin();
        if s.abs() < 1e-12 {
            return (0..n).fold(CMatrix::identity(2, 2), |acc, _| &u * acc);
        }
        let a = n as f64 * self.vartheta;
        let id = CMatrix::identity(2, 2);
        &id * c(a.cos(), 0.0) + (&u - &id * c(self.vartheta.cos(), 0.0)) * c(a.sin() / s, 0.0)
    }

    /// `P1 = R'^2 sin^2(n vartheta) / (Q'^2 + R'^2)`.
    pub fn transfer_after(&self, n: u64) -> f64 {
        let s2 = self.q * self.q + self.r * self.r;
        if s2 == 0.0 {
            return 0.0;
        }
        self.r * self.r * (n as f64 * self.vartheta).sin().powi(2) / s2
    }

    /// Unrounded `(4m+1) pi / (2 vartheta)`.
    pub fn fractional_pulses(&self, m: u32) -> f64 {
        (4 * m + 1) as f64 * PI / (2.0 * self.vartheta)
    }
}

/// `N = round((4m+1) pi / (2 vartheta))` and the predicted infidelity
/// `1 - P1(NT)`.
pub fn pulses_for_inversion(g: &GaussianTrain, m: u32) -> Result<(u64, f64)> {
    if g.r.abs() < NO_TRANSFER_TOL {
        return Err(Error::NoTransfer(g.r));
    }
    if !(g.vartheta > 0.0) {
        return Err(Error::NoTransfer(g.r));
    }
    let n = g.fractional_pulses(m).round().max(1.0) as u64;
    Ok((n, 1.0 - g.transfer_after(n)))
}

/// `pulses_for_inversion` from bare rotation data, without an integrated pulse.
pub fn pulses_from_angle(vartheta: f64, q: f64, r: f64, m: u32) -> Result<(u64, f64)> {
    if r.abs() < NO_TRANSFER_TOL || !(vartheta > 0.0) {
        return Err(Error::NoTransfer(r));
    }
    let n = ((4 * m + 1) as f64 * PI / (2.0 * vartheta))
        .round()
        .max(1.0) as u64;
    let p1 = r * r * (n as f64 * vartheta).sin().powi(2) / (q * q + r * r);
    Ok((n, 1.0 - p1))
}

impl Hamiltonian for GaussianPulse {
    fn dim(&self) -> usize {
        2
    }

    fn fill(&self, t: f64, _span: Span, out: &mut CMatrix) {
        let h = self.h(t);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = h[(i, j)];
            }
        }
    }
}

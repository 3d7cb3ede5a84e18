//! Logistic approximation of the square well and additive coupling noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::{interaction_hamiltonian, BlochHamiltonian};
use crate::error::{Error, Result};
use crate::integrate::{Hamiltonian, Span};
use crate::linalg::CMatrix;
use crate::two_level::schedule::{Piece, PiecewiseSchedule};
use crate::two_level::square_well::{Modulation, SquareWellDrive};

/// Piecewise-constant noise `eps(t)`, uniform in `[-amplitude, amplitude]`
/// and redrawn every `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrack {
    pub amplitude: f64,
    pub dt: f64,
    pub seed: u64,
    values: Vec<f64>,
}

impl NoiseTrack {
    pub fn generate(amplitude: f64, dt: f64, t_max: f64, seed: u64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::invalid("noise.amplitude", "must be finite and >= 0"));
        }
        if !(dt > 0.0) || !(t_max > 0.0) {
            return Err(Error::invalid(
                "noise.dt",
                "resampling interval and window must be positive",
            ));
        }
        let n = (t_max / dt).ceil() as usize + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n)
            .map(|_| {
                if amplitude > 0.0 {
                    rng.random_range(-amplitude..=amplitude)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self {
            amplitude,
            dt,
            seed,
            values,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// End of the generated window.
    pub fn t_end(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    pub fn at(&self, t: f64) -> f64 {
        let k = (t / self.dt).floor().max(0.0) as usize;
        self.values[k.min(self.values.len() - 1)]
    }

    fn boundaries(&self, t0: f64, t1: f64) -> impl Iterator<Item = f64> + '_ {
        let k0 = (t0 / self.dt).floor().max(0.0) as usize + 1;
        (k0..self.values.len())
            .map(move |k| k as f64 * self.dt)
            .take_while(move |&b| b < t1)
            .filter(move |&b| b > t0)
    }
}

/// Intensity-modulated well with logistic edges of hardness `gamma`.
///
/// Within each period the first coupling occupies `[0, t1/2)` and
/// `(T - t1/2, T]`; the two logistic branches meet at `T/2`.
#[derive(Debug, Clone)]
pub struct SmoothSquareWell {
    pub omega1: f64,
    pub omega2: f64,
    pub detuning: f64,
    pub gamma: f64,
    t1: f64,
    period: f64,
    noise: Option<NoiseTrack>,
}

impl SmoothSquareWell {
    /// Durations follow the hard well with pulse-area index 0.
    pub fn new(omega1: f64, omega2: f64, detuning: f64, gamma: f64) -> Result<Self> {
        let hard = SquareWellDrive::intensity(omega1, omega2, detuning, 0)?;
        Self::from_drive(&hard, gamma)
    }

    pub fn from_drive(drive: &SquareWellDrive, gamma: f64) -> Result<Self> {
        if drive.mode() != Modulation::Intensity {
            return Err(Error::invalid(
                "modulation",
                "smooth well is defined for intensity modulation",
            ));
        }
        if !(gamma > 0.0) {
            return Err(Error::invalid(
                "gamma",
                format!("hardness must be > 0, got {gamma}"),
            ));
        }
        Ok(Self {
            omega1: drive.segment1().coupling,
            omega2: drive.segment2().coupling,
            detuning: drive.segment1().detuning,
            gamma,
            t1: drive.t1(),
            period: drive.period(),
            noise: None,
        })
    }

    pub fn with_noise(mut self, noise: NoiseTrack) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn noise(&self) -> Option<&NoiseTrack> {
        self.noise.as_ref()
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Noise-free logistic field.
    pub fn clean_value(&self, t: f64) -> f64 {
        let tau = t.rem_euclid(self.period);
        let (o1, o2, g) = (self.omega1, self.omega2, self.gamma);
        if tau < 0.5 * self.period {
            o2 + (o1 - o2) / (1.0 + (g * (tau - 0.5 * self.t1)).exp())
        } else {
            o2 + (o1 - o2) / (1.0 + (-g * (tau - self.period + 0.5 * self.t1)).exp())
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.clean_value(t) + self.noise.as_ref().map_or(0.0, |n| n.at(t))
    }

    /// `gamma -> infinity` limit with the same segment layout.
    pub fn hard_limit(&self) -> PiecewiseSchedule {
        let d1 = interaction_hamiltonian(self.omega1, self.detuning);
        let d2 = interaction_hamiltonian(self.omega2, self.detuning);
        PiecewiseSchedule::periodic(vec![
            Piece::new(0.5 * self.t1, d1),
            Piece::new(self.period - self.t1, d2),
            Piece::new(0.5 * self.t1, d1),
        ])
        .expect("positive durations")
    }

    /// Largest `|d(t)|` over a period, for the step rule.
    pub fn max_norm(&self) -> f64 {
        let extra = self.noise.as_ref().map_or(0.0, |n| n.amplitude);
        let o = self.omega1.abs().max(self.omega2.abs()) + extra;
        o.hypot(self.detuning / 2.0)
    }
}

impl Hamiltonian for SmoothSquareWell {
    fn dim(&self) -> usize {
        2
    }

    fn fill(&self, t: f64, span: Span, out: &mut CMatrix) {
        let omega = self.clean_value(t) + self.noise.as_ref().map_or(0.0, |n| n.at(span.mid()));
        out.copy_from(&BlochHamiltonian::new(omega, 0.0, self.detuning / 2.0).traceless_matrix());
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.noise
            .as_ref()
            .map_or_else(Vec::new, |n| n.boundaries(t0, t1).collect())
    }
}

/// Hard square well with `eps(t)` added to the coupling, played once over
/// the noise window.
pub fn noisy_square_well(drive: &SquareWellDrive, noise: &NoiseTrack) -> Result<PiecewiseSchedule> {
    let t_end = noise.t_end();
    let clean = drive.schedule();
    let mut cuts: Vec<f64> = clean.breakpoints(0.0, t_end);
    cuts.extend(noise.boundaries(0.0, t_end));
    cuts.push(0.0);
    cuts.push(t_end);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let pieces = cuts
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let base = clean.piece_at(mid).d;
            let omega = base.dx + noise.at(mid);
            Piece::new(
                w[1] - w[0],
                BlochHamiltonian::new(omega, 0.0, base.dz).with_offset(base.offset),
            )
        })
        .collect();
    PiecewiseSchedule::once(pieces)
}

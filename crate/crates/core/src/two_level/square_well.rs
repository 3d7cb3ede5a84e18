//! Square-well modulation: one-period rotation data, effective coupling,
//! stroboscopic states and transfer-time formulas.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::bloch::{interaction_hamiltonian, BlochHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{c, pauli_x, pauli_y, pauli_z, CMatrix, C64, I};
use crate::state::QuantumState;
use crate::two_level::schedule::{Piece, PiecewiseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    /// Coupling switches, detuning fixed.
    Intensity,
    /// Detuning switches, coupling fixed.
    Frequency,
}

/// Constant coupling and detuning of one half of the period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub coupling: f64,
    pub detuning: f64,
}

impl Segment {
    pub fn new(coupling: f64, detuning: f64) -> Self {
        Self { coupling, detuning }
    }

    pub fn bloch(&self) -> BlochHamiltonian {
        interaction_hamiltonian(self.coupling, self.detuning)
    }
}

/// Two-segment periodic drive with pulse areas `|d_j| t_j = pi/2 + 2 m pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareWellDrive {
    mode: Modulation,
    seg1: Segment,
    seg2: Segment,
    m: u32,
    t1: f64,
    t2: f64,
}

/// `pi/2 + 2 m pi`.
pub fn pulse_area(m: u32) -> f64 {
    FRAC_PI_2 + 2.0 * PI * m as f64
}

impl SquareWellDrive {
    pub fn new(mode: Modulation, seg1: Segment, seg2: Segment, m: u32) -> Result<Self> {
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        match mode {
            Modulation::Intensity if !same(seg1.detuning, seg2.detuning) => {
                return Err(Error::invalid(
                    "detuning",
                    "intensity modulation requires equal detunings",
                ));
            }
            Modulation::Frequency if !same(seg1.coupling, seg2.coupling) => {
                return Err(Error::invalid(
                    "coupling",
                    "frequency modulation requires equal couplings",
                ));
            }
            _ => {}
        }
        for (name, s) in [("segment1", seg1), ("segment2", seg2)] {
            if !s.coupling.is_finite() || !s.detuning.is_finite() {
                return Err(Error::invalid(name, "non-finite coupling or detuning"));
            }
            if s.bloch().norm() == 0.0 {
                return Err(Error::invalid(
                    name,
                    "|d| = 0, half-period duration undefined",
                ));
            }
        }
        let area = pulse_area(m);
        Ok(Self {
            mode,
            seg1,
            seg2,
            m,
            t1: area / seg1.bloch().norm(),
            t2: area / seg2.bloch().norm(),
        })
    }

    pub fn intensity(omega1: f64, omega2: f64, detuning: f64, m: u32) -> Result<Self> {
        Self::new(
            Modulation::Intensity,
            Segment::new(omega1, detuning),
            Segment::new(omega2, detuning),
            m,
        )
    }

    pub fn frequency(omega: f64, delta1: f64, delta2: f64, m: u32) -> Result<Self> {
        Self::new(
            Modulation::Frequency,
            Segment::new(omega, delta1),
            Segment::new(omega, delta2),
            m,
        )
    }

    pub fn mode(&self) -> Modulation {
        self.mode
    }

    pub fn segment1(&self) -> Segment {
        self.seg1
    }

    pub fn segment2(&self) -> Segment {
        self.seg2
    }

    pub fn area_index(&self) -> u32 {
        self.m
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn d1(&self) -> BlochHamiltonian {
        self.seg1.bloch()
    }

    pub fn d2(&self) -> BlochHamiltonian {
        self.seg2.bloch()
    }

    /// Coupling at time `t` (segment 1 on `[0, t1)` of each period).
    pub fn coupling_at(&self, t: f64) -> f64 {
        if t.rem_euclid(self.period()) < self.t1 {
            self.seg1.coupling
        } else {
            self.seg2.coupling
        }
    }

    /// Hard square-well schedule; also the Hamiltonian for the RK4 oracle.
    pub fn schedule(&self) -> PiecewiseSchedule {
        PiecewiseSchedule::periodic(vec![
            Piece::new(self.t1, self.d1()),
            Piece::new(self.t2, self.d2()),
        ])
        .expect("durations are positive by construction")
    }

    /// `exp(-i H2 t2) exp(-i H1 t1)`.
    pub fn period_unitary(&self) -> CMatrix {
        self.d2().propagator(self.t2) * self.d1().propagator(self.t1)
    }

    pub fn decompose(&self) -> PeriodDecomposition {
        let d1 = self.d1();
        let d2 = self.d2();
        let mut pd = PeriodDecomposition::from_unitary(&self.period_unitary(), self.period());
        pd.azimuth_defined = d1.transverse() > 0.0 || d2.transverse() > 0.0;
        if !pd.azimuth_defined {
            pd.theta = 0.0;
            pd.lambda = c(0.0, 0.0);
        }
        pd
    }

    /// Closed-form `U(t, 0)` for `t = t' + nT`.
    pub fn propagator(&self, pd: &PeriodDecomposition, t: f64) -> CMatrix {
        let period = self.period();
        let mut n = (t / period).floor();
        let mut tp = t - n * period;
        if tp >= period * (1.0 - 1e-13) {
            n += 1.0;
            tp = 0.0;
        }
        let tp = tp.max(0.0);
        let partial = if tp <= self.t1 {
            self.d1().propagator(tp)
        } else {
            self.d2().propagator(tp - self.t1) * self.d1().propagator(self.t1)
        };
        partial * pd.stroboscopic_unitary(n as u64)
    }
}

/// One-period unitary reduced to `U(T) = e^{i chi} (cos phi - i sin phi n.sigma)`.
///
/// The sign of the global phase is fixed so that `phi` lies in `[0, pi/2]`;
/// for half-period drives `n = (-sin theta, cos theta, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodDecomposition {
    pub phi: f64,
    pub theta: f64,
    pub period: f64,
    pub lambda: C64,
    /// Rotation axis `n`.
    pub axis: [f64; 3],
    /// `e^{i chi}`.
    pub global_phase: C64,
    /// False when neither segment has a transverse component; `theta` is then
    /// set to zero.
    pub azimuth_defined: bool,
}

impl PeriodDecomposition {
    pub fn from_unitary(u: &CMatrix, period: f64) -> Self {
        assert_eq!(u.shape(), (2, 2), "period unitary must be 2x2");
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        let mut gp = det.sqrt();
        let mut v = u * gp.conj();
        if v[(0, 0)].re < 0.0 {
            v = -v;
            gp = -gp;
        }
        let phi = v[(0, 0)].re.clamp(-1.0, 1.0).acos();
        let s = phi.sin();
        let axis = if s < 1e-14 {
            [0.0, 1.0, 0.0]
        } else {
            let sum = (v[(1, 0)] + v[(0, 1)]) * 0.5;
            let diff = (v[(1, 0)] - v[(0, 1)]) * 0.5;
            [-sum.im / s, diff.re / s, -v[(0, 0)].im / s]
        };
        let theta = (-axis[0]).atan2(axis[1]);
        Self {
            phi,
            theta,
            period,
            lambda: effective_coupling_from(phi, theta, period),
            axis,
            global_phase: gp,
            azimuth_defined: true,
        }
    }

    pub fn effective_coupling(&self) -> C64 {
        self.lambda
    }

    /// `H_eff = (phi/T) n.sigma`, so that `U(T) = e^{i chi} exp(-i H_eff T)`.
    pub fn effective_hamiltonian(&self) -> CMatrix {
        let w = self.phi / self.period;
        (pauli_x() * c(self.axis[0], 0.0)
            + pauli_y() * c(self.axis[1], 0.0)
            + pauli_z() * c(self.axis[2], 0.0))
            * c(w, 0.0)
    }

    /// `U(nT, 0) = e^{i n chi} (cos n phi - i sin n phi n.sigma)`.
    pub fn stroboscopic_unitary(&self, n: u64) -> CMatrix {
        let a = n as f64 * self.phi;
        let (s, co) = a.sin_cos();
        let [nx, ny, nz] = self.axis;
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(co, -s * nz),
                -I * s * c(nx, -ny),
                -I * s * c(nx, ny),
                c(co, s * nz),
            ],
        );
        m * self.global_phase.powu(n.min(u32::MAX as u64) as u32)
    }
}

fn effective_coupling_from(phi: f64, theta: f64, period: f64) -> C64 {
    C64::from_polar(phi / period, -(theta + FRAC_PI_2))
}

/// `Lambda = (phi/T) e^{-i(theta + pi/2)}`.
pub fn effective_coupling(pd: &PeriodDecomposition) -> C64 {
    effective_coupling_from(pd.phi, pd.theta, pd.period)
}

/// Decomposition of the explicit product `exp(-i H2 t2) exp(-i H1 t1)`.
pub fn one_period_unitary(drive: &SquareWellDrive) -> PeriodDecomposition {
    drive.decompose()
}

/// Exact state at time `t`.
pub fn stroboscopic_state(
    drive: &SquareWellDrive,
    psi0: &QuantumState,
    t: f64,
) -> Result<QuantumState> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::invalid(
            "t",
            format!("time must be finite and >= 0, got {t}"),
        ));
    }
    if psi0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: psi0.dim(),
        });
    }
    let u = drive.propagator(&drive.decompose(), t);
    Ok(match psi0 {
        QuantumState::Pure { amplitudes, labels } => QuantumState::Pure {
            amplitudes: &u * amplitudes,
            labels: labels.clone(),
        },
        QuantumState::Mixed { rho, labels } => QuantumState::Mixed {
            rho: &u * rho * u.adjoint(),
            labels: labels.clone(),
        },
    })
}

/// Time of the `(m+1)`-th population inversion, `(4m+1) pi T / (2 phi)`.
pub fn inversion_time(drive: &SquareWellDrive, m: u32) -> Result<f64> {
    let pd = drive.decompose();
    if pd.phi < 1e-14 {
        return Err(Error::InfiniteTime);
    }
    Ok((4 * m + 1) as f64 * PI / (2.0 * pd.phi) * pd.period)
}

/// First-order estimate `(pi^2/4)(Delta1 + Delta2) / |Delta1 Omega2 - Delta2 Omega1|`.
pub fn minimal_time_first_order(drive: &SquareWellDrive) -> Result<f64> {
    let (s1, s2) = (drive.segment1(), drive.segment2());
    let den = (s1.detuning * s2.coupling - s2.detuning * s1.coupling).abs();
    let scale = (s1.detuning.abs() + s2.detuning.abs()) * (s1.coupling.abs() + s2.coupling.abs());
    if den <= 1e-13 * scale.max(1e-300) {
        return Err(Error::DegenerateParameters(
            "Delta1 Omega2 = Delta2 Omega1, first-order time diverges".into(),
        ));
    }
    Ok(PI * PI / 4.0 * (s1.detuning + s2.detuning).abs() / den)
}

/// `|d1x sin(m phi) + d1z cos(m phi) - |d1|| / |d1|`.
pub fn plateau_residual(drive: &SquareWellDrive, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("m", "plateau index must be >= 1"));
    }
    let phi = drive.decompose().phi;
    let d1 = drive.d1();
    let a = m as f64 * phi;
    Ok((d1.dx * a.sin() + d1.dz * a.cos() - d1.norm()).abs() / d1.norm())
}

/// Residuals for `m = 1..=m_max`, and the minimising index.
pub fn plateau_scan(drive: &SquareWellDrive, m_max: u32) -> Result<(u32, Vec<f64>)> {
    let res: Vec<f64> = (1..=m_max)
        .map(|m| plateau_residual(drive, m))
        .collect::<Result<_>>()?;
    let best = res
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k as u32 + 1)
        .ok_or_else(|| Error::invalid("m_max", "must be >= 1"))?;
    Ok((best, res))
}

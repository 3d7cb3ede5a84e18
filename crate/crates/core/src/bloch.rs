//! Two-level Hamiltonians `H = d . sigma + eps 1` and their exact propagator.

use serde::{Deserialize, Serialize};

use crate::linalg::{c, pauli_x, pauli_y, pauli_z, CMatrix, C64, I};

/// Coefficient triple `d = (dx, dy, dz)` plus the global energy offset.
///
/// The offset only contributes a global phase; [`BlochHamiltonian::propagator`]
/// drops it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochHamiltonian {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    #[serde(default)]
    pub offset: f64,
}

impl BlochHamiltonian {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Self {
        Self {
            dx,
            dy,
            dz,
            offset: 0.0,
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// `|d|`.
    pub fn norm(&self) -> f64 {
        (self.dx * self.dx + self.dy * self.dy + self.dz * self.dz).sqrt()
    }

    /// `sqrt(dx^2 + dy^2)`.
    pub fn transverse(&self) -> f64 {
        self.dx.hypot(self.dy)
    }

    /// Azimuth of the transverse part, `atan2(dy, dx)`.
    pub fn azimuth(&self) -> f64 {
        self.dy.atan2(self.dx)
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.dx * other.dx + self.dy * other.dy + self.dz * other.dz
    }

    pub fn cross(&self, other: &Self) -> [f64; 3] {
        [
            self.dy * other.dz - self.dz * other.dy,
            self.dz * other.dx - self.dx * other.dz,
            self.dx * other.dy - self.dy * other.dx,
        ]
    }

    /// Full matrix `d . sigma + eps 1`.
    pub fn matrix(&self) -> CMatrix {
        self.traceless_matrix() + CMatrix::identity(2, 2) * c(self.offset, 0.0)
    }

    /// `d . sigma`.
    pub fn traceless_matrix(&self) -> CMatrix {
        pauli_x() * c(self.dx, 0.0) + pauli_y() * c(self.dy, 0.0) + pauli_z() * c(self.dz, 0.0)
    }

    /// `P(t) = cos(|d| t)`.
    pub fn p(&self, t: f64) -> f64 {
        (self.norm() * t).cos()
    }

    /// `Q(t) = dz sin(|d| t) / |d|`.
    pub fn q(&self, t: f64) -> f64 {
        self.dz * sinc_t(self.norm(), t)
    }

    /// `R(t) = sqrt(dx^2 + dy^2) sin(|d| t) / |d|`.
    pub fn r(&self, t: f64) -> f64 {
        self.transverse() * sinc_t(self.norm(), t)
    }

    /// Exact `exp(-i d.sigma t)` (offset dropped):
    ///
    /// ```text
    /// [ P - iQ                   -R e^{-i(theta - pi/2)} ]
    /// [ R e^{i(theta - pi/2)}     P + iQ                 ]
    /// ```
    pub fn propagator(&self, t: f64) -> CMatrix {
        let (p, q, r) = (self.p(t), self.q(t), self.r(t));
        let theta = self.azimuth();
        let shift = theta - std::f64::consts::FRAC_PI_2;
        let off = C64::from_polar(r, shift);
        CMatrix::from_row_slice(2, 2, &[c(p, -q), -off.conj(), off, c(p, q)])
    }

    /// Propagator including the offset phase `exp(-i eps t)`.
    pub fn propagator_with_offset(&self, t: f64) -> CMatrix {
        self.propagator(t) * (-I * self.offset * t).exp()
    }
}

/// `sin(w t) / w`, continuous at `w = 0`.
fn sinc_t(w: f64, t: f64) -> f64 {
    if w * t.abs() < 1e-8 {
        t
    } else {
        (w * t).sin() / w
    }
}

/// Exact two-level propagator for `d`; see [`BlochHamiltonian::propagator`].
pub fn su2_propagator(d: &BlochHamiltonian, t: f64) -> CMatrix {
    d.propagator(t)
}

/// Interaction-picture Hamiltonian of a detuned two-level atom:
/// `d = (Omega, 0, Delta/2)` with the discarded offset `Delta/2` recorded.
pub fn interaction_hamiltonian(coupling: f64, detuning: f64) -> BlochHamiltonian {
    BlochHamiltonian::new(coupling, 0.0, detuning / 2.0).with_offset(detuning / 2.0)
}

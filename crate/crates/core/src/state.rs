//! Pure and mixed states over a small labelled basis.

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, c, hermiticity_error, outer, trace, CMatrix, CVector, HermitianEigen,
};

/// Tolerance on normalisation and positivity of constructed states.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum QuantumState {
    Pure {
        amplitudes: CVector,
        labels: Vec<String>,
    },
    Mixed {
        rho: CMatrix,
        labels: Vec<String>,
    },
}

/// Default labels `"0", "1", ..., "n-1"`.
pub fn level_labels(n: usize) -> Vec<String> {
    (0..n).map(|k| k.to_string()).collect()
}

impl QuantumState {
    /// Normalised pure state; fails if `sum |c_i|^2` is off by more than 1e-10.
    pub fn pure(amplitudes: CVector, labels: Vec<String>) -> Result<Self> {
        check_labels(amplitudes.len(), &labels)?;
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("pure state norm^2 = {norm2}")));
        }
        Ok(Self::Pure { amplitudes, labels })
    }

    /// Pure state with default numeric labels.
    pub fn from_amplitudes(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.len();
        Self::pure(amplitudes, level_labels(n))
    }

    /// Basis state `|k>` in dimension `n`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index {k} out of range for dimension {n}");
        Self::Pure {
            amplitudes: basis_vector(n, k),
            labels: level_labels(n),
        }
    }

    /// Density matrix; fails unless Hermitian, unit-trace and positive
    /// semidefinite (eigenvalues >= -1e-10).
    pub fn mixed(rho: CMatrix, labels: Vec<String>) -> Result<Self> {
        check_labels(rho.nrows(), &labels)?;
        if !rho.is_square() {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                got: rho.ncols(),
            });
        }
        let herm = hermiticity_error(&rho);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian ({herm:.2e})"
            )));
        }
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix trace = {tr}")));
        }
        let min_eig = min_eigenvalue(&rho)?;
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self::Mixed { rho, labels })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure { amplitudes, .. } => amplitudes.len(),
            Self::Mixed { rho, .. } => rho.nrows(),
        }
    }

    pub fn labels(&self) -> &[String] {
        match self {
            Self::Pure { labels, .. } | Self::Mixed { labels, .. } => labels,
        }
    }

    pub fn with_labels(self, labels: Vec<String>) -> Result<Self> {
        check_labels(self.dim(), &labels)?;
        Ok(match self {
            Self::Pure { amplitudes, .. } => Self::Pure { amplitudes, labels },
            Self::Mixed { rho, .. } => Self::Mixed { rho, labels },
        })
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure { .. })
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match self {
            Self::Pure { amplitudes, .. } => Some(amplitudes),
            Self::Mixed { .. } => None,
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match self {
            Self::Pure { amplitudes, .. } => outer(amplitudes, amplitudes),
            Self::Mixed { rho, .. } => rho.clone(),
        }
    }

    /// Diagonal populations in basis order.
    pub fn populations(&self) -> Vec<f64> {
        match self {
            Self::Pure { amplitudes, .. } => amplitudes.iter().map(|a| a.norm_sqr()).collect(),
            Self::Mixed { rho, .. } => rho.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    /// `<target| rho |target>` for a normalised pure target.
    pub fn fidelity_with(&self, target: &CVector) -> f64 {
        match self {
            Self::Pure { amplitudes, .. } => target.dotc(amplitudes).norm_sqr(),
            Self::Mixed { rho, .. } => target.dotc(&(rho * target)).re,
        }
    }
}

fn check_labels(n: usize, labels: &[String]) -> Result<()> {
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(rho: &CMatrix) -> Result<f64> {
    let eig = HermitianEigen::new(&crate::linalg::symmetrize(rho))?;
    Ok(eig.values.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Maximally mixed state `I/n`.
pub fn maximally_mixed(n: usize) -> QuantumState {
    QuantumState::Mixed {
        rho: CMatrix::identity(n, n) * c(1.0 / n as f64, 0.0),
        labels: level_labels(n),
    }
}

//! Small dense complex linear algebra.
//!
//! Everything here works on `nalgebra` dynamic matrices; dimensions in this
//! crate stay below a few hundred, where dense eigendecomposition is exact and
//! cheap.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance for the Hermiticity of Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `U^dagger U - I` for propagators.
pub const UNITARY_TOL: f64 = 1e-10;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Real matrix lifted to complex entries.
pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(
        rows,
        cols,
        &data.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
    )
}

/// Outer product `|a><b|`.
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// Unit vector `|k>` in dimension `n`.
pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = c(1.0, 0.0);
    v
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len(), "max_abs_diff_vec: length mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |M - M^dagger|`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// `max |U^dagger U - I|`.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn is_hermitian(m: &CMatrix) -> bool {
    m.is_square() && hermiticity_error(m) <= HERMITIAN_TOL * max_abs(m).max(1.0)
}

pub fn is_unitary(u: &CMatrix) -> bool {
    u.is_square() && unitarity_error(u) <= UNITARY_TOL
}

/// `(M + M^dagger) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigendecomposition `H = V diag(E) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                got: h.ncols(),
            });
        }
        if !is_hermitian(h) {
            return Err(Error::NonHermitianInput(hermiticity_error(h)));
        }
        let eig = SymmetricEigen::new(symmetrize(h));
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let phases = self.values.map(|e| (-I * e * t).exp());
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i H t) psi` for every column of `psi`, without forming the propagator.
    pub fn apply(&self, t: f64, psi: &CMatrix) -> CMatrix {
        let mut coeffs = self.vectors.adjoint() * psi;
        for (j, mut row) in coeffs.row_iter_mut().enumerate() {
            row *= (-I * self.values[j] * t).exp();
        }
        &self.vectors * coeffs
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }
}

/// `exp(-i H t)` for Hermitian `H` via eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(HermitianEigen::new(h)?.propagator(t))
}

/// Largest eigenvalue magnitude of a Hermitian matrix; used by the step rule.
pub fn spectral_radius(h: &CMatrix) -> Result<f64> {
    Ok(HermitianEigen::new(h)?.spectral_radius())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = expm_hermitian(&CMatrix::zeros(3, 3), 2.5).unwrap();
        assert!(max_abs_diff(&u, &identity(3)) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = pauli_x();
        h[(0, 1)] = c(2.0, 0.0);
        assert!(matches!(
            expm_hermitian(&h, 1.0),
            Err(Error::NonHermitianInput(_))
        ));
    }

    #[test]
    fn pauli_x_rotation() {
        // exp(-i sx pi/2) = -i sx
        let u = expm_hermitian(&pauli_x(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected = pauli_x() * c(0.0, -1.0);
        assert!(max_abs_diff(&u, &expected) < 1e-14);
    }

    #[test]
    fn pauli_algebra() {
        let xy = pauli_x() * pauli_y();
        assert!(max_abs_diff(&xy, &(pauli_z() * I)) < 1e-15);
        assert!(is_hermitian(&pauli_y()));
    }
}

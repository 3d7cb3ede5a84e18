//! Piecewise-constant two-level drives with exact propagation.

use crate::bloch::BlochHamiltonian;
use crate::error::{Error, Result};
use crate::integrate::{Hamiltonian, Span};
use crate::linalg::{CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub duration: f64,
    pub d: BlochHamiltonian,
}

impl Piece {
    pub fn new(duration: f64, d: BlochHamiltonian) -> Self {
        Self { duration, d }
    }
}

/// Sequence of constant pieces, either repeated forever or played once.
#[derive(Debug, Clone)]
pub struct PiecewiseSchedule {
    pieces: Vec<Piece>,
    starts: Vec<f64>,
    total: f64,
    periodic: bool,
}

impl PiecewiseSchedule {
    pub fn periodic(pieces: Vec<Piece>) -> Result<Self> {
        Self::build(pieces, true)
    }

    /// Plays the pieces once; sampling beyond the end is an error.
    pub fn once(pieces: Vec<Piece>) -> Result<Self> {
        Self::build(pieces, false)
    }

    fn build(pieces: Vec<Piece>, periodic: bool) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid(
                "pieces",
                "schedule needs at least one piece",
            ));
        }
        if let Some(p) = pieces
            .iter()
            .find(|p| !(p.duration > 0.0) || !p.duration.is_finite())
        {
            return Err(Error::invalid(
                "duration",
                format!("piece duration must be positive, got {}", p.duration),
            ));
        }
        let mut starts = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for p in &pieces {
            starts.push(acc);
            acc += p.duration;
        }
        Ok(Self {
            pieces,
            starts,
            total: acc,
            periodic,
        })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Period for periodic schedules, total length otherwise.
    pub fn duration(&self) -> f64 {
        self.total
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Absolute start time and content of the `idx`-th piece.
    fn piece(&self, idx: usize) -> Option<(f64, &Piece)> {
        let n = self.pieces.len();
        if !self.periodic && idx >= n {
            return None;
        }
        let (k, j) = (idx / n, idx % n);
        Some((k as f64 * self.total + self.starts[j], &self.pieces[j]))
    }

    /// Piece active at time `t`.
    pub fn piece_at(&self, t: f64) -> &Piece {
        let tau = if self.periodic {
            t.rem_euclid(self.total)
        } else {
            t.clamp(0.0, self.total)
        };
        let j = self.starts.partition_point(|&s| s <= tau).saturating_sub(1);
        &self.pieces[j]
    }

    /// One pass through all pieces, `U_n ... U_1`.
    pub fn cycle_unitary(&self) -> CMatrix {
        self.pieces.iter().fold(CMatrix::identity(2, 2), |u, p| {
            p.d.propagator(p.duration) * u
        })
    }

    /// Exact states at the requested (non-decreasing, non-negative) times.
    pub fn evolve(&self, psi0: &CVector, samples: &[f64]) -> Result<Vec<CVector>> {
        if psi0.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: psi0.len(),
            });
        }
        let mut out = Vec::with_capacity(samples.len());
        let mut psi = psi0.clone();
        let mut t = 0.0;
        let mut idx = 0;
        for &s in samples {
            if s < t - 1e-12 {
                return Err(Error::invalid(
                    "samples",
                    "sample times must be non-decreasing and >= 0",
                ));
            }
            loop {
                let Some((start, piece)) = self.piece(idx) else {
                    if s > self.total * (1.0 + 1e-12) {
                        return Err(Error::invalid(
                            "t",
                            format!("time {s} beyond schedule end {}", self.total),
                        ));
                    }
                    break;
                };
                let end = start + piece.duration;
                if s < end
                    || (!self.periodic && idx + 1 == self.pieces.len() && s <= end * (1.0 + 1e-12))
                {
                    if s > t {
                        psi = piece.d.propagator(s - t) * psi;
                        t = s;
                    }
                    break;
                }
                psi = piece.d.propagator(end - t) * psi;
                t = end;
                idx += 1;
            }
            out.push(psi.clone());
        }
        Ok(out)
    }

    /// `U(t, 0)` by walking the pieces.
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        let e0 = self.evolve(&crate::linalg::basis_vector(2, 0), &[t])?;
        let e1 = self.evolve(&crate::linalg::basis_vector(2, 1), &[t])?;
        Ok(CMatrix::from_columns(&[e0[0].clone(), e1[0].clone()]))
    }
}

impl Hamiltonian for PiecewiseSchedule {
    fn dim(&self) -> usize {
        2
    }

    fn fill(&self, _t: f64, span: Span, out: &mut CMatrix) {
        out.copy_from(&self.piece_at(span.mid()).d.traceless_matrix());
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut idx = 0;
        while let Some((start, _)) = self.piece(idx) {
            if start >= t1 {
                break;
            }
            if start > t0 {
                out.push(start);
            }
            idx += 1;
        }
        out
    }
}

//! Quantum Rabi model `H = wb a^dag a + w0/2 sz + W sx (a^dag + a)` in a
//! truncated Fock basis `|g,0>, |e,0>, |g,1>, |e,1>, ...`, index `2n + atom`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::multilevel::modulated::TwoSegmentDrive;
use crate::trajectory::{SeriesKind, Trajectory};
use crate::two_level::SquareWellDrive;

/// Largest discarded coherent-state probability.
pub const DEFICIT_TOL: f64 = 1e-6;
/// Largest probability tolerated in the top Fock level during a run.
pub const LEAK_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// `2 n_max + 1` states, ending at `|g, n_max>`.
    #[default]
    PaperListing,
    /// `2 (n_max + 1)` states, ending at `|e, n_max>`.
    Full,
}

/// Matrix element between `|f,n>` and `|f',n+1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhotonCoupling {
    /// `W` on every photon step, as in the explicit matrix listing.
    #[default]
    Uniform,
    /// `W sqrt(n+1)`, the operator `a^dag + a`.
    SqrtN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CouplingSchedule {
    Constant {
        omega: f64,
    },
    /// Intensity square well, segment durations from the two-level rule on
    /// `d_j = (W_j, 0, Delta/2)`.
    SquareWell {
        omega1: f64,
        omega2: f64,
        m: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiSystem {
    pub omega0: f64,
    pub omega_b: f64,
    pub coupling: CouplingSchedule,
    pub n_max: usize,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub photon_coupling: PhotonCoupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Atom {
    G,
    E,
}

impl RabiSystem {
    pub fn new(
        omega0: f64,
        omega_b: f64,
        coupling: CouplingSchedule,
        n_max: usize,
    ) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "need at least one photon level"));
        }
        for (name, v) in [("omega0", omega0), ("omega_b", omega_b)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(Self {
            omega0,
            omega_b,
            coupling,
            n_max,
            truncation: Truncation::PaperListing,
            photon_coupling: PhotonCoupling::Uniform,
        })
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_photon_coupling(mut self, coupling: PhotonCoupling) -> Self {
        self.photon_coupling = coupling;
        self
    }

    /// `Delta = wb - w0`.
    pub fn detuning(&self) -> f64 {
        self.omega_b - self.omega0
    }

    pub fn dim(&self) -> usize {
        match self.truncation {
            Truncation::PaperListing => 2 * self.n_max + 1,
            Truncation::Full => 2 * (self.n_max + 1),
        }
    }

    /// Segment couplings and durations; a constant drive is one segment
    /// repeated.
    fn segments(&self) -> Result<[(f64, f64); 2]> {
        match self.coupling {
            CouplingSchedule::Constant { omega } => Ok([(omega, 1.0), (omega, 1.0)]),
            CouplingSchedule::SquareWell { omega1, omega2, m } => {
                let drive = SquareWellDrive::intensity(omega1, omega2, self.detuning(), m)?;
                Ok([(omega1, drive.t1()), (omega2, drive.t2())])
            }
        }
    }
}

pub fn build_rabi_hamiltonian(sys: &RabiSystem, omega: f64) -> CMatrix {
    let dim = sys.dim();
    let mut h = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let (n, atom) = (k / 2, k % 2);
        let sz = if atom == 0 { -0.5 } else { 0.5 };
        h[(k, k)] = c(sz * sys.omega0 + n as f64 * sys.omega_b, 0.0);
        // |f,n> <-> |f',n+1>
        let j = 2 * (n + 1) + (1 - atom);
        if j < dim {
            let w = match sys.photon_coupling {
                PhotonCoupling::Uniform => omega,
                PhotonCoupling::SqrtN => omega * ((n + 1) as f64).sqrt(),
            };
            h[(k, j)] = c(w, 0.0);
            h[(j, k)] = c(w, 0.0);
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Coherent,
    Random,
    Custom,
}

/// Field state on photon numbers `0..=n_max`: a diagonal mixture, or a pure
/// state when `amplitudes` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub kind: FieldKind,
    pub probabilities: Vec<f64>,
    pub amplitudes: Option<Vec<f64>>,
    /// Probability discarded by the truncation before renormalisation.
    pub deficit: f64,
}

impl FieldState {
    pub fn n_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn custom(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() || probabilities.iter().any(|p| !(*p >= 0.0) || !p.is_finite())
        {
            return Err(Error::invalid(
                "probabilities",
                "need non-negative finite values",
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::invalid("probabilities", "sum must be positive"));
        }
        Ok(Self {
            kind: FieldKind::Custom,
            probabilities: probabilities.iter().map(|p| p / sum).collect(),
            amplitudes: None,
            deficit: 0.0,
        })
    }
}

fn poisson(mean: f64, n_max: usize) -> Result<(Vec<f64>, f64)> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::invalid(
            "mean_photons",
            format!("must be >= 0, got {mean}"),
        ));
    }
    if mean == 0.0 {
        let mut p = vec![0.0; n_max + 1];
        p[0] = 1.0;
        return Ok((p, 0.0));
    }
    let term = |n: usize| {
        let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        (n as f64 * mean.ln() - mean - ln_fact).exp()
    };
    let p: Vec<f64> = (0..=n_max).map(term).collect();
    // tail summed directly; 1 - sum(p) would cancel
    let mut deficit = 0.0;
    let mut n = n_max + 1;
    loop {
        let t = term(n);
        deficit += t;
        if (n as f64 > mean && t < 1e-18 * deficit.max(1e-300)) || n > n_max + 10_000 {
            break;
        }
        n += 1;
    }
    Ok((p, deficit))
}

/// Poisson photon numbers `<n>^n e^{-<n>} / n!` as a diagonal mixture.
pub fn coherent_field(mean: f64, n_max: usize) -> Result<FieldState> {
    let (p, deficit) = poisson(mean, n_max)?;
    if deficit > DEFICIT_TOL {
        return Err(Error::TruncationTooTight(deficit));
    }
    let sum: f64 = p.iter().sum();
    Ok(FieldState {
        kind: FieldKind::Coherent,
        probabilities: p.iter().map(|x| x / sum).collect(),
        amplitudes: None,
        deficit,
    })
}

/// True coherent state with real amplitudes `sqrt(p_n)`.
pub fn coherent_pure_field(mean: f64, n_max: usize) -> Result<FieldState> {
    let mut f = coherent_field(mean, n_max)?;
    f.amplitudes = Some(f.probabilities.iter().map(|p| p.sqrt()).collect());
    Ok(f)
}

/// `p_n` uniform in `[0, 1]`, normalised.
pub fn random_field(seed: u64, n_max: usize) -> FieldState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..=n_max).map(|_| rng.random_range(0.0..=1.0)).collect();
    let mut f = FieldState::custom(raw).expect("uniform draws are non-negative");
    f.kind = FieldKind::Random;
    f
}

fn check_composite(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: dim,
        });
    }
    Ok(())
}

/// Field partial trace of the diagonal: `p_n = <g,n|rho|g,n> + <e,n|rho|e,n>`.
pub fn photon_distribution(rho: &CMatrix) -> Result<Vec<f64>> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: rho.ncols(),
        });
    }
    check_composite(rho.nrows())?;
    let mut p = vec![0.0; rho.nrows().div_ceil(2)];
    for k in 0..rho.nrows() {
        p[k / 2] += rho[(k, k)].re;
    }
    Ok(p)
}

/// Atomic partial trace: `(P_g, P_e)`.
pub fn atom_populations(rho: &CMatrix) -> Result<(f64, f64)> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: rho.ncols(),
        });
    }
    check_composite(rho.nrows())?;
    let mut pops = (0.0, 0.0);
    for k in 0..rho.nrows() {
        if k % 2 == 0 {
            pops.0 += rho[(k, k)].re;
        } else {
            pops.1 += rho[(k, k)].re;
        }
    }
    Ok(pops)
}

/// `rho_atom (x) rho_field` for a diagonal field.
pub fn product_state(sys: &RabiSystem, field: &FieldState, atom: Atom) -> Result<CMatrix> {
    let (weights, cols) = ensemble(sys, field, atom)?;
    let mut rho = CMatrix::zeros(sys.dim(), sys.dim());
    for (w, col) in weights.iter().zip(cols.column_iter()) {
        rho += col * col.adjoint() * c(*w, 0.0);
    }
    Ok(rho)
}

/// Pure components and weights of the initial state.
fn ensemble(sys: &RabiSystem, field: &FieldState, atom: Atom) -> Result<(Vec<f64>, CMatrix)> {
    if field.n_max() != sys.n_max {
        return Err(Error::DimensionMismatch {
            expected: sys.n_max + 1,
            got: field.probabilities.len(),
        });
    }
    let a = match atom {
        Atom::G => 0,
        Atom::E => 1,
    };
    let dim = sys.dim();
    if let Some(amps) = &field.amplitudes {
        let mut v = CVector::zeros(dim);
        for (n, x) in amps.iter().enumerate() {
            let k = 2 * n + a;
            if k < dim {
                v[k] = c(*x, 0.0);
            } else if *x != 0.0 {
                return Err(Error::TruncationTooTight(x * x));
            }
        }
        let norm = v.norm();
        return Ok((vec![1.0], CMatrix::from_columns(&[v / c(norm, 0.0)])));
    }
    let mut weights = Vec::new();
    let mut cols = Vec::new();
    for (n, p) in field.probabilities.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let k = 2 * n + a;
        if k >= dim {
            return Err(Error::TruncationTooTight(*p));
        }
        weights.push(*p);
        cols.push(crate::linalg::basis_vector(dim, k));
    }
    Ok((weights, CMatrix::from_columns(&cols)))
}

/// Output of `rabi_evolution`.
#[derive(Debug, Clone)]
pub struct RabiRun {
    /// `P_g`, `P_e` and the photon probabilities `p_0..p_nmax`.
    pub trajectory: Trajectory,
    pub photons: Vec<Vec<f64>>,
    pub max_leak: f64,
    pub max_trace_drift: f64,
}

pub fn photon_series_name(n: usize) -> String {
    format!("p_n{n}")
}

/// Exact Liouville evolution of `rho_atom (x) rho_field` under a constant
/// or square-well coupling.
pub fn rabi_evolution(
    sys: &RabiSystem,
    field: &FieldState,
    atom0: Atom,
    t_max: f64,
    samples: usize,
) -> Result<RabiRun> {
    if !(t_max > 0.0) || samples < 2 {
        return Err(Error::invalid(
            "time",
            "need t_max > 0 and at least 2 samples",
        ));
    }
    let times: Vec<f64> = (0..samples)
        .map(|k| t_max * k as f64 / (samples - 1) as f64)
        .collect();
    let [(w1, t1), (w2, t2)] = sys.segments()?;
    let drive = TwoSegmentDrive::new(
        build_rabi_hamiltonian(sys, w1),
        build_rabi_hamiltonian(sys, w2),
        t1,
        t2,
    )?;
    let (weights, cols) = ensemble(sys, field, atom0)?;
    let states = drive.evolve_columns(&cols, &times)?;
    let dim = sys.dim();
    let levels = sys.n_max + 1;
    let mut pg = Vec::with_capacity(samples);
    let mut pe = Vec::with_capacity(samples);
    let mut photons = Vec::with_capacity(samples);
    let mut max_leak: f64 = 0.0;
    let mut max_trace_drift: f64 = 0.0;
    for psi in &states {
        let mut p = vec![0.0; levels];
        let (mut g, mut e) = (0.0, 0.0);
        for (j, w) in weights.iter().enumerate() {
            for k in 0..dim {
                let x = w * psi[(k, j)].norm_sqr();
                p[k / 2] += x;
                if k % 2 == 0 {
                    g += x;
                } else {
                    e += x;
                }
            }
        }
        max_leak = max_leak.max(p[sys.n_max]);
        max_trace_drift = max_trace_drift.max((g + e - 1.0).abs());
        pg.push(g);
        pe.push(e);
        photons.push(p);
    }
    let initial_top = photons[0][sys.n_max];
    if max_leak > LEAK_TOL.max(initial_top) {
        return Err(Error::TruncationLeak(max_leak));
    }
    if max_trace_drift > 1e-8 {
        return Err(Error::StepTooLarge {
            quantity: "trace",
            drift: max_trace_drift,
        });
    }
    let mut tr = Trajectory::new(times);
    tr.push("P_g", SeriesKind::Population, pg);
    tr.push("P_e", SeriesKind::Population, pe);
    for n in 0..levels {
        tr.push(
            photon_series_name(n),
            SeriesKind::Probability,
            photons.iter().map(|p| p[n]).collect(),
        );
    }
    tr.meta.method = Some("eigen".into());
    tr.meta.diagnostics.insert("max_leak".into(), max_leak);
    tr.meta
        .diagnostics
        .insert("max_trace_drift".into(), max_trace_drift);
    tr.meta
        .diagnostics
        .insert("field_deficit".into(), field.deficit);
    if let CouplingSchedule::SquareWell { .. } = sys.coupling {
        tr.meta.diagnostics.insert("t1".into(), t1);
        tr.meta.diagnostics.insert("t2".into(), t2);
    }
    Ok(RabiRun {
        trajectory: tr,
        photons,
        max_leak,
        max_trace_drift,
    })
}

/// Total-variation distance `sum |p - q| / 2`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

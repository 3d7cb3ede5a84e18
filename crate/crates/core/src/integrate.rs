//! Fixed-step RK4 integration of the Schrodinger and Liouville equations.
//!
//! Steps are aligned to drive breakpoints so piecewise-constant Hamiltonians
//! are never sampled across a discontinuity.

use crate::error::{Error, Result};
use crate::linalg::{c, symmetrize, trace, CMatrix, CVector, I};
use crate::state::QuantumState;
use crate::trajectory::{population_name, SeriesKind, Trajectory};

/// Default step rule: `h * ||H|| <= 1e-2`.
pub const STEP_RULE: f64 = 1e-2;
/// Step rule used by reference integrations in tests.
pub const ORACLE_STEP_RULE: f64 = 1e-3;
/// Allowed drift of the norm (pure) or trace (mixed) before `StepTooLarge`.
pub const DRIFT_TOL: f64 = 1e-6;

/// Open time interval covered by one integrator step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub start: f64,
    pub end: f64,
}

impl Span {
    pub fn mid(&self) -> f64 {
        0.5 * (self.start + self.end)
    }
}

/// Time-dependent Hamiltonian.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;

    /// Writes `H(t)` into `out`. `span` is the step containing `t`; piecewise
    /// drives use its midpoint to pick the active segment at the edges.
    fn fill(&self, t: f64, span: Span, out: &mut CMatrix);

    /// Discontinuities of `H` inside `(t0, t1)`.
    fn breakpoints(&self, _t0: f64, _t1: f64) -> Vec<f64> {
        Vec::new()
    }

    fn matrix_at(&self, t: f64) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        self.fill(t, Span { start: t, end: t }, &mut out);
        out
    }
}

pub struct ConstantHamiltonian(pub CMatrix);

impl Hamiltonian for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn fill(&self, _t: f64, _span: Span, out: &mut CMatrix) {
        out.copy_from(&self.0);
    }
}

/// Hamiltonian given by a closure, continuous in time.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> CMatrix + Sync> FnHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Sync> Hamiltonian for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn fill(&self, t: f64, _span: Span, out: &mut CMatrix) {
        out.copy_from(&(self.f)(t));
    }
}

/// Output sample times plus the largest allowed integrator step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    samples: Vec<f64>,
    max_step: f64,
}

impl TimeGrid {
    /// `samples` equally spaced points on `[0, t_max]`.
    pub fn uniform(t_max: f64, samples: usize, max_step: f64) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::invalid(
                "t_max",
                format!("must be positive and finite, got {t_max}"),
            ));
        }
        if samples < 2 {
            return Err(Error::invalid("samples", "need at least 2 samples"));
        }
        let times = (0..samples)
            .map(|k| t_max * k as f64 / (samples - 1) as f64)
            .collect();
        Self::from_samples(times, max_step)
    }

    pub fn from_samples(samples: Vec<f64>, max_step: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("samples", "empty sample list"));
        }
        if samples.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "samples",
                "sample times must be strictly increasing",
            ));
        }
        if !(max_step > 0.0) || !max_step.is_finite() {
            return Err(Error::invalid(
                "max_step",
                format!("must be positive, got {max_step}"),
            ));
        }
        Ok(Self { samples, max_step })
    }

    /// Step from the rule `h * radius <= rule`, capped by `cap`.
    pub fn step_for(radius: f64, rule: f64, cap: f64) -> f64 {
        if radius > 0.0 {
            (rule / radius).min(cap)
        } else {
            cap
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    pub fn t_end(&self) -> f64 {
        *self.samples.last().unwrap()
    }

    /// Same samples with half the step, for Richardson-style checks.
    pub fn halved(&self) -> Self {
        Self {
            samples: self.samples.clone(),
            max_step: self.max_step / 2.0,
        }
    }

    /// Integration nodes between consecutive samples, including breakpoints.
    /// Returns, for every sample after the first, the list of steps leading up
    /// to it.
    fn steps(&self, breakpoints: &[f64]) -> Vec<Vec<Span>> {
        let mut bps: Vec<f64> = breakpoints.to_vec();
        bps.sort_by(f64::total_cmp);
        let mut out = Vec::with_capacity(self.samples.len().saturating_sub(1));
        let mut b = 0;
        for w in self.samples.windows(2) {
            let (a, z) = (w[0], w[1]);
            while b < bps.len() && bps[b] <= a {
                b += 1;
            }
            let mut nodes = vec![a];
            while b < bps.len() && bps[b] < z {
                if bps[b] - nodes.last().unwrap() > 1e-13 {
                    nodes.push(bps[b]);
                }
                b += 1;
            }
            if z - nodes.last().unwrap() > 1e-13 || nodes.len() == 1 {
                nodes.push(z);
            } else {
                *nodes.last_mut().unwrap() = z;
            }
            let mut spans = Vec::new();
            for seg in nodes.windows(2) {
                let len = seg[1] - seg[0];
                let n = (len / self.max_step).ceil().max(1.0) as usize;
                let h = len / n as f64;
                for k in 0..n {
                    let start = seg[0] + k as f64 * h;
                    let end = if k + 1 == n { seg[1] } else { start + h };
                    spans.push(Span { start, end });
                }
            }
            out.push(spans);
        }
        out
    }
}

/// Result of a pure-state integration.
#[derive(Debug, Clone)]
pub struct StateHistory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    pub max_norm_drift: f64,
    pub step: f64,
}

/// `psi' = -i H psi` with classical RK4. No renormalisation is applied; a norm
/// drift above [`DRIFT_TOL`] is reported as `StepTooLarge`.
pub fn evolve_pure<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &CVector,
    grid: &TimeGrid,
) -> Result<StateHistory> {
    let n = h.dim();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: psi0.len(),
        });
    }
    let t0 = grid.samples[0];
    let steps = grid.steps(&h.breakpoints(t0, grid.t_end()));
    let norm0 = psi0.norm_squared();
    let mut psi = psi0.clone();
    let mut states = vec![psi.clone()];
    let mut drift: f64 = 0.0;
    let mut ha = CMatrix::zeros(n, n);
    let mut hm = CMatrix::zeros(n, n);
    let mut hb = CMatrix::zeros(n, n);
    let minus_i = -I;
    for spans in &steps {
        for span in spans {
            let dt = span.end - span.start;
            h.fill(span.start, *span, &mut ha);
            h.fill(span.mid(), *span, &mut hm);
            h.fill(span.end, *span, &mut hb);
            let k1 = &ha * &psi * minus_i;
            let y = &psi + &k1 * c(dt / 2.0, 0.0);
            let k2 = &hm * &y * minus_i;
            let y = &psi + &k2 * c(dt / 2.0, 0.0);
            let k3 = &hm * &y * minus_i;
            let y = &psi + &k3 * c(dt, 0.0);
            let k4 = &hb * &y * minus_i;
            psi += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
        }
        let d = (psi.norm_squared() - norm0).abs();
        drift = drift.max(d);
        if !d.is_finite() {
            return Err(Error::IntegrationFailure("state became non-finite".into()));
        }
        if d > DRIFT_TOL {
            return Err(Error::StepTooLarge {
                quantity: "norm",
                drift: d,
            });
        }
        states.push(psi.clone());
    }
    Ok(StateHistory {
        times: grid.samples.clone(),
        states,
        max_norm_drift: drift,
        step: grid.max_step,
    })
}

/// RK4 propagator `U(t1, t0)` obtained by integrating the identity; reference
/// for closed-form products.
pub fn rk4_unitary<H: Hamiltonian + ?Sized>(
    h: &H,
    t0: f64,
    t1: f64,
    max_step: f64,
) -> Result<CMatrix> {
    let n = h.dim();
    let grid = TimeGrid::from_samples(vec![t0, t1], max_step)?;
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let e = crate::linalg::basis_vector(n, k);
        let hist = evolve_pure(h, &e, &grid)?;
        cols.push(hist.states.last().unwrap().clone());
    }
    Ok(CMatrix::from_columns(&cols))
}

/// Right-hand side `d rho / dt` of a (possibly dissipative) master equation.
pub trait Generator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, t: f64, span: Span, rho: &CMatrix) -> CMatrix;
    fn breakpoints(&self, _t0: f64, _t1: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Closed dynamics `-i [H, rho]`.
pub struct VonNeumann<'a, H: ?Sized>(pub &'a H);

impl<H: Hamiltonian + ?Sized> Generator for VonNeumann<'_, H> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, t: f64, span: Span, rho: &CMatrix) -> CMatrix {
        let mut hm = CMatrix::zeros(self.dim(), self.dim());
        self.0.fill(t, span, &mut hm);
        (&hm * rho - rho * &hm) * (-I)
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.0.breakpoints(t0, t1)
    }
}

#[derive(Debug, Clone)]
pub struct DensityHistory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    pub max_trace_drift: f64,
    pub step: f64,
}

/// RK4 for `rho' = L(t) rho`. The state is re-Hermitised after every step
/// (round-off only); trace drift above [`DRIFT_TOL`] is `StepTooLarge`.
pub fn evolve_density<G: Generator + ?Sized>(
    g: &G,
    rho0: &CMatrix,
    grid: &TimeGrid,
) -> Result<DensityHistory> {
    let n = g.dim();
    if rho0.nrows() != n || rho0.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rho0.nrows(),
        });
    }
    let t0 = grid.samples[0];
    let steps = grid.steps(&g.breakpoints(t0, grid.t_end()));
    let tr0 = trace(rho0).re;
    let mut rho = rho0.clone();
    let mut states = vec![rho.clone()];
    let mut drift: f64 = 0.0;
    for spans in &steps {
        for span in spans {
            let dt = span.end - span.start;
            let half = c(dt / 2.0, 0.0);
            let k1 = g.apply(span.start, *span, &rho);
            let k2 = g.apply(span.mid(), *span, &(&rho + &k1 * half));
            let k3 = g.apply(span.mid(), *span, &(&rho + &k2 * half));
            let k4 = g.apply(span.end, *span, &(&rho + &k3 * c(dt, 0.0)));
            rho += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(dt / 6.0, 0.0);
            rho = symmetrize(&rho);
        }
        let d = (trace(&rho).re - tr0).abs();
        if !d.is_finite() {
            return Err(Error::IntegrationFailure(
                "density matrix became non-finite".into(),
            ));
        }
        drift = drift.max(d);
        if d > DRIFT_TOL {
            return Err(Error::StepTooLarge {
                quantity: "trace",
                drift: d,
            });
        }
        states.push(rho.clone());
    }
    Ok(DensityHistory {
        times: grid.samples.clone(),
        states,
        max_trace_drift: drift,
        step: grid.max_step,
    })
}

/// Populations of every basis label as a trajectory.
pub fn population_trajectory(times: &[f64], pops: &[Vec<f64>], labels: &[String]) -> Trajectory {
    let mut tr = Trajectory::new(times.to_vec());
    for (k, label) in labels.iter().enumerate() {
        tr.push(
            population_name(label),
            SeriesKind::Population,
            pops.iter().map(|p| p[k]).collect(),
        );
    }
    tr
}

/// Integrates any initial state and returns its population trajectory.
pub fn integrate<H: Hamiltonian + ?Sized>(
    h: &H,
    state: &QuantumState,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let (pops, drift, method) = match state {
        QuantumState::Pure { amplitudes, .. } => {
            let hist = evolve_pure(h, amplitudes, grid)?;
            let pops: Vec<Vec<f64>> = hist
                .states
                .iter()
                .map(|v| v.iter().map(|a| a.norm_sqr()).collect())
                .collect();
            (pops, hist.max_norm_drift, "rk4_schrodinger")
        }
        QuantumState::Mixed { rho, .. } => {
            let hist = evolve_density(&VonNeumann(h), rho, grid)?;
            let pops: Vec<Vec<f64>> = hist
                .states
                .iter()
                .map(|r| r.diagonal().iter().map(|z| z.re).collect())
                .collect();
            (pops, hist.max_trace_drift, "rk4_liouville")
        }
    };
    let mut tr = population_trajectory(&grid.samples, &pops, state.labels());
    tr.meta.step = Some(grid.max_step);
    tr.meta.method = Some(method.into());
    tr.meta.diagnostics.insert("max_norm_drift".into(), drift);
    Ok(tr)
}

/// Propagates a state through a list of exact propagators, sampled at the
/// given indices. Used by closed-form paths.
pub fn apply_all(us: &[CMatrix], psi0: &CVector) -> Vec<CVector> {
    let mut out = Vec::with_capacity(us.len() + 1);
    let mut psi = psi0.clone();
    out.push(psi.clone());
    for u in us {
        psi = u * psi;
        out.push(psi.clone());
    }
    out
}

/// `exp(-i H t) psi` for a time-independent Hermitian `H`.
pub fn constant_step(h: &CMatrix, t: f64, psi: &CVector) -> Result<CVector> {
    Ok(crate::linalg::expm_hermitian(h, t)? * psi)
}

//! Grid scans over drive parameters: transfer times, selectivity surfaces and
//! Gaussian `(A, xi)` searches.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::interaction_hamiltonian;
use crate::error::{Error, Result};
use crate::linalg::basis_vector;
use crate::two_level::gaussian::{GaussianPulse, GaussianTrain, GAUSSIAN_STEP_RULE};
use crate::two_level::{
    inversion_time, minimal_time_first_order, pulses_for_inversion, Piece, PiecewiseSchedule,
    SquareWellDrive,
};

/// `|Q'|` below which a Gaussian train counts as a clean rotation.
pub const Q_PRIME_TOL: f64 = 1e-3;
/// Step rule while screening grid cells; candidates are recomputed at
/// `GAUSSIAN_STEP_RULE`.
pub const SEARCH_STEP_RULE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl AxisRange {
    pub fn linear(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::invalid(
                "points",
                format!("need at least 2, got {}", self.points),
            ));
        }
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::invalid(
                "range",
                format!("need lo < hi, got {}..{}", self.lo, self.hi),
            ));
        }
        let n = (self.points - 1) as f64;
        Ok(match self.spacing {
            Spacing::Linear => (0..self.points)
                .map(|k| self.lo + (self.hi - self.lo) * k as f64 / n)
                .collect(),
            Spacing::Log => {
                if !(self.lo > 0.0) {
                    return Err(Error::invalid("range", "log spacing needs lo > 0"));
                }
                let (a, b) = (self.lo.ln(), self.hi.ln());
                (0..self.points)
                    .map(|k| (a + (b - a) * k as f64 / n).exp())
                    .collect()
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Parameters `omega1`, `omega2`, `delta`.
    Intensity,
    /// Parameters `omega`, `delta1`, `delta2`.
    Frequency,
    /// Parameters `amplitude`, `width`, `delta`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    ExactTime,
    FirstOrderTime,
    /// `P_1` at the fixed parameter `t`, or at the exact inversion time.
    FinalPopulation,
    #[serde(rename = "abs_Q_prime")]
    AbsQPrime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    #[serde(flatten)]
    pub range: AxisRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub axes: Vec<SweepAxis>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub objective: Objective,
    #[serde(default)]
    pub m: u32,
}

fn names(mode: SweepMode) -> [&'static str; 3] {
    match mode {
        SweepMode::Intensity => ["omega1", "omega2", "delta"],
        SweepMode::Frequency => ["omega", "delta1", "delta2"],
        SweepMode::Gaussian => ["amplitude", "width", "delta"],
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::invalid("axes", "need one or two sweep axes"));
        }
        let allowed = names(self.mode);
        for a in &self.axes {
            if !allowed.contains(&a.name.as_str()) {
                return Err(Error::invalid(
                    "axes",
                    format!("unknown parameter `{}` for {:?}", a.name, self.mode),
                ));
            }
            a.range.values()?;
        }
        for key in self.fixed.keys() {
            if !allowed.contains(&key.as_str()) && key != "t" {
                return Err(Error::invalid(
                    "fixed",
                    format!("unknown parameter `{key}`"),
                ));
            }
        }
        for p in allowed {
            if !self.fixed.contains_key(p) && !self.axes.iter().any(|a| a.name == p) {
                return Err(Error::invalid(
                    "fixed",
                    format!("parameter `{p}` is neither fixed nor swept"),
                ));
            }
        }
        let time_objective = matches!(
            self.objective,
            Objective::ExactTime | Objective::FirstOrderTime | Objective::FinalPopulation
        );
        if (self.mode == SweepMode::Gaussian) == time_objective {
            return Err(Error::invalid(
                "objective",
                "abs_Q_prime needs gaussian mode; time and population objectives need a square well",
            ));
        }
        Ok(())
    }

    /// Parameter maps for every grid point, first axis slowest.
    fn grid(&self) -> Result<Vec<BTreeMap<String, f64>>> {
        self.validate()?;
        let mut out = vec![self.fixed.clone()];
        for a in &self.axes {
            let vals = a.range.values()?;
            out = out
                .into_iter()
                .flat_map(|base| {
                    vals.iter().map(move |v| {
                        let mut p = base.clone();
                        p.insert(a.name.clone(), *v);
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }

    fn drive(&self, p: &BTreeMap<String, f64>) -> Result<SquareWellDrive> {
        match self.mode {
            SweepMode::Intensity => {
                SquareWellDrive::intensity(p["omega1"], p["omega2"], p["delta"], self.m)
            }
            SweepMode::Frequency => {
                SquareWellDrive::frequency(p["omega"], p["delta1"], p["delta2"], self.m)
            }
            SweepMode::Gaussian => Err(Error::invalid("mode", "gaussian has no square well")),
        }
    }
}

/// One point of a transfer-time curve; `None` marks a gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimePoint {
    pub value: f64,
    pub exact: Option<f64>,
    pub first_order: Option<f64>,
    pub tan_phi: Option<f64>,
    /// The rotation angle or the first-order denominator vanishes.
    pub divergent: bool,
}

impl TimePoint {
    pub fn relative_gap(&self) -> Option<f64> {
        Some((self.exact? - self.first_order?).abs() / self.exact?)
    }
}

/// Exact `(4m+1) pi T / (2 phi)` and first-order transfer times along one
/// axis.
pub fn scan_minimal_time(spec: &SweepSpec) -> Result<Vec<TimePoint>> {
    if spec.axes.len() != 1 {
        return Err(Error::invalid("axes", "a time scan takes exactly one axis"));
    }
    if !matches!(
        spec.objective,
        Objective::ExactTime | Objective::FirstOrderTime
    ) {
        return Err(Error::invalid(
            "objective",
            "a time scan needs exact_time or first_order_time",
        ));
    }
    let name = spec.axes[0].name.clone();
    let grid = spec.grid()?;
    Ok(grid
        .par_iter()
        .map(|p| {
            let value = p[&name];
            let Ok(drive) = spec.drive(p) else {
                return TimePoint {
                    value,
                    exact: None,
                    first_order: None,
                    tan_phi: None,
                    divergent: false,
                };
            };
            let exact = inversion_time(&drive, spec.m);
            let first = minimal_time_first_order(&drive).map(|t| t * (4 * spec.m + 1) as f64);
            TimePoint {
                value,
                divergent: exact.is_err() || first.is_err(),
                exact: exact.ok(),
                first_order: first.ok(),
                tan_phi: Some(drive.decompose().phi.tan()),
            }
        })
        .collect())
}

/// A swept objective on a one- or two-axis grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub axes: Vec<String>,
    pub points: Vec<(Vec<f64>, Option<f64>)>,
}

pub fn scan(spec: &SweepSpec) -> Result<ScanResult> {
    let grid = spec.grid()?;
    let axes: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    let points = grid
        .par_iter()
        .map(|p| {
            let coords = axes.iter().map(|a| p[a]).collect();
            (coords, evaluate(spec, p).ok())
        })
        .collect();
    Ok(ScanResult { axes, points })
}

fn evaluate(spec: &SweepSpec, p: &BTreeMap<String, f64>) -> Result<f64> {
    match spec.objective {
        Objective::ExactTime => inversion_time(&spec.drive(p)?, spec.m),
        Objective::FirstOrderTime => {
            Ok(minimal_time_first_order(&spec.drive(p)?)? * (4 * spec.m + 1) as f64)
        }
        Objective::FinalPopulation => {
            let drive = spec.drive(p)?;
            let t = match p.get("t") {
                Some(t) => *t,
                None => inversion_time(&drive, spec.m)?,
            };
            let u = drive.propagator(&drive.decompose(), t);
            Ok(u[(1, 0)].norm_sqr())
        }
        Objective::AbsQPrime => {
            let pulse = GaussianPulse::new(p["amplitude"], p["width"], p["delta"])?;
            Ok(GaussianTrain::new(pulse, SEARCH_STEP_RULE)?.q.abs())
        }
    }
}

/// Spectator-level populations under the addressed drive's timing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectivityMap {
    pub detunings: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Time at which `population` is read: the addressed inversion time.
    pub t_eval: f64,
    /// `population[i][j]` for detuning `i`, deviation `j`, at `t_eval`.
    pub population: Vec<Vec<f64>>,
    /// Largest population over `[0, t_eval]`.
    pub peak: Vec<Vec<f64>>,
}

/// Samples per evaluation window for the peak population.
const PEAK_SAMPLES: usize = 400;

/// Spectator with detuning `detuning` in the first segment (shifted
/// equally in the second) and first coupling `(1 + deviation) W1`.
pub fn spectator_schedule(
    drive: &SquareWellDrive,
    detuning: f64,
    deviation: f64,
) -> Result<PiecewiseSchedule> {
    let (s1, s2) = (drive.segment1(), drive.segment2());
    let shift = detuning - s1.detuning;
    PiecewiseSchedule::periodic(vec![
        Piece::new(
            drive.t1(),
            interaction_hamiltonian((1.0 + deviation) * s1.coupling, detuning),
        ),
        Piece::new(
            drive.t2(),
            interaction_hamiltonian(s2.coupling, s2.detuning + shift),
        ),
    ])
}

pub fn selectivity_map(
    drive: &SquareWellDrive,
    detunings: &[f64],
    deviations: &[f64],
) -> Result<SelectivityMap> {
    if detunings.is_empty() || deviations.is_empty() {
        return Err(Error::invalid(
            "range",
            "need at least one detuning and one deviation",
        ));
    }
    let t_eval = inversion_time(drive, 0)?;
    let times: Vec<f64> = (0..PEAK_SAMPLES)
        .map(|k| t_eval * k as f64 / (PEAK_SAMPLES - 1) as f64)
        .collect();
    let psi0 = basis_vector(2, 0);
    let rows: Vec<(Vec<f64>, Vec<f64>)> = detunings
        .par_iter()
        .map(|&dk| {
            let mut fin = Vec::with_capacity(deviations.len());
            let mut peak = Vec::with_capacity(deviations.len());
            for &dev in deviations {
                let states = spectator_schedule(drive, dk, dev)?.evolve(&psi0, &times)?;
                let p1: Vec<f64> = states.iter().map(|s| s[1].norm_sqr()).collect();
                fin.push(*p1.last().expect("samples are nonempty"));
                peak.push(p1.iter().cloned().fold(0.0, f64::max));
            }
            Ok((fin, peak))
        })
        .collect::<Result<_>>()?;
    let (population, peak) = rows.into_iter().unzip();
    Ok(SelectivityMap {
        detunings: detunings.to_vec(),
        deviations: deviations.to_vec(),
        t_eval,
        population,
        peak,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianCandidate {
    pub amplitude: f64,
    pub width: f64,
    pub pulses: u64,
    pub abs_q: f64,
    pub vartheta: f64,
    /// Unrounded `(4m+1) pi / (2 vartheta)`.
    pub fractional_pulses: f64,
    pub predicted: f64,
    /// `P_1` after `pulses` pulses from direct integration.
    pub simulated: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSearch {
    pub delta: f64,
    pub amplitude: AxisRange,
    pub width: AxisRange,
    #[serde(default)]
    pub m: u32,
    #[serde(default = "default_q_tol")]
    pub q_tol: f64,
    /// Keep only trains with exactly this many pulses.
    #[serde(default)]
    pub target_pulses: Option<u64>,
    /// Bisection steps on each coarse edge where `Q'` changes sign.
    #[serde(default = "default_refine_steps")]
    pub refine_steps: usize,
    /// Trains needing more pulses are discarded.
    #[serde(default = "default_max_pulses")]
    pub max_pulses: u64,
    #[serde(default = "default_keep")]
    pub keep: usize,
}

fn default_q_tol() -> f64 {
    Q_PRIME_TOL
}
fn default_refine_steps() -> usize {
    30
}
fn default_max_pulses() -> u64 {
    100
}
fn default_keep() -> usize {
    10
}

impl GaussianSearch {
    pub fn new(delta: f64, amplitude: AxisRange, width: AxisRange, m: u32) -> Self {
        Self {
            delta,
            amplitude,
            width,
            m,
            q_tol: Q_PRIME_TOL,
            target_pulses: None,
            refine_steps: default_refine_steps(),
            max_pulses: default_max_pulses(),
            keep: default_keep(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    a: f64,
    xi: f64,
    q: f64,
    r: f64,
    vartheta: f64,
}

fn screen(delta: f64, a: f64, xi: f64) -> Option<Cell> {
    let pulse = GaussianPulse::new(a, xi, delta).ok()?;
    let g = GaussianTrain::new(pulse, SEARCH_STEP_RULE).ok()?;
    Some(Cell {
        a,
        xi,
        q: g.q,
        r: g.r,
        vartheta: g.vartheta,
    })
}

impl GaussianSearch {
    fn admissible(&self, c: &Cell) -> bool {
        if c.r.abs() < crate::two_level::gaussian::NO_TRANSFER_TOL || !(c.vartheta > 0.0) {
            return false;
        }
        let n = self.pulses(c.vartheta);
        n <= self.max_pulses && self.target_pulses.is_none_or(|t| t == n)
    }

    fn pulses(&self, vartheta: f64) -> u64 {
        ((4 * self.m + 1) as f64 * std::f64::consts::PI / (2.0 * vartheta))
            .round()
            .max(1.0) as u64
    }
}

/// Bisection for `Q' = 0` on the segment between two cells of opposite sign.
fn bisect(delta: f64, mut lo: Cell, mut hi: Cell, steps: usize, tol: f64) -> Option<Cell> {
    for _ in 0..steps {
        let mid = screen(delta, 0.5 * (lo.a + hi.a), 0.5 * (lo.xi + hi.xi))?;
        if mid.q.abs() < tol * 1e-3 {
            return Some(mid);
        }
        if mid.q.signum() == lo.q.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(if lo.q.abs() < hi.q.abs() { lo } else { hi })
}

/// Grid search for `Q' ~ 0`: a coarse `(A, xi)` grid, a refinement pass
/// bisecting every grid edge across which `Q'` changes sign, then a
/// direct-simulation check of every candidate. Sorted by predicted
/// infidelity.
pub fn gaussian_search(spec: &GaussianSearch) -> Result<Vec<GaussianCandidate>> {
    if !(spec.amplitude.lo > 0.0) || !(spec.width.lo > 0.0) {
        return Err(Error::invalid(
            "range",
            "amplitude and width ranges must be positive",
        ));
    }
    if !spec.delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    let av = spec.amplitude.values()?;
    let xv = spec.width.values()?;
    let (na, nx) = (av.len(), xv.len());
    let coarse: Vec<Option<Cell>> = (0..na * nx)
        .into_par_iter()
        .map(|k| screen(spec.delta, av[k / nx], xv[k % nx]))
        .collect();

    let mut edges = Vec::new();
    for i in 0..na {
        for j in 0..nx {
            let Some(c) = coarse[i * nx + j] else {
                continue;
            };
            for (ii, jj) in [(i + 1, j), (i, j + 1)] {
                if ii >= na || jj >= nx {
                    continue;
                }
                if let Some(o) = coarse[ii * nx + jj] {
                    if o.q.signum() != c.q.signum() && (spec.admissible(&c) || spec.admissible(&o))
                    {
                        edges.push((c, o));
                    }
                }
            }
        }
    }
    let refined: Vec<Cell> = edges
        .par_iter()
        .filter_map(|&(c, o)| bisect(spec.delta, c, o, spec.refine_steps, spec.q_tol))
        .chain(coarse.par_iter().flatten().copied())
        .filter(|c| c.q.abs() < spec.q_tol && spec.admissible(c))
        .collect();

    if refined.is_empty() {
        return Err(Error::NoCandidate(format!(
            "no (A, xi) cell with |Q'| < {:.1e} at delta = {}",
            spec.q_tol, spec.delta
        )));
    }

    let mut ranked: Vec<(f64, Cell)> = refined
        .into_iter()
        .map(|c| {
            let n = spec.pulses(c.vartheta) as f64;
            let p1 = c.r * c.r * (n * c.vartheta).sin().powi(2) / (c.q * c.q + c.r * c.r);
            (1.0 - p1, c)
        })
        .collect();
    ranked.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.a.total_cmp(&y.1.a))
            .then(x.1.xi.total_cmp(&y.1.xi))
    });
    // neighbouring edges converge on the same root
    let da = (av[na - 1] - av[0]) / (na - 1) as f64;
    let dx = (xv[nx - 1] - xv[0]) / (nx - 1) as f64;
    let mut picked: Vec<Cell> = Vec::new();
    for (_, c) in ranked {
        if picked
            .iter()
            .any(|p| (p.a - c.a).abs() <= da / 2.0 && (p.xi - c.xi).abs() <= dx / 2.0)
        {
            continue;
        }
        picked.push(c);
        if picked.len() >= spec.keep {
            break;
        }
    }

    let mut out: Vec<GaussianCandidate> = picked
        .par_iter()
        .map(|c| {
            let pulse = GaussianPulse::new(c.a, c.xi, spec.delta)?;
            let g = GaussianTrain::new(pulse, GAUSSIAN_STEP_RULE)?;
            let (n, infidelity) = pulses_for_inversion(&g, spec.m)?;
            Ok(GaussianCandidate {
                amplitude: c.a,
                width: c.xi,
                pulses: n,
                abs_q: g.q.abs(),
                vartheta: g.vartheta,
                fractional_pulses: g.fractional_pulses(spec.m),
                predicted: 1.0 - infidelity,
                simulated: pulse.simulate_transfer(n as usize, GAUSSIAN_STEP_RULE)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(n) = spec.target_pulses {
        out.retain(|c| c.pulses == n);
    }
    if out.is_empty() {
        return Err(Error::NoCandidate(
            "no candidate survived verification".into(),
        ));
    }
    out.sort_by(|x, y| {
        (1.0 - x.predicted)
            .total_cmp(&(1.0 - y.predicted))
            .then(x.amplitude.total_cmp(&y.amplitude))
            .then(x.width.total_cmp(&y.width))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn time_spec(
        mode: SweepMode,
        axis: &str,
        lo: f64,
        hi: f64,
        fixed: &[(&str, f64)],
    ) -> SweepSpec {
        SweepSpec {
            mode,
            axes: vec![SweepAxis {
                name: axis.into(),
                range: AxisRange::linear(lo, hi, 40),
            }],
            fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            objective: Objective::ExactTime,
            m: 0,
        }
    }

    #[test]
    fn axis_values() {
        assert_eq!(
            AxisRange::linear(0.0, 1.0, 3).values().unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        let log = AxisRange {
            lo: 1.0,
            hi: 100.0,
            points: 3,
            spacing: Spacing::Log,
        };
        let v = log.values().unwrap();
        assert!((v[1] - 10.0).abs() < 1e-12);
        assert!(AxisRange::linear(1.0, 1.0, 3).values().is_err());
        assert!(AxisRange::linear(0.0, 1.0, 1).values().is_err());
    }

    #[test]
    fn validation_names_missing_parameter() {
        let s = time_spec(SweepMode::Intensity, "omega1", 0.1, 0.9, &[("omega2", 1.0)]);
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("delta"));
    }

    #[test]
    fn intensity_time_diverges_towards_equal_couplings() {
        let s = time_spec(
            SweepMode::Intensity,
            "omega1",
            0.1,
            0.99,
            &[("omega2", 1.0), ("delta", 30.0)],
        );
        let pts = scan_minimal_time(&s).unwrap();
        let exact: Vec<f64> = pts.iter().map(|p| p.exact.unwrap()).collect();
        assert!(exact.windows(2).all(|w| w[1] > w[0]));
        assert!(exact.last().unwrap() / exact[0] > 50.0);
    }

    #[test]
    fn equal_couplings_are_flagged() {
        let s = time_spec(
            SweepMode::Intensity,
            "omega1",
            0.5,
            1.5,
            &[("omega2", 1.0), ("delta", 30.0)],
        );
        let mut s = s;
        s.axes[0].range.points = 3;
        let pts = scan_minimal_time(&s).unwrap();
        assert!(pts[1].divergent);
        assert!(pts[1].exact.is_none());
    }

    #[test]
    fn first_order_close_for_small_angle() {
        let s = time_spec(
            SweepMode::Intensity,
            "omega1",
            0.1,
            0.6,
            &[("omega2", 1.0), ("delta", 30.0)],
        );
        for p in scan_minimal_time(&s).unwrap() {
            if p.tan_phi.unwrap() < 0.1 {
                assert!(p.relative_gap().unwrap() < 0.05, "{p:?}");
            }
        }
    }

    #[test]
    fn final_population_objective() {
        let spec = SweepSpec {
            mode: SweepMode::Intensity,
            axes: vec![SweepAxis {
                name: "omega1".into(),
                range: AxisRange::linear(1.0, 2.0, 2),
            }],
            fixed: [("omega2".to_string(), 3.0), ("delta".to_string(), 30.0)].into(),
            objective: Objective::FinalPopulation,
            m: 0,
        };
        let r = scan(&spec).unwrap();
        for (_, v) in r.points {
            assert!(v.unwrap() > 0.99);
        }
    }

    #[test]
    fn addressed_transition_is_inverted() {
        let drive = SquareWellDrive::intensity(3.0, 1.0, 100.0, 0).unwrap();
        let map = selectivity_map(&drive, &[100.0], &[0.0]).unwrap();
        assert!(map.population[0][0] > 0.99);
        assert!(map.peak[0][0] >= map.population[0][0]);
    }

    #[test]
    fn resonant_search_has_no_q() {
        // Delta = 0: every cell has Q' = 0
        let mut s = GaussianSearch::new(
            0.0,
            AxisRange::linear(0.2, 0.6, 5),
            AxisRange::linear(0.5, 1.0, 4),
            0,
        );
        s.keep = 3;
        let c = gaussian_search(&s).unwrap();
        assert!(!c.is_empty());
        for w in c.windows(2) {
            assert!(w[0].predicted >= w[1].predicted);
        }
        for x in &c {
            assert!(x.abs_q < 1e-12);
            assert!((x.simulated - x.predicted).abs() < 1e-6);
            // resonant pulse area sqrt(2 pi) A xi per pulse
            let area = (2.0 * PI).sqrt() * x.amplitude * x.width;
            assert!(
                (x.vartheta - area).abs() < 1e-3 || (x.vartheta - (2.0 * PI - area)).abs() < 1e-3
            );
        }
    }

    #[test]
    fn empty_search_reports_no_candidate() {
        let mut s = GaussianSearch::new(
            50.0,
            AxisRange::linear(0.01, 0.02, 3),
            AxisRange::linear(0.1, 0.2, 3),
            0,
        );
        s.q_tol = 1e-12;
        assert!(matches!(gaussian_search(&s), Err(Error::NoCandidate(_))));
    }
}

//! Sampled time series with provenance.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Tolerance on individual populations leaving `[0, 1]`.
pub const POPULATION_RANGE_TOL: f64 = 1e-9;
/// Tolerance on the population sum of closed dynamics.
pub const POPULATION_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Level population; all population series of a trajectory sum to one.
    Population,
    /// Probability that is not part of the level populations (photon number).
    Probability,
    /// Analytic overlay curve.
    Reference,
    Other,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub kind: SeriesKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct TrajectoryMeta {
    pub config_hash: Option<String>,
    pub seed: Option<u64>,
    /// Fixed integrator step, `None` for exact propagation.
    pub step: Option<f64>,
    /// How the series were produced ("closed_form", "rk4", "eigen", ...).
    pub method: Option<String>,
    pub notes: Vec<String>,
    pub diagnostics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(times: Vec<f64>) -> Self {
        Self {
            times,
            series: Vec::new(),
            meta: TrajectoryMeta::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, name: impl Into<String>, kind: SeriesKind, values: Vec<f64>) {
        assert_eq!(
            values.len(),
            self.times.len(),
            "series length must match time axis"
        );
        self.series.push(Series {
            name: name.into(),
            kind,
            values,
        });
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.values.as_slice())
    }

    pub fn names(&self) -> Vec<&str> {
        self.series.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn rename(&mut self, from: &str, to: &str) {
        if let Some(s) = self.series.iter_mut().find(|s| s.name == from) {
            s.name = to.to_string();
        }
    }

    /// `(t, value)` of the global maximum of a series.
    pub fn argmax(&self, name: &str) -> Option<(f64, f64)> {
        let v = self.get(name)?;
        v.iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (k, &x)| match best {
                Some((_, b)) if b >= x => best,
                _ => Some((k, x)),
            })
            .map(|(k, x)| (self.times[k], x))
    }

    pub fn max(&self, name: &str) -> Option<f64> {
        self.argmax(name).map(|(_, v)| v)
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(|v| v.last().copied())
    }

    /// Checks monotone times, populations in range and (for closed dynamics)
    /// unit population sums.
    pub fn validate(&self, closed: bool) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidState(
                "trajectory times are not monotone".into(),
            ));
        }
        let pops: Vec<&Series> = self
            .series
            .iter()
            .filter(|s| s.kind == SeriesKind::Population)
            .collect();
        for s in &pops {
            if let Some(x) = s
                .values
                .iter()
                .find(|&&x| !(-POPULATION_RANGE_TOL..=1.0 + POPULATION_RANGE_TOL).contains(&x))
            {
                return Err(Error::InvalidState(format!(
                    "population {} out of range: {x}",
                    s.name
                )));
            }
        }
        if closed && !pops.is_empty() {
            for k in 0..self.times.len() {
                let sum: f64 = pops.iter().map(|s| s.values[k]).sum();
                if (sum - 1.0).abs() > POPULATION_SUM_TOL {
                    return Err(Error::InvalidState(format!(
                        "population sum {sum} at t = {}",
                        self.times[k]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Series name for the population of a basis label.
pub fn population_name(label: &str) -> String {
    format!("P_{label}")
}

/// Longest contiguous stretch of samples with `values > threshold`, returned
/// as `(start, end)` times.
pub fn longest_run_above(times: &[f64], values: &[f64], threshold: f64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let mut start: Option<usize> = None;
    for k in 0..=values.len() {
        let above = k < values.len() && values[k] > threshold;
        match (above, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                let run = (times[s], times[k - 1]);
                if best.is_none_or(|b| run.1 - run.0 > b.1 - b.0) {
                    best = Some(run);
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_and_validate() {
        let mut tr = Trajectory::new(vec![0.0, 1.0, 2.0]);
        tr.push("P_0", SeriesKind::Population, vec![1.0, 0.2, 0.6]);
        tr.push("P_1", SeriesKind::Population, vec![0.0, 0.8, 0.4]);
        assert_eq!(tr.argmax("P_1"), Some((1.0, 0.8)));
        assert!(tr.validate(true).is_ok());
        tr.push("P_x", SeriesKind::Population, vec![0.0, 0.1, 0.0]);
        assert!(tr.validate(true).is_err());
        assert!(tr.validate(false).is_ok());
    }

    #[test]
    fn longest_run() {
        let t = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let v = [1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        assert_eq!(longest_run_above(&t, &v, 0.5), Some((2.0, 4.0)));
        assert_eq!(longest_run_above(&t, &[0.0; 6], 0.5), None);
    }
}

//! Bundled figure presets. The registry is data: `presets/manifest.json`.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use offres_core::integrate::{integrate, TimeGrid};
use offres_core::open_system::decoherence_sweep;
use offres_core::optimizer::{
    gaussian_search, scan, scan_minimal_time, selectivity_map, AxisRange, GaussianSearch,
    Objective, SweepAxis, SweepMode, SweepSpec,
};
use offres_core::trajectory::longest_run_above;
use offres_core::two_level::gaussian::GAUSSIAN_STEP_RULE;
use offres_core::two_level::{plateau_scan, schedule_trajectory, GaussianPulse, SquareWellDrive};
use offres_core::{QuantumState, SeriesKind};
use serde::Deserialize;

use crate::config::ScenarioConfig;
use crate::output::{sha256_hex, with_suffix, RunRecord, Table};
use crate::runner;
use crate::CliError;

const MANIFEST: &str = include_str!("../presets/manifest.json");

/// Square-well drive parameters as written in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "modulation", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveSpec {
    Intensity {
        omega1: f64,
        omega2: f64,
        delta: f64,
        #[serde(default)]
        m: u32,
    },
    Frequency {
        omega: f64,
        delta1: f64,
        delta2: f64,
        #[serde(default)]
        m: u32,
    },
}

impl DriveSpec {
    pub fn drive(&self) -> offres_core::Result<SquareWellDrive> {
        match *self {
            DriveSpec::Intensity {
                omega1,
                omega2,
                delta,
                m,
            } => SquareWellDrive::intensity(omega1, omega2, delta, m),
            DriveSpec::Frequency {
                omega,
                delta1,
                delta2,
                m,
            } => SquareWellDrive::frequency(omega, delta1, delta2, m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetKind {
    /// One or more scenario runs; each `output` is relative to the bundle
    /// directory.
    Run { runs: Vec<ScenarioConfig> },
    /// Exact and first-order transfer times along one axis.
    TimeScan {
        spec: SweepSpec,
        /// Adds the constant `pi^2 / (4 omega)` column.
        #[serde(default)]
        limit_reference: bool,
    },
    /// Spectator populations under the addressed drive's timing.
    Selectivity {
        drive: DriveSpec,
        detunings: AxisRange,
        deviations: AxisRange,
    },
    /// `P_1` over a grid of dissipation and dephasing rates.
    Decoherence {
        drive: DriveSpec,
        gamma01: AxisRange,
        gamma11: AxisRange,
        #[serde(default)]
        initial: usize,
    },
    /// Plateau-condition residuals and the trajectory they predict.
    Plateau {
        drive: DriveSpec,
        m_max: u32,
        t_max: f64,
        samples: usize,
    },
    /// `(A, xi)` search for Gaussian trains with the `|Q'|` map.
    Gaussian {
        delta: f64,
        amplitude: AxisRange,
        width: AxisRange,
        #[serde(default)]
        m: u32,
        #[serde(default)]
        target_pulses: Option<u64>,
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Preset {
    pub description: String,
    #[serde(flatten)]
    pub kind: PresetKind,
}

pub fn manifest() -> BTreeMap<String, Preset> {
    serde_json::from_str(MANIFEST).expect("bundled preset manifest is valid")
}

pub fn preset(name: &str) -> Result<Preset, CliError> {
    let mut all = manifest();
    all.remove(name).ok_or_else(|| {
        let known: Vec<String> = manifest().into_keys().collect();
        CliError::config(
            "preset",
            format!("unknown preset `{name}`; known: {}", known.join(", ")),
        )
    })
}

/// Raw manifest entry, hashed into the run record.
fn preset_bytes(name: &str) -> Vec<u8> {
    let v: serde_json::Value = serde_json::from_str(MANIFEST).expect("valid manifest");
    serde_json::to_vec(&v[name]).unwrap_or_default()
}

/// Runs a preset and writes its bundle into `dir`.
pub fn run_preset(
    name: &str,
    dir: &Path,
    seed: Option<u64>,
    samples: Option<usize>,
) -> Result<RunRecord, CliError> {
    let p = preset(name)?;
    let start = Instant::now();
    let bytes = preset_bytes(name);
    let mut rec = RunRecord::new(format!("figure {name}"), &bytes);
    let prefix = dir.join(name);
    match &p.kind {
        PresetKind::Run { runs } => {
            for cfg in runs {
                let cfg = cfg.clone().with_overrides(seed, samples);
                cfg.validate()?;
                let run_prefix = dir.join(&cfg.output);
                let cfg_bytes = serde_json::to_vec(&cfg).unwrap_or_default();
                let sub = runner::run_to(&cfg, &cfg_bytes, &run_prefix, &format!("figure {name}"))?;
                let tag = cfg.output.clone();
                for (k, v) in sub.diagnostics {
                    rec.diagnostics.insert(format!("{tag}.{k}"), v);
                }
                rec.outputs.extend(sub.outputs);
                rec.outputs
                    .push(with_suffix(&run_prefix, ".run.json").display().to_string());
                if rec.method.is_none() {
                    rec.method = sub.method;
                }
                rec.notes.extend(sub.notes);
                if sub.seed.is_some() {
                    rec.seed = sub.seed;
                }
            }
        }
        PresetKind::TimeScan {
            spec,
            limit_reference,
        } => {
            let mut spec = spec.clone();
            if let Some(n) = samples {
                spec.axes[0].range.points = n;
            }
            spec.validate()?;
            let points = scan_minimal_time(&spec)?;
            let mut cols = vec![
                spec.axes[0].name.clone(),
                "exact".into(),
                "first_order".into(),
                "tan_phi".into(),
            ];
            let limit = limit_reference.then(|| {
                let w = spec.fixed.get("omega").copied().unwrap_or(1.0);
                std::f64::consts::PI.powi(2) / (4.0 * w.abs()) * (4 * spec.m + 1) as f64
            });
            if limit.is_some() {
                cols.push("limit".into());
            }
            let mut t = Table::new(cols);
            for pt in &points {
                let mut row = vec![
                    pt.value,
                    pt.exact.unwrap_or(f64::NAN),
                    pt.first_order.unwrap_or(f64::NAN),
                    pt.tan_phi.unwrap_or(f64::NAN),
                ];
                row.extend(limit);
                t.push(row);
            }
            write(&t, &prefix, &mut rec)?;
        }
        PresetKind::Selectivity {
            drive,
            detunings,
            deviations,
        } => {
            let drive = drive.drive()?;
            let map = selectivity_map(&drive, &detunings.values()?, &deviations.values()?)?;
            let mut t = Table::new(vec![
                "detuning".into(),
                "deviation".into(),
                "population".into(),
                "peak".into(),
            ]);
            for (i, d) in map.detunings.iter().enumerate() {
                for (j, e) in map.deviations.iter().enumerate() {
                    t.push(vec![*d, *e, map.population[i][j], map.peak[i][j]]);
                }
            }
            rec.diagnostics.insert("t_eval".into(), map.t_eval);
            write(&t, &prefix, &mut rec)?;
        }
        PresetKind::Decoherence {
            drive,
            gamma01,
            gamma11,
            initial,
        } => {
            let drive = drive.drive()?;
            let rho0 = QuantumState::basis(2, *initial);
            let grid =
                decoherence_sweep(&drive, &gamma01.values()?, &gamma11.values()?, &rho0, None)?;
            let mut t = Table::new(vec![
                "gamma01".into(),
                "gamma11".into(),
                "final_p1".into(),
                "peak_p1".into(),
            ]);
            for (i, g1) in grid.gamma01.iter().enumerate() {
                for (j, g2) in grid.gamma11.iter().enumerate() {
                    t.push(vec![*g1, *g2, grid.final_p1[i][j], grid.peak_p1[i][j]]);
                }
            }
            rec.diagnostics.insert("t_eval".into(), grid.t_eval);
            rec.method = Some("rk4_lindblad".into());
            write(&t, &prefix, &mut rec)?;
        }
        PresetKind::Plateau {
            drive,
            m_max,
            t_max,
            samples: n,
        } => {
            let drive = drive.drive()?;
            let (best, residuals) = plateau_scan(&drive, *m_max)?;
            let mut t = Table::new(vec!["m".into(), "residual".into()]);
            for (k, r) in residuals.iter().enumerate() {
                t.push(vec![(k + 1) as f64, *r]);
            }
            write(&t, &with_suffix(&prefix, "_residuals"), &mut rec)?;
            let n = samples.unwrap_or(*n);
            let ts: Vec<f64> = (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect();
            let psi0 = QuantumState::basis(2, 0);
            let tr = schedule_trajectory(&drive.schedule(), psi0.amplitudes().expect("pure"), &ts)?;
            let p1 = tr.get("P_1").expect("two-level");
            let plateau = longest_run_above(&tr.times, p1, 0.99).map_or(0.0, |(a, b)| b - a);
            rec.diagnostics.insert("best_m".into(), best as f64);
            rec.diagnostics
                .insert("best_residual".into(), residuals[best as usize - 1]);
            rec.diagnostics
                .insert("longest_p1_above_0.99".into(), plateau);
            rec.diagnostics.insert("t1".into(), drive.t1());
            rec.diagnostics.insert("t2".into(), drive.t2());
            rec.absorb(&tr, "");
            write(&Table::from_trajectory(&tr), &prefix, &mut rec)?;
        }
        PresetKind::Gaussian {
            delta,
            amplitude,
            width,
            m,
            target_pulses,
            samples: n,
        } => {
            let qspec = SweepSpec {
                mode: SweepMode::Gaussian,
                axes: vec![
                    SweepAxis {
                        name: "amplitude".into(),
                        range: *amplitude,
                    },
                    SweepAxis {
                        name: "width".into(),
                        range: *width,
                    },
                ],
                fixed: BTreeMap::from([("delta".to_string(), *delta)]),
                objective: Objective::AbsQPrime,
                m: *m,
            };
            let qmap = scan(&qspec)?;
            let mut t = Table::new(vec![
                "amplitude".into(),
                "width".into(),
                "abs_q_prime".into(),
            ]);
            for (coords, v) in &qmap.points {
                t.push(vec![coords[0], coords[1], v.unwrap_or(f64::NAN)]);
            }
            write(&t, &with_suffix(&prefix, "_qmap"), &mut rec)?;

            let mut search = GaussianSearch::new(*delta, *amplitude, *width, *m);
            search.target_pulses = *target_pulses;
            let cands = gaussian_search(&search)?;
            write(
                &candidate_table(&cands),
                &with_suffix(&prefix, "_candidates"),
                &mut rec,
            )?;

            let best = &cands[0];
            let pulse = GaussianPulse::new(best.amplitude, best.width, *delta)?;
            let radius = pulse.amplitude.hypot(delta / 2.0);
            let step = TimeGrid::step_for(radius, GAUSSIAN_STEP_RULE, pulse.width / 50.0);
            let t_end = best.pulses as f64 * pulse.period();
            let grid = TimeGrid::uniform(t_end, samples.unwrap_or(*n), step)?;
            let mut tr = integrate(&pulse, &QuantumState::basis(2, 0), &grid)?;
            let field = tr.times.iter().map(|&t| pulse.coupling(t)).collect();
            tr.push("field", SeriesKind::Other, field);
            rec.absorb(&tr, "");
            rec.diagnostics
                .insert("best_amplitude".into(), best.amplitude);
            rec.diagnostics.insert("best_width".into(), best.width);
            rec.diagnostics
                .insert("best_pulses".into(), best.pulses as f64);
            rec.diagnostics
                .insert("best_simulated".into(), best.simulated);
            write(
                &Table::from_trajectory(&tr),
                &with_suffix(&prefix, "_best"),
                &mut rec,
            )?;
        }
    }
    rec.config_hash = sha256_hex(&bytes);
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec.write(&with_suffix(&prefix, ".run.json"))?;
    Ok(rec)
}

pub fn candidate_table(cands: &[offres_core::optimizer::GaussianCandidate]) -> Table {
    let mut t = Table::new(
        [
            "amplitude",
            "width",
            "pulses",
            "abs_q_prime",
            "vartheta",
            "fractional_pulses",
            "predicted_p1",
            "simulated_p1",
        ]
        .map(String::from)
        .to_vec(),
    );
    for c in cands {
        t.push(vec![
            c.amplitude,
            c.width,
            c.pulses as f64,
            c.abs_q,
            c.vartheta,
            c.fractional_pulses,
            c.predicted,
            c.simulated,
        ]);
    }
    t
}

fn write(t: &Table, prefix: &Path, rec: &mut RunRecord) -> Result<(), CliError> {
    let path = with_suffix(prefix, ".csv");
    t.write_csv(&path)?;
    rec.outputs.push(path.display().to_string());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_covers_every_figure() {
        let all = manifest();
        for name in [
            "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3", "fig4", "fig5", "fig6",
            "fig7", "fig8", "fig9", "fig10r", "fig10a", "fig11a", "fig11b", "fig12",
        ] {
            assert!(all.contains_key(name), "missing preset {name}");
        }
    }

    #[test]
    fn run_presets_validate() {
        for (name, p) in manifest() {
            if let PresetKind::Run { runs } = p.kind {
                for cfg in runs {
                    cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
                }
            }
        }
    }

    #[test]
    fn unknown_preset_is_config_error() {
        assert_eq!(preset("fig99").unwrap_err().exit_code(), 2);
    }
}

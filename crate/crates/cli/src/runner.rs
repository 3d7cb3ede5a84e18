//! Dispatch of a validated scenario to the simulation library.

use std::path::Path;
use std::time::Instant;

use offres_core::integrate::{integrate, TimeGrid, STEP_RULE};
use offres_core::multilevel::{
    as_photon_storage, n_level_superposition, three_level_modulated_evolution, ThreeLevelSchedule,
};
use offres_core::open_system::{evolve_open, LindbladChannels};
use offres_core::rabi::{
    coherent_field, coherent_pure_field, rabi_evolution, random_field, total_variation, Atom,
    CouplingSchedule, PhotonCoupling, RabiSystem, Truncation,
};
use offres_core::two_level::gaussian::GAUSSIAN_STEP_RULE;
use offres_core::two_level::{
    noisy_square_well, schedule_trajectory, GaussianPulse, NoiseTrack, Piece, PiecewiseSchedule,
    SmoothSquareWell, SquareWellDrive,
};
use offres_core::{interaction_hamiltonian, QuantumState, SeriesKind, Trajectory};

use crate::config::{ModulationKind as M, ScenarioConfig, System};
use crate::output::{with_suffix, RunRecord, Table};
use crate::CliError;

/// Noise resampling interval in units of the modulation period.
const NOISE_DT_PER_PERIOD: f64 = 1.0 / 20.0;

fn times(cfg: &ScenarioConfig) -> Vec<f64> {
    let (t_max, n) = (cfg.time.t_max, cfg.time.samples);
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}

fn index(cfg: &ScenarioConfig, name: &str, levels: usize) -> Result<usize, CliError> {
    let k = cfg.opt(name).unwrap_or(0.0) as usize;
    if k >= levels {
        return Err(CliError::config(
            format!("parameters.{name}"),
            format!("must be below {levels}"),
        ));
    }
    Ok(k)
}

fn area_index(cfg: &ScenarioConfig) -> u32 {
    cfg.opt("m").unwrap_or(0.0) as u32
}

fn square_well(cfg: &ScenarioConfig) -> Result<SquareWellDrive, CliError> {
    let m = area_index(cfg);
    Ok(match cfg.modulation {
        M::Intensity => {
            SquareWellDrive::intensity(cfg.get("omega1"), cfg.get("omega2"), cfg.get("delta"), m)?
        }
        M::Frequency => {
            SquareWellDrive::frequency(cfg.get("omega"), cfg.get("delta1"), cfg.get("delta2"), m)?
        }
        _ => unreachable!("validated"),
    })
}

fn noise_track(cfg: &ScenarioConfig, period: f64) -> Result<Option<NoiseTrack>, CliError> {
    let Some(n) = cfg.noise else { return Ok(None) };
    let dt = n.dt.unwrap_or(period * NOISE_DT_PER_PERIOD);
    Ok(Some(NoiseTrack::generate(
        n.amplitude,
        dt,
        cfg.time.t_max,
        n.seed,
    )?))
}

/// Two-level square-well, constant, smooth and Gaussian runs.
fn two_level(cfg: &ScenarioConfig) -> Result<Trajectory, CliError> {
    let k0 = index(cfg, "initial", 2)?;
    let psi0 = QuantumState::basis(2, k0);
    let amps = psi0.amplitudes().expect("basis state is pure").clone();
    let ts = times(cfg);
    match cfg.modulation {
        M::None => {
            let (omega, delta) = (cfg.get("omega"), cfg.get("delta"));
            let sched = PiecewiseSchedule::periodic(vec![Piece::new(
                1.0,
                interaction_hamiltonian(omega, delta),
            )])?;
            let mut tr = schedule_trajectory(&sched, &amps, &ts)?;
            // 4 W^2 / (4 W^2 + D^2) sin^2(sqrt(W^2 + D^2/4) t) out of the initial level
            let w = omega.hypot(delta / 2.0);
            let amp = if w > 0.0 {
                omega * omega / (w * w)
            } else {
                0.0
            };
            let reference = ts.iter().map(|t| amp * (w * t).sin().powi(2)).collect();
            tr.push("ref_rabi", SeriesKind::Reference, reference);
            Ok(tr)
        }
        M::Intensity | M::Frequency => {
            let drive = square_well(cfg)?;
            let pd = drive.decompose();
            let mut tr = if let Some(d) = cfg.decoherence {
                let ch = LindbladChannels::new(d.gamma01, d.gamma11)?;
                evolve_open(&drive, &ch, &psi0, cfg.time.t_max, cfg.time.samples)?
            } else if let Some(noise) = noise_track(cfg, drive.period())? {
                let sched = noisy_square_well(&drive, &noise)?;
                let mut tr = schedule_trajectory(&sched, &amps, &ts)?;
                let field = ts
                    .iter()
                    .map(|&t| sched.piece_at(t.min(sched.duration())).d.dx)
                    .collect();
                tr.push("field", SeriesKind::Other, field);
                tr.meta.seed = Some(noise.seed);
                tr.meta.diagnostics.insert("noise_dt".into(), noise.dt);
                tr
            } else {
                schedule_trajectory(&drive.schedule(), &amps, &ts)?
            };
            let lam = pd.lambda.norm();
            tr.push(
                "ref_sin2_lambda_t",
                SeriesKind::Reference,
                ts.iter().map(|t| (lam * t).sin().powi(2)).collect(),
            );
            tr.meta.diagnostics.insert("t1".into(), drive.t1());
            tr.meta.diagnostics.insert("t2".into(), drive.t2());
            tr.meta.diagnostics.insert("period".into(), drive.period());
            tr.meta.diagnostics.insert("phi".into(), pd.phi);
            tr.meta.diagnostics.insert("abs_lambda".into(), lam);
            if let Ok(t) = offres_core::two_level::inversion_time(&drive, area_index(cfg)) {
                tr.meta.diagnostics.insert("inversion_time".into(), t);
            }
            Ok(tr)
        }
        M::Smooth => {
            let gamma = cfg.get("gamma");
            let mut well = SmoothSquareWell::new(
                cfg.get("omega1"),
                cfg.get("omega2"),
                cfg.get("delta"),
                gamma,
            )?;
            let noise = noise_track(cfg, well.period())?;
            if let Some(n) = noise.clone() {
                well = well.with_noise(n);
            }
            let step = TimeGrid::step_for(well.max_norm(), STEP_RULE, 0.1 / gamma);
            let grid = TimeGrid::uniform(cfg.time.t_max, cfg.time.samples, step)?;
            let mut tr = integrate(&well, &psi0, &grid)?;
            let hard = schedule_trajectory(&well.hard_limit(), &amps, &ts)?;
            let p1_hard = hard.get("P_1").expect("two-level trajectory").to_vec();
            tr.push("P_1_square", SeriesKind::Reference, p1_hard);
            tr.push(
                "field",
                SeriesKind::Other,
                ts.iter().map(|&t| well.value(t)).collect(),
            );
            tr.meta.seed = noise.as_ref().map(|n| n.seed);
            tr.meta.diagnostics.insert("t1".into(), well.t1());
            tr.meta.diagnostics.insert("period".into(), well.period());
            Ok(tr)
        }
        M::Gaussian => {
            let pulse =
                GaussianPulse::new(cfg.get("amplitude"), cfg.get("width"), cfg.get("delta"))?;
            let radius = pulse.amplitude.hypot(pulse.detuning / 2.0);
            let step = TimeGrid::step_for(radius, GAUSSIAN_STEP_RULE, pulse.width / 50.0);
            let grid = TimeGrid::uniform(cfg.time.t_max, cfg.time.samples, step)?;
            let mut tr = integrate(&pulse, &psi0, &grid)?;
            tr.push(
                "field",
                SeriesKind::Other,
                ts.iter().map(|&t| pulse.coupling(t)).collect(),
            );
            tr.meta.diagnostics.insert("period".into(), pulse.period());
            Ok(tr)
        }
        M::DeltaSchedule => unreachable!("validated"),
    }
}

fn three_level(cfg: &ScenarioConfig) -> Result<Trajectory, CliError> {
    let offset = cfg.opt("offset").unwrap_or(0.0);
    let sched = match cfg.modulation {
        M::None => {
            let d = cfg.get("delta");
            ThreeLevelSchedule::detuning_switch(cfg.get("omega1"), cfg.get("omega2"), d, d, offset)
        }
        M::Frequency => ThreeLevelSchedule::detuning_switch(
            cfg.get("omega1"),
            cfg.get("omega2"),
            cfg.get("delta_a"),
            cfg.get("delta_b"),
            offset,
        ),
        M::DeltaSchedule => ThreeLevelSchedule::offset_switch(
            cfg.get("omega1"),
            cfg.get("omega2"),
            cfg.get("delta"),
            cfg.get("offset_a"),
            cfg.get("offset_b"),
        ),
        M::Intensity => ThreeLevelSchedule::coupling_switch(
            cfg.get("omega1"),
            cfg.get("omega2"),
            cfg.get("omega2_prime"),
            cfg.get("delta"),
            offset,
        ),
        _ => unreachable!("validated"),
    }
    .with_durations(cfg.opt("t1"), cfg.opt("t2"));
    let psi0 = QuantumState::basis(3, index(cfg, "initial", 3)?);
    let tr = three_level_modulated_evolution(&sched, &psi0, cfg.time.t_max, cfg.time.samples)?;
    Ok(if cfg.flag("photon_storage") {
        as_photon_storage(tr)?
    } else {
        tr
    })
}

fn n_level(cfg: &ScenarioConfig) -> Result<Trajectory, CliError> {
    let omegas: Vec<f64> = (1..).map_while(|k| cfg.opt(&format!("omega{k}"))).collect();
    let run = n_level_superposition(
        &omegas,
        cfg.get("delta_a"),
        cfg.get("delta_b"),
        cfg.time.t_max,
        cfg.time.samples,
    )?;
    let mut tr = run.trajectory;
    tr.meta
        .diagnostics
        .insert("superposition_periods".into(), run.periods as f64);
    Ok(tr)
}

fn rabi(cfg: &ScenarioConfig) -> Result<Trajectory, CliError> {
    let n_max = cfg.get("n_max") as usize;
    let coupling = match cfg.modulation {
        M::None => CouplingSchedule::Constant {
            omega: cfg.get("omega"),
        },
        M::Intensity => CouplingSchedule::SquareWell {
            omega1: cfg.get("omega1"),
            omega2: cfg.get("omega2"),
            m: area_index(cfg),
        },
        _ => unreachable!("validated"),
    };
    let omega0 = cfg.get("omega0");
    let mut sys = RabiSystem::new(omega0, omega0 + cfg.get("delta"), coupling, n_max)?;
    if cfg.flag("full_truncation") {
        sys = sys.with_truncation(Truncation::Full);
    }
    if cfg.flag("sqrt_n_coupling") {
        sys = sys.with_photon_coupling(PhotonCoupling::SqrtN);
    }
    let field = match (cfg.opt("mean_photons"), cfg.opt("field_seed")) {
        (Some(mean), _) if cfg.flag("pure_coherent") => coherent_pure_field(mean, n_max)?,
        (Some(mean), _) => coherent_field(mean, n_max)?,
        (None, Some(seed)) => random_field(seed as u64, n_max),
        (None, None) => unreachable!("validated"),
    };
    let atom = match index(cfg, "atom0", 2)? {
        0 => Atom::G,
        _ => Atom::E,
    };
    let run = rabi_evolution(&sys, &field, atom, cfg.time.t_max, cfg.time.samples)?;
    let mut tr = run.trajectory;
    let target = if atom == Atom::G { "P_e" } else { "P_g" };
    if let Some(k) = first_peak(tr.get(target).expect("atom series")) {
        let tv = total_variation(&run.photons[0], &run.photons[k]);
        let p_peak = tr.get(target).expect("atom series")[k];
        tr.meta
            .diagnostics
            .insert("transfer_time".into(), tr.times[k]);
        tr.meta
            .diagnostics
            .insert("transfer_population".into(), p_peak);
        tr.meta
            .diagnostics
            .insert("photon_tv_at_transfer".into(), tv);
    }
    if let Some(s) = cfg.opt("field_seed") {
        tr.meta.seed = Some(s as u64);
    }
    tr.meta.diagnostics.insert("dim".into(), sys.dim() as f64);
    Ok(tr)
}

/// Index of the first local maximum within 5% of the global one.
pub fn first_peak(p: &[f64]) -> Option<usize> {
    let n = p.len();
    let top = (0..n).max_by(|&a, &b| p[a].total_cmp(&p[b]))?;
    let floor = 0.95 * p[top];
    (1..n.saturating_sub(1))
        .find(|&k| p[k] >= floor && p[k] >= p[k - 1] && p[k] > p[k + 1])
        .or(Some(top))
}

/// Runs a validated scenario.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Trajectory, CliError> {
    let tr = match cfg.system {
        System::TwoLevel => two_level(cfg)?,
        System::ThreeLevel => three_level(cfg)?,
        System::NLevel => n_level(cfg)?,
        System::Rabi => rabi(cfg)?,
    };
    tr.validate(cfg.decoherence.is_none())
        .map_err(CliError::from)?;
    Ok(tr)
}

/// Simulates `cfg` and writes `<prefix>.csv` plus `<prefix>.run.json`.
pub fn run_to(
    cfg: &ScenarioConfig,
    config_bytes: &[u8],
    prefix: &Path,
    command: &str,
) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    let tr = simulate(cfg)?;
    let csv = with_suffix(prefix, ".csv");
    Table::from_trajectory(&tr).write_csv(&csv)?;
    let mut rec = RunRecord::new(command, config_bytes);
    rec.absorb(&tr, "");
    if rec.seed.is_none() {
        rec.seed = cfg.seed();
    }
    rec.outputs.push(csv.display().to_string());
    rec.wall_time_s = start.elapsed().as_secs_f64();
    rec.write(&with_suffix(prefix, ".run.json"))?;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ScenarioConfig {
        ScenarioConfig::from_json(text).unwrap()
    }

    #[test]
    fn resonant_run_follows_rabi_formula() {
        let c = cfg(
            r#"{"system":"two_level","modulation":"none","parameters":{"omega":1.3,"delta":0},
            "time":{"t_max":6,"samples":61},"output":"x"}"#,
        );
        let tr = simulate(&c).unwrap();
        let p1 = tr.get("P_1").unwrap();
        for (t, p) in tr.times.iter().zip(p1) {
            assert!((p - (1.3 * t).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn first_peak_skips_small_bumps() {
        assert_eq!(
            first_peak(&[0.0, 0.2, 0.1, 0.7, 0.9, 0.8, 1.0, 0.0]),
            Some(6)
        );
        assert_eq!(first_peak(&[0.0, 0.97, 0.9, 1.0, 0.0]), Some(1));
        assert_eq!(first_peak(&[0.0, 0.1, 0.2]), Some(2));
    }

    #[test]
    fn noisy_run_is_seeded() {
        let text = r#"{"system":"two_level","modulation":"intensity","parameters":{"omega1":1,"omega2":3,"delta":50},
            "noise":{"amplitude":0.3,"seed":5},"time":{"t_max":5,"samples":51},"output":"x"}"#;
        let a = simulate(&cfg(text)).unwrap();
        let b = simulate(&cfg(text)).unwrap();
        let c = simulate(&cfg(&text.replace("\"seed\":5", "\"seed\":6"))).unwrap();
        assert_eq!(a.get("P_1"), b.get("P_1"));
        assert_ne!(a.get("P_1"), c.get("P_1"));
    }

    #[test]
    fn decoherence_path_keeps_trace() {
        let c = cfg(
            r#"{"system":"two_level","modulation":"frequency","parameters":{"omega":1,"delta1":30,"delta2":300},
            "decoherence":{"gamma01":0.1,"gamma11":0.1},"time":{"t_max":2,"samples":21},"output":"x"}"#,
        );
        let tr = simulate(&c).unwrap();
        let (p0, p1) = (tr.get("P_0").unwrap(), tr.get("P_1").unwrap());
        assert!(p0.iter().zip(p1).all(|(a, b)| (a + b - 1.0).abs() < 1e-8));
    }

    #[test]
    fn photon_storage_relabels() {
        let c = cfg(r#"{"system":"three_level","modulation":"intensity",
            "parameters":{"omega1":1,"omega2":1,"omega2_prime":-1,"delta":40,"initial":2,"photon_storage":1},
            "time":{"t_max":5,"samples":11},"output":"x"}"#);
        let tr = simulate(&c).unwrap();
        assert!(tr.get("P_20").is_some());
    }

    #[test]
    fn rabi_reports_transfer_diagnostics() {
        let c = cfg(r#"{"system":"rabi","modulation":"none",
            "parameters":{"omega0":1,"delta":0,"omega":1,"n_max":12,"mean_photons":1},
            "time":{"t_max":3,"samples":31},"output":"x"}"#);
        let tr = simulate(&c).unwrap();
        assert!(tr.meta.diagnostics.contains_key("photon_tv_at_transfer"));
    }
}

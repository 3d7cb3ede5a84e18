//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Reference values are computed here from closed-form timing rules and a
//! fixed-size Taylor-4 propagator that shares no code with the library.

use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use nalgebra::{Complex, SMatrix};
use offres_cli::config::ScenarioConfig;
use offres_cli::output::{parse_csv, Table};
use offres_cli::presets::run_preset;
use offres_cli::runner::simulate;
use offres_core::bloch::{su2_propagator, BlochHamiltonian};
use offres_core::linalg::CMatrix;
use offres_core::multilevel::{
    lambda_period_unitary, lambda_propagator, LambdaSystem, ThreeLevelSchedule,
};
use offres_core::open_system::decoherence_sweep;
use offres_core::optimizer::{gaussian_search, selectivity_map, AxisRange, GaussianSearch};
use offres_core::trajectory::longest_run_above;
use offres_core::two_level::{inversion_time, plateau_scan, schedule_trajectory, SquareWellDrive};
use offres_core::QuantumState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;
type M<const N: usize> = SMatrix<C, N, N>;

fn cx(re: f64) -> C {
    C::new(re, 0.0)
}

/// `exp(-i H dt)` to fourth order in `H dt`.
fn taylor4<const N: usize>(h: &M<N>, dt: f64) -> M<N> {
    let a = h * C::new(0.0, -dt);
    let a2 = a * a;
    let a3 = a2 * a;
    M::<N>::identity() + a + a2 * cx(0.5) + a3 * cx(1.0 / 6.0) + a3 * a * cx(1.0 / 24.0)
}

fn spectral_radius_bound<const N: usize>(h: &M<N>) -> f64 {
    h.iter().map(|z| z.norm()).sum::<f64>().max(1e-12)
}

/// Propagator of a constant Hamiltonian by fixed steps `|H| dt <= 5e-3`.
fn rk_const<const N: usize>(h: &M<N>, t: f64) -> M<N> {
    if t <= 0.0 {
        return M::<N>::identity();
    }
    let n = (t * spectral_radius_bound(h) / 5e-3).ceil().max(1.0) as usize;
    let step = taylor4(h, t / n as f64);
    let mut u = M::<N>::identity();
    for _ in 0..n {
        u = step * u;
    }
    u
}

/// Propagator of a periodic two-segment Hamiltonian over `[0, t]`.
fn rk_periodic<const N: usize>(ha: &M<N>, hb: &M<N>, t1: f64, t2: f64, t: f64) -> M<N> {
    let period = t1 + t2;
    let ua = rk_const(ha, t1);
    let up = rk_const(hb, t2) * ua;
    let n = (t / period).floor() as u64;
    let mut u = M::<N>::identity();
    for _ in 0..n {
        u = up * u;
    }
    let r = t - n as f64 * period;
    if r <= t1 {
        rk_const(ha, r) * u
    } else {
        rk_const(hb, r - t1) * ua * u
    }
}

fn two_level_h(dx: f64, dy: f64, dz: f64) -> M<2> {
    M::<2>::new(cx(dz), C::new(dx, -dy), C::new(dx, dy), cx(-dz))
}

fn lambda_h(o1: f64, o2: f64, delta: f64) -> M<3> {
    M::<3>::new(
        cx(0.0),
        cx(0.0),
        cx(o1),
        cx(0.0),
        cx(0.0),
        cx(o2),
        cx(o1),
        cx(o2),
        cx(delta),
    )
}

fn diff<const N: usize>(a: &CMatrix, b: &M<N>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            d = d.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    d
}

/// Half-period segment duration `(pi/2) / |d|` for coupling `w`, detuning `delta`.
fn segment_time(w: f64, delta: f64) -> f64 {
    PI / 2.0 / w.hypot(delta / 2.0)
}

fn first_order_time(o1: f64, o2: f64, d1: f64, d2: f64) -> f64 {
    PI * PI / 4.0 * (d1 + d2).abs() / (d1 * o2 - d2 * o1).abs()
}

/// `|Lambda| = phi / T` from the trace of the one-period propagator.
fn oracle_lambda(o1: f64, o2: f64, d1: f64, d2: f64) -> (f64, f64) {
    let (t1, t2) = (segment_time(o1, d1), segment_time(o2, d2));
    let u = rk_periodic(
        &two_level_h(o1, 0.0, d1 / 2.0),
        &two_level_h(o2, 0.0, d2 / 2.0),
        t1,
        t2,
        t1 + t2,
    );
    // each segment contributes -i n.sigma, so U(T) = -exp(-i phi n.sigma)
    let phi = (-0.5 * (u[(0, 0)] + u[(1, 1)]).re).clamp(-1.0, 1.0).acos();
    (phi / (t1 + t2), t1 + t2)
}

fn load(path: &Path) -> Table {
    parse_csv(&fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
        .unwrap_or_else(|| panic!("{} is not a numeric CSV", path.display()))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c01_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_501);
    let mut worst = [0.0f64; 4];
    let mut draws = 0;
    for _ in 0..350 {
        let (x, y, z) = (
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        );
        let t = rng.random_range(0.0..20.0);
        let u = su2_propagator(&BlochHamiltonian::new(x, y, z), t);
        worst[0] = worst[0].max(diff(&u, &rk_const(&two_level_h(x, y, z), t)));
        draws += 1;
    }
    for _ in 0..250 {
        let o1: f64 = rng.random_range(-3.0..3.0);
        let o2: f64 = rng.random_range(-3.0..3.0);
        if o1.abs() + o2.abs() < 1e-2 {
            continue;
        }
        let delta = rng.random_range(-60.0..60.0);
        let t = rng.random_range(0.0..5.0);
        let u =
            lambda_propagator(&LambdaSystem::new(o1, o2, delta), t).map_err(|e| e.to_string())?;
        worst[1] = worst[1].max(diff(&u, &rk_const(&lambda_h(o1, o2, delta), t)));
        draws += 1;
    }
    for _ in 0..250 {
        let intensity = rng.random_bool(0.5);
        let (o1, o2, d1, d2) = if intensity {
            let d = rng.random_range(20.0..80.0);
            (rng.random_range(0.2..2.0), rng.random_range(2.2..5.0), d, d)
        } else {
            let w = rng.random_range(0.2..3.0);
            (
                w,
                w,
                rng.random_range(10.0..50.0),
                rng.random_range(60.0..300.0),
            )
        };
        let drive = if intensity {
            SquareWellDrive::intensity(o1, o2, d1, 0)
        } else {
            SquareWellDrive::frequency(o1, d1, d2, 0)
        }
        .map_err(|e| e.to_string())?;
        let pd = drive.decompose();
        let t = rng.random_range(0.0..40.0) * drive.period();
        let oracle = rk_periodic(
            &two_level_h(o1, 0.0, d1 / 2.0),
            &two_level_h(o2, 0.0, d2 / 2.0),
            segment_time(o1, d1),
            segment_time(o2, d2),
            t,
        );
        worst[2] = worst[2].max(diff(&drive.propagator(&pd, t), &oracle));
        draws += 1;
    }
    for _ in 0..200 {
        let o1 = rng.random_range(0.2..3.0);
        let o2 = rng.random_range(0.2..3.0);
        let da = rng.random_range(5.0..80.0);
        let db = rng.random_range(5.0..150.0);
        let n = rng.random_range(0..60u64);
        let (_, dec) = lambda_period_unitary(o1, o2, da, db).map_err(|e| e.to_string())?;
        let y = |d: f64| (4.0 * (o1 * o1 + o2 * o2) + d * d).sqrt();
        let (ta, tb) = (PI / y(da), PI / y(db));
        let oracle = rk_periodic(
            &lambda_h(o1, o2, da),
            &lambda_h(o1, o2, db),
            ta,
            tb,
            n as f64 * (ta + tb),
        );
        worst[3] = worst[3].max(diff(&dec.n_period_unitary(n), &oracle));
        draws += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let max = worst.iter().cloned().fold(0.0, f64::max);
    check(
        draws >= 1000 && max < 1e-7 && secs < 30.0,
        format!(
            "{draws} draws, max deviation {max:.2e} (su2 {:.1e}, lambda {:.1e}, U(t) {:.1e}, U(nT) {:.1e}), {secs:.1}s",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn c02_fig1a(dir: &Path) -> Outcome {
    run_preset("fig1a", dir, None, Some(20001)).map_err(|e| e.to_string())?;
    let t = load(&dir.join("fig1a.csv"));
    let (times, p1) = (t.column("t").unwrap(), t.column("P_1").unwrap());
    let peak = max_of(&p1);
    let (lam, period) = oracle_lambda(1.0, 2.0, 30.0, 30.0);
    // P1 ~ sin^2(|Lambda| t) crosses 1/2 every pi / (2 |Lambda|)
    let mut crossings: Vec<f64> = Vec::new();
    for k in 1..p1.len() {
        if (p1[k - 1] - 0.5) * (p1[k] - 0.5) <= 0.0 && p1[k] != p1[k - 1] {
            let tc =
                times[k - 1] + (0.5 - p1[k - 1]) / (p1[k] - p1[k - 1]) * (times[k] - times[k - 1]);
            if crossings.last().is_none_or(|l| tc - l > 5.0 * period) {
                crossings.push(tc);
            }
        }
    }
    if crossings.len() < 3 {
        return Err(format!(
            "only {} half-population crossings",
            crossings.len()
        ));
    }
    let spacing = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    let freq = PI / (2.0 * spacing);
    let rel = (freq - lam).abs() / lam;
    check(
        peak >= 0.999 && rel < 0.02,
        format!(
            "peak P1 {peak:.5}, measured frequency {freq:.5} vs |Lambda| {lam:.5} ({:.2}%)",
            rel * 100.0
        ),
    )
}

fn c03_first_order_timing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let o1 = rng.random_range(0.3..1.5);
        let o2 = o1 * rng.random_range(2.0..4.0);
        let delta = o2 * rng.random_range(20.0..60.0);
        let tf = first_order_time(o1, o2, delta, delta);
        let period = segment_time(o1, delta) + segment_time(o2, delta);
        let drive = SquareWellDrive::intensity(o1, o2, delta, 0).map_err(|e| e.to_string())?;
        let n = ((1.5 * tf) / (period / 40.0)).ceil() as usize + 1;
        let ts: Vec<f64> = (0..n)
            .map(|k| 1.5 * tf * k as f64 / (n - 1) as f64)
            .collect();
        let psi0 = QuantumState::basis(2, 0);
        let tr = schedule_trajectory(&drive.schedule(), psi0.amplitudes().unwrap(), &ts)
            .map_err(|e| e.to_string())?;
        // slow envelope: P1 averaged over one modulation period
        let p1 = tr.get("P_1").unwrap();
        let w = 40;
        let avg: Vec<f64> = p1
            .windows(w + 1)
            .map(|x| x.iter().sum::<f64>() / (w + 1) as f64)
            .collect();
        // the envelope is flat at the top, so take the centre of its 90% band
        let top = max_of(&avg);
        let lo = avg.iter().position(|&p| p >= 0.9 * top).unwrap();
        let hi = (lo..avg.len())
            .find(|&j| avg[j] < 0.9 * top)
            .unwrap_or(avg.len())
            - 1;
        let t_max = 0.5 * (ts[lo + w / 2] + ts[hi + w / 2]);
        worst = worst.max((t_max - tf).abs() / period);
    }
    check(
        worst <= 1.0,
        format!("20 draws, worst |t_max - T_f| = {worst:.3} periods (period-averaged P1)"),
    )
}

fn c04_fig2(dir: &Path) -> Outcome {
    run_preset("fig2a", dir, None, None).map_err(|e| e.to_string())?;
    run_preset("fig2b", dir, None, None).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for name in ["fig2a", "fig2b"] {
        let t = load(&dir.join(format!("{name}.csv")));
        let (ex, fo, tp) = (
            t.column("exact").unwrap(),
            t.column("first_order").unwrap(),
            t.column("tan_phi").unwrap(),
        );
        for k in 0..ex.len() {
            if tp[k].abs() < 0.1 && ex[k].is_finite() && fo[k].is_finite() {
                worst = worst.max((ex[k] - fo[k]).abs() / ex[k]);
                compared += 1;
            }
        }
    }
    // frequency mode at delta1 = 10 delta2
    let (w, d2) = (1.0, 30.0);
    let drive = SquareWellDrive::frequency(w, 10.0 * d2, d2, 0).map_err(|e| e.to_string())?;
    let exact = inversion_time(&drive, 0).map_err(|e| e.to_string())?;
    let limit = PI * PI / (4.0 * w);
    let gap = (exact - limit).abs() / limit;
    check(
        worst < 0.05 && gap < 0.02,
        format!(
            "{compared} points with tan(phi) < 0.1, worst exact/first-order gap {:.2}%; at delta1 = 10 delta2 exact {exact:.4} vs pi^2/(4 Omega) {limit:.4} ({:.1}%)",
            worst * 100.0,
            gap * 100.0
        ),
    )
}

fn c05_selectivity() -> Outcome {
    let drive = SquareWellDrive::intensity(3.0, 1.0, 100.0, 0).map_err(|e| e.to_string())?;
    let map = selectivity_map(&drive, &[105.0], &[0.0]).map_err(|e| e.to_string())?;
    let p = map.population[0][0];
    check(
        p < 0.1,
        format!(
            "spectator at 1.05 Delta1: P = {p:.4} at t = {:.3} (peak {:.4})",
            map.t_eval, map.peak[0][0]
        ),
    )
}

fn c06_smooth(dir: &Path) -> Outcome {
    run_preset("fig3", dir, None, None).map_err(|e| e.to_string())?;
    let hard = load(&dir.join("fig3_gamma10000.csv"));
    let p1 = hard.column("P_1").unwrap();
    let sq = hard.column("P_1_square").unwrap();
    let final_gap = (p1[p1.len() - 1] - sq[sq.len() - 1]).abs();
    let soft = load(&dir.join("fig3_gamma50.csv"));
    let peak50 = max_of(&soft.column("P_1").unwrap());
    check(
        final_gap < 1e-2 && peak50 > 0.9,
        format!("gamma = 1e4 final gap {final_gap:.2e}; gamma = 50 peak P1 {peak50:.4}"),
    )
}

fn c07_noise() -> Outcome {
    let text = r#"{"system":"two_level","modulation":"intensity","parameters":{"omega1":1,"omega2":3,"delta":50},
        "noise":{"amplitude":0.05,"seed":0},"time":{"t_max":10,"samples":2001},"output":"unused"}"#;
    let base = ScenarioConfig::from_json(text).map_err(|e| e.to_string())?;
    let mut good = 0;
    let mut worst: f64 = 1.0;
    for seed in 0..100u64 {
        let cfg = base.clone().with_overrides(Some(seed), None);
        let tr = simulate(&cfg).map_err(|e| e.to_string())?;
        let peak = max_of(tr.get("P_1").unwrap());
        worst = worst.min(peak);
        if peak >= 0.95 {
            good += 1;
        }
    }
    check(
        good >= 95,
        format!("{good}/100 seeded runs reach P1 >= 0.95 (lowest peak {worst:.4})"),
    )
}

fn c08_decoherence() -> Outcome {
    let drive = SquareWellDrive::frequency(1.0, 30.0, 300.0, 0).map_err(|e| e.to_string())?;
    let rates = [0.01, 0.05, 0.1, 0.2, 0.5];
    let mut g = vec![0.0];
    g.extend(rates);
    let grid = decoherence_sweep(&drive, &g, &g, &QuantumState::basis(2, 0), None)
        .map_err(|e| e.to_string())?;
    let mut worst = f64::NEG_INFINITY;
    for k in 1..g.len() {
        // rows follow gamma01, columns gamma11
        let dissipation = grid.final_p1[k][0];
        let dephasing = grid.final_p1[0][k];
        worst = worst.max(dissipation - dephasing);
    }
    check(
        worst < 0.0,
        format!(
            "max over rates of P1(dissipation) - P1(dephasing) = {worst:.4} at t = {:.3}",
            grid.t_eval
        ),
    )
}

fn c09_plateau(dir: &Path) -> Outcome {
    let drive = SquareWellDrive::intensity(10.0, 1.0, 30.0, 0).map_err(|e| e.to_string())?;
    let (best, res) = plateau_scan(&drive, 20).map_err(|e| e.to_string())?;
    run_preset("fig6", dir, None, Some(20001)).map_err(|e| e.to_string())?;
    let t = load(&dir.join("fig6.csv"));
    let (times, p1) = (t.column("t").unwrap(), t.column("P_1").unwrap());
    let len = longest_run_above(&times, &p1, 0.99).map_or(0.0, |(a, b)| b - a);
    let t1 = segment_time(10.0, 30.0);
    let t2 = segment_time(1.0, 30.0);
    check(
        len >= 3.0 * t1,
        format!(
            "best m = {best} (residual {:.3}); longest P1 > 0.99 run {len:.4} vs 3 t1 = {:.4} (t2 = {t2:.4})",
            res[best as usize - 1],
            3.0 * t1
        ),
    )
}

/// Direct N-pulse simulation of a Gaussian train.
fn oracle_gaussian(a: f64, xi: f64, delta: f64, pulses: u64) -> f64 {
    let period = 8.0 * xi;
    let steps = ((period * a.hypot(delta / 2.0) * 4.0) / 5e-3).ceil() as usize;
    let dt = period / steps as f64;
    let mut u = M::<2>::identity();
    // midpoint-sampled piecewise-constant approximation of the pulse
    for k in 0..steps {
        let tm = (k as f64 + 0.5) * dt - 4.0 * xi;
        let w = a * (-tm * tm / (2.0 * xi * xi)).exp();
        u = taylor4(&two_level_h(w, 0.0, delta / 2.0), dt) * u;
    }
    let mut total = M::<2>::identity();
    for _ in 0..pulses {
        total = u * total;
    }
    total[(1, 0)].norm_sqr()
}

fn c10_gaussian() -> Outcome {
    let delta = 2.0;
    let spec = GaussianSearch::new(
        delta,
        AxisRange::linear(0.1, 2.0, 39),
        AxisRange::linear(0.1, 2.0, 39),
        0,
    );
    let cands = gaussian_search(&spec).map_err(|e| e.to_string())?;
    let good = cands
        .iter()
        .find(|c| {
            c.simulated > 0.99 && (c.fractional_pulses - c.fractional_pulses.round()).abs() < 0.5
        })
        .ok_or("no verified candidate")?;
    let oracle = oracle_gaussian(good.amplitude, good.width, delta, good.pulses);
    let mut five = spec;
    five.target_pulses = Some(5);
    let five = gaussian_search(&five).map_err(|e| e.to_string())?;
    let f = &five[0];
    let f_oracle = oracle_gaussian(f.amplitude, f.width, delta, 5);
    check(
        good.simulated > 0.99 && oracle > 0.99 && f.simulated > 0.99 && f_oracle > 0.99,
        format!(
            "best A={:.4} xi={:.4} N={} (fractional {:.3}) P1 {:.5} (oracle {:.5}); 5-pulse A={:.4} xi={:.4} P1 {:.5} (oracle {:.5})",
            good.amplitude, good.width, good.pulses, good.fractional_pulses, good.simulated, oracle, f.amplitude, f.width,
            f.simulated, f_oracle
        ),
    )
}

fn c11_rabi(dir: &Path) -> Outcome {
    let start = Instant::now();
    run_preset("fig8", dir, None, None).map_err(|e| e.to_string())?;
    run_preset("fig9", dir, None, None).map_err(|e| e.to_string())?;
    let resonant = load(&dir.join("fig8.csv"));
    let pe_res = max_of(&resonant.column("P_e").unwrap());
    let modulated = load(&dir.join("fig9.csv"));
    let times = modulated.column("t").unwrap();
    let pe = modulated.column("P_e").unwrap();
    // first excursion above 0.95, then its local maximum
    let first = pe
        .iter()
        .position(|&p| p > 0.95)
        .ok_or(format!("P_e never exceeds 0.95 (max {:.4})", max_of(&pe)))?;
    let end = (first..pe.len())
        .find(|&j| pe[j] <= 0.95)
        .unwrap_or(pe.len());
    let k = (first..end)
        .max_by(|&a, &b| pe[a].total_cmp(&pe[b]))
        .unwrap();
    let (t_peak, p_peak) = (times[k], pe[k]);
    // photon distribution drift at the transfer time
    let n_cols: Vec<String> = modulated
        .columns
        .iter()
        .filter(|c| c.starts_with("p_n"))
        .cloned()
        .collect();
    let p0: Vec<f64> = n_cols
        .iter()
        .map(|c| modulated.column(c).unwrap()[0])
        .collect();
    let pk: Vec<f64> = n_cols
        .iter()
        .map(|c| modulated.column(c).unwrap()[k])
        .collect();
    let tv = p0.iter().zip(&pk).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
    // initial distribution against an independent Poisson
    let mut poisson_gap: f64 = 0.0;
    let mut term = (-20.0f64).exp();
    for (n, p) in p0.iter().enumerate() {
        if n > 0 {
            term *= 20.0 / n as f64;
        }
        poisson_gap = poisson_gap.max((p - term).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        pe_res < 0.95 && p_peak > 0.95 && (t_peak - 2.5).abs() <= 0.25 && tv < 0.1 && poisson_gap < 1e-6 && secs < 300.0,
        format!(
            "resonant max P_e {pe_res:.4}; modulated first peak P_e {p_peak:.5} at Omega1 t = {t_peak:.3}; photon TV {tv:.2e}; dim {}; {secs:.1}s",
            2 * 51 + 1
        ),
    )
}

/// `x = m * 10^e` with `1 <= m < 10`.
fn mantissa(x: f64) -> (f64, i32) {
    let e = x.abs().log10().floor() as i32;
    (x / 10f64.powi(e), e)
}

fn c12_rydberg() -> Outcome {
    // rates in rad/us from MHz, detuning taken as stated
    let (o1, o2, delta) = (2.0 * PI * 30.0, 2.0 * PI * 300.0, 6.25e8);
    let drive = SquareWellDrive::intensity(o1, o2, delta, 0).map_err(|e| e.to_string())?;
    let us = 1e-6;
    let (m1, e1) = mantissa(drive.t1() * us);
    let (m2, e2) = mantissa(drive.t2() * us);
    // T on the same power of ten as t1
    let (mt, et) = (drive.period() * us / 10f64.powi(e1), e1);
    let total = first_order_time(o1, o2, delta, delta) * us;
    let (mf, ef) = mantissa(total);
    let exact = inversion_time(&drive, 0).map_err(|e| e.to_string())? * us;
    let ok = (m1 - 5.03).abs() <= 0.01
        && (m2 - 5.03).abs() <= 0.01
        && (mt - 10.06).abs() <= 0.01
        && (mf - 2.9).abs() <= 0.1;
    // stated units: ps for t1, T and us for the total time
    check(
        ok,
        format!(
            "t1 = {m1:.3}e{e1} s, t2 = {m2:.3}e{e2} s, T = {mt:.3}e{et} s, total = {mf:.2}e{ef} s (exact {exact:.3e} s); \
             stated ps and us imply 1e-12 and 1e-6, computed exponents differ by 10^{} and 10^{}",
            -12 - e1,
            -6 - ef
        ),
    )
}

fn c13_three_level(dir: &Path) -> Outcome {
    run_preset("fig10a", dir, None, None).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut ok = true;
    for tag in ["a", "b"] {
        let t = load(&dir.join(format!("fig10a_{tag}.csv")));
        let dev = ["P_0", "P_1", "P_2"]
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let init = if k == 2 { 1.0 } else { 0.0 };
                t.column(c)
                    .unwrap()
                    .iter()
                    .map(|p| (p - init).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        ok &= dev <= 0.02;
        notes.push(format!("constant ({tag}) max deviation {dev:.4}"));
    }
    let c = load(&dir.join("fig10a_c.csv"));
    let p2min = c.column("P_2").unwrap().iter().cloned().fold(1.0, f64::min);
    ok &= p2min < 0.05;
    notes.push(format!("modulated min P_2 {p2min:.4}"));
    for (preset, col) in [("fig11a", "P_2"), ("fig11b", "P_2"), ("fig12", "P_10")] {
        run_preset(preset, dir, None, None).map_err(|e| e.to_string())?;
        let m = max_of(
            &load(&dir.join(format!("{preset}.csv")))
                .column(col)
                .unwrap(),
        );
        ok &= m > 0.9;
        notes.push(format!("{preset} max {col} {m:.4}"));
    }
    // c0 / c1 at stroboscopic samples of the modulated run
    let (o1, o2) = (1.0, 2.0);
    let sched = ThreeLevelSchedule::detuning_switch(o1, o2, 50.0, 100.0, 0.0);
    let drive = sched.drive().map_err(|e| e.to_string())?;
    let times: Vec<f64> = (1..=200).map(|n| n as f64 * drive.period()).collect();
    let psi0 = offres_core::linalg::basis_vector(3, 2);
    let mut worst: f64 = 0.0;
    for psi in drive.evolve(&psi0, &times).map_err(|e| e.to_string())? {
        // c0 Omega2 - c1 Omega1 = 0 avoids dividing by a vanishing c1
        worst = worst.max((psi[0] * o2 - psi[1] * o1).norm());
    }
    ok &= worst < 1e-8;
    notes.push(format!("|c0 W2 - c1 W1| <= {worst:.1e} over 200 periods"));
    check(ok, notes.join("; "))
}

fn c14_determinism(a: &Path, b: &Path) -> Outcome {
    let presets = [
        "fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig3", "fig4", "fig5", "fig6",
        "fig7", "fig8", "fig9", "fig10r", "fig10a", "fig11a", "fig11b", "fig12",
    ];
    let mut files = 0;
    for p in presets {
        for dir in [a, b] {
            run_preset(p, dir, None, None).map_err(|e| format!("{p}: {e}"))?;
        }
    }
    for entry in fs::read_dir(a).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|x| x == "csv") {
            let other = b.join(path.file_name().unwrap());
            if fs::read(&path).ok() != fs::read(&other).ok() {
                return Err(format!("{} differs between runs", path.display()));
            }
            files += 1;
        }
    }
    check(
        files >= presets.len(),
        format!(
            "{} presets, {files} CSV files byte-identical",
            presets.len()
        ),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let dir = tmp.path().join("bundle");
    let (ra, rb) = (tmp.path().join("rerun_a"), tmp.path().join("rerun_b"));
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(c01_oracle_equivalence)),
        (
            "fig1a peak and Rabi-like frequency",
            Box::new(|| c02_fig1a(&dir)),
        ),
        (
            "first-order transfer time",
            Box::new(c03_first_order_timing),
        ),
        (
            "fig2 exact vs first-order times",
            Box::new(|| c04_fig2(&dir)),
        ),
        ("selectivity", Box::new(c05_selectivity)),
        ("smooth square well", Box::new(|| c06_smooth(&dir))),
        ("noise robustness", Box::new(c07_noise)),
        ("decoherence ordering", Box::new(c08_decoherence)),
        ("plateaus", Box::new(|| c09_plateau(&dir))),
        ("Gaussian trains", Box::new(c10_gaussian)),
        ("quantum Rabi model", Box::new(|| c11_rabi(&dir))),
        ("Rydberg numerals", Box::new(c12_rydberg)),
        ("three-level appendix", Box::new(|| c13_three_level(&dir))),
        ("determinism", Box::new(|| c14_determinism(&ra, &rb))),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.1}s]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Argument parsing and subcommand dispatch.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand};
use offres_core::optimizer::{
    gaussian_search, scan, scan_minimal_time, AxisRange, GaussianSearch, Objective, SweepSpec,
};

use crate::config::ScenarioConfig;
use crate::output::{with_suffix, RunRecord, Table};
use crate::presets::{candidate_table, manifest, run_preset};
use crate::{runner, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "offres",
    version,
    about = "Population transfer by far-off-resonant periodic driving"
)]
pub struct Cli {
    /// Overrides the noise or random-field seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the number of output samples.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Runs a scenario config and writes `<output>.csv` and `<output>.run.json`.
    Run { config: PathBuf },
    /// Regenerates the data behind a figure.
    Figure {
        preset: String,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Lists the bundled presets.
    Presets,
    /// Evaluates a sweep spec on its grid.
    Scan {
        spec: PathBuf,
        /// Output prefix; defaults to the spec path without extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Searches `(A, xi)` for Gaussian trains that invert the population.
    OptimizeGaussian {
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        /// `lo:hi:n`
        #[arg(long)]
        a_range: Range,
        /// `lo:hi:n`
        #[arg(long)]
        xi_range: Range,
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// Keeps only candidates with this many pulses.
        #[arg(long)]
        pulses: Option<u64>,
        #[arg(long, default_value = "gaussian_search")]
        out: PathBuf,
    },
}

/// `lo:hi:n` on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected lo:hi:n, got `{s}`"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
        let n: usize = n.parse().map_err(|_| format!("bad point count `{n}`"))?;
        Ok(Range { lo, hi, n })
    }
}

impl Range {
    fn axis(self) -> AxisRange {
        AxisRange::linear(self.lo, self.hi, self.n)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn run_cli(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { config } => {
            let bytes = read(config)?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|e| CliError::config("config", e.to_string()))?;
            let cfg = ScenarioConfig::from_json(&text)?.with_overrides(cli.seed, cli.samples);
            cfg.validate()?;
            let rec = runner::run_to(&cfg, &bytes, Path::new(&cfg.output), "run")?;
            for o in &rec.outputs {
                println!("{o}");
            }
        }
        Command::Figure { preset, out } => {
            let rec = run_preset(preset, out, cli.seed, cli.samples)?;
            for o in &rec.outputs {
                println!("{o}");
            }
        }
        Command::Presets => {
            for (name, p) in manifest() {
                println!("{name:8} {}", p.description);
            }
        }
        Command::Scan { spec, out } => {
            let bytes = read(spec)?;
            let mut s: SweepSpec = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::config("spec", e.to_string()))?;
            if let Some(n) = cli.samples {
                for a in &mut s.axes {
                    a.range.points = n;
                }
            }
            s.validate()?;
            let prefix = out.clone().unwrap_or_else(|| spec.with_extension(""));
            let start = Instant::now();
            let table = scan_table(&s)?;
            let mut rec = RunRecord::new("scan", &bytes);
            let csv = with_suffix(&prefix, ".csv");
            table.write_csv(&csv)?;
            rec.outputs.push(csv.display().to_string());
            rec.wall_time_s = start.elapsed().as_secs_f64();
            rec.write(&with_suffix(&prefix, ".run.json"))?;
            println!("{}", csv.display());
        }
        Command::OptimizeGaussian {
            delta,
            a_range,
            xi_range,
            m,
            pulses,
            out,
        } => {
            let start = Instant::now();
            let mut spec = GaussianSearch::new(*delta, a_range.axis(), xi_range.axis(), *m);
            spec.target_pulses = *pulses;
            let cands = gaussian_search(&spec)?;
            let table = candidate_table(&cands);
            let args =
                format!("delta={delta} a={a_range:?} xi={xi_range:?} m={m} pulses={pulses:?}");
            let mut rec = RunRecord::new("optimize-gaussian", args.as_bytes());
            let csv = with_suffix(out, ".csv");
            table.write_csv(&csv)?;
            rec.outputs.push(csv.display().to_string());
            rec.diagnostics
                .insert("candidates".into(), cands.len() as f64);
            rec.wall_time_s = start.elapsed().as_secs_f64();
            rec.write(&with_suffix(out, ".run.json"))?;
            print!("{}", table.to_csv());
        }
    }
    Ok(())
}

fn scan_table(s: &SweepSpec) -> Result<Table, CliError> {
    if s.axes.len() == 1
        && matches!(
            s.objective,
            Objective::ExactTime | Objective::FirstOrderTime
        )
    {
        let mut t = Table::new(vec![
            s.axes[0].name.clone(),
            "exact".into(),
            "first_order".into(),
            "tan_phi".into(),
        ]);
        for p in scan_minimal_time(s)? {
            t.push(vec![
                p.value,
                p.exact.unwrap_or(f64::NAN),
                p.first_order.unwrap_or(f64::NAN),
                p.tan_phi.unwrap_or(f64::NAN),
            ]);
        }
        return Ok(t);
    }
    let res = scan(s)?;
    let mut cols = res.axes.clone();
    cols.push(crate::config::enum_name(&s.objective));
    let mut t = Table::new(cols);
    for (coords, v) in res.points {
        let mut row = coords;
        row.push(v.unwrap_or(f64::NAN));
        t.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parses() {
        assert_eq!(
            "0.1:2:20".parse::<Range>().unwrap(),
            Range {
                lo: 0.1,
                hi: 2.0,
                n: 20
            }
        );
        assert!("0.1:2".parse::<Range>().is_err());
    }

    #[test]
    fn cli_parses_globals_after_subcommand() {
        let cli =
            Cli::try_parse_from(["offres", "figure", "fig4", "--seed", "3", "--samples", "11"])
                .unwrap();
        assert_eq!(cli.seed, Some(3));
        assert_eq!(cli.samples, Some(11));
    }
}

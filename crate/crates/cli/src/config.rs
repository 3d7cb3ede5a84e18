//! Scenario configuration files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    TwoLevel,
    ThreeLevel,
    NLevel,
    Rabi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulationKind {
    None,
    Intensity,
    Frequency,
    Gaussian,
    Smooth,
    DeltaSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decoherence {
    pub gamma01: f64,
    pub gamma11: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub amplitude: f64,
    pub seed: u64,
    /// Resampling interval; defaults to a twentieth of the modulation period.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: System,
    pub modulation: ModulationKind,
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoherence: Option<Decoherence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    pub time: TimeSpec,
    pub output: String,
}

/// Parameter names a mode requires and accepts.
struct Schema {
    required: Vec<String>,
    optional: Vec<String>,
}

fn schema(
    system: System,
    modulation: ModulationKind,
    params: &BTreeMap<String, f64>,
) -> Result<Schema, CliError> {
    use ModulationKind as M;
    let s = |req: &[&str], opt: &[&str]| Schema {
        required: req.iter().map(|x| x.to_string()).collect(),
        optional: opt.iter().map(|x| x.to_string()).collect(),
    };
    let three = ["offset", "t1", "t2", "initial", "photon_storage"];
    let rabi = [
        "m",
        "atom0",
        "mean_photons",
        "field_seed",
        "pure_coherent",
        "full_truncation",
        "sqrt_n_coupling",
    ];
    Ok(match (system, modulation) {
        (System::TwoLevel, M::None) => s(&["omega", "delta"], &["initial"]),
        (System::TwoLevel, M::Intensity) => s(&["omega1", "omega2", "delta"], &["m", "initial"]),
        (System::TwoLevel, M::Frequency) => s(&["omega", "delta1", "delta2"], &["m", "initial"]),
        (System::TwoLevel, M::Smooth) => s(&["omega1", "omega2", "delta", "gamma"], &["initial"]),
        (System::TwoLevel, M::Gaussian) => s(&["amplitude", "width", "delta"], &["initial"]),
        (System::ThreeLevel, M::None) => s(
            &["omega1", "omega2", "delta"],
            &["offset", "initial", "photon_storage"],
        ),
        (System::ThreeLevel, M::Frequency) => {
            s(&["omega1", "omega2", "delta_a", "delta_b"], &three)
        }
        (System::ThreeLevel, M::Intensity) => {
            s(&["omega1", "omega2", "omega2_prime", "delta"], &three)
        }
        (System::ThreeLevel, M::DeltaSchedule) => s(
            &["omega1", "omega2", "delta", "offset_a", "offset_b"],
            &["t1", "t2", "initial", "photon_storage"],
        ),
        (System::NLevel, M::Frequency) => {
            // omega1..omegaK, contiguous
            let k = (1..)
                .take_while(|k| params.contains_key(&format!("omega{k}")))
                .count();
            let mut req: Vec<String> = (1..=k.max(2)).map(|k| format!("omega{k}")).collect();
            req.extend(["delta_a".to_string(), "delta_b".to_string()]);
            Schema {
                required: req,
                optional: vec![],
            }
        }
        (System::Rabi, M::None) => s(&["omega0", "delta", "omega", "n_max"], &rabi),
        (System::Rabi, M::Intensity) => s(&["omega0", "delta", "omega1", "omega2", "n_max"], &rabi),
        (sys, m) => {
            return Err(CliError::config(
                "modulation",
                format!(
                    "modulation `{}` is not available for system `{}`",
                    enum_name(&m),
                    enum_name(&sys)
                ),
            ))
        }
    })
}

pub(crate) fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|x| x.as_str().map(str::to_string))
        .unwrap_or_default()
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let sc = schema(self.system, self.modulation, &self.parameters)?;
        for name in &sc.required {
            if !self.parameters.contains_key(name) {
                return Err(CliError::config(
                    format!("parameters.{name}"),
                    format!(
                        "required for {} / {}",
                        enum_name(&self.system),
                        enum_name(&self.modulation)
                    ),
                ));
            }
        }
        for (name, v) in &self.parameters {
            if !sc.required.contains(name) && !sc.optional.contains(name) {
                return Err(CliError::config(
                    format!("parameters.{name}"),
                    format!(
                        "unknown parameter for {} / {}",
                        enum_name(&self.system),
                        enum_name(&self.modulation)
                    ),
                ));
            }
            if !v.is_finite() {
                return Err(CliError::config(
                    format!("parameters.{name}"),
                    "must be finite",
                ));
            }
        }
        for name in [
            "m",
            "initial",
            "n_max",
            "atom0",
            "field_seed",
            "photon_storage",
            "pure_coherent",
            "full_truncation",
            "sqrt_n_coupling",
        ] {
            if let Some(v) = self.parameters.get(name) {
                if *v < 0.0 || v.fract() != 0.0 {
                    return Err(CliError::config(
                        format!("parameters.{name}"),
                        "must be a non-negative integer",
                    ));
                }
            }
        }
        if self.system == System::Rabi {
            let coherent = self.parameters.contains_key("mean_photons");
            let random = self.parameters.contains_key("field_seed");
            if coherent == random {
                return Err(CliError::config(
                    "parameters.mean_photons",
                    "give exactly one of mean_photons (coherent field) or field_seed (random field)",
                ));
            }
        }
        if !(self.time.t_max > 0.0) || !self.time.t_max.is_finite() {
            return Err(CliError::config("time.t_max", "must be positive"));
        }
        if self.time.samples < 2 {
            return Err(CliError::config("time.samples", "need at least 2 samples"));
        }
        if self.output.is_empty() {
            return Err(CliError::config(
                "output",
                "must be a non-empty path prefix",
            ));
        }
        let square_well = self.system == System::TwoLevel
            && matches!(
                self.modulation,
                ModulationKind::Intensity | ModulationKind::Frequency
            );
        if let Some(d) = &self.decoherence {
            if !square_well {
                return Err(CliError::config(
                    "decoherence",
                    "only supported for two-level square wells",
                ));
            }
            if !(d.gamma01 >= 0.0) || !(d.gamma11 >= 0.0) {
                return Err(CliError::config("decoherence", "rates must be >= 0"));
            }
        }
        if let Some(n) = &self.noise {
            if !(square_well || self.modulation == ModulationKind::Smooth)
                || self.system != System::TwoLevel
            {
                return Err(CliError::config(
                    "noise",
                    "only supported for two-level square and smooth wells",
                ));
            }
            if self.decoherence.is_some() {
                return Err(CliError::config(
                    "noise",
                    "cannot be combined with decoherence",
                ));
            }
            if !(n.amplitude >= 0.0) {
                return Err(CliError::config("noise.amplitude", "must be >= 0"));
            }
            if n.dt.is_some_and(|dt| !(dt > 0.0)) {
                return Err(CliError::config("noise.dt", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> f64 {
        self.parameters[name]
    }

    pub fn opt(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }

    pub fn flag(&self, name: &str) -> bool {
        self.opt(name).is_some_and(|v| v != 0.0)
    }

    /// The seed of the noise track or the random field.
    pub fn seed(&self) -> Option<u64> {
        self.noise
            .map(|n| n.seed)
            .or_else(|| self.opt("field_seed").map(|s| s as u64))
    }

    /// Applies `--seed` and `--samples` overrides.
    pub fn with_overrides(mut self, seed: Option<u64>, samples: Option<usize>) -> Self {
        if let Some(seed) = seed {
            if let Some(n) = &mut self.noise {
                n.seed = seed;
            }
            if self.parameters.contains_key("field_seed") {
                self.parameters.insert("field_seed".into(), seed as f64);
            }
        }
        if let Some(s) = samples {
            self.time.samples = s;
        }
        self
    }
}

//! Scenario configuration files (TOML). Unknown keys are rejected; keys that
//! a scenario does not use are rejected as well, so a typo never silently
//! falls back to a default.
//!
//! Rates (`gamma`, `lambda`, `b0`, `b1`, ...) are plain numbers; pick a
//! reference rate and quote the rest as ratios to it.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    SpontaneousEmission,
    ThermalQuench,
    RotatingField,
    PhotonPulse,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::SpontaneousEmission,
        ScenarioKind::ThermalQuench,
        ScenarioKind::RotatingField,
        ScenarioKind::PhotonPulse,
        ScenarioKind::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::SpontaneousEmission => "spontaneous_emission",
            ScenarioKind::ThermalQuench => "thermal_quench",
            ScenarioKind::RotatingField => "rotating_field",
            ScenarioKind::PhotonPulse => "photon_pulse",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioKind::SpontaneousEmission => {
                "spin-1/2 starting in the excited state, thermal damping, H = omega J_z"
            }
            ScenarioKind::ThermalQuench => {
                "spin-1/2 Gibbs state at initial.temperature relaxing to a bath at bath.temperature"
            }
            ScenarioKind::RotatingField => {
                "spin-1/2 in H = -b0 J_z - b1 (J_x cos wt + J_y sin wt) with damping or dephasing"
            }
            ScenarioKind::PhotonPulse => {
                "two-level atom excited by an exponential single-photon pulse"
            }
            ScenarioKind::Custom => {
                "any spin, Hamiltonian, channel and initial state; Wehrl rates by quadrature"
            }
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    None,
    StaticJz,
    RotatingField,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub kind: HamiltonianKind,
    pub omega: Option<f64>,
    pub b0: Option<f64>,
    pub b1: Option<f64>,
    pub drive_omega: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathKind {
    None,
    Damping,
    Dephasing,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub kind: BathKind,
    pub gamma: Option<f64>,
    /// Temperature in units of the level spacing `hamiltonian.omega`.
    pub temperature: Option<f64>,
    pub nbar: Option<f64>,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Excited,
    Ground,
    MaximallyMixed,
    /// spin-1/2 Bloch vector `tau (sin theta cos phi, sin theta sin phi, cos theta)`
    Bloch,
    Coherent,
    Populations,
    Gibbs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub populations: Option<Vec<f64>>,
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    #[serde(default = "one")]
    pub gamma0: f64,
    /// Pulse bandwidth over `gamma0`.
    pub omega_ratio: f64,
    pub a0: f64,
    pub omega0: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_theta: default_n_theta(),
            n_phi: default_n_phi(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub output_dt: f64,
    /// Integrator tolerance (custom scenario only).
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Quadrature,
    ClosedForm,
    Exact,
    Asymptotic,
}

impl MethodName {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Quadrature => "quadrature",
            MethodName::ClosedForm => "closed_form",
            MethodName::Exact => "exact",
            MethodName::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// File name of the trajectory CSV inside the output directory.
    pub csv: Option<String>,
    /// Methods cross-checked by `run` and `compare`.
    pub methods: Option<Vec<MethodName>>,
    /// Columns kept in the sweep table (all by default).
    pub sweep_columns: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Trajectory samples used for the comparison (evenly strided).
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            tolerance: default_tolerance(),
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SweepValues {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl SweepValues {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepValues::List(v) => v.clone(),
            SweepValues::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub values: SweepValues,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioKind,
    /// Stem for output files; defaults to the config file stem.
    pub name: Option<String>,
    pub two_j: Option<u32>,
    pub hamiltonian: Option<HamiltonianConfig>,
    pub bath: Option<BathConfig>,
    pub initial: Option<InitialConfig>,
    pub pulse: Option<PulseConfig>,
    pub grid: Option<GridConfig>,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
}

fn one() -> f64 {
    1.0
}

fn default_n_theta() -> usize {
    96
}

fn default_n_phi() -> usize {
    192
}

fn default_tolerance() -> f64 {
    1e-5
}

fn default_samples() -> usize {
    200
}

/// Raw document plus the file stem used to name outputs.
#[derive(Debug, Clone)]
pub struct ConfigSource {
    pub stem: String,
    pub document: toml::Table,
}

impl ConfigSource {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".to_string());
        Self::parse(&text, stem)
    }

    pub fn parse(text: &str, stem: String) -> Result<Self, CliError> {
        // parse once as typed config for line-accurate messages
        toml::from_str::<Config>(text).map_err(|e| CliError::Config(e.to_string()))?;
        let document =
            toml::from_str::<toml::Table>(text).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(ConfigSource { stem, document })
    }

    pub fn config(&self) -> Result<Config, CliError> {
        let text = toml::to_string(&self.document).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg: Config = toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.name.is_none() {
            cfg.name = Some(self.stem.clone());
        }
        Ok(cfg)
    }

    /// Replaces the numeric value at a dotted path such as
    /// `bath.temperature`. The key must already exist.
    pub fn set_param(&mut self, path: &str, value: f64) -> Result<(), CliError> {
        let unknown = || {
            CliError::Config(format!(
                "unknown parameter `{path}`: not a numeric key of the config"
            ))
        };
        let parts: Vec<&str> = path.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) || parts[0] == "sweep" {
            return Err(unknown());
        }
        let (last, parents) = parts.split_last().ok_or_else(unknown)?;
        let mut table = &mut self.document;
        for p in parents {
            table = table
                .get_mut(*p)
                .and_then(|v| v.as_table_mut())
                .ok_or_else(unknown)?;
        }
        let slot = table.get_mut(*last).ok_or_else(unknown)?;
        match slot {
            toml::Value::Float(_) => *slot = toml::Value::Float(value),
            toml::Value::Integer(_) => {
                if value.fract() != 0.0 || value.abs() > i64::MAX as f64 {
                    return Err(CliError::Config(format!(
                        "`{path}` takes integers, got {value}"
                    )));
                }
                *slot = toml::Value::Integer(value as i64);
            }
            _ => return Err(unknown()),
        }
        Ok(())
    }
}

impl Config {
    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }

    pub fn csv_name(&self) -> String {
        self.output
            .csv
            .clone()
            .unwrap_or_else(|| format!("{}.csv", self.name()))
    }

    pub fn grid_or_default(&self) -> GridConfig {
        self.grid.clone().unwrap_or_default()
    }
}

/// Parses `NxM` (e.g. `96x192`).
pub fn parse_grid(spec: &str) -> Result<GridConfig, CliError> {
    let bad = || {
        CliError::Config(format!(
            "--grid expects NxM with positive integers, got `{spec}`"
        ))
    };
    let (a, b) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
    let n_theta: usize = a.trim().parse().map_err(|_| bad())?;
    let n_phi: usize = b.trim().parse().map_err(|_| bad())?;
    if n_theta == 0 || n_phi == 0 {
        return Err(bad());
    }
    Ok(GridConfig { n_theta, n_phi })
}

/// Parses a comma-separated list of numbers.
pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Config(format!("sweep value `{s}` is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
scenario = "thermal_quench"

[hamiltonian]
kind = "static_jz"
omega = 1.0

[bath]
kind = "damping"
gamma = 1.0
temperature = 2.0

[initial]
kind = "gibbs"
temperature = 0.2

[time]
t_max = 1.0
output_dt = 0.1
"#;

    fn source() -> ConfigSource {
        ConfigSource::parse(BASE, "quench".into()).unwrap()
    }

    #[test]
    fn name_defaults_to_the_file_stem() {
        let cfg = source().config().unwrap();
        assert_eq!(cfg.name(), "quench");
        assert_eq!(cfg.csv_name(), "quench.csv");
        assert_eq!(cfg.compare.samples, 200);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_name() {
        let text = BASE.replace("gamma = 1.0", "gamma = 1.0\ngama = 2.0");
        let err = ConfigSource::parse(&text, "x".into())
            .unwrap_err()
            .to_string();
        assert!(err.contains("gama"), "{err}");
    }

    #[test]
    fn set_param_keeps_types() {
        let mut src = source();
        src.set_param("bath.temperature", 5.0).unwrap();
        assert_eq!(src.config().unwrap().bath.unwrap().temperature, Some(5.0));
        src.set_param("time.t_max", 3.0).unwrap();
        assert!(src.set_param("bath.nbar", 1.0).is_err());
        assert!(src.set_param("bath.kind", 1.0).is_err());
        assert!(src.set_param("scenario", 1.0).is_err());
        assert!(src.set_param("", 1.0).is_err());
    }

    #[test]
    fn integer_keys_take_integral_values() {
        let text = format!("two_j = 1\n{}", BASE.replace("thermal_quench", "custom"));
        let mut src = ConfigSource::parse(&text, "x".into()).unwrap();
        src.set_param("two_j", 3.0).unwrap();
        assert_eq!(src.config().unwrap().two_j, Some(3));
        assert!(src.set_param("two_j", 2.5).is_err());
    }

    #[test]
    fn grid_and_value_lists() {
        let g = parse_grid("48x96").unwrap();
        assert_eq!((g.n_theta, g.n_phi), (48, 96));
        assert!(parse_grid("48").is_err());
        assert!(parse_grid("0x10").is_err());
        assert_eq!(parse_values("0.1, 2,3e-1").unwrap(), vec![0.1, 2.0, 0.3]);
        assert!(parse_values("1,x").is_err());
        assert!(parse_values("").unwrap().is_empty());
    }

    #[test]
    fn sweep_ranges_include_both_ends() {
        let r = SweepValues::Range {
            start: 0.0,
            stop: 1.0,
            count: 5,
        };
        assert_eq!(r.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let one = SweepValues::Range {
            start: 2.0,
            stop: 9.0,
            count: 1,
        };
        assert_eq!(one.values(), vec![2.0]);
    }
}

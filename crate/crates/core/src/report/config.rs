//! Scenario configuration: a flat TOML document.
//!
//! ```toml
//! mode = "three_level_zeno"
//! omega = 0.05
//! eta = -0.2
//! n = 50
//! dt = 0.1
//! out = "fig2.csv"
//! ```
//!
//! Recognized keys (all optional at the parse level; each mode checks its own
//! requirements, see [`Mode::requirements`]):
//!
//! | key       | type    | meaning                                         |
//! |-----------|---------|-------------------------------------------------|
//! | `mode`    | string  | one of the [`Mode`] names                       |
//! | `omega`   | float   | Rabi frequency Ω, rad/ns                        |
//! | `phi`     | float   | drive phase φ, rad (default −π/2)               |
//! | `eta`     | float   | anharmonicity η, rad/ns (default −0.2)          |
//! | `gamma`   | float   | tunneling rate Γ, 1/ns                          |
//! | `v`       | float   | two-level coupling V, rad/ns                    |
//! | `g`       | float   | transverse coupling, rad/ns                     |
//! | `g_tilde` | float   | longitudinal coupling, rad/ns                   |
//! | `n`       | integer | measurement intervals                           |
//! | `dt`      | float   | interval length, ns                             |
//! | `t_total` | float   | total time, ns                                  |
//! | `samples` | integer | sample intervals for free evolution (def. 100)  |
//! | `steps`   | integer | tunneling sub-steps (default: δ ≤ 0.01/Γ, ≥ 1000) |
//! | `n_max`   | integer | upper end of the n_crit scan                    |
//! | `axis`    | string  | sweep axis: `n`, `gamma`, `omega` or `dt`       |
//! | `grid`    | array   | sweep values, strictly monotone                 |
//! | `out`     | string  | output CSV path                                 |
//! | `seed`    | integer | seed for randomized utilities (default 0)       |
//!
//! Unknown keys are rejected.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::engine::ZenoSchedule;
use crate::error::{Error, Result};
use crate::models::{ModelSpec, DEFAULT_ETA, Y_DRIVE_PHASE};

use super::ncrit::MAX_N_CRIT_SCAN;
use super::sweep::SweepAxis;

pub const DEFAULT_SAMPLES: usize = 100;

/// Relative tolerance when `t_total` and `n·dt` are both given.
const TIME_CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    TwoLevelZeno,
    ThreeLevelZeno,
    NoZeno,
    Tunneling,
    Ghz,
    Sweep,
    Ncrit,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::TwoLevelZeno,
        Mode::ThreeLevelZeno,
        Mode::NoZeno,
        Mode::Tunneling,
        Mode::Ghz,
        Mode::Sweep,
        Mode::Ncrit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::TwoLevelZeno => "two_level_zeno",
            Mode::ThreeLevelZeno => "three_level_zeno",
            Mode::NoZeno => "no_zeno",
            Mode::Tunneling => "tunneling",
            Mode::Ghz => "ghz",
            Mode::Sweep => "sweep",
            Mode::Ncrit => "ncrit",
        }
    }

    /// Human-readable key requirements.
    pub fn requirements(self) -> &'static str {
        match self {
            Mode::TwoLevelZeno => "v, n, and one of dt / t_total",
            Mode::ThreeLevelZeno => "omega, n, and one of dt / t_total",
            Mode::NoZeno => "omega, t_total (optional samples)",
            Mode::Tunneling => "omega, gamma, t_total (optional steps)",
            Mode::Ghz => "g, g_tilde",
            Mode::Sweep => "axis, grid, omega, t_total, and n unless axis is n or dt",
            Mode::Ncrit => "omega, t_total, n_max",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Mode::ALL.iter().map(|m| m.name()).collect();
                Error::config(format!("unknown mode `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Key set exactly as it appears in the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<String>,
    omega: Option<f64>,
    phi: Option<f64>,
    eta: Option<f64>,
    gamma: Option<f64>,
    v: Option<f64>,
    g: Option<f64>,
    g_tilde: Option<f64>,
    n: Option<usize>,
    dt: Option<f64>,
    t_total: Option<f64>,
    samples: Option<usize>,
    steps: Option<usize>,
    n_max: Option<usize>,
    axis: Option<String>,
    grid: Option<Vec<f64>>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

/// Per-key values supplied on the command line; they win over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub omega: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub v: Option<f64>,
    pub dt: Option<f64>,
    pub n: Option<usize>,
    pub g: Option<f64>,
    pub g_tilde: Option<f64>,
    pub t_total: Option<f64>,
    pub n_max: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, table: &mut toml::Table) {
        let floats = [
            ("omega", self.omega),
            ("eta", self.eta),
            ("gamma", self.gamma),
            ("v", self.v),
            ("dt", self.dt),
            ("g", self.g),
            ("g_tilde", self.g_tilde),
            ("t_total", self.t_total),
        ];
        for (key, value) in floats {
            if let Some(x) = value {
                table.insert(key.into(), toml::Value::Float(x));
            }
        }
        for (key, value) in [("n", self.n), ("n_max", self.n_max)] {
            if let Some(x) = value {
                table.insert(key.into(), toml::Value::Integer(x as i64));
            }
        }
        if let Some(out) = &self.out {
            table.insert("out".into(), toml::Value::String(out.display().to_string()));
        }
    }
}

/// Sweep axis with its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub model: ModelSpec,
    /// Whether `gamma` was given explicitly (tunneling column in sweeps).
    pub gamma_set: bool,
    pub schedule: Option<ZenoSchedule>,
    pub n: Option<usize>,
    pub t_total: Option<f64>,
    pub samples: usize,
    pub steps: Option<usize>,
    pub n_max: Option<usize>,
    pub sweep: Option<SweepSpec>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::build(parse_table(text)?, None, &Overrides::default())
    }

    /// Reads `path` (if any), forces `mode` (if any) and applies overrides.
    pub fn load(path: Option<&Path>, mode: Option<Mode>, overrides: &Overrides) -> Result<Self> {
        let table = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                parse_table(&text)?
            }
            None => toml::Table::new(),
        };
        Self::build(table, mode, overrides)
    }

    fn build(mut table: toml::Table, mode: Option<Mode>, overrides: &Overrides) -> Result<Self> {
        overrides.apply(&mut table);
        if let Some(forced) = mode {
            match table.get("mode").and_then(|v| v.as_str()) {
                Some(existing) if existing != forced.name() => {
                    return Err(Error::config(format!(
                        "config file declares mode `{existing}` but `{forced}` was requested"
                    )));
                }
                _ => {
                    table.insert("mode".into(), toml::Value::String(forced.name().into()));
                }
            }
        }
        let raw: RawConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(e.message().to_string()))?;
        raw.validate()
    }

    /// Total time of the run.
    pub fn total_time(&self) -> Option<f64> {
        self.schedule.map(|s| s.t_total()).or(self.t_total)
    }
}

fn parse_table(text: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| Error::config(e.message().to_string()))
}

impl RawConfig {
    fn validate(self) -> Result<ScenarioConfig> {
        let mode: Mode = self
            .mode
            .as_deref()
            .ok_or_else(|| Error::config("missing required key `mode`"))?
            .parse()?;

        let model = ModelSpec {
            omega: self.omega.unwrap_or(0.0),
            phi: self.phi.unwrap_or(Y_DRIVE_PHASE),
            eta: self.eta.unwrap_or(DEFAULT_ETA),
            gamma: self.gamma.unwrap_or(0.0),
            v: self.v.unwrap_or(0.0),
            g: self.g.unwrap_or(0.0),
            g_tilde: self.g_tilde.unwrap_or(0.0),
        };
        model.validate().map_err(|e| Error::config(e.to_string()))?;

        let missing = |present: &[(&str, bool)]| -> Result<()> {
            let absent: Vec<&str> = present.iter().filter(|(_, ok)| !ok).map(|(k, _)| *k).collect();
            if absent.is_empty() {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "mode {mode} requires {}; missing: {}",
                    mode.requirements(),
                    absent.join(", ")
                )))
            }
        };

        if let Some(t) = self.t_total {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config(format!("t_total must be positive, got {t}")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::config(format!("dt must be positive, got {dt}")));
            }
        }
        if self.n == Some(0) {
            return Err(Error::config("n must be >= 1"));
        }
        if self.samples == Some(0) {
            return Err(Error::config("samples must be >= 1"));
        }
        if self.steps == Some(0) {
            return Err(Error::config("steps must be >= 1"));
        }
        if let Some(n_max) = self.n_max {
            if n_max == 0 || n_max > MAX_N_CRIT_SCAN {
                return Err(Error::config(format!("n_max must be in 1..={MAX_N_CRIT_SCAN}, got {n_max}")));
            }
        }

        let schedule_keys = || -> Result<ZenoSchedule> {
            let n = self.n.expect("checked");
            let schedule = match (self.dt, self.t_total) {
                (Some(dt), Some(t)) => {
                    let s = ZenoSchedule::new(n, dt).map_err(|e| Error::config(e.to_string()))?;
                    if (s.t_total() - t).abs() > TIME_CONSISTENCY_TOL * t {
                        return Err(Error::config(format!(
                            "t_total = {t} disagrees with n * dt = {}",
                            s.t_total()
                        )));
                    }
                    s
                }
                (Some(dt), None) => ZenoSchedule::new(n, dt).map_err(|e| Error::config(e.to_string()))?,
                (None, Some(t)) => ZenoSchedule::spanning(t, n).map_err(|e| Error::config(e.to_string()))?,
                (None, None) => unreachable!("checked by caller"),
            };
            Ok(schedule)
        };
        let has_timing = self.dt.is_some() || self.t_total.is_some();

        let mut schedule = None;
        let mut sweep = None;
        match mode {
            Mode::TwoLevelZeno => {
                missing(&[("v", self.v.is_some()), ("n", self.n.is_some()), ("dt or t_total", has_timing)])?;
                schedule = Some(schedule_keys()?);
            }
            Mode::ThreeLevelZeno => {
                missing(&[("omega", self.omega.is_some()), ("n", self.n.is_some()), ("dt or t_total", has_timing)])?;
                schedule = Some(schedule_keys()?);
            }
            Mode::NoZeno => {
                missing(&[("omega", self.omega.is_some()), ("t_total", self.t_total.is_some())])?;
            }
            Mode::Tunneling => {
                missing(&[
                    ("omega", self.omega.is_some()),
                    ("gamma", self.gamma.is_some()),
                    ("t_total", self.t_total.is_some()),
                ])?;
            }
            Mode::Ghz => {
                missing(&[("g", self.g.is_some()), ("g_tilde", self.g_tilde.is_some())])?;
                if model.g == model.g_tilde {
                    return Err(Error::config("ghz mode requires g != g_tilde (t_GHZ diverges)"));
                }
            }
            Mode::Ncrit => {
                missing(&[
                    ("omega", self.omega.is_some()),
                    ("t_total", self.t_total.is_some()),
                    ("n_max", self.n_max.is_some()),
                ])?;
            }
            Mode::Sweep => {
                missing(&[
                    ("axis", self.axis.is_some()),
                    ("grid", self.grid.is_some()),
                    ("omega", self.omega.is_some()),
                    ("t_total", self.t_total.is_some()),
                ])?;
                let axis: SweepAxis = self.axis.as_deref().expect("checked").parse()?;
                if !matches!(axis, SweepAxis::N | SweepAxis::Dt) {
                    missing(&[("n", self.n.is_some())])?;
                }
                let grid = self.grid.clone().expect("checked");
                axis.validate_grid(&grid)?;
                sweep = Some(SweepSpec { axis, grid });
            }
        }

        Ok(ScenarioConfig {
            mode,
            model,
            gamma_set: self.gamma.is_some(),
            schedule,
            n: self.n,
            t_total: self.t_total,
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            steps: self.steps,
            n_max: self.n_max,
            sweep,
            output_path: self.out,
            seed: self.seed.unwrap_or(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_three_level_zeno() {
        let cfg = ScenarioConfig::from_toml_str(
            "mode = \"three_level_zeno\"\nomega = 0.05\neta = -0.2\nn = 50\ndt = 0.1\nout = \"a.csv\"\n",
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::ThreeLevelZeno);
        let s = cfg.schedule.unwrap();
        assert_eq!((s.n(), s.dt()), (50, 0.1));
        assert_eq!(cfg.model.phi, Y_DRIVE_PHASE);
        assert_eq!(cfg.output_path.as_deref(), Some(Path::new("a.csv")));
    }

    #[test]
    fn defaults_eta_and_accepts_integer_floats() {
        let cfg = ScenarioConfig::from_toml_str("mode = \"no_zeno\"\nomega = 1\nt_total = 5\n").unwrap();
        assert_eq!(cfg.model.eta, DEFAULT_ETA);
        assert_eq!(cfg.model.omega, 1.0);
        assert_eq!(cfg.samples, DEFAULT_SAMPLES);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ScenarioConfig::from_toml_str("mode = \"no_zeno\"\nomgea = 0.05\nt_total = 5\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("omgea"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn missing_keys_name_requirements() {
        let err = ScenarioConfig::from_toml_str("mode = \"three_level_zeno\"\nomega = 0.05\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("three_level_zeno") && msg.contains("n") && msg.contains("dt"), "{msg}");
        let err = ScenarioConfig::from_toml_str("omega = 0.05\n").unwrap_err();
        assert!(err.to_string().contains("mode"));
    }

    #[test]
    fn unknown_mode() {
        let err = ScenarioConfig::from_toml_str("mode = \"zeno\"\n").unwrap_err();
        assert!(err.to_string().contains("three_level_zeno"));
    }

    #[test]
    fn schedule_from_total_time() {
        let cfg = ScenarioConfig::from_toml_str("mode = \"three_level_zeno\"\nomega = 0.05\nn = 25\nt_total = 5.0\n").unwrap();
        assert_eq!(cfg.schedule.unwrap().dt(), 0.2);
        let err = ScenarioConfig::from_toml_str(
            "mode = \"three_level_zeno\"\nomega = 0.05\nn = 25\nt_total = 5.0\ndt = 0.1\n",
        );
        assert!(err.is_err());
    }

    #[test]
    fn physics_validation_is_config_error() {
        let err = ScenarioConfig::from_toml_str("mode = \"tunneling\"\nomega = 0.05\ngamma = -1\nt_total = 5\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = ScenarioConfig::from_toml_str("mode = \"ghz\"\ng = 0.01\ng_tilde = 0.01\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn overrides_win_and_mode_conflicts() {
        let table = parse_table("mode = \"three_level_zeno\"\nomega = 0.05\nn = 50\ndt = 0.1\n").unwrap();
        let ov = Overrides {
            n: Some(100),
            dt: Some(0.05),
            ..Overrides::default()
        };
        let cfg = ScenarioConfig::build(table.clone(), Some(Mode::ThreeLevelZeno), &ov).unwrap();
        assert_eq!(cfg.schedule.unwrap().n(), 100);
        let err = ScenarioConfig::build(table, Some(Mode::Ghz), &ov).unwrap_err();
        assert!(err.to_string().contains("declares mode"));
    }

    #[test]
    fn sweep_requirements() {
        let ok = "mode = \"sweep\"\naxis = \"n\"\ngrid = [25, 50, 100]\nomega = 0.05\nt_total = 5\n";
        let cfg = ScenarioConfig::from_toml_str(ok).unwrap();
        assert_eq!(cfg.sweep.unwrap().grid, vec![25.0, 50.0, 100.0]);

        let bad_axis = ok.replace("\"n\"", "\"eta\"");
        let msg = ScenarioConfig::from_toml_str(&bad_axis).unwrap_err().to_string();
        assert!(msg.contains("gamma") && msg.contains("omega") && msg.contains("dt"), "{msg}");

        let gamma_axis = ok.replace("\"n\"", "\"gamma\"");
        assert!(ScenarioConfig::from_toml_str(&gamma_axis).is_err(), "needs n");

        let unsorted = ok.replace("[25, 50, 100]", "[25, 100, 50]");
        assert!(ScenarioConfig::from_toml_str(&unsorted).is_err());
    }

    #[test]
    fn malformed_toml() {
        let err = ScenarioConfig::from_toml_str("mode = \n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}

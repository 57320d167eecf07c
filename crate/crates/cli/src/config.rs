//! Flat `key = value` scenario files.
//!
//! One scenario per file. Blank lines and `#` comments are ignored. Numeric
//! keys accept comma lists; a file with lists expands to the cartesian
//! product of runs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use bel_core::Spacing;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}` for scenario {scenario}")]
    UnknownKey {
        line: usize,
        key: String,
        scenario: String,
    },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: key `{key}`: {msg}")]
    BadValue { line: usize, key: String, msg: String },
    #[error("missing required key `{key}` for scenario {scenario}")]
    Missing { key: String, scenario: String },
    #[error("missing `scenario` key")]
    NoScenario,
    #[error("unknown scenario `{0}` (see `bel list-scenarios`)")]
    UnknownScenario(String),
    #[error("cannot read {path}: {msg}")]
    Read { path: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scenario {
    EuclideanSanity,
    Bubble,
    LogBubble,
    Theorem22,
    SolitonLiouville,
    Example2Parabolicity,
    EstimatesSweep,
    Custom,
}

/// Default grid for every scenario.
pub const DEFAULT_R_MAX: f64 = 1e3;
pub const DEFAULT_NODES: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-10;

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::EuclideanSanity,
        Scenario::Bubble,
        Scenario::LogBubble,
        Scenario::Theorem22,
        Scenario::SolitonLiouville,
        Scenario::Example2Parabolicity,
        Scenario::EstimatesSweep,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::EuclideanSanity => "euclidean-sanity",
            Scenario::Bubble => "bubble",
            Scenario::LogBubble => "log-bubble",
            Scenario::Theorem22 => "theorem-2-2",
            Scenario::SolitonLiouville => "soliton-liouville",
            Scenario::Example2Parabolicity => "example-2-parabolicity",
            Scenario::EstimatesSweep => "estimates-sweep",
            Scenario::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::EuclideanSanity => "flat space: vanishing curvature, L r = (d-1)/r, ball volumes",
            Scenario::Bubble => "critical bubble: equation residual, constant P, k[v] = 0, identities",
            Scenario::LogBubble => "planar log bubble: equation residual, P = 1/2, identities",
            Scenario::Theorem22 => "explicit positive-curvature manifold with a global positive solution",
            Scenario::SolitonLiouville => "Gaussian weight f = r^2: radial solutions cross zero",
            Scenario::Example2Parabolicity => "log-tail weight: non-parabolic, slow volume growth",
            Scenario::EstimatesSweep => "integral, gradient and superharmonic estimates over R in [1, 100]",
            Scenario::Custom => "solve on a chosen manifold and report the Pohozaev monitors",
        }
    }

    pub fn required(self) -> &'static [&'static str] {
        match self {
            Scenario::EuclideanSanity | Scenario::Bubble | Scenario::Example2Parabolicity => &["d"],
            Scenario::LogBubble => &[],
            Scenario::Theorem22 => &["d", "alpha", "p", "ell"],
            Scenario::SolitonLiouville | Scenario::Custom => &["d", "p", "ell"],
            Scenario::EstimatesSweep => &["d"],
        }
    }

    /// Optional keys beyond the common grid/solver ones.
    pub fn optional(self) -> &'static [&'static str] {
        match self {
            Scenario::EuclideanSanity => &[],
            Scenario::Bubble | Scenario::LogBubble => &["b"],
            Scenario::Theorem22 => &["n"],
            Scenario::SolitonLiouville => &["c"],
            Scenario::Example2Parabolicity => &["beta", "p"],
            Scenario::EstimatesSweep => &["b", "alpha", "p", "ell"],
            Scenario::Custom => &["manifold", "alpha", "c"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Keys every scenario accepts.
pub const COMMON_KEYS: [&str; 5] = ["r_max", "nodes", "spacing", "tol", "out_dir"];

/// Keys holding text rather than numbers.
const TEXT_KEYS: [&str; 4] = ["scenario", "spacing", "out_dir", "manifold"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub r_max: f64,
    pub nodes: usize,
    pub spacing: Spacing,
}

/// Weighted manifold used by the `custom` scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldChoice {
    Euclidean,
    Gaussian,
    Constructed,
}

impl ManifoldChoice {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "euclidean" => Some(Self::Euclidean),
            "gaussian" => Some(Self::Gaussian),
            "constructed" => Some(Self::Constructed),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Gaussian => "gaussian",
            Self::Constructed => "constructed",
        }
    }
}

/// One fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Numeric parameters as given (after sweep expansion), sorted by key.
    pub params: BTreeMap<String, f64>,
    pub manifold: Option<ManifoldChoice>,
    pub grid: GridSpec,
    pub tol: f64,
    pub out_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    /// Parameter with a fallback.
    pub fn get_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    /// `d` as an integer (validated at parse time).
    pub fn dim(&self) -> usize {
        self.get("d").map_or(0, |d| d as usize)
    }
}

/// Parsed file before sweep expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub scenario: Scenario,
    sweeps: Vec<(String, Vec<f64>)>,
    manifold: Option<ManifoldChoice>,
    spacing: Spacing,
    out_dir: Option<PathBuf>,
}

impl ConfigFile {
    /// All runs, in lexicographic order of the swept keys.
    pub fn expand(&self) -> Vec<ScenarioConfig> {
        let mut runs = vec![BTreeMap::new()];
        for (key, values) in &self.sweeps {
            runs = runs
                .into_iter()
                .flat_map(|base: BTreeMap<String, f64>| {
                    values.iter().map(move |&v| {
                        let mut m = base.clone();
                        m.insert(key.clone(), v);
                        m
                    })
                })
                .collect();
        }
        runs.into_iter()
            .map(|mut params| {
                let r_max = params.remove("r_max").unwrap_or(DEFAULT_R_MAX);
                let nodes = params.remove("nodes").map_or(DEFAULT_NODES, |n| n as usize);
                let tol = params.remove("tol").unwrap_or(DEFAULT_TOL);
                ScenarioConfig {
                    scenario: self.scenario,
                    params,
                    manifold: self.manifold,
                    grid: GridSpec {
                        r_max,
                        nodes,
                        spacing: self.spacing,
                    },
                    tol,
                    out_dir: self.out_dir.clone(),
                }
            })
            .collect()
    }
}

pub fn read_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                msg: "empty key or value".into(),
            });
        }
        if entries.iter().any(|(_, key, _)| key == k) {
            return Err(ConfigError::Duplicate {
                line,
                key: k.to_owned(),
            });
        }
        entries.push((line, k.to_owned(), v.to_owned()));
    }

    let name = entries
        .iter()
        .find(|(_, k, _)| k == "scenario")
        .map(|(_, _, v)| v.clone())
        .ok_or(ConfigError::NoScenario)?;
    let scenario = Scenario::parse(&name).ok_or(ConfigError::UnknownScenario(name))?;

    let allowed = |k: &str| {
        k == "scenario"
            || COMMON_KEYS.contains(&k)
            || scenario.required().contains(&k)
            || scenario.optional().contains(&k)
    };
    let mut sweeps = Vec::new();
    let mut manifold = None;
    let mut spacing = Spacing::Geometric;
    let mut out_dir = None;
    for (line, key, value) in &entries {
        let line = *line;
        if !allowed(key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.clone(),
                scenario: scenario.name().into(),
            });
        }
        let bad = |msg: String| ConfigError::BadValue {
            line,
            key: key.clone(),
            msg,
        };
        if TEXT_KEYS.contains(&key.as_str()) {
            match key.as_str() {
                "spacing" => {
                    spacing = match value.as_str() {
                        "uniform" => Spacing::Uniform,
                        "geometric" => Spacing::Geometric,
                        _ => return Err(bad("expected `uniform` or `geometric`".into())),
                    }
                }
                "manifold" => {
                    manifold = Some(
                        ManifoldChoice::parse(value)
                            .ok_or_else(|| bad("expected `euclidean`, `gaussian` or `constructed`".into()))?,
                    )
                }
                "out_dir" => out_dir = Some(PathBuf::from(value)),
                _ => {}
            }
            continue;
        }
        let values = value
            .split(',')
            .map(|s| parse_number(s.trim()))
            .collect::<Result<Vec<f64>, String>>()
            .map_err(bad)?;
        for &v in &values {
            validate(key, v).map_err(bad)?;
        }
        sweeps.push((key.clone(), values));
    }
    for key in scenario.required() {
        if !sweeps.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::Missing {
                key: (*key).into(),
                scenario: scenario.name().into(),
            });
        }
    }
    if scenario == Scenario::Custom && manifold.is_none() {
        manifold = Some(ManifoldChoice::Euclidean);
    }
    sweeps.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(ConfigFile {
        scenario,
        sweeps,
        manifold,
        spacing,
        out_dir,
    })
}

/// Numbers and simple fractions such as `7/3`.
fn parse_number(s: &str) -> Result<f64, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number"))
    };
    let v = match s.split_once('/') {
        Some((a, b)) => parse(a)? / parse(b)?,
        None => parse(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn validate(key: &str, v: f64) -> Result<(), String> {
    let integer = v.fract() == 0.0;
    match key {
        "d" if !(integer && v >= 2.0) => Err(format!("d must be an integer >= 2, got {v}")),
        "nodes" if !(integer && v >= 16.0) => Err(format!("nodes must be an integer >= 16, got {v}")),
        "r_max" | "tol" | "b" | "c" if v <= 0.0 => Err(format!("{key} must be positive, got {v}")),
        "alpha" if !(v > 0.0 && v < 1.0) => Err(format!("alpha must lie in (0, 1), got {v}")),
        "p" if v <= 1.0 => Err(format!("p must exceed 1, got {v}")),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands_sweeps() {
        let cfg = parse_config(
            "# theorem cases\nscenario = theorem-2-2\nd = 3, 4\nalpha = 0.5\np = 5\nell = 1, 2 # two centers\nnodes = 512\n",
        )
        .unwrap();
        let runs = cfg.expand();
        assert_eq!(runs.len(), 4);
        assert_eq!(runs[0].get("d"), Some(3.0));
        assert_eq!(runs[0].get("ell"), Some(1.0));
        assert_eq!(runs[1].get("ell"), Some(2.0));
        assert_eq!(runs[3].dim(), 4);
        assert_eq!(runs[0].grid.nodes, 512);
        assert_eq!(runs[0].grid.r_max, DEFAULT_R_MAX);
        assert!(!runs[0].params.contains_key("nodes"));
    }

    #[test]
    fn fractions_are_accepted() {
        let cfg = parse_config("scenario = theorem-2-2\nd = 5\nalpha = 0.25\np = 7/3\nell = 1").unwrap();
        assert!((cfg.expand()[0].get("p").unwrap() - 7.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_and_key() {
        let e = parse_config("scenario = bubble\nd = 4\nalpha = 0.5\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::UnknownKey {
                line: 3,
                key: "alpha".into(),
                scenario: "bubble".into()
            }
        );
        assert!(matches!(
            parse_config("scenario = bubble\nd = four\n"),
            Err(ConfigError::BadValue { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("scenario = bubble\nd 4\n"),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("scenario = theorem-2-2\nd = 3\n"),
            Err(ConfigError::Missing { .. })
        ));
        assert!(matches!(
            parse_config("scenario = bubble\nd = 3\nd = 4\n"),
            Err(ConfigError::Duplicate { line: 3, .. })
        ));
        assert!(matches!(parse_config("d = 3\n"), Err(ConfigError::NoScenario)));
        assert!(matches!(
            parse_config("scenario = nope\n"),
            Err(ConfigError::UnknownScenario(_))
        ));
        assert!(matches!(
            parse_config("scenario = bubble\nd = 2.5\n"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            parse_config("scenario = bubble\nd = 3\nspacing = log\n"),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn every_scenario_documents_its_keys() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::parse(s.name()), Some(s));
            assert!(!s.summary().is_empty());
            for k in s.required() {
                assert!(!s.optional().contains(k));
            }
        }
    }

    #[test]
    fn custom_defaults_to_flat_space() {
        let cfg = parse_config("scenario = custom\nd = 3\np = 3\nell = 1\nout_dir = runs\n").unwrap();
        let run = &cfg.expand()[0];
        assert_eq!(run.manifold, Some(ManifoldChoice::Euclidean));
        assert_eq!(run.out_dir.as_deref(), Some(Path::new("runs")));
    }
}

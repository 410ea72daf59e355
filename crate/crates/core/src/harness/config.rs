use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::GeomGrid;
use crate::measures::trace::ClassifierOptions;

pub const DEFAULT_COUNT: usize = 48;
pub const DEFAULT_RATIO_TO_ZERO: f64 = 0.75;
pub const DEFAULT_RATIO_TO_INFINITY: f64 = 1.5;
pub const DEFAULT_START_TO_ZERO: f64 = 0.1;
/// Large-time grids end at this parameter.
pub const DEFAULT_LARGE_TIME_END: f64 = 1e6;
pub const DEFAULT_TRACE_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_VERDICT_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            _ => Err(Error::Config(format!("unknown output format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn to_zero() -> Self {
        Self {
            start: DEFAULT_START_TO_ZERO,
            ratio: DEFAULT_RATIO_TO_ZERO,
            count: DEFAULT_COUNT,
        }
    }

    /// Ratio 1.5 grid ending at 1e6.
    pub fn to_infinity() -> Self {
        Self {
            start: DEFAULT_LARGE_TIME_END / DEFAULT_RATIO_TO_INFINITY.powi(DEFAULT_COUNT as i32 - 1),
            ratio: DEFAULT_RATIO_TO_INFINITY,
            count: DEFAULT_COUNT,
        }
    }

    pub fn grid(&self) -> Result<GeomGrid> {
        GeomGrid::new(self.start, self.ratio, self.count).map_err(|e| Error::Config(e.to_string()))
    }

    fn validate(&self, what: &str, toward_zero: bool) -> Result<()> {
        if self.count < 24 {
            return Err(Error::Config(format!("{what}: grid needs at least 24 points, got {}", self.count)));
        }
        if !(self.start > 0.0 && self.start.is_finite()) {
            return Err(Error::Config(format!("{what}: grid start must be positive")));
        }
        let ok = if toward_zero {
            self.ratio > 0.0 && self.ratio < 1.0
        } else {
            self.ratio > 1.0 && self.ratio.is_finite()
        };
        if !ok {
            let want = if toward_zero { "in (0, 1)" } else { "greater than 1" };
            return Err(Error::Config(format!("{what}: grid ratio must be {want}, got {}", self.ratio)));
        }
        Ok(())
    }
}

/// One scenario run. Unset optional fields fall back to the scenario defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub dim: usize,
    /// Primary kernel id; hyperbolic scenarios build their kernel from `lambda`.
    #[serde(default)]
    pub kernel: Option<String>,
    /// Second kernel for scenarios that compare two approximate identities.
    #[serde(default)]
    pub second_kernel: Option<String>,
    #[serde(default)]
    pub measure: Option<String>,
    #[serde(default)]
    pub function: Option<String>,
    /// Hyperbolic spectral parameter `[re, im]`.
    #[serde(default)]
    pub lambda: Option<[f64; 2]>,
    /// Coefficient of the `y^{β+ρ}` term.
    #[serde(default)]
    pub coefficient: Option<f64>,
    /// Restrict the measure to this ball up front.
    #[serde(default)]
    pub restrict: Option<f64>,
    /// Restriction radius used when a convolution does not converge at infinity.
    #[serde(default = "default_auto_restrict")]
    pub auto_restrict: Option<f64>,
    /// Grid of the kernel-side parameter (`t` or `y`).
    pub grid: GridSpec,
    /// Grid of the second trace (`r` for mean ratios).
    pub second_grid: GridSpec,
    pub trace_tolerance: f64,
    pub verdict_tolerance: f64,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_auto_restrict() -> Option<f64> {
    Some(1.0)
}

impl ScenarioConfig {
    pub(crate) fn base(scenario: &str, dim: usize, kernel: Option<&str>, large_time: bool) -> Self {
        let grid = if large_time { GridSpec::to_infinity() } else { GridSpec::to_zero() };
        Self {
            scenario: scenario.to_string(),
            dim,
            kernel: kernel.map(str::to_string),
            second_kernel: None,
            measure: None,
            function: None,
            lambda: None,
            coefficient: None,
            restrict: None,
            auto_restrict: default_auto_restrict(),
            grid,
            second_grid: grid,
            trace_tolerance: DEFAULT_TRACE_TOLERANCE,
            verdict_tolerance: DEFAULT_VERDICT_TOLERANCE,
            format: OutputFormat::Both,
        }
    }

    pub fn classifier(&self) -> ClassifierOptions {
        ClassifierOptions {
            rel_tol: self.trace_tolerance,
            ..ClassifierOptions::default()
        }
    }

    pub(crate) fn validate(&self, large_time: bool) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        self.grid.validate("grid", !large_time)?;
        self.second_grid.validate("second_grid", !large_time)?;
        if !(self.trace_tolerance > 0.0) || !(self.verdict_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Defaults with the keys of `overrides` (a JSON object) replaced.
    pub fn with_overrides(&self, overrides: &Value) -> Result<Self> {
        let Value::Object(map) = overrides else {
            return Err(Error::Config("config overrides must be a JSON object".into()));
        };
        let mut base = serde_json::to_value(self)?;
        let obj = base.as_object_mut().expect("config serializes to an object");
        for (k, v) in map {
            if k == "scenario" && v.as_str() != Some(self.scenario.as_str()) {
                return Err(Error::Config(format!("config is for scenario {v}, not {}", self.scenario)));
            }
            obj.insert(k.clone(), v.clone());
        }
        serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Parsed config file: overrides for a single scenario, or a
/// `{"scenarios": {id: overrides}}` map for several.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub single: Option<Value>,
    pub per_scenario: serde_json::Map<String, Value>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let Value::Object(mut map) = v else {
            return Err(Error::Config("config must be a JSON object".into()));
        };
        match map.remove("scenarios") {
            Some(Value::Object(per)) => {
                if !map.is_empty() {
                    return Err(Error::Config("a scenarios map cannot be mixed with top-level keys".into()));
                }
                Ok(Self {
                    single: None,
                    per_scenario: per,
                })
            }
            Some(_) => Err(Error::Config("scenarios must be an object keyed by scenario id".into())),
            None => Ok(Self {
                single: Some(Value::Object(map)),
                per_scenario: Default::default(),
            }),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn overrides_for(&self, id: &str) -> Option<&Value> {
        self.per_scenario.get(id).or(self.single.as_ref())
    }
}

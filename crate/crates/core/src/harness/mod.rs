//! Named experiments: each scenario pairs two limit traces and turns their
//! classifications into a verdict.

pub mod config;
pub mod emit;
pub mod scenarios;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ConfigFile, GridSpec, OutputFormat, ScenarioConfig};
pub use scenarios::{default_config, info, ScenarioInfo, SCENARIOS};

use crate::error::Result;
use crate::measures::trace::{Classification, LimitTrace};
use crate::measures::GrowthReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithTheorem,
    CounterexampleBehaviorConfirmed,
    GrowthCheckPassed,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ConsistentWithTheorem => "consistent-with-theorem",
            Self::CounterexampleBehaviorConfirmed => "counterexample-behavior-confirmed",
            Self::GrowthCheckPassed => "growth-check-passed",
            Self::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub name: String,
    pub points: usize,
    pub classification: Option<Classification>,
    /// Limit estimate `[re, im]` for converged traces.
    pub estimate: Option<[f64; 2]>,
    pub warnings: Vec<String>,
    /// Error message when the trace could not be computed.
    pub failed: Option<String>,
    #[serde(skip)]
    pub trace: Option<LimitTrace>,
}

impl TraceReport {
    fn from_outcome(o: scenarios::TraceOutcome) -> Self {
        match o.result {
            Ok(t) => Self {
                name: o.name,
                points: t.params.len(),
                estimate: t.classification.limit().map(|z| [z.re, z.im]),
                classification: Some(t.classification.clone()),
                warnings: t.warnings.clone(),
                failed: None,
                trace: Some(t),
            },
            Err(msg) => Self {
                name: o.name,
                points: 0,
                classification: None,
                estimate: None,
                warnings: Vec::new(),
                failed: Some(msg),
                trace: None,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub crate_version: &'static str,
    pub statement: &'static str,
    pub expected: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub traces: Vec<TraceReport>,
    pub verdict: Verdict,
    pub growth: Option<GrowthReport>,
    pub notes: Vec<String>,
    pub metadata: Metadata,
    /// Not serialized, so reports stay byte-stable across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ScenarioReport {
    pub fn expected(&self) -> Verdict {
        self.metadata.expected
    }

    pub fn as_expected(&self) -> bool {
        self.verdict == self.metadata.expected
    }

    pub fn trace(&self, name: &str) -> Option<&LimitTrace> {
        self.traces.iter().find(|t| t.name == name).and_then(|t| t.trace.as_ref())
    }
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Verdict from the classifications of a trace pair and the scenario's
/// expectation; a missing classification (failed trace) is inconclusive.
pub fn decide(
    expected: Verdict,
    first: Option<&Classification>,
    second: Option<&Classification>,
    growth_pass: Option<bool>,
    tol: f64,
) -> Verdict {
    let (Some(a), Some(b)) = (first, second) else {
        return Verdict::Inconclusive;
    };
    let agree = match (a.limit(), b.limit()) {
        (Some(x), Some(y)) => close(x, y, tol),
        _ => false,
    };
    match expected {
        Verdict::ConsistentWithTheorem if agree => Verdict::ConsistentWithTheorem,
        Verdict::CounterexampleBehaviorConfirmed
            if (a.is_converged() && b.is_oscillatory()) || (a.is_oscillatory() && b.is_converged()) =>
        {
            Verdict::CounterexampleBehaviorConfirmed
        }
        // The theorem is an implication from the kernel side to the mean ratio.
        Verdict::GrowthCheckPassed if growth_pass == Some(true) && (!a.is_converged() || agree) => {
            Verdict::GrowthCheckPassed
        }
        _ => Verdict::Inconclusive,
    }
}

/// Runs a scenario. Config and id errors are returned; integration failures
/// produce a report with failed-trace markers.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let started = Instant::now();
    let info = scenarios::info(&cfg.scenario)?;
    cfg.validate(info.large_time)?;
    let out = scenarios::compute(cfg)?;
    let traces: Vec<TraceReport> = out.traces.into_iter().map(TraceReport::from_outcome).collect();
    let class = |i: usize| traces.get(i).and_then(|t| t.classification.as_ref());
    let verdict = decide(
        info.expected,
        class(0),
        class(1),
        out.growth.as_ref().map(|g| g.pass),
        cfg.verdict_tolerance,
    );
    Ok(ScenarioReport {
        scenario: cfg.scenario.clone(),
        config: cfg.clone(),
        traces,
        verdict,
        growth: out.growth,
        notes: out.notes,
        metadata: Metadata {
            crate_version: env!("CARGO_PKG_VERSION"),
            statement: info.statement,
            expected: info.expected,
        },
        wall_time: started.elapsed(),
    })
}

/// Resolves the config of `id` from its defaults and an optional config file.
pub fn resolve_config(id: &str, file: Option<&ConfigFile>) -> Result<ScenarioConfig> {
    let base = scenarios::default_config(id)?;
    match file.and_then(|f| f.overrides_for(id)) {
        Some(o) => base.with_overrides(o),
        None => Ok(base),
    }
}

/// Runs every registered scenario concurrently; results keep registry order.
pub fn run_all(file: Option<&ConfigFile>) -> Vec<(String, Result<ScenarioReport>)> {
    SCENARIOS
        .par_iter()
        .map(|s| {
            let r = resolve_config(s.id, file).and_then(|c| run_scenario(&c));
            (s.id.to_string(), r)
        })
        .collect()
}

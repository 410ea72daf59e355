//! Scenario registry and the traces each scenario pairs.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::Verdict;
use crate::error::{Error, Result};
use crate::grid::GeomGrid;
use crate::hyperbolic::{BoundaryDatum, HyperbolicContext, HyperbolicEigenSpec};
use crate::kernels::RadialKernel;
use crate::measures::trace::{ClassifierOptions, LimitTrace};
use crate::measures::{default_growth_grid, growth_check, GrowthReport, RadialFunction, RadialMeasure};
use crate::registry;

#[derive(Debug, Clone, Copy)]
pub struct ScenarioInfo {
    pub id: &'static str,
    /// Statement the scenario exercises.
    pub statement: &'static str,
    pub expected: Verdict,
    /// Limit parameter tends to infinity rather than zero.
    pub large_time: bool,
}

pub const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        id: "fatou_forward",
        statement: "forward Fatou: comparison-condition kernel, D_sym mu(0) = L implies mu*phi_t(0) -> L",
        expected: Verdict::ConsistentWithTheorem,
        large_time: false,
    },
    ScenarioInfo {
        id: "rudin_converse",
        statement: "converse Fatou: Tauberian kernel with comparison condition, mu*phi_t(0) -> L implies D_sym mu(0) = L",
        expected: Verdict::ConsistentWithTheorem,
        large_time: false,
    },
    ScenarioInfo {
        id: "nec1_counterexample",
        statement: "non-Tauberian kernel: mu*phi_t(0) -> 2 while the symmetric derivative does not exist",
        expected: Verdict::CounterexampleBehaviorConfirmed,
        large_time: false,
    },
    ScenarioInfo {
        id: "mt2_growth",
        statement: "converse Fatou without the comparison condition, for measures with mu(B(0,r)) = O(r^n)",
        expected: Verdict::GrowthCheckPassed,
        large_time: false,
    },
    ScenarioInfo {
        id: "heat_positive",
        statement: "positive solutions of the heat equation: mu*h_t(0) -> L iff D_sym mu(0) = L",
        expected: Verdict::ConsistentWithTheorem,
        large_time: false,
    },
    ScenarioInfo {
        id: "transfer_large_time",
        statement: "large-time transfer: f*phi_t(0) -> L implies f*psi_t(0) -> L for bounded f",
        expected: Verdict::ConsistentWithTheorem,
        large_time: true,
    },
    ScenarioInfo {
        id: "repnikov_counterexample",
        statement: "transfer fails for a non-Tauberian kernel: f = |x|^{i pi}",
        expected: Verdict::CounterexampleBehaviorConfirmed,
        large_time: true,
    },
    ScenarioInfo {
        id: "bounded_harmonic",
        statement: "bounded harmonic functions: u(0,t) -> L as t -> infinity iff the ball averages of f do",
        expected: Verdict::ConsistentWithTheorem,
        large_time: true,
    },
    ScenarioInfo {
        id: "hyperbolic_fatou_converse",
        statement: "real hyperbolic space: y^{beta-rho} u(0,y) -> L iff D_sym mu(0) = L",
        expected: Verdict::ConsistentWithTheorem,
        large_time: false,
    },
    ScenarioInfo {
        id: "hyperbolic_large_time",
        statement: "real hyperbolic space: y^{-(rho+i lambda)} u(0,y) -> L iff the ball averages of f do",
        expected: Verdict::ConsistentWithTheorem,
        large_time: true,
    },
];

pub fn info(id: &str) -> Result<&'static ScenarioInfo> {
    SCENARIOS
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Config(format!("unknown scenario {id:?}")))
}

/// Default configuration of a scenario.
pub fn default_config(id: &str) -> Result<ScenarioConfig> {
    let s = info(id)?;
    let base = |dim, kernel| ScenarioConfig::base(id, dim, kernel, s.large_time);
    let c = match id {
        "fatou_forward" => ScenarioConfig {
            measure: Some("density:linear".into()),
            ..base(1, Some("G:1:1"))
        },
        "rudin_converse" => ScenarioConfig {
            measure: Some("density:linear".into()),
            ..base(1, Some("poisson"))
        },
        "nec1_counterexample" => ScenarioConfig {
            measure: Some(format!("counterexample:{}", std::f64::consts::PI)),
            ..base(1, Some("counterexample"))
        },
        "mt2_growth" => ScenarioConfig {
            measure: Some(format!("counterexample:{}", std::f64::consts::PI)),
            ..base(1, Some("gaussian"))
        },
        "heat_positive" => ScenarioConfig {
            measure: Some("density:linear".into()),
            ..base(2, Some("gaussian"))
        },
        "transfer_large_time" => ScenarioConfig {
            second_kernel: Some("ball".into()),
            function: Some("decay:3:0.5".into()),
            ..base(1, Some("gaussian"))
        },
        "repnikov_counterexample" => ScenarioConfig {
            second_kernel: Some("ball".into()),
            function: Some(format!("phase:{}", std::f64::consts::PI)),
            ..base(1, Some("counterexample"))
        },
        "bounded_harmonic" => ScenarioConfig {
            second_kernel: Some("ball".into()),
            function: Some("decay:2:1".into()),
            ..base(2, Some("poisson"))
        },
        "hyperbolic_fatou_converse" => ScenarioConfig {
            measure: Some("density:linear".into()),
            lambda: Some([0.0, 1.0]),
            coefficient: Some(1.0),
            ..base(3, None)
        },
        "hyperbolic_large_time" => ScenarioConfig {
            second_kernel: Some("ball".into()),
            function: Some("decay:3:0.5".into()),
            lambda: Some([0.5, 1.0]),
            coefficient: Some(0.0),
            ..base(3, None)
        },
        _ => unreachable!("registry and defaults out of sync"),
    };
    Ok(c)
}

/// A computed trace, or the reason it could not be computed.
#[derive(Debug, Clone)]
pub struct TraceOutcome {
    pub name: String,
    pub result: std::result::Result<LimitTrace, String>,
}

#[derive(Debug, Clone, Default)]
pub struct ScenarioOutput {
    pub traces: Vec<TraceOutcome>,
    pub growth: Option<GrowthReport>,
    pub notes: Vec<String>,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Lookup(m) => Error::Config(format!("unknown id: {m}")),
        other => other,
    }
}

fn need<'a>(field: &'a Option<String>, what: &str) -> Result<&'a str> {
    field.as_deref().ok_or_else(|| Error::Config(format!("scenario needs a {what} id")))
}

fn resolve_kernel(id: &str, dim: usize) -> Result<RadialKernel> {
    let k = registry::kernel(id, dim).map_err(config_err)?;
    let m = k.mass()?;
    if (m - 1.0).norm() > 1e-10 {
        return k.normalize();
    }
    Ok(k)
}

fn resolve_measure(cfg: &ScenarioConfig, dim: usize) -> Result<RadialMeasure> {
    let mu = registry::measure(need(&cfg.measure, "measure")?, dim).map_err(config_err)?;
    match cfg.restrict {
        Some(r) => mu.restrict(r),
        None => Ok(mu),
    }
}

fn resolve_function(cfg: &ScenarioConfig, dim: usize) -> Result<RadialFunction> {
    registry::function(need(&cfg.function, "function")?, dim).map_err(config_err)
}

fn sample(params: &[f64], f: impl Fn(f64) -> Result<Complex64> + Sync) -> Result<Vec<Complex64>> {
    params.par_iter().map(|&p| f(p)).collect()
}

fn trace(name: &str, grid: &GeomGrid, opts: &ClassifierOptions, f: impl Fn(f64) -> Result<Complex64> + Sync) -> TraceOutcome {
    let params = grid.points();
    let result = sample(&params, f)
        .map(|vals| LimitTrace::new(name, params, vals, opts))
        .map_err(|e| e.to_string());
    TraceOutcome {
        name: name.to_string(),
        result,
    }
}

/// Runs `f` on the measure, and on its restriction when a convolution does not
/// converge at infinity. Restriction does not change the limits at zero.
fn with_auto_restriction<T>(
    mu: RadialMeasure,
    cfg: &ScenarioConfig,
    notes: &mut Vec<String>,
    f: impl Fn(&RadialMeasure) -> Result<T>,
) -> Result<(RadialMeasure, T)> {
    match f(&mu) {
        Err(Error::TailDivergence { tail, reached }) => {
            let Some(big_r) = cfg.auto_restrict else {
                return Err(Error::TailDivergence { tail, reached });
            };
            notes.push(format!(
                "convolution with {} diverges at the {tail} tail; measure restricted to the closed ball of radius {big_r}",
                mu.name()
            ));
            let restricted = mu.restrict(big_r)?;
            let v = f(&restricted)?;
            Ok((restricted, v))
        }
        Err(e) => Err(e),
        Ok(v) => Ok((mu, v)),
    }
}

fn probe_point(grid: &GeomGrid) -> f64 {
    grid.points()[0]
}

/// `t ↦ μ∗φ_{s(t)}(0)` paired with `r ↦ M(r)`.
fn measure_pair(cfg: &ScenarioConfig, sqrt_time: bool) -> Result<ScenarioOutput> {
    let dim = cfg.dim;
    let k = resolve_kernel(need(&cfg.kernel, "kernel")?, dim)?;
    if !k.is_real() {
        return Err(Error::Config(format!("kernel {} is complex; a real kernel is needed", k.name())));
    }
    let mu = resolve_measure(cfg, dim)?;
    let grid = cfg.grid.grid()?;
    let rgrid = cfg.second_grid.grid()?;
    let opts = cfg.classifier();
    let scale = move |t: f64| if sqrt_time { t.sqrt() } else { t };
    let mut out = ScenarioOutput::default();
    let t0 = probe_point(&grid);
    let (mu, _) = with_auto_restriction(mu, cfg, &mut out.notes, |m| m.convolve_at_center(&k, scale(t0)))?;
    let label = if sqrt_time { "heat_convolution" } else { "kernel_convolution" };
    out.traces.push(trace(label, &grid, &opts, |t| {
        mu.convolve_at_center(&k, scale(t)).map(Complex64::from)
    }));
    out.traces.push(trace("mean_ratio", &rgrid, &opts, |r| mu.mean_ratio(r).map(Complex64::from)));
    Ok(out)
}

/// `t ↦ f∗φ_t(0)` paired with `t ↦ f∗ψ_t(0)`.
fn function_pair(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let dim = cfg.dim;
    let phi = resolve_kernel(need(&cfg.kernel, "kernel")?, dim)?;
    let psi = resolve_kernel(need(&cfg.second_kernel, "second kernel")?, dim)?;
    let f = resolve_function(cfg, dim)?;
    let opts = cfg.classifier();
    let mut out = ScenarioOutput::default();
    out.traces.push(trace(&format!("phi_{}", phi.name()), &cfg.grid.grid()?, &opts, |t| {
        f.convolve_at_center(&phi, t)
    }));
    out.traces.push(trace(&format!("psi_{}", psi.name()), &cfg.second_grid.grid()?, &opts, |t| {
        f.convolve_at_center(&psi, t)
    }));
    Ok(out)
}

fn lambda_of(cfg: &ScenarioConfig) -> Result<Complex64> {
    let [re, im] = cfg.lambda.ok_or_else(|| Error::Config("hyperbolic scenario needs lambda".into()))?;
    Ok(Complex64::new(re, im))
}

fn hyperbolic_converse(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let ctx = HyperbolicContext::new(cfg.dim).map_err(|e| Error::Config(e.to_string()))?;
    let lambda = lambda_of(cfg)?;
    let c = cfg.coefficient.unwrap_or(0.0);
    let mu = resolve_measure(cfg, ctx.boundary_dim)?;
    let grid = cfg.grid.grid()?;
    let rgrid = cfg.second_grid.grid()?;
    let opts = cfg.classifier();
    let origin = vec![0.0; ctx.boundary_dim];
    let build = |m: &RadialMeasure| {
        HyperbolicEigenSpec::new(ctx, lambda, c, BoundaryDatum::Measure(m.clone()))
            .map_err(|e| Error::Config(e.to_string()))
    };
    build(&mu)?;
    let mut out = ScenarioOutput::default();
    let y0 = probe_point(&grid);
    let (mu, _) = with_auto_restriction(mu, cfg, &mut out.notes, |m| build(m)?.normalized_value(&origin, y0))?;
    let spec = build(&mu)?;
    out.traces.push(trace("normalized_eigenfunction", &grid, &opts, |y| spec.normalized_value(&origin, y)));
    out.traces.push(trace("mean_ratio", &rgrid, &opts, |r| mu.mean_ratio(r).map(Complex64::from)));
    Ok(out)
}

fn hyperbolic_large_time(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let ctx = HyperbolicContext::new(cfg.dim).map_err(|e| Error::Config(e.to_string()))?;
    let lambda = lambda_of(cfg)?;
    let c = cfg.coefficient.unwrap_or(0.0);
    let m = ctx.boundary_dim;
    let f = resolve_function(cfg, m)?;
    let ball = resolve_kernel(need(&cfg.second_kernel, "second kernel")?, m)?;
    let spec = HyperbolicEigenSpec::new(ctx, lambda, c, BoundaryDatum::Function(f.clone()))
        .map_err(|e| Error::Config(e.to_string()))?;
    let opts = cfg.classifier();
    let origin = vec![0.0; m];
    let mut out = ScenarioOutput::default();
    out.traces.push(trace("normalized_eigenfunction", &cfg.grid.grid()?, &opts, |y| {
        spec.normalized_value(&origin, y)
    }));
    out.traces.push(trace(&format!("psi_{}", ball.name()), &cfg.second_grid.grid()?, &opts, |t| {
        f.convolve_at_center(&ball, t)
    }));
    Ok(out)
}

/// Computes the traces of a validated config.
pub(crate) fn compute(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    match cfg.scenario.as_str() {
        "fatou_forward" | "rudin_converse" | "nec1_counterexample" => measure_pair(cfg, false),
        "heat_positive" => measure_pair(cfg, true),
        "mt2_growth" => {
            let mut out = measure_pair(cfg, false)?;
            let mu = resolve_measure(cfg, cfg.dim)?;
            match growth_check(&mu, &default_growth_grid()) {
                Ok(g) => out.growth = Some(g),
                Err(e) => out.notes.push(format!("growth check failed: {e}")),
            }
            Ok(out)
        }
        "transfer_large_time" | "repnikov_counterexample" | "bounded_harmonic" => function_pair(cfg),
        "hyperbolic_fatou_converse" => hyperbolic_converse(cfg),
        "hyperbolic_large_time" => hyperbolic_large_time(cfg),
        other => Err(Error::Config(format!("unknown scenario {other:?}"))),
    }
}

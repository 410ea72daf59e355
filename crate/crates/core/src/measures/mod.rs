//! Positive radial measures: ball masses, the mean ratio `M(r)`, restriction,
//! growth checks, and convolutions with radial kernels.

pub mod trace;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::GeomGrid;
use crate::kernels::{ComplexFn, RadialKernel, RealFn};
use crate::mellin::kernel_plan;
use crate::quad::{LogIntegral, Tolerance};
use crate::specfun::DimensionConstants;

use trace::{ClassifierOptions, LimitTrace};

/// Radial density `r ↦ f(r)` about the measure's center.
#[derive(Clone)]
pub struct Density {
    f: RealFn,
    /// Oscillation frequency in `ln r`.
    pub log_frequency: f64,
    /// Radii where `f` is not smooth.
    pub breakpoints: Vec<f64>,
    /// Relative error accepted when the strict target is out of reach, for
    /// densities with oscillation that cannot be resolved near zero.
    pub soft_rel: Option<f64>,
}

impl Density {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            log_frequency: 0.0,
            breakpoints: Vec::new(),
            soft_rel: None,
        }
    }

    pub fn with_soft_tolerance(mut self, rel: f64) -> Self {
        self.soft_rel = Some(rel);
        self
    }

    pub fn with_frequency(mut self, w: f64) -> Self {
        self.log_frequency = w.abs();
        self
    }

    pub fn with_breakpoint(mut self, r: f64) -> Self {
        self.breakpoints.push(r);
        self
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub location: Vec<f64>,
    pub mass: f64,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Clone)]
pub struct RadialMeasure {
    name: String,
    dim: usize,
    center: Vec<f64>,
    density: Option<Density>,
    atoms: Vec<Atom>,
    growth_claim: Option<f64>,
    /// Radius of the closed ball the measure has been restricted to.
    restriction: Option<f64>,
}

impl fmt::Debug for RadialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialMeasure")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("center", &self.center)
            .field("has_density", &self.density.is_some())
            .field("atoms", &self.atoms)
            .field("growth_claim", &self.growth_claim)
            .field("restriction", &self.restriction)
            .finish()
    }
}

fn tol() -> Tolerance {
    Tolerance::rel(1e-12)
}

impl RadialMeasure {
    /// Zero measure on `ℝ^n` centered at the origin.
    pub fn zero(name: impl Into<String>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return domain("measure dimension must be at least 1");
        }
        Ok(Self {
            name: name.into(),
            dim,
            center: vec![0.0; dim],
            density: None,
            atoms: Vec::new(),
            growth_claim: None,
            restriction: None,
        })
    }

    /// Absolutely continuous measure with a radial density about the origin.
    pub fn with_density(name: impl Into<String>, dim: usize, density: Density) -> Result<Self> {
        let mut m = Self::zero(name, dim)?;
        m.density = Some(density);
        Ok(m)
    }

    /// Lebesgue measure.
    pub fn lebesgue(dim: usize) -> Result<Self> {
        Ok(Self::with_density("lebesgue", dim, Density::new(|_| 1.0))?.with_growth_claim(dim as f64))
    }

    /// Point mass at the center.
    pub fn atom(dim: usize, mass: f64) -> Result<Self> {
        Self::zero(format!("atom:{mass}"), dim)?.add_atom(vec![0.0; dim], mass)
    }

    /// `(2 + cos(y₀ log ‖x‖)) dx`.
    pub fn counterexample(dim: usize, y0: f64) -> Result<Self> {
        let d = Density::new(move |r| 2.0 + (y0 * r.ln()).cos()).with_frequency(y0);
        Ok(Self::with_density(format!("counterexample:{y0}"), dim, d)?.with_growth_claim(dim as f64))
    }

    pub fn add_atom(mut self, location: Vec<f64>, mass: f64) -> Result<Self> {
        if location.len() != self.dim {
            return domain(format!("atom location has dimension {}, measure has {}", location.len(), self.dim));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return domain(format!("atom mass must be nonnegative, got {mass}"));
        }
        self.atoms.push(Atom { location, mass });
        Ok(self)
    }

    pub fn with_growth_claim(mut self, exponent: f64) -> Self {
        self.growth_claim = Some(exponent);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn growth_claim(&self) -> Option<f64> {
        self.growth_claim
    }

    pub fn restriction(&self) -> Option<f64> {
        self.restriction
    }

    /// Density value at distance `r` from the center, honoring restriction.
    pub fn density_at(&self, r: f64) -> f64 {
        match (&self.density, self.restriction) {
            (None, _) => 0.0,
            (Some(_), Some(big_r)) if r > big_r => 0.0,
            (Some(d), _) => d.eval(r),
        }
    }

    /// Translate by `-x0`, so the point `x0` becomes the origin.
    pub fn translated(&self, x0: &[f64]) -> Result<Self> {
        if x0.len() != self.dim {
            return domain("translation vector has the wrong dimension");
        }
        let mut m = self.clone();
        m.center = self.center.iter().zip(x0).map(|(c, x)| c - x).collect();
        for a in &mut m.atoms {
            a.location = a.location.iter().zip(x0).map(|(c, x)| c - x).collect();
        }
        Ok(m)
    }

    /// Restriction to the closed ball `B̄(center, R)`.
    pub fn restrict(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return domain(format!("restriction radius must be positive, got {radius}"));
        }
        let mut m = self.clone();
        m.restriction = Some(self.restriction.map_or(radius, |r| r.min(radius)));
        m.atoms.retain(|a| distance(&a.location, &self.center) <= radius);
        m.name = format!("{}|R={radius}", self.name);
        m.growth_claim = Some(0.0);
        Ok(m)
    }

    fn density_plan(&self, d: &Density, base: LogIntegral) -> LogIntegral {
        let mut plan = base.frequency(d.log_frequency);
        if let Some(soft) = d.soft_rel {
            plan.tol.soft_rel = plan.tol.soft_rel.max(soft);
        }
        for &b in &d.breakpoints {
            plan = plan.breakpoint(b.ln());
        }
        if let Some(big_r) = self.restriction {
            plan = plan.upper(big_r.ln()).anchor(big_r.ln());
        }
        plan
    }

    /// `μ(B(center, r))` with the open ball.
    pub fn ball_mass(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return domain(format!("ball radius must be positive, got {r}"));
        }
        let consts = DimensionConstants::new(self.dim)?;
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| distance(&a.location, &self.center) < r)
            .map(|a| a.mass)
            .sum();
        let Some(d) = &self.density else {
            return Ok(atoms);
        };
        let nf = self.dim as f64;
        let plan = self
            .density_plan(d, LogIntegral::new().tolerance(tol()))
            .upper(r.ln())
            .anchor(r.ln());
        let q = plan.integrate(|u: f64| Ok(d.eval(u.exp()) * (nf * u).exp()))?;
        Ok(consts.sphere_area * q.value + atoms)
    }

    /// `M(r) = μ(B(center, r)) / m(B(center, r))`.
    pub fn mean_ratio(&self, r: f64) -> Result<f64> {
        let v = DimensionConstants::new(self.dim)?.ball_volume;
        Ok(self.ball_mass(r)? / (v * r.powi(self.dim as i32)))
    }

    /// `μ ∗ φ_t(x)` for a possibly complex kernel.
    ///
    /// Atoms may sit anywhere; the density part is only available at the center.
    pub fn convolve_at(&self, x: &[f64], k: &RadialKernel, t: f64) -> Result<Complex64> {
        if k.dim() != self.dim || x.len() != self.dim {
            return domain(format!(
                "dimension mismatch: measure {}, kernel {}, point {}",
                self.dim,
                k.dim(),
                x.len()
            ));
        }
        let kt = k.dilate(t)?;
        let mut total: Complex64 = self
            .atoms
            .iter()
            .map(|a| a.mass * kt.value(distance(&a.location, x)))
            .sum();
        if let Some(d) = &self.density {
            if distance(x, &self.center) != 0.0 {
                return Err(Error::Unsupported(
                    "density convolution away from the measure's center".into(),
                ));
            }
            let consts = DimensionConstants::new(self.dim)?;
            let nf = self.dim as f64;
            let plan = self.density_plan(d, kernel_plan(&kt, 0.0).tolerance(tol()));
            let q = plan.integrate(|u: f64| {
                let r = u.exp();
                let f = d.eval(r);
                if f == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let v = kt.value(r);
                if v == Complex64::new(0.0, 0.0) {
                    return Ok(v);
                }
                Ok(v * (f * (nf * u).exp()))
            })?;
            total += consts.sphere_area * q.value;
        }
        Ok(total)
    }

    /// `μ ∗ φ_t` at the center, for real kernels.
    pub fn convolve_at_center(&self, k: &RadialKernel, t: f64) -> Result<f64> {
        if !k.is_real() {
            return Err(Error::Unsupported(format!("real convolution with complex kernel {}", k.name())));
        }
        Ok(self.convolve_at(&self.center.clone(), k, t)?.re)
    }

    /// Trace `r ↦ M(r)` along a grid toward zero.
    pub fn sym_derivative_trace(&self, grid: &GeomGrid, opts: &ClassifierOptions) -> Result<LimitTrace> {
        let rs = grid.points();
        let vals: Vec<f64> = rs.par_iter().map(|&r| self.mean_ratio(r)).collect::<Result<_>>()?;
        Ok(LimitTrace::real("mean_ratio", rs, vals, opts))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub sup: f64,
    /// Sup of `M` over the last decade of the grid.
    pub last_decade_sup: f64,
    /// Sup of `M` over the decade before it.
    pub previous_decade_sup: f64,
    pub pass: bool,
}

/// Default growth grid: 16 points per decade on `[1, 1e6]`.
pub fn default_growth_grid() -> GeomGrid {
    GeomGrid::per_decade(1.0, 1e6, 16).expect("valid grid")
}

/// Check `μ(B(0,r)) = O(r^n)` on an increasing grid: passes when the sup of
/// `M` over the top decade is within 10% of the sup over the decade below.
pub fn growth_check(mu: &RadialMeasure, grid: &GeomGrid) -> Result<GrowthReport> {
    if grid.toward_zero() {
        return domain("growth check needs an increasing grid");
    }
    let radii = grid.points();
    let top = grid.last();
    if top / grid.start < 100.0 {
        return domain("growth check needs a grid spanning at least two decades");
    }
    let values: Vec<f64> = radii.par_iter().map(|&r| mu.mean_ratio(r)).collect::<Result<_>>()?;
    let sup_over = |lo: f64, hi: f64| {
        radii
            .iter()
            .zip(&values)
            .filter(|(r, _)| **r >= lo * (1.0 - 1e-12) && **r <= hi * (1.0 + 1e-12))
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let last = sup_over(top / 10.0, top);
    let prev = sup_over(top / 100.0, top / 10.0);
    let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GrowthReport {
        pass: last.is_finite() && last <= 1.1 * prev,
        radii,
        values,
        sup,
        last_decade_sup: last,
        previous_decade_sup: prev,
    })
}

/// Bounded radial function on `ℝ^n` about a center (boundary data).
#[derive(Clone)]
pub struct RadialFunction {
    name: String,
    dim: usize,
    center: Vec<f64>,
    f: ComplexFn,
    /// Oscillation frequency in `ln r`.
    pub log_frequency: f64,
    /// `sup |f|`.
    pub bound: f64,
    constant: bool,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("center", &self.center)
            .field("bound", &self.bound)
            .finish()
    }
}

impl RadialFunction {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        bound: f64,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 {
            return domain("function dimension must be at least 1");
        }
        Ok(Self {
            name: name.into(),
            dim,
            center: vec![0.0; dim],
            f: Arc::new(f),
            log_frequency: 0.0,
            bound,
            constant: false,
        })
    }

    pub fn constant(dim: usize, c: f64) -> Result<Self> {
        let mut f = Self::new(format!("const:{c}"), dim, c.abs(), move |_| c.into())?;
        f.constant = true;
        Ok(f)
    }

    /// `‖x‖^{iy₀}`.
    pub fn phase(dim: usize, y0: f64) -> Result<Self> {
        let mut f = Self::new(format!("phase:{y0}"), dim, 1.0, move |r: f64| {
            if r == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, y0 * r.ln())
            }
        })?;
        f.log_frequency = y0.abs();
        Ok(f)
    }

    /// `c + (1 + ‖x‖)^{-p}`.
    pub fn decaying(dim: usize, c: f64, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return domain(format!("decay exponent must be positive, got {p}"));
        }
        Self::new(format!("decay:{c}:{p}"), dim, c.abs() + 1.0, move |r: f64| (c + (1.0 + r).powf(-p)).into())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    /// Value at distance `r` from the center.
    pub fn eval(&self, r: f64) -> Complex64 {
        (self.f)(r)
    }

    /// `(f ∗ φ_t)(x)`; non-constant functions only at their center.
    pub fn convolve_at(&self, x: &[f64], k: &RadialKernel, t: f64) -> Result<Complex64> {
        if k.dim() != self.dim || x.len() != self.dim {
            return domain("dimension mismatch in function convolution");
        }
        if self.constant {
            return Ok(self.eval(0.0) * k.mass()?);
        }
        if distance(x, &self.center) != 0.0 {
            return Err(Error::Unsupported(format!(
                "convolution of {} away from its center",
                self.name
            )));
        }
        let kt = k.dilate(t)?;
        let nf = self.dim as f64;
        let omega = DimensionConstants::new(self.dim)?.sphere_area;
        let plan = kernel_plan(&kt, self.log_frequency).tolerance(tol());
        let q = plan.integrate(|u: f64| {
            let r = u.exp();
            let v = kt.value(r);
            if v == Complex64::new(0.0, 0.0) {
                return Ok(v);
            }
            Ok(v * self.eval(r) * (nf * u).exp())
        })?;
        Ok(omega * q.value)
    }

    pub fn convolve_at_center(&self, k: &RadialKernel, t: f64) -> Result<Complex64> {
        self.convolve_at(&self.center.clone(), k, t)
    }
}

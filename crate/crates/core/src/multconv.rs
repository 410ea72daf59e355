//! Convolution on the multiplicative group `((0,∞), ds/s)` and the machinery
//! that turns kernel averages into mean-ratio averages.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::GeomGrid;
use crate::kernels::RadialKernel;
use crate::measures::trace::{ClassifierOptions, LimitTrace};
use crate::measures::{RadialFunction, RadialMeasure};
use crate::mellin::kernel_plan;
use crate::quad::{LogIntegral, Tolerance};
use crate::specfun::DimensionConstants;

type ProfileFn = Arc<dyn Fn(f64) -> Result<Complex64> + Send + Sync>;

/// A function on `(0,∞)` together with integration hints.
#[derive(Clone)]
pub struct HalfLineProfile {
    name: String,
    f: ProfileFn,
    lo: Option<f64>,
    hi: Option<f64>,
    breakpoints: Vec<f64>,
    anchor: f64,
    log_frequency: f64,
    integrable: bool,
}

impl fmt::Debug for HalfLineProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfLineProfile")
            .field("name", &self.name)
            .field("support", &(self.lo, self.hi))
            .field("breakpoints", &self.breakpoints)
            .field("integrable", &self.integrable)
            .finish()
    }
}

impl HalfLineProfile {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            lo: None,
            hi: None,
            breakpoints: Vec::new(),
            anchor: 1.0,
            log_frequency: 0.0,
            integrable: true,
        }
    }

    pub fn real(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(name, move |s| Ok(f(s).into()))
    }

    /// Support `[lo, hi]` (use 0 or infinity for an open end).
    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.lo = (lo > 0.0).then_some(lo);
        self.hi = hi.is_finite().then_some(hi);
        let bp = [lo, hi].into_iter().filter(|v| *v > 0.0 && v.is_finite());
        self.breakpoints.extend(bp);
        self
    }

    pub fn with_breakpoint(mut self, s: f64) -> Self {
        if s > 0.0 && s.is_finite() {
            self.breakpoints.push(s);
        }
        self
    }

    /// A point near which the profile carries its mass.
    pub fn with_anchor(mut self, s: f64) -> Self {
        self.anchor = s;
        self
    }

    pub fn with_frequency(mut self, w: f64) -> Self {
        self.log_frequency = w.abs();
        self
    }

    pub fn not_integrable(mut self) -> Self {
        self.integrable = false;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn integrable(&self) -> bool {
        self.integrable
    }

    pub fn eval(&self, s: f64) -> Result<Complex64> {
        if self.lo.is_some_and(|lo| s < lo) || self.hi.is_some_and(|hi| s > hi) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        (self.f)(s)
    }

    /// Log-coordinate plan for `∫ self(e^u) du`.
    pub fn plan(&self) -> LogIntegral {
        let mut p = LogIntegral::new().anchor(self.anchor.ln()).frequency(self.log_frequency);
        if let Some(lo) = self.lo {
            p = p.lower(lo.ln());
        }
        if let Some(hi) = self.hi {
            p = p.upper(hi.ln());
        }
        for &b in &self.breakpoints {
            p = p.breakpoint(b.ln());
        }
        p
    }
}

/// `(f ∗ g)(t) = ∫_0^∞ f(s) g(t/s) ds/s`.
pub fn mult_convolve(f: &HalfLineProfile, g: &HalfLineProfile, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return domain(format!("convolution argument must be positive, got {t}"));
    }
    let lt = t.ln();
    let mut plan = f
        .plan()
        .anchor(lt - g.anchor.ln())
        .frequency(g.log_frequency)
        .tolerance(Tolerance::rel(1e-12));
    if let Some(hi) = g.hi {
        plan = plan.lower(lt - hi.ln());
    }
    if let Some(lo) = g.lo {
        plan = plan.upper(lt - lo.ln());
    }
    for &b in &g.breakpoints {
        plan = plan.breakpoint(lt - b.ln());
    }
    let q = plan.integrate(|u: f64| {
        let a = f.eval(u.exp())?;
        if a == Complex64::new(0.0, 0.0) {
            return Ok(a);
        }
        Ok(a * g.eval((lt - u).exp())?)
    })?;
    Ok(q.value)
}

/// Multiplicative convolution of two profiles, as a profile.
pub fn convolved(f: &HalfLineProfile, g: &HalfLineProfile) -> HalfLineProfile {
    let (f2, g2) = (f.clone(), g.clone());
    HalfLineProfile::new(format!("({})*({})", f.name, g.name), move |t| mult_convolve(&f2, &g2, t))
        .with_anchor(f.anchor * g.anchor)
        .with_frequency(f.log_frequency + g.log_frequency)
}

/// `H(t) = n t^{-n}` on `[1, ∞)`, zero on `(0, 1)`.
pub fn h_kernel(n: usize) -> Result<HalfLineProfile> {
    if n == 0 {
        return domain("H kernel needs n >= 1");
    }
    let nf = n as f64;
    Ok(HalfLineProfile::real(format!("H:{n}"), move |t| if t >= 1.0 { nf * t.powf(-nf) } else { 0.0 })
        .with_support(1.0, f64::INFINITY)
        .with_anchor(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GVariant {
    /// `g(s) = n m(B(0,1)) s^{-n} φ(1/s)`, unit integral for unit-mass `φ`.
    UnitIntegral,
    /// `g_φ(s) = s^{-n} φ(1/s)`, integral `1/ω_{n-1}`.
    Plain,
}

/// The half-line profile attached to a radial kernel.
pub fn g_of_kernel(k: &RadialKernel, variant: GVariant) -> Result<HalfLineProfile> {
    let n = k.dim();
    let c = match variant {
        GVariant::UnitIntegral => DimensionConstants::new(n)?.sphere_area,
        GVariant::Plain => 1.0,
    };
    let kk = k.clone();
    let nf = n as f64;
    let mut g = HalfLineProfile::new(format!("g[{}]", k.name()), move |s| Ok(kk.value(1.0 / s) * (c * s.powf(-nf))))
        .with_anchor(1.0 / k.scale())
        .with_frequency(k.log_frequency());
    if let Some(sup) = k.support() {
        g = g.with_support(1.0 / sup, f64::INFINITY);
    }
    for b in k.breakpoints() {
        g = g.with_breakpoint(1.0 / b);
    }
    Ok(g)
}

/// `v(t) = μ ∗ φ_t(center)` as a half-line profile.
pub fn v_profile(mu: &RadialMeasure, k: &RadialKernel) -> HalfLineProfile {
    let (m, kk) = (mu.clone(), k.clone());
    HalfLineProfile::new("v", move |t| m.convolve_at(m.center(), &kk, t))
}

/// Radii where `M(r)` is not smooth: atom distances, restriction radius, and
/// density breakpoints.
fn mean_ratio_breakpoints(mu: &RadialMeasure) -> Vec<f64> {
    let mut v: Vec<f64> = mu
        .atoms()
        .iter()
        .map(|a| {
            a.location
                .iter()
                .zip(mu.center())
                .map(|(x, c)| (x - c) * (x - c))
                .sum::<f64>()
                .sqrt()
        })
        .filter(|d| *d > 0.0)
        .collect();
    v.extend(mu.restriction());
    if let Some(d) = mu.density() {
        v.extend(d.breakpoints.iter().copied());
    }
    v
}

/// `M(r)` as a half-line profile.
pub fn mean_ratio_profile(mu: &RadialMeasure) -> HalfLineProfile {
    let m = mu.clone();
    let mut p = HalfLineProfile::new("M", move |r| Ok(m.mean_ratio(r)?.into()))
        .with_frequency(mu.density().map_or(0.0, |d| d.log_frequency));
    for b in mean_ratio_breakpoints(mu) {
        p = p.with_breakpoint(b);
    }
    p
}

fn outer_tol() -> Tolerance {
    Tolerance {
        rel: 1e-10,
        abs: 0.0,
        soft_rel: 1e-8,
        max_segments: 4000,
    }
}

/// `(H ∗ v)(r) = n r^{-n} ∫_0^r σ^n v(σ) dσ/σ`.
pub fn h_conv_v(mu: &RadialMeasure, k: &RadialKernel, r: f64) -> Result<Complex64> {
    let n = mu.dim();
    let nf = n as f64;
    let lr = r.ln();
    let center = mu.center().to_vec();
    let q = LogIntegral::new()
        .upper(lr)
        .anchor(lr)
        .tolerance(outer_tol())
        .integrate(|u: f64| Ok(mu.convolve_at(&center, k, u.exp())? * (nf * (u - lr)).exp()))?;
    Ok(nf * q.value)
}

/// `(M ∗ g)(r)` with `g` the unit-integral profile of the kernel.
pub fn m_conv_g(mu: &RadialMeasure, k: &RadialKernel, r: f64) -> Result<Complex64> {
    let n = mu.dim();
    let nf = n as f64;
    let lr = r.ln();
    let omega = DimensionConstants::new(n)?.sphere_area;
    let kr = k.dilate(r)?;
    let mut plan = kernel_plan(&kr, 0.0).tolerance(outer_tol());
    if let Some(d) = mu.density() {
        plan = plan.frequency(d.log_frequency);
    }
    for b in mean_ratio_breakpoints(mu) {
        plan = plan.breakpoint(b.ln());
    }
    // g(r/s) = ω (s/r)^n φ(s/r)
    let q = plan.integrate(|u: f64| {
        let s = u.exp();
        let phi = k.value(s / r);
        if phi == Complex64::new(0.0, 0.0) {
            return Ok(phi);
        }
        Ok(phi * (mu.mean_ratio(s)? * omega * (nf * (u - lr)).exp()))
    })?;
    Ok(q.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct HIdentityRow {
    pub r: f64,
    pub h_conv_v: f64,
    pub m_conv_g: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HIdentityReport {
    pub rows: Vec<HIdentityRow>,
    pub max_residual: f64,
}

/// Evaluate both sides of `H ∗ v = M ∗ g` independently on a grid.
pub fn check_h_identity(mu: &RadialMeasure, k: &RadialKernel, radii: &[f64]) -> Result<HIdentityReport> {
    if mu.dim() != k.dim() {
        return domain("measure and kernel dimensions differ");
    }
    if !k.is_real() {
        return Err(Error::Unsupported("H identity needs a real kernel".into()));
    }
    let rows: Vec<HIdentityRow> = radii
        .par_iter()
        .map(|&r| {
            let lhs = h_conv_v(mu, k, r)?.re;
            let rhs = m_conv_g(mu, k, r)?.re;
            Ok(HIdentityRow {
                r,
                h_conv_v: lhs,
                m_conv_g: rhs,
                residual: (lhs - rhs).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(HIdentityReport { rows, max_residual })
}

/// Normalized `sin²` bump in `ln s` supported on `[a, b]`, `0 < a < b`.
pub fn bump(a: f64, b: f64) -> Result<HalfLineProfile> {
    if !(a > 0.0 && b > a) {
        return domain(format!("bump needs 0 < a < b, got [{a}, {b}]"));
    }
    let (la, lb) = (a.ln(), b.ln());
    let width = lb - la;
    let raw = move |s: f64| {
        let x = (s.ln() - la) / width;
        if (0.0..=1.0).contains(&x) {
            (std::f64::consts::PI * x).sin().powi(2)
        } else {
            0.0
        }
    };
    let mass = LogIntegral::new()
        .lower(la)
        .upper(lb)
        .tolerance(Tolerance::rel(1e-13))
        .integrate(|u: f64| Ok(raw(u.exp())))?
        .value;
    Ok(HalfLineProfile::real(format!("bump[{a},{b}]"), move |s| raw(s) / mass)
        .with_support(a, b)
        .with_anchor((a * b).sqrt()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichRow {
    pub r: f64,
    pub lower: f64,
    pub mean_ratio: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub gamma: f64,
    pub rows: Vec<SandwichRow>,
    pub holds: bool,
}

/// Check `γ^{-n} (M ∗ f₁)(r) ≤ M(r) ≤ γ^n (M ∗ f₂)(r)` with bumps `f₁` on
/// `[1, γ]` and `f₂` on `[1/γ, 1]`.
pub fn sandwich_bounds(mu: &RadialMeasure, gamma: f64, radii: &[f64]) -> Result<SandwichReport> {
    if !(gamma > 1.0) {
        return domain(format!("sandwich needs gamma > 1, got {gamma}"));
    }
    let nf = mu.dim() as f64;
    let f1 = bump(1.0, gamma)?;
    let f2 = bump(1.0 / gamma, 1.0)?;
    let m = mean_ratio_profile(mu);
    let rows: Vec<SandwichRow> = radii
        .par_iter()
        .map(|&r| {
            let lower = gamma.powf(-nf) * mult_convolve(&f1, &m, r)?.re;
            let upper = gamma.powf(nf) * mult_convolve(&f2, &m, r)?.re;
            Ok(SandwichRow {
                r,
                lower,
                mean_ratio: mu.mean_ratio(r)?,
                upper,
            })
        })
        .collect::<Result<_>>()?;
    let holds = rows.iter().all(|row| {
        let slack = 1e-9 * (1.0 + row.mean_ratio.abs());
        row.lower <= row.mean_ratio + slack && row.mean_ratio <= row.upper + slack
    });
    Ok(SandwichReport { gamma, rows, holds })
}

/// `f₀(r) = ∫_{S^{n-1}} f(x₀ − rω) dσ(ω)` for functions radial about `x₀`.
pub fn spherical_average(f: &RadialFunction, x0: &[f64], r: f64) -> Result<Complex64> {
    if x0.len() != f.dim() {
        return domain("point has the wrong dimension");
    }
    let omega = DimensionConstants::new(f.dim())?.sphere_area;
    if f.is_constant() {
        return Ok(omega * f.eval(0.0));
    }
    if x0 != f.center() {
        return Err(Error::Unsupported(format!(
            "spherical average of {} about a point other than its center",
            f.name()
        )));
    }
    Ok(omega * f.eval(r))
}

/// `f₀` as a half-line profile.
pub fn spherical_average_profile(f: &RadialFunction) -> Result<HalfLineProfile> {
    let omega = DimensionConstants::new(f.dim())?.sphere_area;
    let ff = f.clone();
    Ok(HalfLineProfile::new(format!("f0[{}]", f.name()), move |r| Ok(omega * ff.eval(r)))
        .with_frequency(f.log_frequency)
        .not_integrable())
}

/// Trace of `t ↦ (f ∗ k)(t)` along a grid.
pub fn convolution_trace(
    f: &HalfLineProfile,
    k: &HalfLineProfile,
    grid: &GeomGrid,
    opts: &ClassifierOptions,
) -> Result<LimitTrace> {
    let ts = grid.points();
    let vals: Vec<Complex64> = ts.par_iter().map(|&t| mult_convolve(f, k, t)).collect::<Result<_>>()?;
    Ok(LimitTrace::new(format!("({})*({})", f.name(), k.name()), ts, vals, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{ball, counterexample_psi, gaussian, poisson};
    use crate::mellin::mult_transform;
    use std::f64::consts::E;

    #[test]
    fn h_kernel_values() {
        let h = h_kernel(3).unwrap();
        assert_eq!(h.eval(0.5).unwrap().re, 0.0);
        assert_eq!(h.eval(1.0).unwrap().re, 3.0);
        let one = HalfLineProfile::real("one", |_| 1.0).not_integrable();
        for t in [1e-3, 1.0, 50.0] {
            assert!((mult_convolve(&h, &one, t).unwrap().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_is_a_convolution() {
        for n in 1..=2 {
            let nn = n as i32;
            let f = HalfLineProfile::real("f", move |r| r.powi(nn) / (1.0 + r).powi(2 * nn));
            let g = HalfLineProfile::real("chi", |s| if (1.0 / E..=E).contains(&s) { 1.0 } else { 0.0 })
                .with_support(1.0 / E, E);
            for s in [1e-3, 0.4, 1.0, 7.0, 300.0] {
                let c = mult_convolve(&g, &f, s).unwrap().re;
                let p = counterexample_psi(n, s);
                assert!((c - p).abs() < 1e-12 * p.max(1e-300) + 1e-15, "n={n} s={s}: {c} vs {p}");
            }
        }
    }

    #[test]
    fn g_integrals() {
        for n in 1..=3 {
            let g = g_of_kernel(&gaussian(n).unwrap(), GVariant::UnitIntegral).unwrap();
            assert!((mult_transform(&g, 0.0).unwrap().re - 1.0).abs() < 1e-8);
            let gp = g_of_kernel(&poisson(n).unwrap(), GVariant::Plain).unwrap();
            let omega = DimensionConstants::new(n).unwrap().sphere_area;
            assert!((mult_transform(&gp, 0.0).unwrap().re - 1.0 / omega).abs() < 1e-9);
        }
        let gb = g_of_kernel(&ball(2).unwrap(), GVariant::Plain).unwrap();
        let v = DimensionConstants::new(2).unwrap().ball_volume;
        for s in [0.5f64, 1.0, 3.0] {
            let expected = if s >= 1.0 { s.powi(-2) / v } else { 0.0 };
            assert!((gb.eval(s).unwrap().re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn bumps_have_unit_integral() {
        for (a, b) in [(1.0, 2.0), (0.5, 1.0), (1.0, 1.1)] {
            let f = bump(a, b).unwrap();
            assert!((mult_transform(&f, 0.0).unwrap().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sandwich_examples() {
        let radii = [1e-3, 0.1, 1.0];
        let rep = sandwich_bounds(&RadialMeasure::lebesgue(2).unwrap(), 2.0, &radii).unwrap();
        assert!(rep.holds);
        assert!((rep.rows[0].lower - 0.25).abs() < 1e-9 && (rep.rows[0].upper - 4.0).abs() < 1e-9);
        let ce = RadialMeasure::counterexample(1, std::f64::consts::PI).unwrap();
        assert!(sandwich_bounds(&ce, 1.1, &radii).unwrap().holds);
        assert!(sandwich_bounds(&RadialMeasure::atom(2, 1.0).unwrap(), 1.5, &radii).unwrap().holds);
    }

    #[test]
    fn h_identity_lebesgue_poisson() {
        let rep = check_h_identity(&RadialMeasure::lebesgue(1).unwrap(), &poisson(1).unwrap(), &[0.01, 1.0]).unwrap();
        for row in &rep.rows {
            assert!((row.h_conv_v - 1.0).abs() < 1e-7);
        }
        assert!(rep.max_residual < 1e-6);
    }

    #[test]
    fn spherical_averages() {
        let one = RadialFunction::constant(2, 1.0).unwrap();
        assert!((spherical_average(&one, &[0.3, 0.1], 2.0).unwrap().re - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        let ph = RadialFunction::phase(3, 1.5).unwrap();
        let r = 0.7f64;
        let v = spherical_average(&ph, &[0.0; 3], r).unwrap();
        let expected = 4.0 * std::f64::consts::PI * Complex64::from_polar(1.0, 1.5 * r.ln());
        assert!((v - expected).norm() < 1e-13);
        assert!(matches!(spherical_average(&ph, &[1.0, 0.0, 0.0], r), Err(Error::Unsupported(_))));
    }

    #[test]
    fn limit_under_convolution() {
        let opts = ClassifierOptions::default();
        let grid = GeomGrid::new(0.1, 0.75, 48).unwrap();
        let f = bump(0.5, 3.0).unwrap();
        let l = 1.7;
        for k in [
            HalfLineProfile::real("L+t", move |t| l + t).not_integrable(),
            HalfLineProfile::real("L+t sin t", move |t| l + t.sin() * t).not_integrable(),
        ] {
            let tr = convolution_trace(&f, &k, &grid, &opts).unwrap();
            let lim = tr.classification.limit().expect("converged");
            assert!((lim.re - l).abs() < 1e-4, "{}", k.name());
        }
    }
}

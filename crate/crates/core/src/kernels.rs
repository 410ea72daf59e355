//! Radial approximate-identity kernels.
//!
//! A kernel is stored as a base profile together with a dilation `scale` and a
//! normalization `weight`, so `k(r) = weight · scale^{-n} · base(r / scale)`.
//! Dilations compose exactly and closed-form Mellin data survive dilation.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::GeomGrid;
use crate::mellin::{radial_mellin, MellinForm};
use crate::quad::{LogIntegral, Tolerance};
use crate::specfun::{beta_complex, gamma_real, sphere_area, DimensionConstants};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A base radial profile. Real profiles may carry an exact logarithm, used
/// where the profile itself underflows (Gaussian tails in ratio checks).
#[derive(Clone)]
pub enum Profile {
    Real { f: RealFn, ln: Option<RealFn> },
    Complex(ComplexFn),
}

impl Profile {
    pub fn real(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Real {
            f: Arc::new(f),
            ln: None,
        }
    }

    pub fn real_with_ln(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ln: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Profile::Real {
            f: Arc::new(f),
            ln: Some(Arc::new(ln)),
        }
    }

    pub fn complex(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Profile::Complex(Arc::new(f))
    }
}

/// Structural flags and hints of a kernel.
#[derive(Debug, Clone, Default)]
pub struct KernelTraits {
    pub monotone_decreasing: bool,
    pub strictly_positive: bool,
    /// Radius (before dilation) outside which the base profile vanishes.
    pub support: Option<f64>,
    /// Radii (before dilation) where the base profile is not smooth.
    pub breakpoints: Vec<f64>,
    /// Oscillation frequency of the profile in `ln r`.
    pub log_frequency: f64,
}

#[derive(Clone)]
pub struct RadialKernel {
    name: String,
    dim: usize,
    base: Profile,
    scale: f64,
    weight: Complex64,
    form: Option<MellinForm>,
    traits: KernelTraits,
}

impl fmt::Debug for RadialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialKernel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("scale", &self.scale)
            .field("weight", &self.weight)
            .field("form", &self.form)
            .field("traits", &self.traits)
            .finish()
    }
}

impl RadialKernel {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        base: Profile,
        form: Option<MellinForm>,
        traits: KernelTraits,
    ) -> Result<Self> {
        if dim == 0 {
            return domain("kernel dimension must be at least 1");
        }
        Ok(Self {
            name: name.into(),
            dim,
            base,
            scale: 1.0,
            weight: Complex64::new(1.0, 0.0),
            form,
            traits,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn weight(&self) -> Complex64 {
        self.weight
    }

    pub fn mellin_form(&self) -> Option<&MellinForm> {
        self.form.as_ref()
    }

    pub fn traits(&self) -> &KernelTraits {
        &self.traits
    }

    pub fn monotone_decreasing(&self) -> bool {
        self.traits.monotone_decreasing
    }

    pub fn strictly_positive(&self) -> bool {
        self.traits.strictly_positive
    }

    pub fn is_real(&self) -> bool {
        matches!(self.base, Profile::Real { .. }) && self.weight.im == 0.0
    }

    /// Support radius of the (dilated) kernel.
    pub fn support(&self) -> Option<f64> {
        self.traits.support.map(|s| s * self.scale)
    }

    /// Non-smooth radii of the (dilated) kernel.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.traits.breakpoints.iter().map(|b| b * self.scale).collect()
    }

    pub fn log_frequency(&self) -> f64 {
        self.traits.log_frequency
    }

    fn prefactor(&self) -> Complex64 {
        self.weight * self.scale.powi(-(self.dim as i32))
    }

    /// Kernel value at radius `r`.
    pub fn value(&self, r: f64) -> Complex64 {
        let x = r / self.scale;
        match &self.base {
            Profile::Real { f, .. } => self.prefactor() * f(x),
            Profile::Complex(f) => self.prefactor() * f(x),
        }
    }

    /// Real kernel value at radius `r` (the real part for complex kernels).
    pub fn profile(&self, r: f64) -> f64 {
        self.value(r).re
    }

    /// `ln k(r)` for real kernels with positive weight; `-inf` where the
    /// kernel vanishes.
    pub fn ln_profile(&self, r: f64) -> Result<f64> {
        match &self.base {
            Profile::Real { ln: Some(ln), .. } if self.weight.im == 0.0 && self.weight.re > 0.0 => {
                Ok(self.weight.re.ln() - self.dim as f64 * self.scale.ln() + ln(r / self.scale))
            }
            _ if self.is_real() => Ok(self.profile(r).ln()),
            _ => Err(Error::Unsupported(format!("log-profile of complex kernel {}", self.name))),
        }
    }

    /// `φ_t(x) = t^{-n} φ(x / t)`.
    pub fn dilate(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("dilation parameter must be positive, got {t}"));
        }
        let mut k = self.clone();
        k.scale *= t;
        Ok(k)
    }

    /// Multiply the kernel by a constant.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut k = self.clone();
        k.weight *= c;
        k
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `ω_{n-1} ∫_0^∞ k(r) r^{n-1} dr`.
    pub fn mass(&self) -> Result<Complex64> {
        radial_mellin(self, 0.0)
    }

    /// Real mass of a real kernel.
    pub fn mass_real(&self) -> Result<f64> {
        Ok(self.mass()?.re)
    }

    /// Rescale to unit mass.
    pub fn normalize(&self) -> Result<Self> {
        let c = self.normalization_factor()?;
        Ok(self.scaled(c))
    }

    /// Factor that brings the kernel to unit mass.
    pub fn normalization_factor(&self) -> Result<Complex64> {
        let m = self.mass()?;
        let m = if self.is_real() { Complex64::new(m.re, 0.0) } else { m };
        if !(m.re.is_finite() && m.im.is_finite()) || m.norm() == 0.0 {
            return domain(format!("kernel {} has mass {m}, cannot normalize", self.name));
        }
        Ok(m.inv())
    }
}

/// Euclidean Poisson constant `c_n = Γ((n+1)/2) / π^{(n+1)/2}`.
pub fn poisson_constant(n: usize) -> Result<f64> {
    let a = (n as f64 + 1.0) / 2.0;
    Ok(gamma_real(a)? / PI.powf(a))
}

/// Poisson kernel `P(x) = c_n (1 + ‖x‖²)^{-(n+1)/2}`.
pub fn poisson(n: usize) -> Result<RadialKernel> {
    let c = poisson_constant(n)?;
    let a = (n as f64 + 1.0) / 2.0;
    RadialKernel::new(
        "poisson",
        n,
        Profile::real_with_ln(move |r| c * (1.0 + r * r).powf(-a), move |r| c.ln() - a * (r * r).ln_1p()),
        Some(MellinForm::Poisson),
        KernelTraits {
            monotone_decreasing: true,
            strictly_positive: true,
            ..KernelTraits::default()
        },
    )
}

/// Gaussian `w(x) = (4π)^{-n/2} e^{-‖x‖²/4}`.
pub fn gaussian(n: usize) -> Result<RadialKernel> {
    let c = (4.0 * PI).powf(-(n as f64) / 2.0);
    RadialKernel::new(
        "gaussian",
        n,
        Profile::real_with_ln(move |r| c * (-r * r / 4.0).exp(), move |r| c.ln() - r * r / 4.0),
        Some(MellinForm::Gaussian),
        KernelTraits {
            monotone_decreasing: true,
            strictly_positive: true,
            ..KernelTraits::default()
        },
    )
}

/// Heat kernel `h_t = w_{√t}`.
pub fn heat(n: usize, t: f64) -> Result<RadialKernel> {
    if !(t > 0.0) {
        return domain(format!("heat kernel time must be positive, got {t}"));
    }
    Ok(gaussian(n)?.dilate(t.sqrt())?.renamed(format!("heat:{t}")))
}

/// `K(x) = (1 + ‖x‖²)^{-α} / log(2 + ‖x‖^β)` (not normalized).
pub fn k_family(n: usize, alpha: f64, beta: f64) -> Result<RadialKernel> {
    if !(alpha >= 0.0 && beta >= 0.0) {
        return domain(format!("K kernel needs alpha, beta >= 0, got {alpha}, {beta}"));
    }
    RadialKernel::new(
        format!("K:{alpha}:{beta}"),
        n,
        Profile::real(move |r| (1.0 + r * r).powf(-alpha) / (2.0 + r.powf(beta)).ln()),
        None,
        KernelTraits {
            monotone_decreasing: true,
            strictly_positive: true,
            ..KernelTraits::default()
        },
    )
}

/// `G(x) = e^{-α‖x‖^β}` (not normalized).
pub fn g_family(n: usize, alpha: f64, beta: f64) -> Result<RadialKernel> {
    if !(alpha > 0.0 && beta > 0.0) {
        return domain(format!("G kernel needs alpha, beta > 0, got {alpha}, {beta}"));
    }
    RadialKernel::new(
        format!("G:{alpha}:{beta}"),
        n,
        Profile::real_with_ln(move |r| (-alpha * r.powf(beta)).exp(), move |r| -alpha * r.powf(beta)),
        Some(MellinForm::Stretched { alpha, beta }),
        KernelTraits {
            monotone_decreasing: true,
            strictly_positive: true,
            ..KernelTraits::default()
        },
    )
}

/// `(1 + ‖x‖²)^{-α}` for complex `α` (not normalized).
pub fn power(n: usize, alpha: Complex64) -> Result<RadialKernel> {
    let name = if alpha.im == 0.0 {
        format!("power:{}", alpha.re)
    } else {
        format!("power:{}", alpha)
    };
    let traits = KernelTraits {
        monotone_decreasing: alpha.im == 0.0 && alpha.re >= 0.0,
        strictly_positive: alpha.im == 0.0,
        log_frequency: 2.0 * alpha.im.abs(),
        ..KernelTraits::default()
    };
    let profile = if alpha.im == 0.0 {
        let a = alpha.re;
        Profile::real_with_ln(move |r| (1.0 + r * r).powf(-a), move |r| -a * (r * r).ln_1p())
    } else {
        Profile::complex(move |r| (-alpha * (r * r).ln_1p()).exp())
    };
    RadialKernel::new(name, n, profile, Some(MellinForm::Power { alpha }), traits)
}

/// Normalized ball indicator `χ_{B(0,1)} / m(B(0,1))`.
pub fn ball(n: usize) -> Result<RadialKernel> {
    let v = DimensionConstants::new(n)?.ball_volume;
    RadialKernel::new(
        "ball",
        n,
        Profile::real(move |r| if r <= 1.0 { 1.0 / v } else { 0.0 }),
        Some(MellinForm::Ball),
        KernelTraits {
            monotone_decreasing: true,
            strictly_positive: false,
            support: Some(1.0),
            breakpoints: vec![1.0],
            log_frequency: 0.0,
        },
    )
}

/// Kernel from an arbitrary real profile.
pub fn from_real_profile(
    name: impl Into<String>,
    n: usize,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    traits: KernelTraits,
) -> Result<RadialKernel> {
    RadialKernel::new(name, n, Profile::real(f), None, traits)
}

// ---------------------------------------------------------------------------
// Counterexample kernel.
//
// ψ = f ∗ g on ((0,∞), ds/s) with f(r) = r^n/(1+r)^{2n} and g the indicator of
// [1/e, e]. With w = r/(r+s),
//     ψ(s) = ∫_{1/e}^{e} r^n s^n/(r+s)^{2n} dr/r = F(w(e)) − F(w(1/e)),
// F(w) = ∫_0^w u^{n-1}(1−u)^{n-1} du, a polynomial. For small s the symmetric
// complement v = s/(r+s) keeps ψ(s)/s^n accurate down to s = 0.

const CE_A: f64 = 1.0 / E;
const CE_B: f64 = E;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `Σ_k C(n-1,k) (-1)^k x^k / (n+k)`, so that `F(w) = w^n · series(w)`.
fn ce_series(n: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut xk = 1.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(n - 1, k) * xk / (n + k) as f64;
        xk *= x;
    }
    sum
}

/// `ψ(s) / s^n` for the counterexample construction in dimension `n`.
pub fn counterexample_psi_over_sn(n: usize, s: f64) -> f64 {
    let nf = n as i32;
    if s <= 1.0 {
        // (r+s)^{-n} · series(s/(r+s)), evaluated at r = 1/e minus r = e
        let g = |r: f64| (r + s).powi(-nf) * ce_series(n, s / (r + s));
        g(CE_A) - g(CE_B)
    } else {
        psi_direct(n, s) / s.powi(nf)
    }
}

fn psi_direct(n: usize, s: f64) -> f64 {
    let nf = n as i32;
    let big_f = |r: f64| {
        let w = r / (r + s);
        w.powi(nf) * ce_series(n, w)
    };
    big_f(CE_B) - big_f(CE_A)
}

/// `ψ(s)` for the counterexample construction.
pub fn counterexample_psi(n: usize, s: f64) -> f64 {
    if s <= 1.0 {
        counterexample_psi_over_sn(n, s) * s.powi(n as i32)
    } else {
        psi_direct(n, s)
    }
}

/// `ψ(s)` by adaptive quadrature of its defining integral over `r ∈ [1/e, e]`.
pub fn counterexample_psi_quadrature(n: usize, s: f64) -> Result<f64> {
    let nf = n as i32;
    let r = LogIntegral::new()
        .lower(-1.0)
        .upper(1.0)
        .tolerance(Tolerance::rel(1e-13))
        .integrate(|u: f64| {
            let r = u.exp();
            Ok((r * s).powi(nf) / (r + s).powi(2 * nf))
        })?;
    Ok(r.value)
}

/// `c_ψ = ∫ψ(s) ds/s = 2·B(n, n)`.
pub fn counterexample_c_psi(n: usize) -> Result<f64> {
    let nn = Complex64::new(n as f64, 0.0);
    Ok(2.0 * beta_complex(nn, nn)?.re)
}

/// Constants `(a_n, b_n)` bounding ψ from below on `(1, e]` and `ψ(s/t)` from
/// above; the comparison ratio is at most `max(1, b_n / a_n)`.
pub fn counterexample_ratio_constants(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let a = (E - 1.0 / E) * (-(nf - 1.0)).exp() / (2.0 * E).powf(2.0 * nf);
    let b = (E.powf(nf) - E.powf(-nf)) / nf;
    (a, b)
}

/// The strictly positive, radially decreasing unit-mass kernel whose radial
/// Mellin integral vanishes at `y = π`.
pub fn build_counterexample_kernel(n: usize) -> Result<RadialKernel> {
    let c = counterexample_c_psi(n)? * sphere_area(n as i64)?;
    RadialKernel::new(
        "counterexample",
        n,
        Profile::real(move |r| counterexample_psi_over_sn(n, r) / c),
        Some(MellinForm::Counterexample),
        KernelTraits {
            monotone_decreasing: true,
            strictly_positive: true,
            ..KernelTraits::default()
        },
    )
}

// ---------------------------------------------------------------------------
// Condition checks.

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub sup_estimate: f64,
    pub argmax: (f64, f64),
    pub t_grid: GeomGrid,
    pub r_grid: GeomGrid,
}

/// Default grids for the comparison condition: 64 points per decade,
/// `t ∈ [1e-4, 1 − 1e-4]`, `r ∈ [1 + 1e-6, 1e4]`.
pub fn default_comparison_grids() -> (GeomGrid, GeomGrid) {
    (
        GeomGrid::per_decade(1e-4, 1.0 - 1e-4, 64).expect("valid grid"),
        GeomGrid::per_decade(1.0 + 1e-6, 1e4, 64).expect("valid grid"),
    )
}

/// Sampled `sup φ_t(r)/φ(r)` over `t ∈ t_grid`, `r ∈ r_grid`.
pub fn comparison_sup(k: &RadialKernel, t_grid: &GeomGrid, r_grid: &GeomGrid) -> Result<ComparisonReport> {
    if !k.is_real() {
        return Err(Error::Unsupported(format!("comparison condition for complex kernel {}", k.name())));
    }
    let ts = t_grid.points();
    let rs = r_grid.points();
    if ts.iter().any(|&t| !(t > 0.0 && t < 1.0)) || rs.iter().any(|&r| !(r > 1.0)) {
        return domain("comparison grids must lie in t ∈ (0,1), r > 1");
    }
    let mut best = (f64::NEG_INFINITY, (0.0, 0.0));
    let base_ln: Vec<f64> = rs.iter().map(|&r| k.ln_profile(r)).collect::<Result<_>>()?;
    for (&r, &lb) in rs.iter().zip(&base_ln) {
        if !lb.is_finite() {
            return domain(format!("kernel {} vanishes at r = {r}; comparison ratio undefined", k.name()));
        }
    }
    for &t in &ts {
        let kt = k.dilate(t)?;
        for (&r, &lb) in rs.iter().zip(&base_ln) {
            let ratio = (kt.ln_profile(r)? - lb).exp();
            if ratio > best.0 {
                best = (ratio, (t, r));
            }
        }
    }
    Ok(ComparisonReport {
        sup_estimate: best.0,
        argmax: best.1,
        t_grid: *t_grid,
        r_grid: *r_grid,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayEnd {
    /// `max r^n |φ(r)|` over the end grid.
    pub max: f64,
    /// `r^n |φ(r)|` at the extreme grid point.
    pub last: f64,
    /// Non-increasing from the inner end toward the extreme end.
    pub monotone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub near_zero: DecayEnd,
    pub near_infinity: DecayEnd,
    pub threshold: f64,
    pub pass: bool,
}

/// Default end grids: `r` from 1e-3 down to 1e-12 and from 1e3 up to 1e12.
pub fn default_decay_grids() -> (GeomGrid, GeomGrid) {
    (
        GeomGrid::per_decade(1e-3, 1e-12, 8).expect("valid grid"),
        GeomGrid::per_decade(1e3, 1e12, 8).expect("valid grid"),
    )
}

/// Check that `r^n φ(r) → 0` at both ends of the half line.
pub fn decay_check(k: &RadialKernel, near_zero: &GeomGrid, near_infinity: &GeomGrid) -> DecayReport {
    let n = k.dim() as i32;
    let end = |g: &GeomGrid| {
        let vals: Vec<f64> = g.points().iter().map(|&r| r.powi(n) * k.value(r).norm()).collect();
        let monotone = vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        DecayEnd {
            max: vals.iter().copied().fold(0.0, f64::max),
            last: *vals.last().unwrap_or(&f64::NAN),
            monotone,
        }
    };
    let near_zero = end(near_zero);
    let near_infinity = end(near_infinity);
    let threshold = 1e-6 * k.value(1.0).norm();
    let pass = near_zero.monotone
        && near_infinity.monotone
        && near_zero.last < threshold
        && near_infinity.last < threshold;
    DecayReport {
        near_zero,
        near_infinity,
        threshold,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GeomGrid;

    #[test]
    fn dilation_identity_and_origin_value() {
        let w = gaussian(3).unwrap();
        let w1 = w.dilate(1.0).unwrap();
        for r in [0.0, 0.3, 2.0, 7.0] {
            assert_eq!(w.profile(r), w1.profile(r));
        }
        let t = 0.37;
        let wt = w.dilate(t).unwrap();
        let expected = (4.0 * PI).powf(-1.5) * t.powi(-3);
        assert!((wt.profile(0.0) - expected).abs() < 1e-14 * expected);
        assert!(w.dilate(0.0).is_err());
        assert!(w.dilate(-1.0).is_err());
    }

    #[test]
    fn heat_is_dilated_gaussian() {
        let h = heat(2, 0.25).unwrap();
        let w = gaussian(2).unwrap().dilate(0.5).unwrap();
        for r in [0.0, 0.1, 1.0, 3.0] {
            assert_eq!(h.profile(r), w.profile(r));
        }
        // (4πt)^{-n/2} e^{-r²/4t}
        let r: f64 = 0.8;
        let direct = (4.0 * PI * 0.25f64).powi(-1) * (-r * r / 1.0).exp();
        assert!((h.profile(r) - direct).abs() < 1e-15);
    }

    #[test]
    fn dilation_composes() {
        let k = build_counterexample_kernel(2).unwrap();
        let a = k.dilate(0.3).unwrap().dilate(4.0).unwrap();
        let b = k.dilate(1.2).unwrap();
        for r in GeomGrid::spanning(1e-3, 1e3, 40).unwrap().points() {
            assert!((a.profile(r) - b.profile(r)).abs() <= 1e-12 * b.profile(r).abs().max(1e-300));
        }
    }

    #[test]
    fn normalization() {
        let g = gaussian(2).unwrap().normalize().unwrap();
        assert!((g.weight().re - 1.0).abs() < 1e-10);
        let p = power(1, Complex64::new(1.0, 0.0)).unwrap();
        let c = p.normalization_factor().unwrap();
        assert!((c.re - 1.0 / PI).abs() < 1e-10, "{c}");
        let b = from_real_profile("indicator", 2, |r| if r <= 1.0 { 1.0 } else { 0.0 }, KernelTraits {
            support: Some(1.0),
            breakpoints: vec![1.0],
            ..KernelTraits::default()
        })
        .unwrap();
        assert!((b.normalization_factor().unwrap().re - 1.0 / PI).abs() < 1e-10);
        let zero = from_real_profile("zero", 1, |_| 0.0, KernelTraits::default()).unwrap();
        assert!(zero.normalize().is_err());
    }

    #[test]
    fn dilation_preserves_mass() {
        for k in [poisson(1).unwrap(), gaussian(2).unwrap(), ball(3).unwrap(), build_counterexample_kernel(1).unwrap()] {
            let m = k.mass_real().unwrap();
            for t in [0.01, 0.1, 1.0, 10.0] {
                let mt = k.dilate(t).unwrap().mass_real().unwrap();
                assert!((mt - m).abs() <= 1e-8, "{} t={t}: {mt} vs {m}", k.name());
            }
        }
    }

    #[test]
    fn unit_masses() {
        for n in 1..=3 {
            for k in [poisson(n).unwrap(), gaussian(n).unwrap(), ball(n).unwrap(), build_counterexample_kernel(n).unwrap()] {
                let m = k.mass_real().unwrap();
                assert!((m - 1.0).abs() < 1e-10, "{} n={n}: {m}", k.name());
            }
        }
    }

    #[test]
    fn c_psi_values() {
        assert!((counterexample_c_psi(1).unwrap() - 2.0).abs() < 1e-14);
        assert!((counterexample_c_psi(2).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        // oracle: ∫ψ(s) ds/s by quadrature of the closed form
        for n in 1..=3 {
            let q = LogIntegral::new()
                .integrate(|u: f64| Ok(counterexample_psi(n, u.exp())))
                .unwrap();
            assert!((q.value - counterexample_c_psi(n).unwrap()).abs() < 1e-11, "n={n}");
        }
    }

    #[test]
    fn psi_closed_form_matches_quadrature() {
        for n in 1..=4 {
            for s in GeomGrid::spanning(1e-6, 1e6, 37).unwrap().points() {
                let a = counterexample_psi(n, s);
                let b = counterexample_psi_quadrature(n, s).unwrap();
                assert!((a - b).abs() <= 1e-11 * b.abs(), "n={n} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn counterexample_origin_value() {
        for n in 1..=3 {
            let k = build_counterexample_kernel(n).unwrap();
            let nf = n as f64;
            // ∫_{1/e}^{e} r^{-(n+1)} dr
            let limit = (E.powf(nf) - E.powf(-nf)) / nf;
            let expected = limit / (counterexample_c_psi(n).unwrap() * sphere_area(n as i64).unwrap());
            assert!((k.profile(0.0) - expected).abs() < 1e-14 * expected);
            assert!((k.profile(1e-9) - expected).abs() < 1e-7 * expected);
        }
    }

    #[test]
    fn counterexample_monotone_and_bounded_ratio() {
        for n in 1..=3 {
            let grid = GeomGrid::spanning(1e-8, 1e8, 400).unwrap().points();
            let vals: Vec<f64> = grid.iter().map(|&s| counterexample_psi_over_sn(n, s)).collect();
            assert!(vals.iter().all(|&v| v > 0.0));
            assert!(vals.windows(2).all(|w| w[1] <= w[0]), "n={n}");

            let k = build_counterexample_kernel(n).unwrap();
            let (tg, rg) = default_comparison_grids();
            let rep = comparison_sup(&k, &tg, &rg).unwrap();
            let (a, b) = counterexample_ratio_constants(n);
            assert!(rep.sup_estimate <= (b / a).max(1.0), "n={n}: {}", rep.sup_estimate);
        }
    }

    #[test]
    fn comparison_examples() {
        let (tg, rg) = default_comparison_grids();
        let rep = comparison_sup(&poisson(1).unwrap(), &tg, &rg).unwrap();
        assert!(rep.sup_estimate <= 2.0);
        let rep = comparison_sup(&gaussian(1).unwrap(), &tg, &rg).unwrap();
        let bound = 2f64.sqrt() * (-0.25f64).exp();
        assert!(rep.sup_estimate <= bound, "{} vs {bound}", rep.sup_estimate);
        let rep = comparison_sup(&k_family(2, 1.0, 0.0).unwrap(), &tg, &rg).unwrap();
        assert!(rep.sup_estimate.is_finite());
        assert!(comparison_sup(&ball(1).unwrap(), &tg, &rg).is_err());
    }

    #[test]
    fn decay_examples() {
        let (z, i) = default_decay_grids();
        assert!(decay_check(&gaussian(2).unwrap(), &z, &i).pass);
        assert!(decay_check(&poisson(1).unwrap(), &z, &i).pass);
        let bad = from_real_profile("inverse-power", 1, |r| 1.0 / r, KernelTraits::default()).unwrap();
        assert!(!decay_check(&bad, &z, &i).pass);
    }

    #[test]
    fn builtin_monotone_claims_hold() {
        let grid = GeomGrid::spanning(1e-6, 1e6, 300).unwrap().points();
        for n in 1..=3 {
            let ks = [
                poisson(n).unwrap(),
                gaussian(n).unwrap(),
                ball(n).unwrap(),
                k_family(n, n as f64 / 2.0, 1.0).unwrap(),
                g_family(n, 0.7, 1.3).unwrap(),
                power(n, Complex64::new(2.0, 0.0)).unwrap(),
                build_counterexample_kernel(n).unwrap(),
            ];
            for k in ks.iter().filter(|k| k.monotone_decreasing()) {
                let v: Vec<f64> = grid.iter().map(|&r| k.profile(r)).collect();
                assert!(v.iter().all(|&x| x >= 0.0));
                assert!(v.windows(2).all(|w| w[1] <= w[0]), "{}", k.name());
            }
        }
    }
}

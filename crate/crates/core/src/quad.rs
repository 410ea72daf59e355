//! Globally adaptive Gauss–Kronrod (10/21) quadrature and a half-line driver in
//! logarithmic coordinates.
//!
//! Every half-line integral in the crate is written as `∫ F(u) du` over
//! `u = ln r ∈ ℝ`. Power laws in `r` become exponentials in `u`, and the
//! factors `r^{±iy}` become plain trigonometric oscillation, so panels of
//! bounded width resolve them uniformly.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result, Tail};

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_626_320,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Accuracy controls for one integral.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Target error relative to `∫|F|`.
    pub rel: f64,
    /// Absolute error target; the larger of the two targets applies.
    pub abs: f64,
    /// When the segment budget runs out, accept the estimate if its error is
    /// below `soft_rel · ∫|F|` (the result is flagged as not converged).
    pub soft_rel: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-12,
            abs: 0.0,
            soft_rel: 1e-7,
            max_segments: 4000,
        }
    }
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Self {
            rel,
            ..Self::default()
        }
    }
}

/// Outcome of an integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<V> {
    pub value: V,
    pub error: f64,
    /// Estimate of `∫|F|`.
    pub l1: f64,
    pub evaluations: usize,
    /// False when the result was accepted under the soft tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    l1: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<V, F>(f: &F, a: f64, b: f64) -> Result<Segment<V>>
where
    V: QuadValue,
    F: Fn(f64) -> Result<V>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<V> {
        let v = f(x)?;
        if v.finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at: x })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = V::zero();
    let mut samples = [(V::zero(), V::zero()); 10];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *sample = (f1, f2);
    }

    let mean = kronrod * 0.5;
    let mut resabs = fc.magnitude() * WGK[10];
    let mut resasc = (fc - mean).magnitude() * WGK[10];
    for (j, &(f1, f2)) in samples.iter().enumerate() {
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        resasc += WGK[j] * ((f1 - mean).magnitude() + (f2 - mean).magnitude());
    }
    let scale = half.abs();
    let value = kronrod * half;
    resabs *= scale;
    resasc *= scale;

    let mut error = ((kronrod - gauss) * half).magnitude();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Segment {
        a,
        b,
        value,
        error,
        l1: resabs,
    })
}

fn refine<V, F>(f: &F, initial: Vec<Segment<V>>, tol: &Tolerance, extra_error: f64) -> Result<Integral<V>>
where
    V: QuadValue,
    F: Fn(f64) -> Result<V>,
{
    let mut evaluations = initial.len() * 21;
    let mut heap: BinaryHeap<Segment<V>> = BinaryHeap::with_capacity(initial.len() * 2);
    let mut frozen: Vec<Segment<V>> = Vec::new();
    let mut total_error = extra_error;
    let mut total_l1 = 0.0;
    for s in initial {
        total_error += s.error;
        total_l1 += s.l1;
        heap.push(s);
    }

    let target = |l1: f64| tol.abs.max(tol.rel * l1);
    let mut count = heap.len();
    while total_error > target(total_l1) && count < tol.max_segments {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) {
            frozen.push(worst);
            continue;
        }
        let left = gk21(f, worst.a, mid)?;
        let right = gk21(f, mid, worst.b)?;
        evaluations += 42;
        total_error += left.error + right.error - worst.error;
        total_l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
        count += 1;
    }

    // Resum from scratch to avoid drift in the running totals.
    let mut value = V::zero();
    let mut error = extra_error;
    let mut l1 = 0.0;
    for s in heap.iter().chain(frozen.iter()) {
        value = value + s.value;
        error += s.error;
        l1 += s.l1;
    }
    let converged = error <= target(l1);
    if !converged && error > tol.abs.max(tol.soft_rel * l1) {
        return Err(Error::Integration {
            error,
            tolerance: target(l1),
        });
    }
    Ok(Integral {
        value,
        error,
        l1,
        evaluations,
        converged,
    })
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<V, F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral<V>>
where
    V: QuadValue,
    F: Fn(f64) -> Result<V>,
{
    if a == b {
        return Ok(Integral {
            value: V::zero(),
            error: 0.0,
            l1: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let first = gk21(&f, a, b)?;
    refine(&f, vec![first], &tol, 0.0)
}

/// Description of an integral `∫_{lo}^{hi} F(u) du` over log coordinates,
/// where missing limits mean ±∞ and the tails are truncated adaptively.
#[derive(Debug, Clone)]
pub struct LogIntegral {
    /// Lower support limit in `u` (None: −∞).
    pub lo: Option<f64>,
    /// Upper support limit in `u` (None: +∞).
    pub hi: Option<f64>,
    /// Locations that must lie inside the fully integrated core region.
    pub anchors: Vec<f64>,
    /// Discontinuities of `F` or its derivatives; panels are split there.
    pub breakpoints: Vec<f64>,
    /// Largest panel width.
    pub max_width: f64,
    pub tol: Tolerance,
    /// Half-width added around the anchors for the core region.
    pub margin: f64,
    /// A tail stops once two consecutive panels carry less than
    /// `tail_eps · (∫|F| so far)`.
    pub tail_eps: f64,
    /// Tails that have not settled by `|u| = max_extent` are reported as divergent.
    pub max_extent: f64,
}

impl Default for LogIntegral {
    fn default() -> Self {
        Self {
            lo: None,
            hi: None,
            anchors: Vec::new(),
            breakpoints: Vec::new(),
            max_width: 1.0,
            tol: Tolerance::default(),
            margin: 3.0,
            tail_eps: 1e-14,
            max_extent: 200.0,
        }
    }
}

/// Largest panel width that resolves the oscillation `e^{iωu}`.
pub fn oscillation_width(omega: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / omega.abs().max(1.0)
}

impl LogIntegral {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn anchor(mut self, u: f64) -> Self {
        if u.is_finite() {
            self.anchors.push(u);
        }
        self
    }

    pub fn breakpoint(mut self, u: f64) -> Self {
        if u.is_finite() {
            self.breakpoints.push(u);
        }
        self
    }

    pub fn lower(mut self, u: f64) -> Self {
        self.lo = Some(self.lo.map_or(u, |lo| lo.max(u)));
        self
    }

    pub fn upper(mut self, u: f64) -> Self {
        self.hi = Some(self.hi.map_or(u, |hi| hi.min(u)));
        self
    }

    /// Restrict panel widths so that frequency `omega` (in `u`) is resolved.
    pub fn frequency(mut self, omega: f64) -> Self {
        self.max_width = self.max_width.min(oscillation_width(omega));
        self
    }

    pub fn tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn integrate<V, F>(&self, f: F) -> Result<Integral<V>>
    where
        V: QuadValue,
        F: Fn(f64) -> Result<V>,
    {
        let lo = self.lo.unwrap_or(f64::NEG_INFINITY);
        let hi = self.hi.unwrap_or(f64::INFINITY);
        if !(lo < hi) {
            return integrate(f, 0.0, 0.0, self.tol);
        }

        let inside: Vec<f64> = self
            .anchors
            .iter()
            .chain(self.breakpoints.iter())
            .copied()
            .filter(|&u| u > lo && u < hi)
            .collect();
        let (pmin, pmax) = if inside.is_empty() {
            let c = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                0.0f64.clamp(lo, hi)
            };
            (c, c)
        } else {
            inside
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &u| (a.min(u), b.max(u)))
        };
        let a0 = (pmin - self.margin).max(lo);
        let b0 = (pmax + self.margin).min(hi);

        let mut cuts: Vec<f64> = vec![a0, b0];
        cuts.extend(self.breakpoints.iter().copied().filter(|&u| u > a0 && u < b0));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let width = self.max_width;
        let mut segments = Vec::new();
        let mut running_l1 = 0.0;
        for pair in cuts.windows(2) {
            let (c0, c1) = (pair[0], pair[1]);
            let pieces = ((c1 - c0) / width).ceil().max(1.0) as usize;
            let h = (c1 - c0) / pieces as f64;
            for k in 0..pieces {
                let a = c0 + k as f64 * h;
                let b = if k + 1 == pieces { c1 } else { a + h };
                let s = gk21(&f, a, b)?;
                running_l1 += s.l1;
                segments.push(s);
            }
        }

        let mut tail_error = 0.0;
        for tail in [Tail::Lower, Tail::Upper] {
            let mut edge = if tail == Tail::Lower { a0 } else { b0 };
            let limit = if tail == Tail::Lower { lo } else { hi };
            let mut quiet = 0;
            let mut last_l1 = 0.0;
            while edge != limit {
                if edge.abs() > self.max_extent {
                    return Err(Error::TailDivergence { tail, reached: edge });
                }
                let (a, b) = match tail {
                    Tail::Lower => ((edge - width).max(lo), edge),
                    Tail::Upper => (edge, (edge + width).min(hi)),
                };
                let s = gk21(&f, a, b)?;
                if s.l1 <= self.tail_eps * running_l1 {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                running_l1 += s.l1;
                last_l1 = s.l1;
                segments.push(s);
                edge = if tail == Tail::Lower { a } else { b };
                if quiet >= 2 {
                    break;
                }
            }
            if edge != limit {
                tail_error += last_l1;
            }
        }

        refine(&f, segments, &self.tol, tail_error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| Ok(7.0 * x.powi(4) - 2.0 * x.powi(3) + x), -3.0, 10.0, Tolerance::default())
            .unwrap();
        let exact = |x: f64| 7.0 / 5.0 * x.powi(5) - 0.5 * x.powi(4) + 0.5 * x * x;
        assert!((r.value - (exact(10.0) - exact(-3.0))).abs() < 1e-9);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| Ok(x.sqrt().recip()), 0.0, 1.0, Tolerance::rel(1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn log_gaussian_moment() {
        // ∫_0^∞ e^{-r^2} r dr = 1/2, written in u = ln r.
        let r = LogIntegral::new()
            .integrate(|u: f64| {
                let x = u.exp();
                Ok((-x * x).exp() * x * x)
            })
            .unwrap();
        assert!((r.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn log_oscillatory() {
        // ∫_0^∞ r^{iy} r^{-2}·r·1_{r>=1} dr/r... use ∫_{e^{-1}}^{e} r^{iy} dr/r = 2 sin(y)/y.
        for y in [0.5, 3.0, 8.0, 20.0] {
            let r: Integral<Complex64> = LogIntegral::new()
                .lower(-1.0)
                .upper(1.0)
                .frequency(y)
                .integrate(|u: f64| Ok(Complex64::from_polar(1.0, y * u)))
                .unwrap();
            assert!((r.value - Complex64::new(2.0 * y.sin() / y, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn slow_power_tail() {
        // ∫_0^∞ r/(1+r)^3 dr = 1/2: the integrand decays like e^{-u}.
        let r = LogIntegral::new()
            .integrate(|u: f64| {
                let x = u.exp();
                Ok(x * x / (1.0 + x).powi(3))
            })
            .unwrap();
        assert!((r.value - 0.5).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn non_decaying_tail_is_reported() {
        let err = LogIntegral::new()
            .integrate(|u: f64| Ok(1.0 / (1.0 + u.abs())))
            .unwrap_err();
        assert!(matches!(err, Error::TailDivergence { .. }), "{err}");
    }

    #[test]
    fn far_anchor_is_found() {
        // mass concentrated near r = 1e-6.
        let t = 1e-6f64;
        let r = LogIntegral::new()
            .anchor(t.ln())
            .integrate(|u: f64| {
                let x = u.exp() / t;
                Ok((-x * x).exp() * x * x * 2.0)
            })
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_split_panels() {
        // indicator of [0, 0.3] in u, with a jump inside the core region.
        let r = LogIntegral::new()
            .breakpoint(0.3)
            .integrate(|u: f64| Ok(if (0.0..=0.3).contains(&u) { 1.0 } else { 0.0 } * (-u * u).exp().max(0.0)))
            .unwrap();
        let exact = 0.5 * PI.sqrt() * erf_approx(0.3);
        assert!((r.value - exact).abs() < 1e-6, "{} vs {exact}", r.value);
    }

    // Crude erf for the test above (Abramowitz–Stegun 7.1.26, |err| < 1.5e-7).
    fn erf_approx(x: f64) -> f64 {
        let t = 1.0 / (1.0 + 0.3275911 * x);
        let p = t * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
        1.0 - p * (-x * x).exp()
    }

    #[test]
    fn nan_reported() {
        let err = integrate(|x: f64| Ok(if x > 0.5 { f64::NAN } else { 1.0 }), 0.0, 1.0, Tolerance::default())
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }
}

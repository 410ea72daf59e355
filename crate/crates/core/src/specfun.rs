//! Complex gamma and beta functions, and the unit sphere / unit ball constants.
//!
//! Γ uses the Lanczos approximation with g = 7 and nine coefficients, evaluated
//! in logarithmic form so that large imaginary parts do not overflow, and the
//! reflection formula for `Re z < 0.5`. Over `Re z ∈ [-10, 50]`, `|Im z| ≤ 50`
//! the relative error stays below 1e-12.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexValue = Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `sin(πx)` with argument reduction, exact zeros at the integers.
fn sin_pi_real(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r.fract() == 0.0 {
        return 0.0;
    }
    (PI * r).sin()
}

fn cos_pi_real(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if (r - 0.5).abs() == 0.0 || (r + 0.5).abs() == 0.0 {
        return 0.0;
    }
    (PI * r).cos()
}

/// `sin(πz)` for complex `z`.
fn sin_pi(z: Complex64) -> Complex64 {
    let (s, c) = (sin_pi_real(z.re), cos_pi_real(z.re));
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}

/// ln Γ(z) for `Re z ≥ 0.5` (principal branch of the Lanczos form).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let zm = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm + 0.5) * t.ln() - t + series.ln()
}

/// Γ(z) for complex `z`. Poles are reported as [`Error::Pole`].
pub fn gamma_complex(z: ComplexValue) -> Result<ComplexValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain(format!("gamma of non-finite argument {z}"));
    }
    if is_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        let s = sin_pi(z);
        let g = ln_gamma_right(1.0 - z).exp();
        Ok(PI / (s * g))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

/// Γ(x) for real `x`.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma_complex(Complex64::new(x, 0.0)).map(|g| g.re)
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b), for `Re a > 0` and `Re b > 0`.
pub fn beta_complex(a: ComplexValue, b: ComplexValue) -> Result<ComplexValue> {
    if !(a.re > 0.0 && b.re > 0.0) {
        return domain(format!("beta requires Re a > 0 and Re b > 0, got a = {a}, b = {b}"));
    }
    if a.re >= 0.5 && b.re >= 0.5 {
        return Ok((ln_gamma_right(a) + ln_gamma_right(b) - ln_gamma_right(a + b)).exp());
    }
    Ok(gamma_complex(a)? * gamma_complex(b)? / gamma_complex(a + b)?)
}

/// Volume of the unit ball in ℝⁿ, m(B(0,1)).
pub fn ball_volume(n: i64) -> Result<f64> {
    if n <= 0 {
        return domain(format!("ball volume needs n >= 1, got {n}"));
    }
    // V_n = 2π/n · V_{n-2}, V_1 = 2, V_2 = π
    let mut v = if n % 2 == 1 { 2.0 } else { PI };
    let mut k = if n % 2 == 1 { 1 } else { 2 };
    while k < n {
        k += 2;
        v *= 2.0 * PI / k as f64;
    }
    Ok(v)
}

/// Surface area ω_{n-1} of the unit sphere S^{n-1} ⊂ ℝⁿ.
pub fn sphere_area(n: i64) -> Result<f64> {
    Ok(n as f64 * ball_volume(n)?)
}

/// Geometric constants of ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionConstants {
    pub n: usize,
    pub sphere_area: f64,
    pub ball_volume: f64,
}

impl DimensionConstants {
    pub fn new(n: usize) -> Result<Self> {
        let ball_volume = ball_volume(n as i64)?;
        Ok(Self {
            n,
            sphere_area: n as f64 * ball_volume,
            ball_volume,
        })
    }
}

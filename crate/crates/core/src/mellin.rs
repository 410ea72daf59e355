//! Fourier analysis on the multiplicative group `(0,∞)`.
//!
//! Two sign conventions are in use and both are kept explicit:
//! [`mult_transform`] integrates against `s^{-iy} ds/s`, while
//! [`radial_mellin`] integrates a kernel against `‖x‖^{+iy} dx`.
//! [`g_hat_from_radial`] converts between them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::linspace;
use crate::kernels::{counterexample_c_psi, poisson_constant, RadialKernel};
use crate::multconv::HalfLineProfile;
use crate::quad::{LogIntegral, Tolerance};
use crate::specfun::{beta_complex, gamma_complex, sphere_area};

/// Base profiles whose radial Mellin integral is known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum MellinForm {
    /// `(4π)^{-n/2} e^{-r²/4}`
    Gaussian,
    /// `χ_{[0,1]}(r) / m(B(0,1))`
    Ball,
    /// Euclidean Poisson kernel `c_n (1+r²)^{-(n+1)/2}`
    Poisson,
    /// `(1+r²)^{-α}`
    Power { alpha: Complex64 },
    /// `e^{-α r^β}`
    Stretched { alpha: f64, beta: f64 },
    /// Unit-mass counterexample kernel built from `ψ`
    Counterexample,
    /// Normalized `d_λ (1+r²)^{-(ρ-iλ)}` on the boundary `ℝ^n`, `ρ = n/2`
    PsiLambda { lambda: Complex64 },
}

impl MellinForm {
    /// Look up a closed form by registry id and numeric parameters.
    pub fn from_id(id: &str, params: &[f64]) -> Result<Self> {
        let need = |k: usize| -> Result<()> {
            if params.len() < k {
                return domain(format!("closed form {id} needs {k} parameters, got {}", params.len()));
            }
            Ok(())
        };
        Ok(match id {
            "gaussian" => MellinForm::Gaussian,
            "ball" => MellinForm::Ball,
            "poisson" => MellinForm::Poisson,
            "counterexample" => MellinForm::Counterexample,
            "power" => {
                need(1)?;
                MellinForm::Power {
                    alpha: Complex64::new(params[0], params.get(1).copied().unwrap_or(0.0)),
                }
            }
            "G" => {
                need(2)?;
                MellinForm::Stretched {
                    alpha: params[0],
                    beta: params[1],
                }
            }
            "psi_lambda" => {
                need(2)?;
                MellinForm::PsiLambda {
                    lambda: Complex64::new(params[0], params[1]),
                }
            }
            other => return Err(Error::Lookup(format!("closed-form Mellin id {other}"))),
        })
    }
}

fn power_form(n: usize, alpha: Complex64, y: f64) -> Result<Complex64> {
    let half_z = Complex64::new(n as f64, y) / 2.0;
    if !(alpha.re > n as f64 / 2.0) {
        return domain(format!("power kernel Mellin needs Re α > n/2, got α = {alpha}, n = {n}"));
    }
    let omega = sphere_area(n as i64)?;
    Ok(omega / 2.0 * gamma_complex(half_z)? * gamma_complex(alpha - half_z)? / gamma_complex(alpha)?)
}

/// `d_λ` from the Beta-integral value of `∫_{ℝ^m} (1+‖x‖²)^{-(ρ-iλ)} dx`, `ρ = m/2`.
pub(crate) fn psi_lambda_closed_normalizer(m: usize, lambda: Complex64) -> Result<Complex64> {
    if !(lambda.im > 0.0) {
        return domain(format!("ψ^λ needs Im λ > 0, got λ = {lambda}"));
    }
    let rho = m as f64 / 2.0;
    let i = Complex64::i();
    let omega = sphere_area(m as i64)?;
    let integral =
        omega / 2.0 * gamma_complex(rho.into())? * gamma_complex(-i * lambda)? / gamma_complex(rho - i * lambda)?;
    Ok(integral.inv())
}

/// Closed-form value of `ω_{n-1} ∫_0^∞ base(r) r^{n-1+iy} dr`.
pub fn closed_form_mellin(form: &MellinForm, n: usize, y: f64) -> Result<Complex64> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    let nf = n as f64;
    let z = Complex64::new(nf, y);
    let omega = sphere_area(n as i64)?;
    match form {
        MellinForm::Gaussian => {
            let two_pow = (Complex64::new(nf - 1.0, y) * 2f64.ln()).exp();
            Ok((4.0 * PI).powf(-nf / 2.0) * omega * two_pow * gamma_complex(z / 2.0)?)
        }
        MellinForm::Ball => Ok(nf / z),
        MellinForm::Poisson => Ok(poisson_constant(n)? * power_form(n, ((nf + 1.0) / 2.0).into(), y)?),
        MellinForm::Power { alpha } => power_form(n, *alpha, y),
        MellinForm::Stretched { alpha, beta } => {
            if !(*alpha > 0.0 && *beta > 0.0) {
                return domain(format!("stretched exponential needs α, β > 0, got {alpha}, {beta}"));
            }
            let w = z / *beta;
            Ok(omega * gamma_complex(w)? / (*beta * (w * alpha.ln()).exp()))
        }
        MellinForm::Counterexample => {
            let c = counterexample_c_psi(n)?;
            let g_hat = if y == 0.0 { 2.0 } else { 2.0 * y.sin() / y };
            Ok(beta_complex(z, z.conj())? * g_hat / c)
        }
        MellinForm::PsiLambda { lambda } => {
            let d = psi_lambda_closed_normalizer(n, *lambda)?;
            let rho = nf / 2.0;
            Ok(d * power_form(n, rho - Complex64::i() * lambda, y)?)
        }
    }
}

/// Closed-form radial Mellin integral of a (dilated, weighted) kernel, if its
/// base profile is in the registry.
pub fn kernel_closed_form(k: &RadialKernel, y: f64) -> Result<Option<Complex64>> {
    let Some(form) = k.mellin_form() else {
        return Ok(None);
    };
    let dil = Complex64::from_polar(1.0, y * k.scale().ln());
    Ok(Some(k.weight() * dil * closed_form_mellin(form, k.dim(), y)?))
}

/// Log-coordinate integration plan adapted to a kernel.
pub(crate) fn kernel_plan(k: &RadialKernel, extra_frequency: f64) -> LogIntegral {
    let mut plan = LogIntegral::new()
        .anchor(k.scale().ln())
        .frequency(extra_frequency.abs() + k.log_frequency());
    if let Some(s) = k.support() {
        plan = plan.upper(s.ln()).anchor(s.ln());
    }
    for b in k.breakpoints() {
        plan = plan.breakpoint(b.ln());
    }
    plan
}

/// `∫_{ℝ^n} φ(x) ‖x‖^{iy} dx = ω_{n-1} ∫_0^∞ φ(r) r^{n-1+iy} dr` by quadrature.
pub fn radial_mellin(k: &RadialKernel, y: f64) -> Result<Complex64> {
    let n = k.dim();
    let nf = n as f64;
    let omega = sphere_area(n as i64)?;
    let plan = kernel_plan(k, y).tolerance(Tolerance::rel(1e-12));
    let r = plan.integrate(|u: f64| {
        let v = k.value(u.exp());
        if v == Complex64::new(0.0, 0.0) {
            return Ok(v);
        }
        Ok(v * Complex64::from_polar((nf * u).exp(), y * u))
    })?;
    Ok(omega * r.value)
}

/// `ĝ_φ(y) = ω_{n-1}^{-1} ∫ φ(x) ‖x‖^{iy} dx`, the transform of `g_φ(s) = s^{-n} φ(1/s)`
/// in the `s^{-iy} ds/s` convention.
pub fn g_hat_from_radial(k: &RadialKernel, y: f64) -> Result<Complex64> {
    Ok(radial_mellin(k, y)? / sphere_area(k.dim() as i64)?)
}

/// `ĝ(y) = ∫_0^∞ g(s) s^{-iy} ds/s`.
pub fn mult_transform(g: &HalfLineProfile, y: f64) -> Result<Complex64> {
    let plan = g.plan().frequency(y).tolerance(Tolerance::rel(1e-12));
    let r = plan.integrate(|u: f64| {
        let v = g.eval(u.exp())?;
        if v == Complex64::new(0.0, 0.0) {
            return Ok(v);
        }
        Ok(v * Complex64::from_polar(1.0, -y * u))
    })?;
    Ok(r.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroInterval {
    pub lo: f64,
    pub hi: f64,
    /// Refined location.
    pub y: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MellinSpectrum {
    pub kernel: String,
    pub dim: usize,
    pub y_grid: Vec<f64>,
    #[serde(serialize_with = "crate::serialize_complex_vec")]
    pub values: Vec<Complex64>,
    pub min_modulus: f64,
    pub zeros: Vec<ZeroInterval>,
}

/// Modulus below which a refined minimum is reported as a zero.
pub const ZERO_THRESHOLD: f64 = 1e-6;
const REFINE_WIDTH: f64 = 1e-8;
const ZERO_CONTRAST: f64 = 1e-3;

fn golden_min(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > REFINE_WIDTH {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Sample `radial_mellin` on a uniform grid and locate its zeros.
pub fn tauberian_check(k: &RadialKernel, y_min: f64, y_max: f64, points: usize) -> Result<MellinSpectrum> {
    if points < 3 || !(y_min < y_max) {
        return domain(format!("tauberian check needs points >= 3 and y_min < y_max, got {points}, [{y_min}, {y_max}]"));
    }
    let y_grid = linspace(y_min, y_max, points);
    let values: Vec<Complex64> = y_grid
        .par_iter()
        .map(|&y| radial_mellin(k, y))
        .collect::<Result<_>>()?;
    let moduli: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let min_modulus = moduli.iter().copied().fold(f64::INFINITY, f64::min);

    let modulus = |y: f64| radial_mellin(k, y).map(|v| v.norm());
    let mut zeros: Vec<ZeroInterval> = Vec::new();
    for i in 0..points {
        let left = if i > 0 { moduli[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < points { moduli[i + 1] } else { f64::INFINITY };
        if !(moduli[i] <= left && moduli[i] <= right) {
            continue;
        }
        let lo = y_grid[i.saturating_sub(1)];
        let hi = y_grid[(i + 1).min(points - 1)];
        let (y, m) = golden_min(&modulus, lo, hi)?;
        // A zero must also stand out from its bracket; otherwise the minimum is
        // just decay toward the end of the range.
        let bracket = moduli[i.saturating_sub(1)].max(moduli[(i + 1).min(points - 1)]);
        if m < ZERO_THRESHOLD
            && m <= ZERO_CONTRAST * bracket
            && !zeros.iter().any(|z| (z.y - y).abs() < 10.0 * REFINE_WIDTH)
        {
            zeros.push(ZeroInterval {
                lo,
                hi,
                y,
                modulus: m,
            });
        }
    }
    Ok(MellinSpectrum {
        kernel: k.name().to_string(),
        dim: k.dim(),
        y_grid,
        values,
        min_modulus,
        zeros,
    })
}

impl MellinSpectrum {
    /// CSV with columns `y,re,im,modulus`; zeros follow as `#` comment rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,re,im,modulus\n");
        for (y, v) in self.y_grid.iter().zip(&self.values) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", y, v.re, v.im, v.norm()));
        }
        for z in &self.zeros {
            out.push_str(&format!(
                "# zero y={:.16e} bracket=[{:.16e},{:.16e}] modulus={:.16e}\n",
                z.y, z.lo, z.hi, z.modulus
            ));
        }
        out
    }
}

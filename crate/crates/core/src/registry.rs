//! String ids for kernels, measures and boundary functions, as used by the CLI
//! and scenario configs. Parameters follow the family name, separated by `:`.

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::hyperbolic::HyperbolicContext;
use crate::kernels::{self, RadialKernel};
use crate::measures::{Density, RadialFunction, RadialMeasure};

/// Kernel ids with a short description.
pub const KERNEL_IDS: &[(&str, &str)] = &[
    ("poisson", "Euclidean Poisson kernel c_n (1+r^2)^{-(n+1)/2}"),
    ("gaussian", "Gaussian (4 pi)^{-n/2} e^{-r^2/4}"),
    ("heat:t", "heat kernel at time t"),
    ("K:alpha:beta", "(1+r^2)^{-alpha} / log(2 + r^beta), unnormalized"),
    ("G:alpha:beta", "e^{-alpha r^beta}, unnormalized"),
    ("power:alpha[:alpha_im]", "(1+r^2)^{-alpha}, unnormalized"),
    ("ball", "normalized indicator of the unit ball"),
    ("counterexample", "unit-mass kernel whose Mellin integral vanishes at y = pi"),
    ("hyperbolic:psi:n:lambda", "normalized psi^lambda on R^{n-1} (lambda like 0.5+1i)"),
];

pub const MEASURE_IDS: &[(&str, &str)] = &[
    ("lebesgue", "Lebesgue measure"),
    ("atom:mass", "point mass at the origin"),
    ("counterexample:y0", "(2 + cos(y0 log r)) dx"),
    ("density:linear", "(1 + r) dx"),
    ("density:oscillating", "(1 + r sin(1/r)) dx, clipped at zero"),
    ("density:power:p", "r^p dx"),
];

pub const FUNCTION_IDS: &[(&str, &str)] = &[
    ("const:c", "constant c"),
    ("phase:y0", "|x|^{i y0}"),
    ("decay:c:p", "c + (1 + |x|)^{-p}"),
];

fn num(id: &str, s: Option<&str>) -> Result<f64> {
    let s = s.ok_or_else(|| Error::Lookup(format!("{id}: missing parameter")))?;
    s.parse::<f64>()
        .map_err(|_| Error::Lookup(format!("{id}: cannot parse parameter {s:?}")))
}

fn no_more<'a>(id: &str, mut it: impl Iterator<Item = &'a str>) -> Result<()> {
    match it.next() {
        Some(extra) => Err(Error::Lookup(format!("{id}: unexpected parameter {extra:?}"))),
        None => Ok(()),
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64> {
    Complex64::from_str(s.trim()).map_err(|_| Error::Lookup(format!("cannot parse complex number {s:?}")))
}

/// Kernel by id in dimension `n`. Hyperbolic ids carry their own dimension and
/// build a kernel on `ℝ^{N-1}`.
pub fn kernel(id: &str, n: usize) -> Result<RadialKernel> {
    let mut parts = id.split(':');
    let family = parts.next().unwrap_or_default();
    let k = match family {
        "poisson" => kernels::poisson(n)?,
        "gaussian" => kernels::gaussian(n)?,
        "ball" => kernels::ball(n)?,
        "counterexample" => kernels::build_counterexample_kernel(n)?,
        "heat" => kernels::heat(n, num(id, parts.next())?)?,
        "K" => kernels::k_family(n, num(id, parts.next())?, num(id, parts.next())?)?,
        "G" => kernels::g_family(n, num(id, parts.next())?, num(id, parts.next())?)?,
        "power" => {
            let re = num(id, parts.next())?;
            let im = match parts.next() {
                Some(s) => num(id, Some(s))?,
                None => 0.0,
            };
            kernels::power(n, Complex64::new(re, im))?
        }
        "hyperbolic" => {
            if parts.next() != Some("psi") {
                return Err(Error::Lookup(format!("{id}: expected hyperbolic:psi:n:lambda")));
            }
            let dim = num(id, parts.next())? as usize;
            let lambda = parse_complex(parts.next().ok_or_else(|| Error::Lookup(format!("{id}: missing lambda")))?)?;
            HyperbolicContext::new(dim)?.psi_lambda(lambda)?
        }
        _ => return Err(Error::Lookup(format!("kernel {id}"))),
    };
    no_more(id, parts)?;
    Ok(k)
}

/// Measure by id in dimension `n`.
pub fn measure(id: &str, n: usize) -> Result<RadialMeasure> {
    let mut parts = id.split(':');
    let family = parts.next().unwrap_or_default();
    let m = match family {
        "lebesgue" => RadialMeasure::lebesgue(n)?,
        "atom" => RadialMeasure::atom(n, num(id, parts.next())?)?,
        "counterexample" => RadialMeasure::counterexample(n, num(id, parts.next())?)?,
        "density" => match parts.next() {
            Some("linear") => RadialMeasure::with_density(id, n, Density::new(|r| 1.0 + r))?,
            Some("oscillating") => RadialMeasure::with_density(
                id,
                n,
                // sin(1/r) is unresolvable below r ~ 1e-4; its contribution there is O(r).
                Density::new(|r| (1.0 + r * (1.0 / r.max(1e-9)).sin()).max(0.0)).with_soft_tolerance(1e-5),
            )?
            .with_growth_claim(n as f64),
            Some("power") => {
                let p = num(id, parts.next())?;
                if !(p > -(n as f64)) {
                    return domain(format!("density r^p needs p > -n, got {p}"));
                }
                RadialMeasure::with_density(id, n, Density::new(move |r| r.powf(p)))?.with_growth_claim(n as f64 + p)
            }
            _ => return Err(Error::Lookup(format!("measure {id}"))),
        },
        _ => return Err(Error::Lookup(format!("measure {id}"))),
    };
    no_more(id, parts)?;
    Ok(m)
}

/// Bounded radial function by id in dimension `n`.
pub fn function(id: &str, n: usize) -> Result<RadialFunction> {
    let mut parts = id.split(':');
    let family = parts.next().unwrap_or_default();
    let f = match family {
        "const" => RadialFunction::constant(n, num(id, parts.next())?)?,
        "phase" => RadialFunction::phase(n, num(id, parts.next())?)?,
        "decay" => RadialFunction::decaying(n, num(id, parts.next())?, num(id, parts.next())?)?,
        _ => return Err(Error::Lookup(format!("function {id}"))),
    };
    no_more(id, parts)?;
    Ok(f)
}

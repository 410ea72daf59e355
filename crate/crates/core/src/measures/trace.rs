//! Finite-grid stand-ins for limit statements.
//!
//! A trace is classified from its stored values only. The tail window decides
//! convergence; a sinusoid in `ln(param)` fitted over the last two windows
//! decides oscillation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierOptions {
    /// Tail window length.
    pub window: usize,
    /// Fewer points than this are always undetermined.
    pub min_points: usize,
    /// Converged when the tail spread is below `max(abs_tol, rel_tol·|median|)`.
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Oscillation amplitudes of the two windows must agree to this fraction.
    pub amplitude_stability: f64,
}

impl Default for ClassifierOptions {
    fn default() -> Self {
        Self {
            window: 12,
            min_points: 24,
            rel_tol: 1e-4,
            abs_tol: 1e-6,
            amplitude_stability: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Converged {
        limit_re: f64,
        limit_im: f64,
        /// Tail still moving monotonically, with shrinking steps.
        slow: bool,
    },
    Oscillatory {
        amplitude: f64,
        center_re: f64,
        center_im: f64,
        /// Angular frequency in `ln(param)`.
        frequency: f64,
    },
    Diverged,
    Undetermined,
}

impl Classification {
    pub fn limit(&self) -> Option<Complex64> {
        match self {
            Classification::Converged { limit_re, limit_im, .. } => Some(Complex64::new(*limit_re, *limit_im)),
            _ => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Classification::Converged { .. })
    }

    pub fn is_oscillatory(&self) -> bool {
        matches!(self, Classification::Oscillatory { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::Converged { .. } => "converged",
            Classification::Oscillatory { .. } => "oscillatory",
            Classification::Diverged => "diverged",
            Classification::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitTrace {
    pub name: String,
    pub params: Vec<f64>,
    pub values: Vec<[f64; 2]>,
    pub classification: Classification,
    pub window: usize,
    pub warnings: Vec<String>,
}

impl LimitTrace {
    pub fn new(name: impl Into<String>, params: Vec<f64>, values: Vec<Complex64>, opts: &ClassifierOptions) -> Self {
        let (classification, warnings) = estimate_limit(&params, &values, opts);
        Self {
            name: name.into(),
            params,
            values: values.iter().map(|z| [z.re, z.im]).collect(),
            classification,
            window: opts.window,
            warnings,
        }
    }

    pub fn real(name: impl Into<String>, params: Vec<f64>, values: Vec<f64>, opts: &ClassifierOptions) -> Self {
        Self::new(name, params, values.into_iter().map(Complex64::from).collect(), opts)
    }

    pub fn complex_values(&self) -> Vec<Complex64> {
        self.values.iter().map(|v| Complex64::new(v[0], v[1])).collect()
    }

    /// Last value of the trace.
    pub fn last(&self) -> Option<Complex64> {
        self.values.last().map(|v| Complex64::new(v[0], v[1]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Component {
    Converged { limit: f64, slow: bool },
    Oscillatory { amplitude: f64, center: f64, frequency: f64 },
    Diverged,
    Undetermined,
}

/// Classify values sampled on a geometric parameter grid.
pub fn estimate_limit(params: &[f64], values: &[Complex64], opts: &ClassifierOptions) -> (Classification, Vec<String>) {
    let mut warnings = Vec::new();
    let n = values.len().min(params.len());
    if n < opts.min_points.max(2 * opts.window) || opts.window < 4 {
        warnings.push(format!("only {n} points; at least {} required", opts.min_points.max(2 * opts.window)));
        return (Classification::Undetermined, warnings);
    }
    if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        warnings.push("non-finite values in trace".into());
        return (Classification::Undetermined, warnings);
    }
    let s: Vec<f64> = params[..n].iter().map(|p| p.ln()).collect();
    let re: Vec<f64> = values[..n].iter().map(|v| v.re).collect();
    let im: Vec<f64> = values[..n].iter().map(|v| v.im).collect();
    let a = classify_component(&s, &re, opts);
    let b = classify_component(&s, &im, opts);

    use Component::*;
    let class = match (a, b) {
        (Converged { limit: lr, slow: sr }, Converged { limit: li, slow: si }) => {
            if sr || si {
                warnings.push("slow convergence: tail moves monotonically with shrinking steps".into());
            }
            Classification::Converged {
                limit_re: lr,
                limit_im: li,
                slow: sr || si,
            }
        }
        (Diverged, _) | (_, Diverged) => Classification::Diverged,
        (Oscillatory { .. }, _) | (_, Oscillatory { .. }) => {
            let part = |c: Component| match c {
                Oscillatory { amplitude, center, frequency } => (amplitude, center, frequency),
                Converged { limit, .. } => (0.0, limit, 0.0),
                _ => (f64::NAN, f64::NAN, f64::NAN),
            };
            let (ar, cr, fr) = part(a);
            let (ai, ci, fi) = part(b);
            if ar.is_nan() || ai.is_nan() {
                Classification::Undetermined
            } else {
                Classification::Oscillatory {
                    amplitude: ar.max(ai),
                    center_re: cr,
                    center_im: ci,
                    frequency: if ar >= ai { fr } else { fi },
                }
            }
        }
        _ => Classification::Undetermined,
    };
    (class, warnings)
}

fn median(v: &[f64]) -> f64 {
    let mut w = v.to_vec();
    w.sort_by(f64::total_cmp);
    let m = w.len() / 2;
    if w.len() % 2 == 1 {
        w[m]
    } else {
        0.5 * (w[m - 1] + w[m])
    }
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    hi - lo
}

fn classify_component(s: &[f64], x: &[f64], opts: &ClassifierOptions) -> Component {
    let n = x.len();
    let w = opts.window;
    let tail = &x[n - w..];
    let threshold = opts.abs_tol.max(opts.rel_tol * median(tail).abs());
    if spread(tail) <= threshold {
        return Component::Converged {
            limit: x[n - 1],
            slow: false,
        };
    }

    let last2 = &x[n - 2 * w..];
    let diffs: Vec<f64> = last2.windows(2).map(|p| p[1] - p[0]).collect();
    let monotone = diffs.iter().all(|&d| d >= 0.0) || diffs.iter().all(|&d| d <= 0.0);
    if monotone {
        let var_prev = (x[n - w - 1] - x[n - 2 * w]).abs();
        let var_last = (x[n - 1] - x[n - w]).abs();
        return if var_last <= 0.9 * var_prev {
            Component::Converged {
                limit: x[n - 1],
                slow: true,
            }
        } else {
            Component::Diverged
        };
    }

    let (s2, x2) = (&s[n - 2 * w..], last2);
    let Some(freq) = best_frequency(s2, x2) else {
        return Component::Undetermined;
    };
    let (Some(prev), Some(last)) = (
        fit_sinusoid(&s[n - 2 * w..n - w], &x[n - 2 * w..n - w], freq),
        fit_sinusoid(&s[n - w..], tail, freq),
    ) else {
        return Component::Undetermined;
    };
    let joint = fit_sinusoid(s2, x2, freq).expect("joint fit exists when window fits do");
    let (a_prev, a_last) = (prev.amplitude(), last.amplitude());
    let a_max = a_prev.max(a_last);
    if a_prev > threshold
        && a_last > threshold
        && (a_prev - a_last).abs() <= opts.amplitude_stability * a_max
        && joint.rms <= 0.2 * a_max
    {
        Component::Oscillatory {
            amplitude: a_last,
            center: last.c,
            frequency: freq,
        }
    } else {
        Component::Undetermined
    }
}

#[derive(Debug, Clone, Copy)]
struct Fit {
    c: f64,
    a: f64,
    b: f64,
    rms: f64,
}

impl Fit {
    fn amplitude(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

/// Least-squares fit of `c + a cos(ωs) + b sin(ωs)`.
fn fit_sinusoid(s: &[f64], x: &[f64], omega: f64) -> Option<Fit> {
    let s0 = s[0];
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&si, &xi) in s.iter().zip(x) {
        let phase = omega * (si - s0);
        let basis = [1.0, phase.cos(), phase.sin()];
        for i in 0..3 {
            rhs[i] += basis[i] * xi;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    let sol = solve3(m, rhs)?;
    let mut ss = 0.0;
    for (&si, &xi) in s.iter().zip(x) {
        let phase = omega * (si - s0);
        let r = xi - (sol[0] + sol[1] * phase.cos() + sol[2] * phase.sin());
        ss += r * r;
    }
    // Re-express the phase relative to the absolute origin of s.
    let (cs, sn) = ((omega * s0).cos(), (omega * s0).sin());
    Some(Fit {
        c: sol[0],
        a: sol[1] * cs - sol[2] * sn,
        b: sol[1] * sn + sol[2] * cs,
        rms: (ss / s.len() as f64).sqrt(),
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() <= 1e-10 * scale {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, src) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Angular frequency minimizing the sinusoid-fit residual, scanned up to the
/// Nyquist limit of the grid and refined by golden section.
fn best_frequency(s: &[f64], x: &[f64]) -> Option<f64> {
    let span = (s[s.len() - 1] - s[0]).abs();
    let step = s.windows(2).map(|p| (p[1] - p[0]).abs()).fold(f64::INFINITY, f64::min);
    if !(span > 0.0 && step > 0.0) {
        return None;
    }
    let w_min = std::f64::consts::PI / span;
    let w_max = std::f64::consts::PI / step;
    if !(w_max > w_min) {
        return None;
    }
    let rss = |w: f64| fit_sinusoid(s, x, w).map_or(f64::INFINITY, |f| f.rms);
    const SCAN: usize = 400;
    let grid: Vec<f64> = (0..SCAN)
        .map(|k| w_min + (w_max - w_min) * k as f64 / (SCAN - 1) as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&w| rss(w)).collect();
    let best = (0..SCAN).min_by(|&i, &j| vals[i].total_cmp(&vals[j]))?;
    if !vals[best].is_finite() {
        return None;
    }
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(SCAN - 1)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (rss(c), rss(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rss(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rss(d);
        }
    }
    Some(0.5 * (a + b))
}

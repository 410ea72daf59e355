//! Invariants checked on random inputs.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use fatou::hyperbolic::{DMethod, HyperbolicContext};
use fatou::kernels::{self, counterexample_psi, counterexample_psi_quadrature};
use fatou::measures::trace::{estimate_limit, ClassifierOptions};
use fatou::mellin::{kernel_closed_form, radial_mellin};
use fatou::multconv::{check_h_identity, sandwich_bounds};
use fatou::specfun::{ball_volume, beta_complex, gamma_complex, sphere_area};
use fatou::{GeomGrid, RadialMeasure};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recurrence(re in -4.5f64..6.0, im in -6.0f64..6.0) {
        prop_assume!(im.abs() > 0.05 || (re - re.round()).abs() > 0.05);
        let z = c(re, im);
        let g = gamma_complex(z).unwrap();
        let g1 = gamma_complex(z + 1.0).unwrap();
        prop_assert!((g1 - z * g).norm() <= 1e-12 * g1.norm().max(1e-300));
    }

    #[test]
    fn gamma_conjugate_and_beta_symmetry(re in 0.1f64..5.0, im in -5.0f64..5.0, re2 in 0.1f64..5.0) {
        let z = c(re, im);
        let g = gamma_complex(z).unwrap();
        prop_assert!((gamma_complex(z.conj()).unwrap() - g.conj()).norm() <= 1e-13 * g.norm());
        let w = c(re2, -im);
        let b = beta_complex(z, w).unwrap();
        prop_assert!((beta_complex(w, z).unwrap() - b).norm() <= 1e-13 * b.norm());
    }

    #[test]
    fn sphere_and_ball(n in 1i64..12) {
        prop_assert!((sphere_area(n).unwrap() - n as f64 * ball_volume(n).unwrap()).abs() < 1e-12 * sphere_area(n).unwrap());
    }

    #[test]
    fn mellin_dilation(n in 1usize..4, t in 0.05f64..20.0, y in -6.0f64..6.0) {
        for k in [kernels::gaussian(n).unwrap(), kernels::poisson(n).unwrap()] {
            let base = radial_mellin(&k, y).unwrap();
            let dilated = radial_mellin(&k.dilate(t).unwrap(), y).unwrap();
            let want = Complex64::from_polar(1.0, y * t.ln()) * base;
            prop_assert!((dilated - want).norm() < 1e-9);
            let closed = kernel_closed_form(&k.dilate(t).unwrap(), y).unwrap().unwrap();
            prop_assert!((closed - dilated).norm() < 1e-9);
        }
    }

    #[test]
    fn mellin_conjugate_symmetry(n in 1usize..4, y in -8.0f64..8.0) {
        let k = kernels::build_counterexample_kernel(n).unwrap();
        let a = radial_mellin(&k, y).unwrap();
        let b = radial_mellin(&k, -y).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-10);
        prop_assert!(a.norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn counterexample_closed_form_matches_quadrature(n in 1usize..4, ls in -6.0f64..6.0) {
        let s = ls.exp();
        let closed = counterexample_psi(n, s);
        let quad = counterexample_psi_quadrature(n, s).unwrap();
        prop_assert!((closed - quad).abs() <= 1e-10 * closed.abs().max(1e-300));
    }

    #[test]
    fn psi_lambda_unit_mass(n in 2usize..5, re in -1.0f64..1.0, beta in 0.2f64..1.5) {
        let ctx = HyperbolicContext::new(n).unwrap();
        let lambda = c(re, beta);
        let psi = ctx.psi_lambda(lambda).unwrap();
        prop_assert!((radial_mellin(&psi, 0.0).unwrap() - 1.0).norm() < 1e-8);
        let a = ctx.d_lambda(lambda, DMethod::Numeric).unwrap();
        let b = ctx.d_lambda(lambda, DMethod::ClosedForm).unwrap();
        prop_assert!((a - b).norm() < 1e-8 * b.norm());
    }

    #[test]
    fn restriction_keeps_small_balls(r in 1e-4f64..0.99, big_r in 1.0f64..5.0) {
        let mu = RadialMeasure::counterexample(2, PI).unwrap();
        let restricted = mu.restrict(big_r).unwrap();
        prop_assert!((mu.mean_ratio(r).unwrap() - restricted.mean_ratio(r).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sandwich_for_positive_measures(gamma in 1.05f64..3.0) {
        let radii = [1e-3, 0.03, 0.5];
        for mu in [RadialMeasure::lebesgue(2).unwrap(), RadialMeasure::counterexample(1, PI).unwrap()] {
            prop_assert!(sandwich_bounds(&mu, gamma, &radii).unwrap().holds);
        }
    }

    #[test]
    fn classifier_is_affine_invariant(a in 0.5f64..3.0, b in -2.0f64..2.0, amp in 0.1f64..0.5) {
        let grid = GeomGrid::new(0.1, 0.75, 48).unwrap().points();
        let opts = ClassifierOptions::default();
        let base: Vec<Complex64> = grid.iter().map(|t| c(2.0 + amp * (PI * t.ln()).cos(), 0.0)).collect();
        let moved: Vec<Complex64> = base.iter().map(|v| v * a + b).collect();
        let (c1, _) = estimate_limit(&grid, &base, &opts);
        let (c2, _) = estimate_limit(&grid, &moved, &opts);
        prop_assert_eq!(c1.label(), c2.label());
        prop_assert!(c1.is_oscillatory());
    }
}

#[test]
fn h_identity_random_radii() {
    let mu = RadialMeasure::counterexample(2, PI).unwrap();
    let k = kernels::gaussian(2).unwrap();
    let radii = GeomGrid::spanning(0.01, 3.0, 8).unwrap().points();
    let rep = check_h_identity(&mu, &k, &radii).unwrap();
    assert!(rep.max_residual < 1e-6, "{}", rep.max_residual);
}

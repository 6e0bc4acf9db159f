//! Special functions and radial integrals against independent quadrature and
//! closed-form oracles.

mod common;

use common::{b1_unconjugated, b2_conjugated, b2_unconjugated, en_oracle, rel};
use proptest::prelude::*;
use scatter::assembly::{Formulation, IeContext, RadialBasis};
use scatter::specfun::*;
use scatter::ScatterError;

#[test]
fn en_at_zero_and_divergence() {
    for n in 2..10u32 {
        let v = exp_integral_en(n, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(v, C64::new(1.0 / (n as f64 - 1.0), 0.0));
    }
    assert!(exp_integral_en(1, C64::new(0.0, 0.0)).is_err());
    assert!(matches!(exp_integral_en(2, C64::new(-0.1, 1.0)), Err(ScatterError::Domain(_))));
}

#[test]
fn en_matches_quadrature_oracle() {
    let z = C64::new(1.2, -0.7);
    let v = exp_integral_en(3, z).unwrap();
    assert!(rel(v, en_oracle(3, z)) < 1e-10);
    for &(n, z) in &[(1u32, C64::new(0.4, 0.3)), (5, C64::new(2.5, 1.0)), (2, C64::new(0.9, -0.2))] {
        assert!(rel(exp_integral_en(n, z).unwrap(), en_oracle(n, z)) < 1e-10, "n={n} z={z}");
    }
}

fn j1_series(x: f64) -> f64 {
    let mut term = x / 3.0;
    let mut sum = term;
    for k in 1..12 {
        term *= -x * x / (2.0 * k as f64 * (2 * k + 3) as f64);
        sum += term;
    }
    sum
}

#[test]
fn bessel_closed_forms_over_wide_range() {
    let mut x = 1e-3;
    while x <= 1e3 {
        let b = sph_bessel_seq(1, x).unwrap();
        let (s, c) = (x.sin(), x.cos());
        let j1 = if x < 0.1 { j1_series(x) } else { s / (x * x) - c / x };
        let env = (1.0 / x).min(1.0);
        let want = [(b[0].j, s / x), (b[0].y, -c / x), (b[1].j, j1), (b[1].y, -c / (x * x) - s / x)];
        for (got, w) in want {
            assert!((got - w).abs() <= 1e-14 * w.abs().max(env), "x={x}: {got} vs {w}");
        }
        x *= 1.37;
    }
}

#[test]
fn hankel_is_bessel_combination() {
    for &x in &[0.2, 3.0, 40.0] {
        for (n, b) in sph_bessel_seq(8, x).unwrap().iter().enumerate() {
            let (h, dh) = sph_hankel1(n, x).unwrap();
            assert!(rel(h, C64::new(b.j, b.y)) < 1e-15);
            assert!(rel(dh, C64::new(b.dj, b.dy)) < 1e-15);
        }
    }
}

#[test]
fn legendre_endpoints_have_unit_magnitude() {
    for n in 0..40 {
        assert!((legendre_p(n, 1.0).unwrap().0 - 1.0).abs() < 1e-14);
        assert!((legendre_p(n, -1.0).unwrap().0.abs() - 1.0).abs() < 1e-14);
    }
    assert!(legendre_p(2, 1.5).is_err());
}

#[test]
fn conjugated_radial_integrals() {
    for &rho1 in &[0.0, 0.3, 0.7] {
        let t = RadialIntegralTable::new(rho1, 2.0, true, 14).unwrap();
        assert!(t.b1(1).is_err());
        for n in 2..=12 {
            assert_eq!(t.b1(n).unwrap(), C64::new(1.0 / (n as f64 - 1.0), 0.0));
        }
        for n in 1..=12 {
            let want = b2_conjugated(rho1, n);
            assert!((t.b2(n).unwrap().re - want).abs() < 1e-12 * want, "rho1={rho1} n={n}");
            if rho1 == 0.0 {
                assert!((t.b2(n).unwrap().re - 1.0 / n as f64).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn unconjugated_radial_integrals_match_quadrature() {
    for &rho1 in &[0.0, 0.3, 0.7] {
        for &rho2 in &[0.5, 2.0, 10.0] {
            let t = RadialIntegralTable::new(rho1, rho2, false, 13).unwrap();
            for n in 1..=12 {
                let b1 = t.b1(n).unwrap();
                let b2 = t.b2(n).unwrap();
                assert!(rel(b1, b1_unconjugated(rho2, n)) < 1e-8, "B1 rho2={rho2} n={n}");
                assert!(rel(b2, b2_unconjugated(rho1, rho2, n)) < 1e-8, "B2 rho1={rho1} rho2={rho2} n={n}");
                if rho1 == 0.0 {
                    assert!(rel(b2, t.b1(n + 1).unwrap()) < 1e-13);
                }
            }
        }
    }
}

#[test]
fn radial_table_rejects_bad_rho1() {
    assert!(RadialIntegralTable::new(1.0, 2.0, false, 4).is_err());
}

#[test]
fn ie_context_table_covers_every_index() {
    for n in 1..=8 {
        for f in [Formulation::Pgu, Formulation::Pgc, Formulation::Bgu, Formulation::Bgc] {
            let ie = IeContext::new(f, n, RadialBasis::Chebyshev, 1.0, 2.0, 0.0, None).unwrap();
            assert_eq!(ie.radial_table_size(), 2 * n + 2 + ie.test_shift());
            let t = ie.radial_table().unwrap();
            assert_eq!(t.conjugated(), f.is_conjugated());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn en_recurrence_residual(n in 1u32..=20, m in 0.2f64..50.0, arg in -1.5707963f64..1.5707963) {
        let z = C64::from_polar(m, arg);
        let a = exp_integral_en(n, z).unwrap();
        let b = exp_integral_en(n + 1, z).unwrap();
        let rhs = ((-z).exp() - z * a) / n as f64;
        prop_assert!((b - rhs).norm() < 1e-12 * b.norm().max(rhs.norm()));
    }

    #[test]
    fn en_branches_agree_on_overlap(n in 1u32..=12, m in 0.5f64..2.0, arg in -1.5707963f64..1.5707963) {
        let z = C64::from_polar(m, arg);
        let s = exp_integral_en_series(n, z).unwrap();
        let c = exp_integral_en_cf(n, z).unwrap();
        prop_assert!(rel(s, c) < 1e-11);
    }

    #[test]
    fn bessel_wronskian(n in 0usize..=30, lx in -1.0f64..2.0) {
        let x = 10f64.powf(lx);
        let b = sph_bessel(n, x).unwrap();
        let w = b.j * b.dy - b.dj * b.y;
        prop_assert!((w * x * x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outputs_are_finite(n in 0usize..=40, lx in -3.0f64..3.0) {
        if let Ok(b) = sph_bessel(n, 10f64.powf(lx)) {
            prop_assert!(b.j.is_finite() && b.dj.is_finite() && b.y.is_finite() && b.dy.is_finite());
        }
    }
}

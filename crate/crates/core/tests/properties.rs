use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use valdist::appell::{density_from_coeffs, inner_product_coeffs, r0_coefficients};
use valdist::herglotz::{angle, omega, IntervalUnion};
use valdist::ode::{accumulate_theta0_many, propagate_appell};
use valdist::{IntegratorConfig, Potential};

fn upper_half_plane() -> impl Strategy<Value = Complex64> {
    (-20.0..20.0f64, 1e-3..10.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angle_is_bounded(lo in -10.0..10.0f64, w in 0.01..10.0f64, z in upper_half_plane()) {
        let s = IntervalUnion::single(lo, lo + w).unwrap();
        let t = angle(&s, z).unwrap();
        prop_assert!((0.0..=PI).contains(&t));
    }

    #[test]
    fn angle_is_additive(lo in -10.0..10.0f64, w1 in 0.01..5.0f64, w2 in 0.01..5.0f64, z in upper_half_plane()) {
        let mid = lo + w1;
        let left = angle(&IntervalUnion::single(lo, mid).unwrap(), z).unwrap();
        let right = angle(&IntervalUnion::single(mid, mid + w2).unwrap(), z).unwrap();
        let both = angle(&IntervalUnion::new([(lo, mid), (mid, mid + w2)]).unwrap(), z).unwrap();
        let whole = angle(&IntervalUnion::single(lo, mid + w2).unwrap(), z).unwrap();
        prop_assert!((left + right - both).abs() < 1e-12);
        prop_assert!((both - whole).abs() < 1e-12);
    }

    #[test]
    fn angle_and_complement_sum_to_pi(lo in -10.0..10.0f64, w in 0.01..10.0f64, z in upper_half_plane()) {
        let s = IntervalUnion::single(lo, lo + w).unwrap();
        let t = angle(&s, z).unwrap() + angle(&s.complement(), z).unwrap();
        prop_assert!((t - PI).abs() < 1e-12);
    }

    #[test]
    fn omega_grows_with_the_set(lo in -5.0..5.0f64, w in 0.01..5.0f64, extra in 0.01..5.0f64, z in upper_half_plane()) {
        let small = omega(&IntervalUnion::single(lo, lo + w).unwrap(), z).unwrap();
        let large = omega(&IntervalUnion::single(lo - extra, lo + w + extra).unwrap(), z).unwrap();
        prop_assert!(small <= large + 1e-15);
        prop_assert!((0.0..=1.0).contains(&large));
    }

    #[test]
    fn boundary_form_round_trip(a in -50.0..50.0f64, b in 1e-3..50.0f64) {
        let c = r0_coefficients(a, b).unwrap();
        prop_assert!((c.discriminant() - 4.0).abs() < 1e-9 * (1.0 + a * a / b + 1.0 / b + b));
        let d = density_from_coeffs(&c).unwrap();
        prop_assert!((d.m_re - a).abs() < 1e-12 * (1.0 + a.abs()));
        prop_assert!((d.m_im - b).abs() < 1e-12 * (1.0 + b));
        prop_assert!((inner_product_coeffs(&c, &c) - c.discriminant()).abs() < 1e-12 * (1.0 + c.b * c.b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gram_is_conserved(nu in 0.0..3.0f64, lam in 0.2..10.0f64, x in 2.0..40.0f64) {
        let p = Potential::inverse_square(nu, 1.0).unwrap();
        let frame = propagate_appell(&p, lam, x, &IntegratorConfig::default()).unwrap();
        prop_assert!(frame.gram_drift() < 1e-7);
    }

    #[test]
    fn theta0_is_nondecreasing(lam in 0.2..10.0f64, m_re in -3.0..3.0f64, m_im in 0.05..3.0f64) {
        let p = Potential::inverse_square(1.0, 1.0).unwrap();
        let xs: Vec<f64> = (1..=30).map(|k| 1.0 + k as f64).collect();
        let t = accumulate_theta0_many(&p, lam, m_re, m_im, &xs, &IntegratorConfig::default()).unwrap();
        prop_assert!(t[0] > 0.0);
        prop_assert!(t.windows(2).all(|w| w[1] >= w[0]));
    }
}

use czeros::asymp::{airy_zero_enclosure, cylinder_zero_enclosure};
use czeros::coeffs::{mcmahon_coeff, phase_coeff};
use czeros::quadcheck::{invert_phase, QuadratureSettings};
use czeros::report::Report;
use czeros::specfun::Precision;
use czeros::zeros::{
    oracle_airy_zero, oracle_cylinder_zero, oracle_cylinder_zero_direct, oracle_theta, verify_classical_bounds,
};
use proptest::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float, Rational};

fn p(d: u32) -> Precision {
    Precision::new(d).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn close(x: &Float, reference: &str, tol: f64) -> bool {
    let r = Float::with_val(x.prec(), Float::parse(reference).unwrap());
    Float::with_val(x.prec(), x - &r).abs().to_f64() < tol
}

#[test]
fn reference_zeros() {
    let j01 = oracle_cylinder_zero(&q(0, 1), &q(0, 1), 1, p(45)).unwrap();
    assert!(close(&j01, "2.4048255576957727686216318793264546431242449091460", 1e-44));
    let y01 = oracle_cylinder_zero(&q(0, 1), &q(1, 2), 0, p(40)).unwrap();
    assert!(close(&y01, "0.8935769662791675215848871020583382412252", 1e-39));
    let j = oracle_cylinder_zero(&q(1, 3), &q(0, 1), 1, p(40)).unwrap();
    assert!(close(&j, "2.902586248416952480224261953123814260808", 1e-39));
    let a1 = oracle_airy_zero(&q(0, 1), 1, p(40)).unwrap();
    assert!(close(&a1, "-2.338107410459767038489197252446735440639", 1e-39));
    let b1 = oracle_airy_zero(&q(1, 2), 1, p(40)).unwrap();
    assert!(close(&b1, "-1.173713222709127924919979962473902104544", 1e-39));
}

#[test]
fn zeros_lie_in_every_enclosure() {
    for (nu, alpha) in [(q(0, 1), q(0, 1)), (q(-2, 5), q(1, 4)), (q(9, 20), q(3, 4))] {
        for k in 1..=4 {
            let x = oracle_cylinder_zero(&nu, &alpha, k, p(40)).unwrap();
            for n in 1..=6 {
                let e = cylinder_zero_enclosure(&nu, &alpha, k, n, p(40)).unwrap();
                assert!(e.lo <= x && x <= e.hi, "nu {nu} alpha {alpha} k {k} N {n}");
            }
        }
    }
    for alpha in [q(0, 1), q(1, 2)] {
        for k in 1..=4 {
            let x = oracle_airy_zero(&alpha, k, p(40)).unwrap();
            for n in 1..=5 {
                let e = airy_zero_enclosure(&alpha, k, n, p(40)).unwrap();
                assert!(e.lo <= x && x <= e.hi, "alpha {alpha} k {k} N {n}");
            }
        }
    }
}

#[test]
fn classical_report_round_trips_through_json() {
    let r = verify_classical_bounds(&[q(-1, 4), q(0, 1)], &[1, 2, 3], p(30));
    assert!(r.all_passed());
    let text = serde_json::to_string(&r).unwrap();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn coefficients_vanish_at_half_integer_order() {
    for n in 1..=12 {
        assert_eq!(phase_coeff(n).eval(&q(1, 2)), 0);
        assert_eq!(mcmahon_coeff(n).eval(&q(-1, 2)), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn cylinder_zeros_increase_with_k(num in -49i64..=49, a in 0i64..4, k in 1i64..8) {
        let (nu, alpha) = (q(num, 100), q(a, 4));
        let x1 = oracle_cylinder_zero(&nu, &alpha, k, p(25)).unwrap();
        let x2 = oracle_cylinder_zero(&nu, &alpha, k + 1, p(25)).unwrap();
        prop_assert!(x1 < x2);
        prop_assert!(x2.to_f64() - x1.to_f64() > 2.0);
    }

    #[test]
    fn airy_zeros_decrease_with_k(a in 0i64..4, k in 1i64..8) {
        let alpha = q(a, 4);
        let x1 = oracle_airy_zero(&alpha, k, p(25)).unwrap();
        let x2 = oracle_airy_zero(&alpha, k + 1, p(25)).unwrap();
        prop_assert!(x2 < x1);
        prop_assert!(x1.cmp0() == Some(std::cmp::Ordering::Less));
    }

    #[test]
    fn phase_and_direct_roots_agree(num in -140i64..=140, a in 0i64..4, k in 1i64..10) {
        let (nu, alpha) = (q(num, 100), q(a, 4));
        let Ok(x) = oracle_cylinder_zero(&nu, &alpha, k, p(30)) else {
            // indexing refused for this (nu, alpha, k)
            return Ok(());
        };
        let y = oracle_cylinder_zero_direct(&nu, &alpha, &x, p(30)).unwrap();
        let diff = Float::with_val(120, &x - &y).abs();
        prop_assert!(diff.to_f64() < 1e-27 * x.to_f64().max(1.0));
    }

    #[test]
    fn mcmahon_sign_law(num in -499i64..=499, n in 1usize..16) {
        let c = mcmahon_coeff(n).eval(&q(num, 1000));
        let signed = if n % 2 == 0 { c } else { -c };
        prop_assert!(signed < 0);
    }

    #[test]
    fn phase_sign_law(num in -499i64..=499, n in 1usize..16) {
        let t = phase_coeff(n).eval(&q(num, 1000));
        let signed = if n % 2 == 0 { t } else { -t };
        prop_assert!(signed > 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn phase_inversion_recovers_real_points(num in -45i64..=45, x in 1.0f64..12.0) {
        let nu = q(num, 100);
        let prec = p(25);
        let b = 160;
        let z = Complex::with_val(b, (x, 0));
        let theta = oracle_theta(&nu, &z, prec).unwrap();
        let shift = Float::with_val(b, Constant::Pi) * Float::with_val(b, Rational::from(&nu / 2u32) + q(1, 4));
        let w = Complex::with_val(b, &theta + &shift);
        let settings = QuadratureSettings::with_precision(prec);
        let back = invert_phase(&nu, &w, &settings).unwrap();
        prop_assert!((back.real().to_f64() - x).abs() < 1e-18 * x);
        prop_assert!(back.imag().to_f64().abs() < 1e-18);
    }
}

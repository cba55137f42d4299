mod support;

use proptest::prelude::*;
use rug::Float;
use sm_core::num::{complex_exp, principal_sqrt, run_adaptive, AppComplex, PrecisionConfig};
use sm_core::Error;
use support::{c64, law_tol, machin_pi, taylor_exp};

fn cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

#[test]
fn exp_matches_taylor_oracle() {
    let c = cfg();
    for (re, im) in [(-2.0 * std::f64::consts::PI, 0.0), (1.5, -3.25), (-7.0, 9.0), (0.0, 0.0)] {
        let z = c64(c.prec(), re, im);
        let got = complex_exp(&z, &c).unwrap();
        let want = taylor_exp(&z, c.prec());
        assert!(support::rel_dev(&got, &want) < law_tol(c.working_bits, c.guard_bits));
    }
}

#[test]
fn exp_of_two_pi_i_is_one() {
    let c = cfg();
    let z = AppComplex::new(Float::with_val(c.prec(), 0), c.pi() * 2u32);
    let e = complex_exp(&z, &c).unwrap();
    assert!((e - AppComplex::one(c.prec())).abs() < law_tol(c.working_bits, c.guard_bits));
}

#[test]
fn sqrt_examples() {
    let c = cfg();
    let tol = law_tol(c.working_bits, c.guard_bits);
    let s = principal_sqrt(&c64(256, -1.0, 0.0), &c).unwrap();
    assert!((s - AppComplex::i(256)).abs() < tol);
    let s = principal_sqrt(&c64(256, 0.0, 2.0), &c).unwrap();
    assert!((s - c64(256, 1.0, 1.0)).abs() < tol);
    let s = principal_sqrt(&c64(256, 1.0, 0.0), &c).unwrap();
    assert!((s - AppComplex::one(256)).abs() < tol);
}

#[test]
fn pi_ladder_matches_machin() {
    let c = PrecisionConfig::new(64, 4096, 32).unwrap();
    let run = run_adaptive(&c, |cc| Ok(cc.pi())).unwrap();
    assert_eq!(run.achieved_bits, 64);
    let oracle = machin_pi(run.final_bits);
    let diff = Float::with_val(run.final_bits, &run.value - &oracle).abs();
    assert!(diff < 1e-19);
}

#[test]
fn exp_zero_agrees_at_initial_bits() {
    for bits in [64u32, 256, 1024] {
        let c = PrecisionConfig::new(bits, 8192, 32).unwrap();
        let run = run_adaptive(&c, |cc| complex_exp(&AppComplex::zero(cc.prec()), cc)).unwrap();
        assert_eq!(run.achieved_bits, bits);
        assert!((run.value - AppComplex::one(bits)).abs() < 1e-100);
    }
}

#[test]
fn zero_tolerance_exhausts() {
    let c = PrecisionConfig::fixed(128).with_abs_tol(Float::with_val(64, 0));
    let err = run_adaptive(&c, |cc| Ok(cc.pi())).unwrap_err();
    assert!(matches!(err, Error::PrecisionExhausted { max_bits: 128, .. }));
}

#[test]
fn ladder_is_deterministic() {
    let c = PrecisionConfig::new(128, 4096, 32).unwrap();
    let task = |cc: &PrecisionConfig| {
        let z = c64(cc.prec(), 0.3, 1.7);
        complex_exp(&z, cc)
    };
    let a = run_adaptive(&c, task).unwrap();
    let b = run_adaptive(&c, task).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.achieved_bits, b.achieved_bits);
}

/// 2^(-working_bits + guard_bits + 4).
fn kernel_tol(c: &PrecisionConfig) -> Float {
    sm_core::num::pow2(c.guard_bits as i64 + 4 - c.working_bits as i64)
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..10.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| (r * t.cos(), r * t.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exp_times_exp_neg_is_one((re, im) in point()) {
        let c = cfg();
        let z = c64(c.prec(), re, im);
        let prod = &complex_exp(&z, &c).unwrap() * &complex_exp(&-&z, &c).unwrap();
        prop_assert!((prod - AppComplex::one(c.prec())).abs() < kernel_tol(&c));
    }

    #[test]
    fn sqrt_squared_is_identity((re, im) in point()) {
        let c = cfg();
        let z = c64(c.prec(), re, im);
        let s = principal_sqrt(&z, &c).unwrap();
        prop_assert!(s.re >= 0);
        prop_assert!((s.square() - z).abs() < kernel_tol(&c));
    }
}

/// (a + bi)(c + di) from four exact-rational products, rounded once.
fn exact_product(x: (f64, f64), y: (f64, f64), prec: u32) -> AppComplex {
    use rug::Rational;
    let r = |v: f64| Rational::from_f64(v).unwrap();
    let re = r(x.0) * r(y.0) - r(x.1) * r(y.1);
    let im = r(x.0) * r(y.1) + r(x.1) * r(y.0);
    AppComplex::new(Float::with_val(prec, re), Float::with_val(prec, im))
}

#[test]
fn products_agree_with_exact_rationals_at_all_precisions() {
    let mut rng = support::rng(5);
    use rand::Rng;
    for prec in [128u32, 2048, 8192] {
        let tol = Float::with_val(64, Float::i_exp(1, -(prec as i32) + 8));
        for _ in 0..50 {
            let x = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let y = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let want = exact_product(x, y, prec);
            let got = &c64(prec, x.0, x.1) * &c64(prec, y.0, y.1);
            assert!((&got - &want).abs() < tol, "prec {prec}");
            let sq = c64(prec, x.0, x.1).square();
            assert!((&sq - &exact_product(x, x, prec)).abs() < tol, "prec {prec}");
        }
    }
}

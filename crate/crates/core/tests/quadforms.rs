mod support;

use rug::{Float, Integer};
use sm_core::num::pow2;
use sm_core::quadforms::{
    cm_point, enumerate_qn, gamma0_equivalent, reduced_forms, Discriminant, QuadForm, DEFAULT_SEARCH_BOUND,
};
use sm_core::PrecisionConfig;

/// h(D) by a direct count of reduced primitive forms.
fn class_number_oracle(d: i64) -> usize {
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            let g = gcd(gcd(a, b.abs()), c);
            if g == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn heegner_conditions_hold() {
    for n in 1..=10u64 {
        let d = Integer::from(1) - 24 * n;
        for q in enumerate_qn(n).unwrap() {
            assert!(q.a > 0);
            assert!(q.a.is_divisible_u(6));
            assert_eq!(Integer::from(&q.b - 1u32).mod_u(12), 0);
            assert_eq!(q.discriminant(), d);
            assert!(q.is_primitive());
        }
    }
}

#[test]
fn class_counts_match() {
    for n in 1..=10u64 {
        let d = 1 - 24 * n as i64;
        let qn = enumerate_qn(n).unwrap();
        let reduced = reduced_forms(&Discriminant::heegner(n).unwrap());
        assert_eq!(qn.len(), reduced.len(), "n = {n}");
        assert_eq!(qn.len(), class_number_oracle(d), "n = {n}");
    }
}

#[test]
fn first_representatives() {
    let qn = enumerate_qn(1).unwrap();
    let triples: Vec<_> = qn.iter().map(|q| q.to_i64_triple().unwrap()).collect();
    assert_eq!(triples[0], (6, 1, 1));
    assert_eq!(triples.len(), 3);
}

#[test]
fn representatives_are_pairwise_inequivalent() {
    for n in 1..=6u64 {
        let qn = enumerate_qn(n).unwrap();
        for (i, x) in qn.iter().enumerate() {
            for y in &qn[i + 1..] {
                assert!(!gamma0_equivalent(x, y, 6, DEFAULT_SEARCH_BOUND).unwrap());
            }
        }
    }
}

#[test]
fn random_translates_are_equivalent() {
    let mut rng = support::rng(6);
    for n in 1..=6u64 {
        for q in enumerate_qn(n).unwrap() {
            for _ in 0..20 {
                let g = support::random_gamma0(&mut rng, 6, 60, 30);
                let t = q.act(&g);
                assert!(t.a.is_divisible_u(6));
                assert_eq!(Integer::from(&t.b - 1u32).mod_u(12), 0);
                assert!(gamma0_equivalent(&q, &t, 6, DEFAULT_SEARCH_BOUND).unwrap());
                assert!(gamma0_equivalent(&t, &q, 6, DEFAULT_SEARCH_BOUND).unwrap());
            }
        }
    }
}

#[test]
fn level_one_translate_is_not_gamma0_equivalent() {
    // S moves the (6,1,1) class to a form with a = 1, outside the Heegner conditions
    let q = QuadForm::new(6, 1, 1).unwrap();
    let s = q.act(&sm_core::matrix::IntMatrix::S);
    assert!(!gamma0_equivalent(&q, &s, 6, DEFAULT_SEARCH_BOUND).unwrap());
    assert!(gamma0_equivalent(&q, &s, 1, DEFAULT_SEARCH_BOUND).unwrap());
}

#[test]
fn cm_points_are_roots() {
    let cfg = PrecisionConfig::default();
    let bound = pow2(cfg.guard_bits as i64 + 8 - cfg.working_bits as i64);
    for n in 1..=6u64 {
        for q in enumerate_qn(n).unwrap() {
            let pt = cm_point(&q, &cfg).unwrap();
            let z = &pt.embed;
            let fa = Float::with_val(cfg.prec(), &q.a);
            let fb = Float::with_val(cfg.prec(), &q.b);
            let fc = Float::with_val(cfg.prec(), &q.c);
            let v = z.square().scale(&fa) + z.scale(&fb);
            let v = v.add_real(&fc);
            let size = Float::with_val(64, Integer::from(q.a.abs_ref()) + q.b.clone().abs() + q.c.clone().abs());
            assert!(v.abs() < Float::with_val(64, &bound * &size));
            assert!(z.im > 0);
        }
    }
}

#[test]
fn cm_point_of_first_form() {
    let cfg = PrecisionConfig::default();
    let pt = cm_point(&QuadForm::new(6, 1, 1).unwrap(), &cfg).unwrap();
    let want = Float::with_val(cfg.prec(), 23).sqrt() / 12u32;
    assert!(Float::with_val(cfg.prec(), &pt.embed.im - &want).abs() < 1e-70);
    assert!(Float::with_val(cfg.prec(), &pt.embed.re + 1.0f64 / 12.0).abs() < 1e-15);
}

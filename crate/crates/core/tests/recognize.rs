mod support;

use rug::ops::Pow;
use rug::{Float, Integer};
use sm_core::maass::FormDescriptor;
use sm_core::quadforms::enumerate_qn;
use sm_core::recognize::{
    compute_pn, compute_pn_with_forms, j_norm, orbit_product, p_values, partition_table, pentagonal_pn,
    round_to_integers, sharpness_divisor,
};
use sm_core::{AppComplex, PrecisionConfig};

fn cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

/// p(n) by counting partitions with parts at most k, an oracle independent of the pentagonal recurrence.
fn partitions_by_parts(n: usize) -> Integer {
    let mut ways = vec![Integer::new(); n + 1];
    ways[0] = Integer::from(1);
    for part in 1..=n {
        for total in part..=n {
            let t = ways[total - part].clone();
            ways[total] += t;
        }
    }
    ways[n].clone()
}

#[test]
fn pentagonal_matches_parts_oracle() {
    let table = partition_table(200);
    for n in [0usize, 1, 5, 10, 50, 123, 200] {
        assert_eq!(table[n], partitions_by_parts(n), "n = {n}");
    }
    assert_eq!(pentagonal_pn(5), 7);
    assert_eq!(pentagonal_pn(10), 42);
}

#[test]
fn trace_formula_recovers_partitions() {
    let c = cfg();
    for n in 1..=12u64 {
        let rec = compute_pn(n, &c).unwrap();
        assert_eq!(rec.pn, pentagonal_pn(n), "n = {n}");
        assert!(rec.trace_residual < 1e-15);
        assert_eq!(rec.forms.len(), rec.scaled_poly.len() - 1);
    }
}

#[test]
fn first_scaled_polynomial() {
    let rec = compute_pn(1, &cfg()).unwrap();
    assert_eq!(rec.scaled_poly, vec![1, -529, 82616, -5097973]);
    assert_eq!(rec.discriminant, -23);
}

#[test]
fn scaled_polynomials_are_integral() {
    let c = cfg();
    for n in 1..=6u64 {
        let rec = compute_pn(n, &c).unwrap();
        assert!(rec.poly_residual < c.abs_tol(), "n = {n}");
        assert_eq!(rec.scaled_poly[0], 1);
        let sum_of_roots = Integer::from(-&rec.scaled_poly[1]);
        assert_eq!(sum_of_roots, Integer::from((24 * n - 1).pow(2)) * pentagonal_pn(n));
    }
}

#[test]
fn six_times_scaled_polynomial() {
    let c = cfg();
    for n in 1..=6u64 {
        let rec = compute_pn(n, &c).unwrap();
        let six = orbit_product(&rec.p_values, &Integer::from(6 * (24 * n - 1)));
        let (ints, _) = round_to_integers(&six, &c.abs_tol()).unwrap();
        for (k, (a, b)) in ints.iter().zip(&rec.scaled_poly).enumerate() {
            assert_eq!(*a, Integer::from(b * Integer::from(6).pow(k as u32)), "n = {n}, k = {k}");
        }
    }
}

#[test]
fn sharpness_reaches_full_scale() {
    let c = cfg();
    for n in 1..=3u64 {
        let rec = compute_pn(n, &c).unwrap();
        assert_eq!(sharpness_divisor(&rec.p_values, n, &c.abs_tol()), 24 * n - 1);
    }
}

#[test]
fn representatives_do_not_matter() {
    let c = cfg();
    let desc = FormDescriptor::fp();
    let mut rng = support::rng(17);
    for n in 1..=4u64 {
        let forms = enumerate_qn(n).unwrap();
        let moved: Vec<_> = forms
            .iter()
            .map(|q| q.act(&support::random_gamma0(&mut rng, 6, 24, 10)))
            .collect();
        let sum = |vals: Vec<AppComplex>| {
            let mut s = AppComplex::zero(c.prec());
            for v in &vals {
                s += v;
            }
            s
        };
        let a = sum(p_values(&forms, &desc, &c).unwrap());
        let b = sum(p_values(&moved, &desc, &c).unwrap());
        assert!((a - b).abs() < c.abs_tol(), "n = {n}");
        let rec = compute_pn_with_forms(n, moved, &c).unwrap();
        assert_eq!(rec.pn, pentagonal_pn(n));
    }
}

#[test]
fn j_norms_are_six_units() {
    let c = cfg();
    for n in 1..=6u64 {
        let (check, _) = j_norm(n, &c).unwrap();
        assert!(check.coprime_to_6, "n = {n}: {}", check.norm);
        assert!(check.residual < 1e-10);
    }
    let (first, _) = j_norm(1, &c).unwrap();
    assert_eq!(first.norm.clone().abs(), Integer::from(12771880859375u64));
}

#[test]
fn zero_is_rejected() {
    assert!(compute_pn_with_forms(0, vec![], &cfg()).is_err());
    let tol = Float::with_val(64, 1e-20);
    assert!(round_to_integers(&[AppComplex::from_real(Float::with_val(64, 0.5))], &tol).is_err());
}

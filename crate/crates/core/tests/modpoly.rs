mod support;

use sm_core::modpoly::{
    beta_norm, classes_for, fixing_indices, hnf_classes, is_special_candidate, masser_compare, taylor_coeffs,
    MatrixClass,
};
use sm_core::quadforms::{cm_point, enumerate_qn};
use sm_core::PrecisionConfig;
use support::{fd_taylor, rel_dev};

fn psi(m: u64) -> u64 {
    // m prod (1 + 1/p)
    let mut out = m;
    let mut rest = m;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            out = out / p * (p + 1);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        out = out / rest * (rest + 1);
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

type Mat = [i64; 4];

/// M' M^-1 is integral iff M' adj(M) = 0 (mod m).
fn same_orbit(x: &Mat, y: &Mat, m: i64) -> bool {
    let adj = [y[3], -y[1], -y[2], y[0]];
    let prod = [
        x[0] * adj[0] + x[1] * adj[2],
        x[0] * adj[1] + x[1] * adj[3],
        x[2] * adj[0] + x[3] * adj[2],
        x[2] * adj[1] + x[3] * adj[3],
    ];
    prod.iter().all(|e| e % m == 0)
}

fn orbit_count(m: i64) -> usize {
    let mut reps: Vec<Mat> = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                for d in -m..=m {
                    if a * d - b * c != m || gcd(gcd(a, b), gcd(c, d)) != 1 {
                        continue;
                    }
                    let x = [a, b, c, d];
                    if !reps.iter().any(|r| same_orbit(&x, r, m)) {
                        reps.push(x);
                    }
                }
            }
        }
    }
    reps.len()
}

fn as_mat(k: &MatrixClass) -> Mat {
    [k.p, k.q, 0, k.s]
}

#[test]
fn class_counts_follow_the_index_formula() {
    for m in 1..=50u64 {
        assert_eq!(hnf_classes(m).unwrap().len() as u64, psi(m), "m = {m}");
    }
}

#[test]
fn class_counts_match_direct_orbits() {
    for m in 1..=6i64 {
        let classes = hnf_classes(m as u64).unwrap();
        assert_eq!(classes.len(), orbit_count(m), "m = {m}");
        for (i, x) in classes.iter().enumerate() {
            for y in &classes[i + 1..] {
                assert!(!same_orbit(&as_mat(x), &as_mat(y), m));
            }
        }
    }
}

#[test]
fn special_candidates() {
    assert!(is_special_candidate(&27.into()));
    assert!(is_special_candidate(&(-75).into()));
    assert!(!is_special_candidate(&23.into()));
    assert!(!is_special_candidate(&47.into()));
}

#[test]
fn exactly_one_fixing_class() {
    let cfg = PrecisionConfig::default();
    for n in 1..=3u64 {
        for q in enumerate_qn(n).unwrap() {
            let alpha = cm_point(&q, &cfg).unwrap();
            let classes = classes_for(&alpha).unwrap();
            assert_eq!(fixing_indices(&alpha, &classes).unwrap().len(), 1, "form {q:?}");
        }
    }
}

#[test]
fn masser_matches_direct_c() {
    let cfg = PrecisionConfig::default();
    for n in 1..=3u64 {
        for q in enumerate_qn(n).unwrap() {
            let cmp = masser_compare(&q, &cfg).unwrap();
            assert!(cmp.deviation < 1e-15, "form {q:?}");
        }
    }
    let first = masser_compare(&enumerate_qn(1).unwrap()[0], &PrecisionConfig::fixed(512).with_max_bits(1024)).unwrap();
    assert!(first.deviation < 1e-20);
}

#[test]
fn taylor_data_matches_finite_differences() {
    let cfg = PrecisionConfig::fixed(512);
    for q in enumerate_qn(1).unwrap() {
        let alpha = cm_point(&q, &cfg).unwrap();
        let classes = classes_for(&alpha).unwrap();
        let t = taylor_coeffs(&alpha, &classes, &cfg).unwrap();
        let fd = fd_taylor(&alpha.embed, &classes, &cfg);
        assert!(rel_dev(&fd.b01, &t.beta) < 1e-10);
        assert!(rel_dev(&fd.b10, &t.beta) < 1e-10);
        assert!(rel_dev(&fd.b02, &t.beta02) < 1e-10);
        assert!(rel_dev(&fd.b11, &t.beta11) < 1e-10);
        assert!(rel_dev(&fd.b20, &t.beta20) < 1e-10);
        assert!(rel_dev(&fd.b20, &fd.b02) < 1e-10);
        assert_eq!(t.beta20, t.beta02);
    }
}

#[test]
fn taylor_data_is_stable_under_doubling() {
    let lo = PrecisionConfig::fixed(512);
    let hi = PrecisionConfig::fixed(1024);
    let q = &enumerate_qn(1).unwrap()[0];
    let a = cm_point(q, &lo).unwrap();
    let b = cm_point(q, &hi).unwrap();
    let ta = taylor_coeffs(&a, &classes_for(&a).unwrap(), &lo).unwrap();
    let tb = taylor_coeffs(&b, &classes_for(&b).unwrap(), &hi).unwrap();
    for (x, y) in [(&ta.beta, &tb.beta), (&ta.beta02, &tb.beta02), (&ta.beta11, &tb.beta11)] {
        assert!(rel_dev(x, y) < support::law_tol(512, lo.guard_bits));
    }
}

#[test]
fn determinant_one_is_rejected() {
    let cfg = PrecisionConfig::default();
    let alpha = cm_point(&enumerate_qn(1).unwrap()[0], &cfg).unwrap();
    assert!(taylor_coeffs(&alpha, &hnf_classes(1).unwrap(), &cfg).is_err());
}

#[test]
fn first_beta_norm_is_a_six_unit() {
    let cfg = PrecisionConfig::new(256, 65536, 32).unwrap().with_abs_tol(sm_core::num::pow2(-80));
    let (check, _) = beta_norm(1, &cfg).unwrap();
    assert!(check.coprime_to_6);
    assert!(check.residual < 1e-10);
}

//! Independent oracles shared by the integration tests. Nothing here calls the
//! library route it is used to check.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};
use sm_core::matrix::IntMatrix;
use sm_core::num::{pow2, AppComplex};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn c64(prec: u32, re: f64, im: f64) -> AppComplex {
    AppComplex::new(Float::with_val(prec, re), Float::with_val(prec, im))
}

/// 2^(-working_bits + guard_bits + 8), the tolerance of the evaluation laws.
pub fn law_tol(working_bits: u32, guard_bits: u32) -> Float {
    pow2(guard_bits as i64 + 8 - working_bits as i64)
}

fn atan_inv(x: u32, prec: u32) -> Float {
    // sum (-1)^k / ((2k+1) x^(2k+1))
    let x2 = Float::with_val(prec, x) * x;
    let mut power = Float::with_val(prec, x).recip();
    let mut sum = Float::with_val(prec, 0);
    let eps = pow2(-(prec as i64) - 8);
    let mut k = 0u32;
    loop {
        let term = Float::with_val(prec, &power / (2 * k + 1));
        if term < eps {
            break;
        }
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// 16 atan(1/5) - 4 atan(1/239).
pub fn machin_pi(prec: u32) -> Float {
    let p = prec + 16;
    let v = atan_inv(5, p) * 16u32 - atan_inv(239, p) * 4u32;
    Float::with_val(prec, v)
}

/// Plain Taylor series of exp; fine for |z| <= 10.
pub fn taylor_exp(z: &AppComplex, prec: u32) -> AppComplex {
    let p = prec + 64;
    let z = z.with_prec(p);
    let mut term = AppComplex::one(p);
    let mut sum = AppComplex::one(p);
    let eps = pow2(-(p as i64));
    let mut k = 1i64;
    loop {
        term = (&term * &z).scale_rational(&rug::Rational::from((1, k)));
        sum += &term;
        if term.abs() < eps && k > 40 {
            break;
        }
        k += 1;
    }
    sum.with_prec(prec)
}

fn sigma(k: u32, n: u64) -> Integer {
    let mut s = Integer::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += Integer::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += Integer::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

fn q_at(z: &AppComplex, prec: u32) -> AppComplex {
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let arg = z.with_prec(prec).scale(&two_pi).mul_i();
    let r = Float::with_val(prec, arg.re.exp_ref());
    let (s, c) = arg.im.clone().sin_cos(Float::new(prec));
    AppComplex::new(Float::with_val(prec, &r * &c), r * s)
}

/// 1 + c_k sum sigma_{k-1}(n) q^n summed directly at z; needs Im z >~ 0.5.
pub fn lambert_eisenstein(k: u32, z: &AppComplex, prec: u32) -> AppComplex {
    let ck: i64 = match k {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => panic!("unsupported weight"),
    };
    let p = prec + 32;
    let q = q_at(z, p);
    let eps = pow2(-(p as i64) - 8);
    let mut qn = AppComplex::one(p);
    let mut sum = AppComplex::zero(p);
    let mut n = 1u64;
    loop {
        qn = &qn * &q;
        let s = sigma(k - 1, n);
        let term = qn.scale(&Float::with_val(p, &s));
        sum += &term;
        if term.abs() < eps && n > 5 {
            break;
        }
        n += 1;
    }
    sum.scale_i64(ck).add_real(&Float::with_val(p, 1)).with_prec(prec)
}

/// q^(1/24) prod (1 - q^n) summed directly at z.
pub fn eta_product(z: &AppComplex, prec: u32) -> AppComplex {
    let p = prec + 32;
    let z = z.with_prec(p);
    let q = q_at(&z, p);
    let eps = pow2(-(p as i64) - 8);
    let mut prod = AppComplex::one(p);
    let mut qn = AppComplex::one(p);
    loop {
        qn = &qn * &q;
        let one_minus = (-&qn).add_real(&Float::with_val(p, 1));
        prod = &prod * &one_minus;
        if qn.abs() < eps {
            break;
        }
    }
    let pre = q_at(&z.scale_rational(&rug::Rational::from((1, 24))), p);
    (&pre * &prod).with_prec(prec)
}

/// Gamma(1/4) / (2 pi^(3/4)).
pub fn eta_at_i(prec: u32) -> Float {
    let p = prec + 32;
    let g = Float::with_val(p, Float::with_val(p, 0.25).gamma_ref());
    let pi = Float::with_val(p, Constant::Pi);
    let pi34 = Float::with_val(p, pi.pow(Float::with_val(p, 0.75)));
    Float::with_val(prec, g / (pi34 * 2u32))
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// A random element of Gamma_0(level) with |c| <= c_bound and |d| <= d_bound.
pub fn random_gamma0<R: Rng>(rng: &mut R, level: i64, c_bound: i64, d_bound: i64) -> IntMatrix {
    loop {
        let k = rng.gen_range(-(c_bound / level)..=(c_bound / level));
        let c = k * level;
        let d = rng.gen_range(-d_bound..=d_bound);
        if c == 0 {
            if d != 1 && d != -1 {
                continue;
            }
            let b = rng.gen_range(-5..=5);
            return IntMatrix::new(d, b, 0, d);
        }
        let (g, x, y) = ext_gcd(d, c);
        if g.abs() != 1 {
            continue;
        }
        // a d - b c = 1 with a = x g, b = -y g
        let (a, b) = (x * g, -y * g);
        let m = IntMatrix::new(a, b, c, d);
        assert_eq!(m.det(), 1);
        assert!(m.in_gamma0(level));
        return m;
    }
}

/// Solves the real normal equations of a least-squares fit by Gaussian elimination.
pub fn least_squares(design: &[Vec<Float>], rhs: &[Float], prec: u32) -> Vec<Float> {
    let cols = design[0].len();
    let mut a: Vec<Vec<Float>> = vec![vec![Float::with_val(prec, 0); cols + 1]; cols];
    for (row, y) in design.iter().zip(rhs) {
        for i in 0..cols {
            for j in 0..cols {
                a[i][j] += Float::with_val(prec, &row[i] * &row[j]);
            }
            a[i][cols] += Float::with_val(prec, &row[i] * y);
        }
    }
    for col in 0..cols {
        let pivot = (col..cols)
            .max_by(|&x, &y| a[x][col].clone().abs().partial_cmp(&a[y][col].clone().abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        for r in 0..cols {
            if r == col {
                continue;
            }
            let f = Float::with_val(prec, &a[r][col] / &a[col][col]);
            for k in col..=cols {
                let t = Float::with_val(prec, &f * &a[col][k]);
                a[r][k] -= t;
            }
        }
    }
    (0..cols).map(|i| Float::with_val(prec, &a[i][cols] / &a[i][i])).collect()
}

/// |a - b| / max(|a|, |b|).
pub fn rel_dev(a: &AppComplex, b: &AppComplex) -> Float {
    let scale = a.abs().max(&b.abs()).clone();
    (a - b).abs() / scale
}

/// Taylor coefficients of Phi(X, Y) = prod_i (Y - j(M_i sigma)), X = j(sigma),
/// fitted from a 5x5 grid around (j0, j0).
#[derive(Clone, Debug)]
pub struct FdTaylor {
    pub b10: AppComplex,
    pub b01: AppComplex,
    pub b20: AppComplex,
    pub b11: AppComplex,
    pub b02: AppComplex,
}

/// sigma near `start` with j(sigma) = target, by Newton's method on j.
pub fn invert_j(
    target: &AppComplex,
    start: &AppComplex,
    cfg: &sm_core::PrecisionConfig,
) -> AppComplex {
    let prec = cfg.prec();
    let two_pi_i = AppComplex::new(Float::with_val(prec, 0), cfg.pi() * 2u32);
    let eps = pow2(40 - prec as i64);
    let mut s = start.clone();
    for _ in 0..100 {
        let (j, tj) = sm_core::maass::j_and_theta_j(&s, cfg).unwrap();
        let step = (&j - target).checked_div(&(&two_pi_i * &tj)).unwrap();
        s = &s - &step;
        if step.abs() < eps {
            return s;
        }
    }
    panic!("Newton inversion of j did not converge");
}

pub fn fd_taylor(
    alpha: &AppComplex,
    classes: &[sm_core::modpoly::MatrixClass],
    cfg: &sm_core::PrecisionConfig,
) -> FdTaylor {
    let prec = cfg.prec();
    let j0 = sm_core::maass::eval_j(alpha, cfg).unwrap();
    let delta = Float::with_val(prec, j0.abs() * 1e-8f64);
    let grid: Vec<i64> = (-2..=2).collect();
    let mut design = Vec::new();
    let mut re = Vec::new();
    let mut im = Vec::new();
    for &u in &grid {
        let x = j0.add_real(&Float::with_val(prec, &delta * u));
        let sigma = invert_j(&x, alpha, cfg);
        let ys: Vec<AppComplex> = classes
            .iter()
            .map(|m| {
                let z = sigma
                    .scale_rational(&rug::Rational::from((m.p, m.s)))
                    .add_real(&Float::with_val(prec, rug::Rational::from((m.q, m.s))));
                sm_core::maass::eval_j(&z, cfg).unwrap()
            })
            .collect();
        for &v in &grid {
            let y = j0.add_real(&Float::with_val(prec, &delta * v));
            let mut phi = AppComplex::one(prec);
            for yi in &ys {
                phi = &phi * &(&y - yi);
            }
            let row: Vec<Float> = [1, u, v, u * u, u * v, v * v]
                .iter()
                .map(|&t| Float::with_val(prec, t))
                .collect();
            design.push(row);
            re.push(phi.re.clone());
            im.push(phi.im.clone());
        }
    }
    let cr = least_squares(&design, &re, prec);
    let ci = least_squares(&design, &im, prec);
    let coeff = |k: usize, power: i32| {
        let scale = Float::with_val(prec, delta.clone().pow(power));
        AppComplex::new(Float::with_val(prec, &cr[k] / &scale), Float::with_val(prec, &ci[k] / &scale))
    };
    FdTaylor {
        b10: coeff(1, 1),
        b01: coeff(2, 1),
        b20: coeff(3, 2),
        b11: coeff(4, 2),
        b02: coeff(5, 2),
    }
}

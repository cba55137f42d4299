//! Matrix classes of determinant m = -D and the local Taylor data of the
//! modular polynomial Phi_m(X, Y) = prod_i (Y - j(M_i z)), X = j(z), at the
//! point (j(alpha), j(alpha)).

use rayon::prelude::*;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::maass::{eval_c, eval_j, j_and_theta_j};
use crate::num::{AppComplex, PrecisionConfig, Relative};
use crate::quadforms::{cm_point, enumerate_qn, CMPoint, QuadIrrational};
use crate::recognize::{adaptive_for_rounding, norm_6unit_check, NormCheck};

/// [[p, q], [0, s]] acting by z -> (p z + q)/s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixClass {
    pub p: i64,
    pub q: i64,
    pub s: i64,
}

impl MatrixClass {
    pub fn determinant(&self) -> i64 {
        self.p * self.s
    }

    pub fn apply_exact(&self, x: &QuadIrrational) -> Result<QuadIrrational> {
        x.moebius_int(&[
            Integer::from(self.p),
            Integer::from(self.q),
            Integer::new(),
            Integer::from(self.s),
        ])
    }

    /// d/dz of (p z + q)/s.
    pub fn derivative(&self) -> rug::Rational {
        rug::Rational::from((self.p, self.s))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Hermite normal forms of the primitive matrices of determinant m.
pub fn hnf_classes(m: u64) -> Result<Vec<MatrixClass>> {
    if m == 0 {
        return Err(Error::InvalidArgument("determinant must be positive".into()));
    }
    let m = i64::try_from(m).map_err(|_| Error::Overflow("determinant"))?;
    let mut out = Vec::new();
    for p in 1..=m {
        if m % p != 0 {
            continue;
        }
        let s = m / p;
        for q in 0..s {
            if gcd(gcd(p, q), s) == 1 {
                out.push(MatrixClass { p, q, s });
            }
        }
    }
    Ok(out)
}

/// |D| = 3 d^2 for some integer d.
pub fn is_special_candidate(d: &Integer) -> bool {
    let a = Integer::from(d.abs_ref());
    if !a.is_divisible_u(3) {
        return false;
    }
    Integer::from(&a / 3u32).is_perfect_square()
}

/// Indices of classes M with M alpha SL2(Z)-equivalent to alpha, decided exactly.
pub fn fixing_indices(alpha: &CMPoint, classes: &[MatrixClass]) -> Result<Vec<usize>> {
    let (target, _) = alpha.form.reduce()?;
    let mut out = Vec::new();
    for (i, cl) in classes.iter().enumerate() {
        let image = cl.apply_exact(&alpha.exact)?;
        let form = image.minimal_form()?;
        if form.discriminant() == target.discriminant() && form.reduce()?.0 == target {
            out.push(i);
        }
    }
    Ok(out)
}

fn unique_fixing(alpha: &CMPoint, classes: &[MatrixClass]) -> Result<usize> {
    let d = alpha.discriminant();
    if is_special_candidate(&d) {
        return Err(Error::SpecialCandidate(d.to_string()));
    }
    let idx = fixing_indices(alpha, classes)?;
    match idx.len() {
        0 => Err(Error::NoFixingClass),
        1 => Ok(idx[0]),
        count => Err(Error::MultipleFixing { count }),
    }
}

pub fn fixing_class(alpha: &CMPoint, classes: &[MatrixClass]) -> Result<MatrixClass> {
    Ok(classes[unique_fixing(alpha, classes)?])
}

/// j and theta j at every M_i alpha, plus at alpha itself.
struct ClassValues {
    j0: AppComplex,
    theta_j0: AppComplex,
    j: Vec<AppComplex>,
    theta_j: Vec<AppComplex>,
}

fn class_values(alpha: &CMPoint, classes: &[MatrixClass], cfg: &PrecisionConfig) -> Result<ClassValues> {
    let prec = cfg.prec();
    let (j0, theta_j0) = j_and_theta_j(&alpha.exact.embed(prec), cfg)?;
    let per: Vec<(AppComplex, AppComplex)> = classes
        .par_iter()
        .map(|cl| {
            let pt = cl.apply_exact(&alpha.exact)?.embed(prec);
            j_and_theta_j(&pt, cfg)
        })
        .collect::<Result<_>>()?;
    let (j, theta_j) = per.into_iter().unzip();
    Ok(ClassValues { j0, theta_j0, j, theta_j })
}

fn product_over_others(j0: &AppComplex, js: &[AppComplex], skip: usize) -> AppComplex {
    let mut beta = AppComplex::one(j0.prec());
    for (i, y) in js.iter().enumerate() {
        if i != skip {
            beta *= &(j0 - y);
        }
    }
    beta
}

/// beta = prod over non-fixing classes of (j(alpha) - j(M_i alpha)).
pub fn beta_product(alpha: &CMPoint, classes: &[MatrixClass], cfg: &PrecisionConfig) -> Result<AppComplex> {
    if classes.len() == 1 {
        return Ok(AppComplex::one(cfg.prec()));
    }
    let fix = unique_fixing(alpha, classes)?;
    let prec = cfg.prec();
    let j0 = eval_j(&alpha.exact.embed(prec), cfg)?;
    let mut beta = AppComplex::one(prec);
    let others: Vec<AppComplex> = classes
        .par_iter()
        .enumerate()
        .filter(|(i, _)| *i != fix)
        .map(|(_, cl)| eval_j(&cl.apply_exact(&alpha.exact)?.embed(prec), cfg))
        .collect::<Result<_>>()?;
    for y in &others {
        beta *= &(&j0 - y);
    }
    Ok(beta)
}

/// Taylor coefficients of Phi at (j0, j0): beta = beta_01, and the second-order ones.
#[derive(Clone, Debug)]
pub struct TaylorData {
    pub j0: AppComplex,
    pub beta: AppComplex,
    pub beta02: AppComplex,
    pub beta11: AppComplex,
    pub beta20: AppComplex,
}

impl TaylorData {
    fn to_vec(&self) -> Vec<AppComplex> {
        vec![
            self.j0.clone(),
            self.beta.clone(),
            self.beta02.clone(),
            self.beta11.clone(),
            self.beta20.clone(),
        ]
    }

    /// (beta02 - beta11 + beta20) / beta.
    pub fn c_value(&self) -> Result<AppComplex> {
        (&(&self.beta02 - &self.beta11) + &self.beta20).checked_div(&self.beta)
    }
}

pub fn taylor_coeffs(alpha: &CMPoint, classes: &[MatrixClass], cfg: &PrecisionConfig) -> Result<TaylorData> {
    if classes.len() < 2 {
        return Err(Error::InvalidArgument("need at least one non-fixing class".into()));
    }
    let fix = unique_fixing(alpha, classes)?;
    let vals = class_values(alpha, classes, cfg)?;
    let prec = cfg.prec();
    let two_pi_i = AppComplex::new(Float::with_val(prec, 0), cfg.pi() * 2u32);
    let jprime = &two_pi_i * &vals.theta_j0;
    if jprime.abs() < cfg.singular_threshold() {
        return Err(Error::NearSingularity("j'(alpha) vanishes".into()));
    }
    let j0 = vals.j0.clone();
    let beta = product_over_others(&j0, &vals.j, fix);
    let deriv = |i: usize| (&two_pi_i * &vals.theta_j[i]).scale_rational(&classes[i].derivative());
    let mut recip_sum = AppComplex::zero(prec);
    let mut weighted = AppComplex::zero(prec);
    for i in 0..classes.len() {
        if i == fix {
            continue;
        }
        let r = (&j0 - &vals.j[i]).recip()?;
        weighted += &(&deriv(i) * &r);
        recip_sum += &r;
    }
    let beta02 = &beta * &recip_sum;
    // d/dsigma of dPhi/dY(j(sigma), j0) at sigma = alpha, divided by j'(alpha)
    let inner = &weighted + &(&deriv(fix) * &recip_sum);
    let beta11 = -(&beta * &inner).checked_div(&jprime)?;
    Ok(TaylorData { j0, beta, beta20: beta02.clone(), beta02, beta11 })
}

/// Masser's value of C at alpha, from determinant m = -D.
pub fn masser_c(alpha: &CMPoint, cfg: &PrecisionConfig) -> Result<AppComplex> {
    taylor_coeffs(alpha, &classes_for(alpha)?, cfg)?.c_value()
}

pub fn classes_for(alpha: &CMPoint) -> Result<Vec<MatrixClass>> {
    let m = Integer::from(-alpha.discriminant());
    hnf_classes(m.to_u64().ok_or(Error::Overflow("determinant"))?)
}

/// Masser's C against the direct evaluation at one CM point.
#[derive(Clone, Debug)]
pub struct MasserComparison {
    pub taylor: TaylorData,
    pub masser_c: AppComplex,
    pub eval_c: AppComplex,
    pub deviation: Float,
    pub achieved_bits: u32,
}

pub fn masser_compare(alpha_form: &crate::quadforms::QuadForm, cfg: &PrecisionConfig) -> Result<MasserComparison> {
    let run = crate::num::run_adaptive(cfg, |c| {
        let alpha = cm_point(alpha_form, c)?;
        let classes = classes_for(&alpha)?;
        let t = taylor_coeffs(&alpha, &classes, c)?;
        let rel: Vec<Relative> = t.to_vec().into_iter().map(Relative).collect();
        Ok((rel, vec![t.c_value()?, eval_c(&alpha.embed, c)?]))
    })?;
    let (rel, mut v) = run.value;
    let ec = v.pop().unwrap();
    let mc = v.pop().unwrap();
    let mut it = rel.into_iter().map(|r| r.0);
    let mut next = || it.next().unwrap();
    let taylor = TaylorData { j0: next(), beta: next(), beta02: next(), beta11: next(), beta20: next() };
    let deviation = (&mc - &ec).abs();
    Ok(MasserComparison { taylor, masser_c: mc, eval_c: ec, deviation, achieved_bits: run.achieved_bits })
}

/// Norm of beta over the CM points of Q_n.
pub fn beta_norm(n: u64, cfg: &PrecisionConfig) -> Result<(NormCheck, u32)> {
    let forms = enumerate_qn(n)?;
    let (prod, bits) = adaptive_for_rounding(cfg, |c| {
        let mut prod = AppComplex::one(c.prec());
        for q in &forms {
            let alpha = cm_point(q, c)?;
            prod *= &beta_product(&alpha, &classes_for(&alpha)?, c)?;
        }
        Ok(prod)
    })?;
    Ok((norm_6unit_check(&[prod], &format!("beta-norm n={n}"), &cfg.abs_tol())?, bits))
}

//! Integer recognition for multisets of CM values: p(n) from the trace,
//! scaled orbit polynomials and norms.

use rayon::prelude::*;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::maass::{eval_j, eval_p, FormDescriptor};
use crate::num::{float_to_decimal, log2_floor, round_float, run_adaptive, AppComplex, PrecisionConfig};
use crate::quadforms::{cm_point, enumerate_qn, QuadForm};

/// Monic prod (x - scale v_i), coefficients from the leading one down.
pub fn orbit_product(values: &[AppComplex], scale: &Integer) -> Vec<AppComplex> {
    let prec = values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let mut coeffs = vec![AppComplex::one(prec)];
    for v in values {
        let r = v.scale(&Float::with_val(prec, scale));
        let mut next = coeffs.clone();
        next.push(AppComplex::zero(prec));
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] -= &(c * &r);
        }
        coeffs = next;
    }
    coeffs
}

/// Nearest integers to the real parts; the residual also counts imaginary parts.
pub fn round_to_integers(poly: &[AppComplex], tol: &Float) -> Result<(Vec<Integer>, Float)> {
    let mut out = Vec::with_capacity(poly.len());
    let mut residual = Float::with_val(64, 0);
    for c in poly {
        let (n, frac) = round_float(&c.re).ok_or(Error::Overflow("rounding"))?;
        let dev = Float::with_val(c.prec(), frac.hypot_ref(&c.im));
        if dev > residual {
            residual = dev;
        }
        out.push(n);
    }
    if !(residual < *tol) {
        return Err(Error::NotNearIntegral {
            label: "polynomial".into(),
            residual: float_to_decimal(&residual, 12),
        });
    }
    Ok((out, residual))
}

/// Euler's pentagonal recurrence.
pub fn pentagonal_pn(n: u64) -> Integer {
    partition_table(n).pop().unwrap()
}

/// p(0), ..., p(n).
pub fn partition_table(n: u64) -> Vec<Integer> {
    let n = n as usize;
    let mut p: Vec<Integer> = Vec::with_capacity(n + 1);
    p.push(Integer::from(1));
    for m in 1..=n {
        let mut acc = Integer::new();
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let g2 = g1 + k;
            let mut t = p[m - g1].clone();
            if g2 <= m {
                t += &p[m - g2];
            }
            if k % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
            k += 1;
        }
        p.push(acc);
    }
    p
}

/// Per-n result bundle.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub n: u64,
    pub discriminant: Integer,
    pub forms: Vec<QuadForm>,
    pub p_values: Vec<AppComplex>,
    /// prod (x - (24n-1) P(alpha_Q)), leading coefficient first.
    pub scaled_poly: Vec<Integer>,
    pub pn: Integer,
    /// Max of the trace and polynomial rounding residuals.
    pub residual: Float,
    pub trace_residual: Float,
    pub poly_residual: Float,
    pub achieved_bits: u32,
}

/// P at the CM points of the given forms, in the given order.
pub fn p_values(forms: &[QuadForm], desc: &FormDescriptor, cfg: &PrecisionConfig) -> Result<Vec<AppComplex>> {
    forms
        .par_iter()
        .map(|q| {
            let pt = cm_point(q, cfg)?;
            eval_p(desc, &pt.embed, cfg)
        })
        .collect()
}

fn sum(values: &[AppComplex]) -> AppComplex {
    let prec = values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let mut s = AppComplex::zero(prec);
    for v in values {
        s += v;
    }
    s
}

/// p(n) = (24n-1)^-1 sum_Q P(alpha_Q), together with the scaled orbit polynomial.
pub fn compute_pn(n: u64, cfg: &PrecisionConfig) -> Result<OrbitRecord> {
    let forms = enumerate_qn(n)?;
    compute_pn_with_forms(n, forms, cfg)
}

/// As `compute_pn` but over caller-chosen representatives.
pub fn compute_pn_with_forms(n: u64, forms: Vec<QuadForm>, cfg: &PrecisionConfig) -> Result<OrbitRecord> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let scale = Integer::from(24 * n - 1);
    let desc = FormDescriptor::fp();
    let run = run_adaptive(cfg, |c| {
        let vals = p_values(&forms, &desc, c)?;
        let poly = orbit_product(&vals, &scale);
        Ok((vals, poly))
    })?;
    let (vals, poly) = run.value;
    let tol = cfg.abs_tol();
    let prec = vals.first().map(|v| v.prec()).unwrap_or(cfg.prec());
    let trace = sum(&vals).scale(&Float::with_val(prec, Float::with_val(prec, &scale).recip_ref()));
    let (pn, frac) = round_float(&trace.re).ok_or(Error::Overflow("rounding"))?;
    let trace_residual = Float::with_val(prec, frac.hypot_ref(&trace.im));
    if !(trace_residual < tol) {
        return Err(Error::NotNearIntegral {
            label: format!("p({n})"),
            residual: float_to_decimal(&trace_residual, 12),
        });
    }
    let (scaled_poly, poly_residual) = round_to_integers(&poly, &tol)?;
    let residual = trace_residual.clone().max(&poly_residual);
    Ok(OrbitRecord {
        n,
        discriminant: Integer::from(-&scale),
        forms,
        p_values: vals,
        scaled_poly,
        pn,
        residual,
        trace_residual,
        poly_residual,
        achieved_bits: run.achieved_bits,
    })
}

/// Largest divisor d of 24n-1 with prod (x - d P) integral within tol.
pub fn sharpness_divisor(p_values: &[AppComplex], n: u64, tol: &Float) -> Integer {
    let m = 24 * n - 1;
    let mut divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
    divisors.sort_unstable_by(|a, b| b.cmp(a));
    for d in divisors {
        if round_to_integers(&orbit_product(p_values, &Integer::from(d)), tol).is_ok() {
            return Integer::from(d);
        }
    }
    Integer::from(0)
}

/// Rounded norm of a Galois-stable multiset and its coprimality to 6.
#[derive(Clone, Debug)]
pub struct NormCheck {
    pub label: String,
    pub norm: Integer,
    pub coprime_to_6: bool,
    pub residual: Float,
}

pub fn norm_6unit_check(values: &[AppComplex], label: &str, tol: &Float) -> Result<NormCheck> {
    let prec = values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let mut prod = AppComplex::one(prec);
    for v in values {
        prod *= v;
    }
    let (ints, residual) = round_to_integers(&[prod], tol).map_err(|e| match e {
        Error::NotNearIntegral { residual, .. } => Error::NotNearIntegral { label: label.into(), residual },
        other => other,
    })?;
    let norm = ints.into_iter().next().unwrap();
    let coprime_to_6 = Integer::from(norm.gcd_ref(&Integer::from(6))) == 1;
    Ok(NormCheck { label: label.into(), norm, coprime_to_6, residual })
}

/// Runs a rounding task with a precision ladder that starts above the magnitude
/// of the result, so that an absolute tolerance is reachable.
pub fn adaptive_for_rounding<F>(cfg: &PrecisionConfig, mut task: F) -> Result<(AppComplex, u32)>
where
    F: FnMut(&PrecisionConfig) -> Result<AppComplex>,
{
    let probe = task(cfg)?;
    let mag = log2_floor(&probe.abs()).max(0) as u64;
    let start = (cfg.working_bits as u64).max(mag + cfg.working_bits as u64);
    if start > cfg.max_bits as u64 {
        return Err(Error::PrecisionExhausted {
            max_bits: cfg.max_bits,
            last_log2_deviation: mag as i64,
        });
    }
    let run = run_adaptive(&cfg.at_bits(start as u32).with_max_bits(cfg.max_bits), task)?;
    Ok((run.value, run.achieved_bits))
}

/// Norm of j over the CM points of Q_n.
pub fn j_norm(n: u64, cfg: &PrecisionConfig) -> Result<(NormCheck, u32)> {
    let forms = enumerate_qn(n)?;
    let (prod, bits) = adaptive_for_rounding(cfg, |c| {
        let js: Vec<AppComplex> = forms
            .par_iter()
            .map(|q| eval_j(&cm_point(q, c)?.embed, c))
            .collect::<Result<_>>()?;
        let mut prod = AppComplex::one(c.prec());
        for v in &js {
            prod *= v;
        }
        Ok(prod)
    })?;
    Ok((norm_6unit_check(&[prod], &format!("j-norm n={n}"), &cfg.abs_tol())?, bits))
}

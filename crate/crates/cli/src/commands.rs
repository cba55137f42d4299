use rayon::prelude::*;
use rug::Float;
use serde_json::{json, Value};
use sm_core::appendix::{appendix_deviations, psi_root_check, Which};
use sm_core::maass::{components, eval_a, eval_b, eval_c, eval_form, eval_j, eval_p, FormDescriptor};
use sm_core::modpoly::{beta_norm, masser_compare};
use sm_core::num::{digits_for_bits, float_to_decimal, parse_float, pow2, run_adaptive};
use sm_core::qseries::{companion_series, fp_series, hypothesis_check};
use sm_core::quadforms::{cm_point, enumerate_qn, QuadForm};
use sm_core::recognize::{compute_pn, j_norm, pentagonal_pn, sharpness_divisor, NormCheck};
use sm_core::sampling::{default_points, RationalPoint};
use sm_core::{AppComplex, Error, PrecisionConfig, Result};

use crate::args::{CacheAction, EvalTarget};
use crate::cache::{Cache, CacheEntry};

const RESIDUAL_DIGITS: usize = 6;

/// What a command prints, and whether any check in it failed.
pub struct Outcome {
    pub json: Value,
    pub human: String,
    pub failed: bool,
    /// Some part ran out of precision but the rest was reported.
    pub exhausted: bool,
}

pub struct Ctx {
    pub cfg: PrecisionConfig,
    pub seed: u64,
    pub cache: Cache,
}

impl Ctx {
    fn tol(&self) -> Float {
        self.cfg.abs_tol()
    }

    fn below_tol(&self, x: &Float) -> bool {
        *x < self.tol()
    }
}

/// Accepts "2^-80" style powers of two and plain decimals.
pub fn parse_tol(s: &str) -> Result<Float> {
    let t = s.trim();
    let value = match t.strip_prefix("2^") {
        Some(e) => {
            let e: i64 = e.trim().parse().map_err(|_| Error::Parse(format!("tolerance {s:?}")))?;
            pow2(e)
        }
        None => parse_float(t, 64)?,
    };
    if !(value > 0) || value.is_infinite() {
        return Err(Error::InvalidArgument(format!("tolerance {s:?} must be positive and finite")));
    }
    Ok(value)
}

/// "re,im" at the given precision; the imaginary part must be positive.
pub fn parse_point(s: &str, prec: u32) -> Result<AppComplex> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("point {s:?} is not of the form re,im")))?;
    let z = AppComplex::new(parse_float(re, prec)?, parse_float(im, prec)?);
    if !(z.im > 0) {
        return Err(Error::NotUpperHalfPlane);
    }
    Ok(z)
}

fn res(x: &Float) -> String {
    float_to_decimal(x, RESIDUAL_DIGITS)
}

fn pair(v: &AppComplex, digits: usize) -> Value {
    let (re, im) = v.to_decimal_pair(digits);
    json!([re, im])
}

fn complex_text(re: &str, im: &str) -> String {
    match im.strip_prefix('-') {
        Some(mag) => format!("{re} - {mag} i"),
        None => format!("{re} + {im} i"),
    }
}

fn point_json(p: &RationalPoint) -> Value {
    json!([p.re.to_string(), p.im.to_string()])
}

fn form_json(q: &QuadForm) -> Value {
    json!([q.a.to_string(), q.b.to_string(), q.c.to_string()])
}

fn positive(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(n)
}

/// The orbit record for n, from the cache when possible.
pub fn orbit_entry(ctx: &mut Ctx, n: u64) -> Result<CacheEntry> {
    positive(n)?;
    let wb = ctx.cfg.working_bits;
    if let Some(e) = ctx.cache.lookup(n, wb) {
        return Ok(e.clone());
    }
    let rec = compute_pn(n, &ctx.cfg)?;
    let entry = CacheEntry::from_record(&rec, wb)?;
    ctx.cache.store(entry.clone())?;
    Ok(entry)
}

pub fn pn(ctx: &mut Ctx, n: u64) -> Result<Outcome> {
    let e = orbit_entry(ctx, n)?;
    let formula = e.pn()?;
    let oracle = pentagonal_pn(n);
    let failed = formula != oracle || !ctx.below_tol(&e.max_residual()?);
    Ok(Outcome {
        json: json!({
            "n": n,
            "discriminant": e.discriminant,
            "pn": e.pn,
            "pn_oracle": oracle.to_string(),
            "forms": e.forms.len(),
            "trace_residual": e.trace_residual,
            "poly_residual": e.poly_residual,
            "achieved_bits": e.achieved_bits,
        }),
        human: e.pn.clone(),
        failed,
        exhausted: false,
    })
}

pub fn orbit(ctx: &mut Ctx, n: u64) -> Result<Outcome> {
    let e = orbit_entry(ctx, n)?;
    let sharp = sharpness_divisor(&e.p_values()?, n, &ctx.tol());
    let failed = !ctx.below_tol(&e.max_residual()?);
    let mut human = format!("scaled orbit polynomial for n = {n} (degree {}):\n", e.scaled_poly.len() - 1);
    for (k, c) in e.scaled_poly.iter().enumerate() {
        human.push_str(&format!("  x^{}: {c}\n", e.scaled_poly.len() - 1 - k));
    }
    human.push_str(&format!("largest integral scale: {sharp} (24n-1 = {})", 24 * n - 1));
    Ok(Outcome {
        json: json!({
            "n": n,
            "scaled_poly": e.scaled_poly,
            "poly_residual": e.poly_residual,
            "sharpness_divisor": sharp.to_string(),
            "achieved_bits": e.achieved_bits,
        }),
        human,
        failed,
        exhausted: false,
    })
}

pub fn forms(ctx: &Ctx, n: u64) -> Result<Outcome> {
    positive(n)?;
    let digits = digits_for_bits(ctx.cfg.working_bits);
    let list: Vec<Value> = enumerate_qn(n)?
        .iter()
        .map(|q| {
            let alpha = cm_point(q, &ctx.cfg)?;
            Ok(json!({
                "a": q.a.to_string(),
                "b": q.b.to_string(),
                "c": q.c.to_string(),
                "im_alpha": float_to_decimal(&alpha.embed.im, digits),
            }))
        })
        .collect::<Result<_>>()?;
    let json = Value::Array(list);
    // The listing is JSON in either mode.
    let human = serde_json::to_string_pretty(&json).expect("serializable");
    Ok(Outcome { json, human, failed: false, exhausted: false })
}

pub fn eval(ctx: &Ctx, what: EvalTarget, z: &str) -> Result<Outcome> {
    parse_point(z, ctx.cfg.prec())?;
    let desc = FormDescriptor::fp();
    let run = run_adaptive(&ctx.cfg, |c| {
        let p = parse_point(z, c.prec())?;
        match what {
            EvalTarget::F => eval_form(&desc, &p, c),
            EvalTarget::P => eval_p(&desc, &p, c),
            EvalTarget::A => eval_a(&desc, &p, c),
            EvalTarget::B => eval_b(&desc, &p, c),
            EvalTarget::C => eval_c(&p, c),
            EvalTarget::J => eval_j(&p, c),
        }
    })?;
    let digits = digits_for_bits(run.achieved_bits);
    let (re, im) = run.value.to_decimal_pair(digits);
    let name = format!("{what:?}").replace("J", "j");
    Ok(Outcome {
        json: json!({
            "what": name,
            "z": z,
            "re": re,
            "im": im,
            "achieved_bits": run.achieved_bits,
        }),
        human: format!("{name}({z}) = {}", complex_text(&re, &im)),
        failed: false,
        exhausted: false,
    })
}

pub fn verify_decomp(ctx: &Ctx, trials: usize) -> Result<Outcome> {
    let desc = FormDescriptor::fp();
    let points = default_points(ctx.seed, trials);
    let prec = ctx.cfg.prec();
    let residuals: Vec<Float> = points
        .par_iter()
        .map(|p| Ok(components(&desc, &p.embed(prec), &ctx.cfg)?.decomposition_residual()))
        .collect::<Result<_>>()?;
    let max = residuals.iter().fold(Float::with_val(64, 0), |m, r| m.max(r));
    let failed = !ctx.below_tol(&max);
    let rows: Vec<Value> = points
        .iter()
        .zip(&residuals)
        .map(|(p, r)| json!({"z": point_json(p), "residual": res(r)}))
        .collect();
    Ok(Outcome {
        json: json!({
            "seed": ctx.seed,
            "trials": trials,
            "working_bits": ctx.cfg.working_bits,
            "tol": res(&ctx.tol()),
            "points": rows,
            "max_residual": res(&max),
            "pass": !failed,
        }),
        human: format!(
            "P = A + B C at {trials} points (seed {}): max residual {} ({})",
            ctx.seed,
            res(&max),
            if failed { "FAIL" } else { "ok" }
        ),
        failed,
        exhausted: false,
    })
}

fn fold_max(xs: &[Float]) -> Float {
    xs.iter().fold(Float::with_val(64, 0), |m, d| m.max(d))
}

/// Maximum deviations for A' and B over the given points.
pub fn appendix_max(ctx: &Ctx, zs: &[AppComplex]) -> Result<(Vec<(Vec<Float>, Vec<Float>)>, Float, Float)> {
    let rows: Vec<(Vec<Float>, Vec<Float>)> = zs
        .iter()
        .map(|z| Ok((appendix_deviations(Which::APrime, z, &ctx.cfg)?, appendix_deviations(Which::B, z, &ctx.cfg)?)))
        .collect::<Result<_>>()?;
    let a = fold_max(&rows.iter().map(|r| fold_max(&r.0)).collect::<Vec<_>>());
    let b = fold_max(&rows.iter().map(|r| fold_max(&r.1)).collect::<Vec<_>>());
    Ok((rows, a, b))
}

pub fn verify_appendix(ctx: &Ctx, z: Option<&str>, trials: usize) -> Result<Outcome> {
    let prec = ctx.cfg.prec();
    let (labels, zs): (Vec<Value>, Vec<AppComplex>) = match z {
        Some(s) => (vec![json!(s)], vec![parse_point(s, prec)?]),
        None => default_points(ctx.seed, trials)
            .iter()
            .map(|p| (point_json(p), p.embed(prec)))
            .unzip(),
    };
    let (rows, a_max, b_max) = appendix_max(ctx, &zs)?;
    let failed = !ctx.below_tol(&a_max) || !ctx.below_tol(&b_max);
    let points: Vec<Value> = labels
        .into_iter()
        .zip(&rows)
        .map(|(l, (a, b))| {
            json!({
                "z": l,
                "aprime": a.iter().map(res).collect::<Vec<_>>(),
                "b": b.iter().map(res).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut human = String::new();
    for (i, (a, b)) in rows.iter().enumerate() {
        human.push_str(&format!("point {i}: A' max {}, B max {}\n", res(&fold_max(a)), res(&fold_max(b))));
    }
    human.push_str(&format!("overall: A' {}, B {} ({})", res(&a_max), res(&b_max), if failed { "FAIL" } else { "ok" }));
    Ok(Outcome {
        json: json!({
            "seed": if z.is_some() { Value::Null } else { json!(ctx.seed) },
            "working_bits": ctx.cfg.working_bits,
            "tol": res(&ctx.tol()),
            "points": points,
            "aprime_max": res(&a_max),
            "b_max": res(&b_max),
            "pass": !failed,
        }),
        human,
        failed,
        exhausted: false,
    })
}

pub fn masser(ctx: &Ctx, n: u64) -> Result<Outcome> {
    positive(n)?;
    let mut rows = vec![];
    let mut human = String::new();
    let mut failed = false;
    for q in enumerate_qn(n)? {
        let cmp = masser_compare(&q, &ctx.cfg)?;
        let digits = digits_for_bits(cmp.achieved_bits);
        failed |= !ctx.below_tol(&cmp.deviation);
        let t = &cmp.taylor;
        rows.push(json!({
            "form": form_json(&q),
            "beta": pair(&t.beta, digits),
            "beta02": pair(&t.beta02, digits),
            "beta11": pair(&t.beta11, digits),
            "beta20": pair(&t.beta20, digits),
            "masser_c": pair(&cmp.masser_c, digits),
            "eval_c": pair(&cmp.eval_c, digits),
            "deviation": res(&cmp.deviation),
            "achieved_bits": cmp.achieved_bits,
        }));
        let short = |v: &AppComplex| {
            let (re, im) = v.to_decimal_pair(20);
            complex_text(&re, &im)
        };
        human.push_str(&format!(
            "{q}:\n  beta     {}\n  beta02   {}\n  beta11   {}\n  beta20   {}\n  masser C {}\n  direct C {}\n  deviation {}\n",
            short(&t.beta),
            short(&t.beta02),
            short(&t.beta11),
            short(&t.beta20),
            short(&cmp.masser_c),
            short(&cmp.eval_c),
            res(&cmp.deviation)
        ));
    }
    Ok(Outcome {
        json: json!({"n": n, "tol": res(&ctx.tol()), "forms": rows, "pass": !failed}),
        human: human.trim_end().to_string(),
        failed,
        exhausted: false,
    })
}

fn norm_json(check: &NormCheck, bits: u32) -> Value {
    json!({
        "norm": check.norm.to_string(),
        "coprime_to_6": check.coprime_to_6,
        "residual": res(&check.residual),
        "achieved_bits": bits,
    })
}

pub fn norms(ctx: &Ctx, n: u64, with_beta: bool) -> Result<Outcome> {
    positive(n)?;
    let (j, jb) = j_norm(n, &ctx.cfg)?;
    let mut failed = !j.coprime_to_6 || !ctx.below_tol(&j.residual);
    let mut human = format!("N(j) = {} (coprime to 6: {})", j.norm, j.coprime_to_6);
    let mut out = json!({"n": n, "j": norm_json(&j, jb)});
    if with_beta {
        let (b, bb) = beta_norm(n, &ctx.cfg)?;
        failed |= !b.coprime_to_6 || !ctx.below_tol(&b.residual);
        human.push_str(&format!(
            "\nN(beta) has {} digits (coprime to 6: {})",
            b.norm.to_string().trim_start_matches('-').len(),
            b.coprime_to_6
        ));
        out["beta"] = norm_json(&b, bb);
    }
    out["pass"] = json!(!failed);
    Ok(Outcome { json: out, human, failed, exhausted: false })
}

pub fn hypothesis(order: i64, dump: bool) -> Result<Outcome> {
    if order < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let f = fp_series(order)?;
    let rep = hypothesis_check(&f, order)?;
    let failed = !(rep.f_integral && rep.companion_integral);
    let mut out = serde_json::to_value(&rep).expect("serializable");
    out["order"] = json!(order);
    if dump {
        let comp = companion_series(&f, order)?;
        out["series"] = json!({"f": f.to_json(), "companion": comp.to_json()});
    }
    let human = format!(
        "through q^{}: F integral {}, companion integral {}",
        rep.checked_below - 1,
        rep.f_integral,
        rep.companion_integral
    );
    Ok(Outcome { json: out, human, failed, exhausted: false })
}

pub fn cache(ctx: &mut Ctx, action: CacheAction) -> Result<Outcome> {
    if !ctx.cache.is_active() && ctx.cache.warning.is_none() {
        return Err(Error::InvalidArgument("no cache path given (--cache-path or SM_CACHE_PATH)".into()));
    }
    match action {
        CacheAction::Show => {
            let rows: Vec<Value> = ctx
                .cache
                .entries()
                .iter()
                .map(|e| {
                    json!({
                        "n": e.n,
                        "working_bits": e.working_bits,
                        "achieved_bits": e.achieved_bits,
                        "created_unix": e.created_unix,
                        "pn": e.pn,
                    })
                })
                .collect();
            let human = if rows.is_empty() {
                "cache is empty".to_string()
            } else {
                ctx.cache
                    .entries()
                    .iter()
                    .map(|e| format!("n = {} at {} bits (achieved {}): p(n) = {}", e.n, e.working_bits, e.achieved_bits, e.pn))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            Ok(Outcome { json: json!({"entries": rows}), human, failed: false, exhausted: false })
        }
        CacheAction::Clear => {
            let removed = ctx.cache.clear()?;
            Ok(Outcome {
                json: json!({"removed": removed}),
                human: if removed { "cache cleared" } else { "no cache file" }.to_string(),
                failed: false,
                exhausted: false,
            })
        }
    }
}

/// Every check for n = 1..=n_max in one document.
pub fn report(ctx: &mut Ctx, n_max: u64, trials: usize) -> Result<Outcome> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut failed = false;
    let mut exhausted = false;
    let mut per_n = vec![];
    for n in 1..=n_max {
        let e = orbit_entry(ctx, n)?;
        let formula = e.pn()?;
        let oracle = pentagonal_pn(n);
        failed |= formula != oracle || !ctx.below_tol(&e.max_residual()?);
        let (j, jb) = j_norm(n, &ctx.cfg)?;
        failed |= !j.coprime_to_6;
        let mut row = json!({
            "n": n,
            "pn_formula": e.pn,
            "pn_oracle": oracle.to_string(),
            "scaled_poly": e.scaled_poly,
            "trace_residual": e.trace_residual,
            "poly_residual": e.poly_residual,
            "achieved_bits": e.achieved_bits,
            "j_norm": norm_json(&j, jb),
        });
        if n <= 3 {
            row["beta_norm"] = match beta_norm(n, &ctx.cfg) {
                Ok((b, bb)) => {
                    failed |= !b.coprime_to_6;
                    json!({"coprime_to_6": b.coprime_to_6, "residual": res(&b.residual), "achieved_bits": bb})
                }
                Err(err @ Error::PrecisionExhausted { .. }) => {
                    exhausted = true;
                    json!({"error": err.to_string()})
                }
                Err(err) => return Err(err),
            };
            let forms = enumerate_qn(n)?;
            let devs: Vec<Float> = forms
                .iter()
                .map(|q| Ok(masser_compare(q, &ctx.cfg)?.deviation))
                .collect::<Result<_>>()?;
            let m = fold_max(&devs);
            failed |= !ctx.below_tol(&m);
            row["masser_max_deviation"] = json!(res(&m));
            let mut roots = [Float::with_val(64, 0), Float::with_val(64, 0)];
            for q in &forms {
                let alpha = cm_point(q, &ctx.cfg)?;
                for (slot, which) in roots.iter_mut().zip([Which::APrime, Which::B]) {
                    *slot = slot.clone().max(&psi_root_check(which, &alpha, &ctx.cfg)?);
                }
            }
            failed |= !roots.iter().all(|r| ctx.below_tol(r));
            row["root_check_max"] = json!({"aprime": res(&roots[0]), "b": res(&roots[1])});
        }
        per_n.push(row);
    }
    let prec = ctx.cfg.prec();
    let points = default_points(ctx.seed, trials);
    let zs: Vec<AppComplex> = points.iter().map(|p| p.embed(prec)).collect();
    let (_, a_max, b_max) = appendix_max(ctx, &zs)?;
    failed |= !ctx.below_tol(&a_max) || !ctx.below_tol(&b_max);
    let hyp = hypothesis_check(&fp_series(500)?, 500)?;
    failed |= !(hyp.f_integral && hyp.companion_integral);
    let mut doc = json!({
        "n_max": n_max,
        "seed": ctx.seed,
        "working_bits": ctx.cfg.working_bits,
        "max_bits": ctx.cfg.max_bits,
        "tol": res(&ctx.tol()),
        "per_n": per_n,
        "appendix": {"points": trials, "aprime_max": res(&a_max), "b_max": res(&b_max)},
        "hypothesis": serde_json::to_value(&hyp).expect("serializable"),
        "pass": !failed && !exhausted,
    });
    if let Some(w) = &ctx.cache.warning {
        doc["warning"] = json!(w);
    }
    let human = serde_json::to_string_pretty(&doc).expect("serializable");
    Ok(Outcome { json: doc, human, failed, exhausted })
}

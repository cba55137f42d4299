//! Point evaluation of eta, Eisenstein series, j and the weight -2 form F,
//! together with the weight-0 function P = -(theta + 1/(2 pi y)) F and its
//! pieces A, B, C, A' = A j (j - 1728).
//!
//! Every argument is reduced into the standard fundamental domain first.
//! Values at the reduced point w come from the sparse pentagonal sums
//! S_r = sum_k (-1)^k g_k^r q^(g_k), g_k = k(3k-1)/2, which give eta(w)
//! directly and E2, E4, E6 through logarithmic derivatives. Values at the
//! original point are recovered from the integer reduction matrix and the
//! points visited by the inversion steps.

use rug::float::Constant;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::num::{q_of, AppComplex, PrecisionConfig};
use crate::qseries::EtaQuotient;

const MAX_REDUCTION_STEPS: usize = 100_000;

/// One step of a reduction word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// z -> z + k
    Translate(i64),
    /// z -> -1/z
    Invert,
}

/// Reduction word together with the matrix it composes to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionWord {
    pub matrix: IntMatrix,
    pub steps: Vec<Step>,
}

/// Result of reducing a point, with the bookkeeping needed for transport.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub point: AppComplex,
    pub word: ReductionWord,
    /// Points at which an inversion was applied, in order.
    inverted_at: Vec<AppComplex>,
}

impl Reduction {
    /// c z + d for the reduction matrix, as the product of the inverted points.
    pub fn automorphy(&self) -> AppComplex {
        let mut j = AppComplex::one(self.point.prec());
        for p in &self.inverted_at {
            j *= p;
        }
        j
    }

    fn total_translation(&self) -> i64 {
        self.word
            .steps
            .iter()
            .map(|s| match s {
                Step::Translate(k) => *k,
                Step::Invert => 0,
            })
            .sum()
    }
}

pub fn reduce(z: &AppComplex) -> Result<Reduction> {
    if !z.is_finite() || z.im <= 0 {
        return Err(Error::NotUpperHalfPlane);
    }
    let p = z.prec();
    let one_minus = Float::with_val(p, 1) - crate::num::pow2(-40);
    let mut z = z.clone();
    let mut m = IntMatrix::IDENTITY;
    let mut steps = Vec::new();
    let mut inverted_at = Vec::new();
    for _ in 0..MAX_REDUCTION_STEPS {
        let k = z
            .re
            .to_integer()
            .and_then(|r| r.to_i64())
            .ok_or(Error::Overflow("reduction translation"))?;
        if k != 0 {
            z = z.add_real(&Float::with_val(p, -k));
            m = IntMatrix::translation(-k).mul(&m)?;
            steps.push(Step::Translate(-k));
        }
        if z.norm_sqr() < one_minus {
            inverted_at.push(z.clone());
            z = -z.recip()?;
            m = IntMatrix::S.mul(&m)?;
            steps.push(Step::Invert);
        } else {
            return Ok(Reduction {
                point: z,
                word: ReductionWord { matrix: m, steps },
                inverted_at,
            });
        }
    }
    Err(Error::Overflow("reduction word length"))
}

/// Reduces z into |Re| <= 1/2, |z| >= 1.
pub fn reduce_to_fundamental(z: &AppComplex) -> Result<(AppComplex, ReductionWord)> {
    let r = reduce(z)?;
    Ok((r.point, r.word))
}

/// Values at a point of the fundamental domain.
#[derive(Clone, Debug)]
struct ReducedValues {
    q: AppComplex,
    s0: AppComplex,
    e2: AppComplex,
    e4: AppComplex,
    /// Absent when only j is wanted.
    e6: Option<AppComplex>,
}

fn reduced_values(w: &AppComplex, cfg: &PrecisionConfig, with_e6: bool) -> Result<ReducedValues> {
    let prec = cfg.prec();
    let w = w.with_prec(prec);
    let q = q_of(&w)?;
    // |q|^g * g^3 below 2^-(prec + guard) relative to S0 ~ 1
    let l = 2.0 * std::f64::consts::PI * w.im.to_f64() * std::f64::consts::LOG2_E;
    let target = (prec + cfg.guard_bits + 16) as f64;
    let mut s = [
        AppComplex::one(prec),
        AppComplex::zero(prec),
        AppComplex::zero(prec),
        AppComplex::zero(prec),
    ];
    let q3 = &q.square() * &q;
    let mut pw = q.clone();
    let mut qm = q.clone();
    let mut r = q3.clone() * &q;
    let mut m: i64 = 1;
    loop {
        let g1 = m * (3 * m - 1) / 2;
        if g1 as f64 * l > target + 3.0 * ((g1 + m) as f64).log2() {
            break;
        }
        let g2 = g1 + m;
        let sign: i64 = if m % 2 == 1 { -1 } else { 1 };
        let t2 = &pw * &qm;
        for (g, t) in [(g1, &pw), (g2, &t2)] {
            let signed = t.scale_i64(sign);
            s[0] += &signed;
            let t1 = signed.scale_i64(g);
            s[1] += &t1;
            let t2 = t1.scale_i64(g);
            s[2] += &t2;
            if with_e6 {
                s[3] += &t2.scale_i64(g);
            }
        }
        pw *= &r;
        qm *= &q;
        r *= &q3;
        m += 1;
    }
    let inv0 = s[0].recip()?;
    let u1 = &s[1] * &inv0;
    let u2 = &s[2] * &inv0;
    let u1sq = u1.square();
    let e2 = u1.scale_i64(24).add_real(&Float::with_val(prec, 1));
    let th_u1 = &u2 - &u1sq;
    let th_e2 = th_u1.scale_i64(24);
    let e4 = &e2.square() - &th_e2.scale_i64(12);
    let e6 = with_e6.then(|| {
        let u3 = &s[3] * &inv0;
        let th_u2 = &u3 - &(&u2 * &u1);
        let th2_e2 = (&th_u2 - &(&u1 * &th_u1).scale_i64(2)).scale_i64(24);
        let th_e4 = &(&e2 * &th_e2).scale_i64(2) - &th2_e2.scale_i64(12);
        &(&e2 * &e4) - &th_e4.scale_i64(3)
    });
    let [s0, ..] = s;
    Ok(ReducedValues {
        q,
        s0,
        e2,
        e4,
        e6,
    })
}

/// Level-one quantities at an arbitrary point of the upper half-plane.
#[derive(Clone, Debug)]
pub struct ModularValues {
    pub eta: AppComplex,
    pub e2: AppComplex,
    pub e4: AppComplex,
    pub e6: AppComplex,
}

impl ModularValues {
    pub fn delta(&self) -> AppComplex {
        let e2 = self.eta.square();
        let e4 = e2.square();
        let e8 = e4.square();
        &(&e8 * &e8) * &e8
    }

    pub fn j(&self) -> Result<AppComplex> {
        (&self.e4.square() * &self.e4).checked_div(&self.delta())
    }

    pub fn theta_j(&self) -> Result<AppComplex> {
        Ok(-(&self.e4.square() * &self.e6).checked_div(&self.delta())?)
    }

    /// theta E2 = (E2^2 - E4)/12.
    pub fn theta_e2(&self) -> AppComplex {
        let d = &self.e2.square() - &self.e4;
        d.scale_rational(&Rational::from((1, 12)))
    }
}

/// Internal configuration: working precision plus the guard bits.
fn raised(cfg: &PrecisionConfig) -> PrecisionConfig {
    cfg.at_bits(cfg.working_bits + cfg.guard_bits)
}

fn round(x: &AppComplex, cfg: &PrecisionConfig) -> AppComplex {
    x.with_prec(cfg.prec())
}

impl ModularValues {
    fn rounded(&self, cfg: &PrecisionConfig) -> Self {
        ModularValues {
            eta: round(&self.eta, cfg),
            e2: round(&self.e2, cfg),
            e4: round(&self.e4, cfg),
            e6: round(&self.e6, cfg),
        }
    }
}

/// Evaluates eta, E2, E4, E6 at z through reduction and exact transport.
pub fn modular_values(z: &AppComplex, cfg: &PrecisionConfig) -> Result<ModularValues> {
    Ok(modular_values_at(z, &raised(cfg))?.rounded(cfg))
}

fn modular_values_at(z: &AppComplex, cfg: &PrecisionConfig) -> Result<ModularValues> {
    let prec = cfg.prec();
    let z = z.with_prec(prec);
    let red = reduce(&z)?;
    let rv = reduced_values(&red.point, cfg, true)?;
    let rv_e6 = rv.e6.as_ref().expect("requested");
    let jf = red.automorphy();
    let c = red.word.matrix.c;
    let jinv = jf.recip()?;
    let jinv2 = jinv.square();
    let pi = cfg.pi();
    // E2(z) = (E2(w) + (6i/pi) c J) / J^2
    let shift = jf
        .scale_i64(6 * c)
        .scale(&Float::with_val(prec, pi.recip_ref()))
        .mul_i();
    let e2 = &(&rv.e2 + &shift) * &jinv2;
    let e4 = &rv.e4 * &jinv2.square();
    let e6 = rv_e6 * &(&jinv2.square() * &jinv2);
    // eta(w) = e^(i pi K/12) prod sqrt(-i z_k) eta(z)
    let k = red.total_translation().rem_euclid(24);
    let angle = Float::with_val(prec, &pi * Rational::from((k, 12)));
    let (s, co) = angle.sin_cos(Float::new(prec));
    let mut mult = AppComplex::new(co, s);
    for p in &red.inverted_at {
        mult *= &(-p.mul_i()).sqrt();
    }
    let pref = red.point.scale(&Float::with_val(prec, &pi / 12u32)).mul_i().exp()?;
    let eta = (&pref * &rv.s0).checked_div(&mult)?;
    Ok(ModularValues { eta, e2, e4, e6 })
}

/// j(z) and theta j(z) without transporting eta: j is invariant and theta j has weight 2.
pub fn j_and_theta_j(z: &AppComplex, cfg: &PrecisionConfig) -> Result<(AppComplex, AppComplex)> {
    let (j, theta_j) = j_parts(z, cfg, true)?;
    Ok((j, theta_j.expect("requested")))
}

fn j_parts(z: &AppComplex, out: &PrecisionConfig, with_theta: bool) -> Result<(AppComplex, Option<AppComplex>)> {
    let cfg = &raised(out);
    let z = z.with_prec(cfg.prec());
    let red = reduce(&z)?;
    let rv = reduced_values(&red.point, cfg, with_theta)?;
    let s2 = rv.s0.square();
    let s4 = s2.square();
    let s8 = s4.square();
    let delta = &(&(&s8 * &s8) * &s8) * &rv.q;
    let inv_delta = delta.recip()?;
    let e4sq = rv.e4.square();
    let j = &(&e4sq * &rv.e4) * &inv_delta;
    let theta_j = match &rv.e6 {
        Some(e6) => {
            let th_w = -(&(&e4sq * e6) * &inv_delta);
            Some(round(&th_w.checked_div(&red.automorphy().square())?, out))
        }
        None => None,
    };
    Ok((round(&j, out), theta_j))
}

pub fn eval_eta(z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    Ok(modular_values(z, cfg)?.eta)
}

pub fn eval_eisenstein(k: u32, z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    let v = modular_values(z, cfg)?;
    match k {
        2 => Ok(v.e2),
        4 => Ok(v.e4),
        6 => Ok(v.e6),
        _ => Err(Error::UnsupportedWeight(k)),
    }
}

pub fn eval_j(z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    Ok(j_parts(z, cfg, false)?.0)
}

/// q dj/dq = -E4^2 E6 / Delta.
pub fn eval_theta_j(z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    Ok(j_and_theta_j(z, cfg)?.1)
}

/// prefactor * sum c_d E2(d z) / prod eta(d z)^e_d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormDescriptor {
    pub e2_combination: Vec<(u32, Rational)>,
    pub denominator: EtaQuotient,
    pub prefactor: Rational,
    pub level: u32,
    pub weight: i32,
}

impl FormDescriptor {
    pub fn new(
        e2_combination: Vec<(u32, Rational)>,
        denominator: EtaQuotient,
        prefactor: Rational,
        level: u32,
    ) -> Result<Self> {
        let twice = denominator.weight_twice();
        if twice % 2 != 0 {
            return Err(Error::InvalidArgument(
                "eta quotient of half-integral weight".into(),
            ));
        }
        if level == 0
            || e2_combination.iter().any(|(d, _)| *d == 0 || level % d != 0)
            || denominator.factors.iter().any(|(d, _)| *d == 0 || level % d != 0)
        {
            return Err(Error::InvalidArgument(
                "every dilation must divide the level".into(),
            ));
        }
        Ok(FormDescriptor {
            e2_combination,
            denominator,
            prefactor,
            level,
            weight: 2 - (twice / 2) as i32,
        })
    }

    /// The weight -2 form with q-expansion q^-1 - 10 - 29q - ...
    pub fn fp() -> Self {
        Self::new(
            vec![
                (1, Rational::from(1)),
                (2, Rational::from(-2)),
                (3, Rational::from(-3)),
                (6, Rational::from(6)),
            ],
            EtaQuotient::new(vec![(1, 2), (2, 2), (3, 2), (6, 2)]),
            Rational::from((1, 2)),
            6,
        )
        .expect("valid descriptor")
    }

    /// Same denominator, numerator E2(z) - 2E2(2z): modular of weight -2
    /// on the group but not an eigenform of W_3 or W_6.
    pub fn non_eigen_control() -> Self {
        Self::new(
            vec![(1, Rational::from(1)), (2, Rational::from(-2))],
            EtaQuotient::new(vec![(1, 2), (2, 2), (3, 2), (6, 2)]),
            Rational::from(1),
            6,
        )
        .expect("valid descriptor")
    }

    fn dilations(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self
            .e2_combination
            .iter()
            .map(|(d, _)| *d)
            .chain(self.denominator.factors.iter().map(|(d, _)| *d))
            .collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }
}

/// F and theta F = q dF/dq at one point.
#[derive(Clone, Debug)]
pub struct FormValue {
    pub f: AppComplex,
    pub theta_f: AppComplex,
}

pub fn eval_form_with_theta(
    desc: &FormDescriptor,
    z: &AppComplex,
    cfg: &PrecisionConfig,
) -> Result<FormValue> {
    let fv = form_at(desc, z, &raised(cfg))?;
    Ok(FormValue { f: round(&fv.f, cfg), theta_f: round(&fv.theta_f, cfg) })
}

fn form_at(desc: &FormDescriptor, z: &AppComplex, cfg: &PrecisionConfig) -> Result<FormValue> {
    let prec = cfg.prec();
    let z = z.with_prec(prec);
    if z.im <= 0 {
        return Err(Error::NotUpperHalfPlane);
    }
    let mut vals = Vec::new();
    for d in desc.dilations() {
        vals.push((d, modular_values_at(&z.scale_i64(d as i64), cfg)?));
    }
    let at = |d: u32| &vals.iter().find(|(e, _)| *e == d).unwrap().1;
    let mut n = AppComplex::zero(prec);
    let mut th_n = AppComplex::zero(prec);
    for (d, c) in &desc.e2_combination {
        let v = at(*d);
        n += &v.e2.scale_rational(c);
        th_n += &v.theta_e2().scale_rational(&Rational::from(c * *d));
    }
    let mut den = AppComplex::one(prec);
    let mut log_der = AppComplex::zero(prec);
    for &(d, e) in &desc.denominator.factors {
        let v = at(d);
        den *= &v.eta.powi(e)?;
        log_der += &v
            .e2
            .scale_rational(&Rational::from((d as i64 * e, 24)));
    }
    if den.is_zero() {
        return Err(Error::DivisionByZero("eta quotient"));
    }
    let scale = desc.prefactor.clone();
    let f = n.checked_div(&den)?.scale_rational(&scale);
    let theta_f = (&th_n - &(&n * &log_der))
        .checked_div(&den)?
        .scale_rational(&scale);
    Ok(FormValue { f, theta_f })
}

pub fn eval_form(desc: &FormDescriptor, z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    Ok(eval_form_with_theta(desc, z, cfg)?.f)
}

fn two_pi_y(z: &AppComplex, cfg: &PrecisionConfig) -> Float {
    let pi = Float::with_val(cfg.prec(), Constant::Pi);
    Float::with_val(cfg.prec(), &pi * &z.im) * 2u32
}

fn p_from(fv: &FormValue, z: &AppComplex, cfg: &PrecisionConfig) -> AppComplex {
    let inv = Float::with_val(cfg.prec(), two_pi_y(z, cfg).recip_ref());
    -(&fv.theta_f + &fv.f.scale(&inv))
}

/// P = -theta F - F / (2 pi y).
pub fn eval_p(desc: &FormDescriptor, z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    let w = raised(cfg);
    let z = z.with_prec(w.prec());
    let fv = form_at(desc, &z, &w)?;
    Ok(round(&p_from(&fv, &z, &w), cfg))
}

/// Everything needed for the decomposition P = A + B C at one point.
#[derive(Clone, Debug)]
pub struct Components {
    pub f: AppComplex,
    pub theta_f: AppComplex,
    pub p: AppComplex,
    pub a: AppComplex,
    pub b: AppComplex,
    pub c: AppComplex,
    pub a_prime: AppComplex,
    pub j: AppComplex,
    pub e2: AppComplex,
    pub e4: AppComplex,
    pub e6: AppComplex,
}

impl Components {
    /// |P - (A + B C)|.
    pub fn decomposition_residual(&self) -> Float {
        (&self.p - &(&self.a + &(&self.b * &self.c))).abs()
    }
}

fn check_regular(v: &ModularValues, j: &AppComplex, cfg: &PrecisionConfig) -> Result<()> {
    let th = cfg.singular_threshold();
    let j1728 = j.add_real(&Float::with_val(j.prec(), -1728));
    for (name, x) in [("E4", &v.e4), ("E6", &v.e6), ("j", j), ("j - 1728", &j1728)] {
        if x.abs() < th {
            return Err(Error::NearSingularity(format!("|{name}| below 2^-{}", cfg.working_bits / 4)));
        }
    }
    Ok(())
}

/// E4/(6 E6 j) (E2 - 3/(pi y)) - (7j - 6912)/(6 j (j - 1728)).
fn c_from(v: &ModularValues, j: &AppComplex, z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    let prec = cfg.prec();
    let pi_y = Float::with_val(prec, cfg.pi() * &z.im);
    let e2_star = v.e2.add_real(&Float::with_val(prec, -3 / pi_y));
    let first = (&v.e4 * &e2_star).checked_div(&(&v.e6 * j).scale_i64(6))?;
    let j1728 = j.add_real(&Float::with_val(prec, -1728));
    let seven = j.scale_i64(7).add_real(&Float::with_val(prec, -6912));
    let second = seven.checked_div(&(j * &j1728).scale_i64(6))?;
    Ok(&first - &second)
}

pub fn components(desc: &FormDescriptor, z: &AppComplex, cfg: &PrecisionConfig) -> Result<Components> {
    let out = cfg;
    let cfg = &raised(out);
    let prec = cfg.prec();
    let z = z.with_prec(prec);
    let fv = form_at(desc, &z, cfg)?;
    let v = modular_values_at(&z, cfg)?;
    let j = v.j()?;
    check_regular(&v, &j, out)?;
    let p = p_from(&fv, &z, cfg);
    let j1728 = j.add_real(&Float::with_val(prec, -1728));
    let seven = j.scale_i64(7).add_real(&Float::with_val(prec, -6912));
    let f_e6 = &fv.f * &v.e6;
    // A = -theta F - F E2/6 + F E6 (7j - 6912) / (6 E4 (j - 1728))
    let a = &(&(-&fv.theta_f) - &(&fv.f * &v.e2).scale_rational(&Rational::from((1, 6))))
        + &(&f_e6 * &seven).checked_div(&(&v.e4 * &j1728).scale_i64(6))?;
    let b = (&f_e6 * &j).checked_div(&v.e4)?;
    let c = c_from(&v, &j, &z, cfg)?;
    let a_prime = &(&a * &j) * &j1728;
    Ok(Components {
        f: round(&fv.f, out),
        theta_f: round(&fv.theta_f, out),
        p: round(&p, out),
        a: round(&a, out),
        b: round(&b, out),
        c: round(&c, out),
        a_prime: round(&a_prime, out),
        j: round(&j, out),
        e2: round(&v.e2, out),
        e4: round(&v.e4, out),
        e6: round(&v.e6, out),
    })
}

pub fn eval_a(desc: &FormDescriptor, z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    Ok(components(desc, z, cfg)?.a)
}

pub fn eval_b(desc: &FormDescriptor, z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    Ok(components(desc, z, cfg)?.b)
}

pub fn eval_aprime(desc: &FormDescriptor, z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    Ok(components(desc, z, cfg)?.a_prime)
}

/// The level-one factor C; independent of F.
pub fn eval_c(z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    let w = raised(cfg);
    let z = z.with_prec(w.prec());
    let v = modular_values_at(&z, &w)?;
    let j = v.j()?;
    check_regular(&v, &j, cfg)?;
    Ok(round(&c_from(&v, &j, &z, &w)?, cfg))
}

/// An Atkin-Lehner matrix [[d x, y], [N, d]] of determinant d, for d exactly dividing N.
pub fn atkin_lehner_matrix(d: u32, level: u32) -> Result<IntMatrix> {
    if d == 0 || level % d != 0 || gcd(d as i64, (level / d) as i64) != 1 {
        return Err(Error::InvalidArgument(format!(
            "{d} is not an exact divisor of {level}"
        )));
    }
    let (d, m) = (d as i64, (level / d) as i64);
    // d x - m y = 1
    let (g, u, v) = ext_gcd(d, m);
    debug_assert_eq!(g, 1);
    let (mut x, mut y) = (u, -v);
    let t = x.div_euclid(m.max(1));
    if m > 0 {
        x -= t * m;
        y -= t * d;
    }
    Ok(IntMatrix::new(d * x, y, level as i64, d))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Best sign and its relative deviation for F(W z) = sign det(W) (c z + d)^-2 F(z).
#[derive(Clone, Debug)]
pub struct AtkinLehnerOutcome {
    pub sign: i32,
    pub deviation: Float,
    pub other_sign_deviation: Float,
}

pub fn atkin_lehner_check(
    desc: &FormDescriptor,
    d: u32,
    z: &AppComplex,
    cfg: &PrecisionConfig,
) -> Result<AtkinLehnerOutcome> {
    let w = atkin_lehner_matrix(d, desc.level)?;
    let z = z.with_prec(cfg.prec());
    let wz = w.apply(&z)?;
    let lhs = eval_form(desc, &wz, cfg)?;
    let factor = w.automorphy(&z).powi(desc.weight as i64)?;
    let rhs = (&factor * &eval_form(desc, &z, cfg)?).scale_i64(w.det() as i64);
    let scale = lhs.abs().max(&rhs.abs()).clone();
    if scale.is_zero() {
        return Err(Error::DivisionByZero("Atkin-Lehner comparison"));
    }
    let plus = Float::with_val(cfg.prec(), (&lhs - &rhs).abs() / &scale);
    let minus = Float::with_val(cfg.prec(), (&lhs + &rhs).abs() / &scale);
    Ok(if plus <= minus {
        AtkinLehnerOutcome { sign: 1, deviation: plus, other_sign_deviation: minus }
    } else {
        AtkinLehnerOutcome { sign: -1, deviation: minus, other_sign_deviation: plus }
    })
}

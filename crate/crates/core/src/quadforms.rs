//! Positive definite binary quadratic forms, their reduction, the Heegner
//! representatives for level 6, and exact CM points in Q(sqrt D).

use std::cmp::Ordering;
use std::fmt;

use rug::{Complete, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::num::{AppComplex, PrecisionConfig};

/// a x^2 + b x y + c y^2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub a: Integer,
    pub b: Integer,
    pub c: Integer,
}

impl fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl QuadForm {
    /// Positive definite forms only.
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Result<Self> {
        let q = QuadForm { a: a.into(), b: b.into(), c: c.into() };
        if q.a <= 0 || q.discriminant() >= 0 {
            return Err(Error::InvalidArgument(format!("{q} is not positive definite")));
        }
        Ok(q)
    }

    pub fn discriminant(&self) -> Integer {
        (&self.b * &self.b).complete() - Integer::from(&self.a * &self.c) * 4u32
    }

    pub fn is_primitive(&self) -> bool {
        Integer::from(self.a.gcd_ref(&self.b)).gcd(&self.c) == 1
    }

    pub fn eval(&self, x: &Integer, y: &Integer) -> Integer {
        Integer::from(&self.a * x) * x + Integer::from(&self.b * x) * y + Integer::from(&self.c * y) * y
    }

    /// Substitution (x, y) -> (m.a x + m.b y, m.c x + m.d y). The root moves by m^-1.
    pub fn act(&self, m: &IntMatrix) -> QuadForm {
        let [al, be, ga, de] = m.entries_integer();
        let a = self.eval(&al, &ga);
        let c = self.eval(&be, &de);
        let b = Integer::from(&self.a * &al) * &be * 2u32
            + (Integer::from(&al * &de) + Integer::from(&be * &ga)) * &self.b
            + Integer::from(&self.c * &ga) * &de * 2u32;
        QuadForm { a, b, c }
    }

    pub fn is_reduced(&self) -> bool {
        let abs_b = self.b.clone().abs();
        abs_b <= self.a
            && self.a <= self.c
            && !((abs_b == self.a || self.a == self.c) && self.b < 0)
    }

    /// Returns (R, g) with R reduced and self.act(g) = R.
    pub fn reduce(&self) -> Result<(QuadForm, IntMatrix)> {
        let mut q = self.clone();
        let mut g = IntMatrix::IDENTITY;
        loop {
            // b into (-a, a]
            let two_a = Integer::from(&q.a * 2u32);
            let k = Integer::from(&q.a - &q.b).div_rem_floor(two_a).0;
            if k != 0 {
                let k = k.to_i64().ok_or(Error::Overflow("form reduction"))?;
                let t = IntMatrix::translation(k);
                q = q.act(&t);
                g = g.mul(&t)?;
            }
            if q.a > q.c || (q.a == q.c && q.b < 0) {
                q = q.act(&IntMatrix::S);
                g = g.mul(&IntMatrix::S)?;
                continue;
            }
            return Ok((q, g));
        }
    }

    /// Sort key (a, |b|, b < 0): smallest a, then smallest |b|, positive b first.
    pub fn canonical_key(&self) -> (Integer, Integer, bool) {
        (self.a.clone(), self.b.clone().abs(), self.b < 0)
    }

    pub fn to_i64_triple(&self) -> Option<(i64, i64, i64)> {
        Some((self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?))
    }
}

pub fn canonical_cmp(x: &QuadForm, y: &QuadForm) -> Ordering {
    x.canonical_key().cmp(&y.canonical_key())
}

/// A negative discriminant, congruent to 0 or 1 mod 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Discriminant(Integer);

impl Discriminant {
    pub fn new(d: impl Into<Integer>) -> Result<Self> {
        let d = d.into();
        let r = d.mod_u(4);
        if d >= 0 || (r != 0 && r != 1) {
            return Err(Error::InvalidDiscriminant(d.to_string()));
        }
        Ok(Discriminant(d))
    }

    /// 1 - 24 n.
    pub fn heegner(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Self::new(Integer::from(1) - Integer::from(n) * 24u32)
    }

    pub fn value(&self) -> &Integer {
        &self.0
    }
}

/// All primitive reduced forms of discriminant D.
pub fn reduced_forms(d: &Discriminant) -> Vec<QuadForm> {
    let dv = d.value();
    let abs_d = Integer::from(-dv);
    let mut out = Vec::new();
    let mut a = Integer::from(1);
    while Integer::from(&a * &a) * 3u32 <= abs_d {
        let four_a = Integer::from(&a * 4u32);
        let mut b = Integer::from(1 - &a);
        while b <= a {
            let num = Integer::from(&b * &b) - dv;
            if num.is_divisible(&four_a) {
                let c = num / &four_a;
                let q = QuadForm { a: a.clone(), b: b.clone(), c };
                if q.is_reduced() && q.is_primitive() {
                    out.push(q);
                }
            }
            b += 1;
        }
        a += 1;
    }
    out.sort_by(canonical_cmp);
    out
}

pub fn class_number(d: &Discriminant) -> usize {
    reduced_forms(d).len()
}

/// Automorphs of a reduced form (entries bounded by 2 suffices for reduced forms).
pub fn automorphs(r: &QuadForm) -> Vec<IntMatrix> {
    let mut out = Vec::new();
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            for c in -2..=2i64 {
                for d in -2..=2i64 {
                    let m = IntMatrix::new(a, b, c, d);
                    if m.det() == 1 && r.act(&m) == *r {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Whether some gamma in Gamma0(level) with entries at most `search_bound` has Q1.act(gamma) = Q2.
///
/// Decided exactly: both forms are reduced, and the candidates gamma = g1 A g2^-1
/// over automorphs A of the common reduced form are tested for membership.
pub fn gamma0_equivalent(q1: &QuadForm, q2: &QuadForm, level: u32, search_bound: u64) -> Result<bool> {
    if q1.discriminant() != q2.discriminant() {
        return Err(Error::InvalidArgument("forms of different discriminant".into()));
    }
    if level == 0 {
        return Err(Error::InvalidArgument("level must be positive".into()));
    }
    let (r1, g1) = q1.reduce()?;
    let (r2, g2) = q2.reduce()?;
    if r1 != r2 {
        return Ok(false);
    }
    let g2_inv = g2.adjugate();
    let mut over_bound: Option<u64> = None;
    for a in automorphs(&r1) {
        let gamma = g1.mul(&a)?.mul(&g2_inv)?;
        if gamma.in_gamma0(level as i64) {
            let h = gamma.max_abs_entry();
            if h <= search_bound {
                return Ok(true);
            }
            over_bound = Some(over_bound.map_or(h, |x| x.min(h)));
        }
    }
    match over_bound {
        Some(h) => Err(Error::InconclusiveSearch {
            bound: format!("{search_bound} (transporter needs {h})"),
        }),
        None => Ok(false),
    }
}

/// Bound used when enumerating representatives; exceeded only on i64 overflow.
pub const DEFAULT_SEARCH_BOUND: u64 = 1 << 40;

/// One representative per Gamma0(6)-class of primitive forms of discriminant 1-24n
/// with 6 | a and b = 1 (mod 12), choosing the canonically smallest member.
pub fn enumerate_qn(n: u64) -> Result<Vec<QuadForm>> {
    let d = Discriminant::heegner(n)?;
    let dv = d.value().clone();
    let a_max = Integer::from(-&dv) * 4u32;
    let mut candidates: Vec<QuadForm> = Vec::new();
    let mut a = Integer::from(6);
    while a <= a_max {
        let four_a = Integer::from(&a * 4u32);
        // b in (-a, a] with b = 1 (mod 12)
        let lo = Integer::from(1 - &a);
        let mut b = Integer::from(&lo - 1u32).div_rem_floor(Integer::from(12)).0 * 12u32 + 1u32;
        if b < lo {
            b += 12;
        }
        while b <= a {
            let num = Integer::from(&b * &b) - &dv;
            if num.is_divisible(&four_a) {
                let c = num / &four_a;
                let q = QuadForm { a: a.clone(), b: b.clone(), c };
                if q.is_primitive() {
                    candidates.push(q);
                }
            }
            b += 12;
        }
        a += 6;
    }
    candidates.sort_by(canonical_cmp);
    let mut reps: Vec<(QuadForm, QuadForm)> = Vec::new();
    for q in candidates {
        let (r, _) = q.reduce()?;
        let mut known = false;
        for (rep, rr) in &reps {
            if *rr == r && gamma0_equivalent(rep, &q, 6, DEFAULT_SEARCH_BOUND)? {
                known = true;
                break;
            }
        }
        if !known {
            reps.push((q, r));
        }
    }
    Ok(reps.into_iter().map(|(q, _)| q).collect())
}

/// u + v sqrt(D) with rational u, v; sqrt(D) = i sqrt|D|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadIrrational {
    pub u: Rational,
    pub v: Rational,
    pub d: Integer,
}

impl QuadIrrational {
    pub fn new(u: Rational, v: Rational, d: Integer) -> Self {
        QuadIrrational { u, v, d }
    }

    /// (m.a t + m.b) / (m.c t + m.d) computed exactly.
    pub fn moebius(&self, m: &IntMatrix) -> Result<QuadIrrational> {
        self.moebius_int(&m.entries_integer())
    }

    pub fn moebius_int(&self, m: &[Integer; 4]) -> Result<QuadIrrational> {
        let [a, b, c, dd] = m;
        let nu = Rational::from(&self.u * a) + b;
        let nv = Rational::from(&self.v * a);
        let du = Rational::from(&self.u * c) + dd;
        let dv = Rational::from(&self.v * c);
        // (nu + nv s)(du - dv s) / (du^2 - dv^2 D), s^2 = D
        let norm = Rational::from(&du * &du) - Rational::from(&dv * &dv) * &self.d;
        if norm == 0 {
            return Err(Error::DivisionByZero("quadratic irrational"));
        }
        let ru = (Rational::from(&nu * &du) - Rational::from(&nv * &dv) * &self.d) / &norm;
        let rv = (Rational::from(&nv * &du) - Rational::from(&nu * &dv)) / &norm;
        Ok(QuadIrrational { u: ru, v: rv, d: self.d.clone() })
    }

    /// Primitive form with this number as its upper half-plane root (requires v > 0).
    pub fn minimal_form(&self) -> Result<QuadForm> {
        if self.v <= 0 {
            return Err(Error::NotUpperHalfPlane);
        }
        // x^2 - 2u x + (u^2 - v^2 D)
        let b = Rational::from(-&self.u) * 2u32;
        let c = Rational::from(&self.u * &self.u) - Rational::from(&self.v * &self.v) * &self.d;
        let l = Integer::from(b.denom().lcm_ref(c.denom()));
        let ai = l.clone();
        let bi = Integer::from((b * &l).numer());
        let ci = Integer::from((c * &l).numer());
        let g = Integer::from(ai.gcd_ref(&bi)).gcd(&ci);
        QuadForm::new(ai / &g, bi / &g, ci / &g)
    }

    pub fn embed(&self, prec: u32) -> AppComplex {
        let s = Float::with_val(prec, Integer::from(-&self.d)).sqrt();
        AppComplex::new(
            Float::with_val(prec, &self.u),
            Float::with_val(prec, &self.v * s),
        )
    }
}

/// Root (-b + sqrt D)/(2a) of Q(x, 1) in the upper half-plane.
#[derive(Clone, Debug)]
pub struct CMPoint {
    pub form: QuadForm,
    pub exact: QuadIrrational,
    pub embed: AppComplex,
}

impl CMPoint {
    pub fn discriminant(&self) -> Integer {
        self.form.discriminant()
    }
}

pub fn cm_point(q: &QuadForm, cfg: &PrecisionConfig) -> Result<CMPoint> {
    let d = q.discriminant();
    if q.a <= 0 || d >= 0 {
        return Err(Error::InvalidArgument(format!("{q} is not positive definite")));
    }
    let two_a = Integer::from(&q.a * 2u32);
    let exact = QuadIrrational::new(
        Rational::from((Integer::from(-&q.b), two_a.clone())),
        Rational::from((Integer::from(1), two_a)),
        d,
    );
    let embed = exact.embed(cfg.prec());
    Ok(CMPoint { form: q.clone(), exact, embed })
}

//! Coset polynomials Psi_g(X) = prod_gamma (X - g(gamma z)) for g = A' and g = B,
//! over right cosets of Gamma0(6) in SL2(Z), and their closed forms in j.
//!
//! The closed forms are embedded as factored expressions in `data.txt`:
//! one line `a<i> = ...` or `b<i> = ...` per coefficient of X^i.

use std::fmt;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::maass::{components, FormDescriptor};
use crate::matrix::IntMatrix;
use crate::num::{AppComplex, PrecisionConfig};
use crate::quadforms::CMPoint;

pub const DATA: &str = include_str!("data.txt");

pub const DEGREE: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    APrime,
    B,
}

impl Which {
    fn prefix(self) -> char {
        match self {
            Which::APrime => 'a',
            Which::B => 'b',
        }
    }
}

impl std::str::FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A'" | "Aprime" | "aprime" | "a" | "A" => Ok(Which::APrime),
            "B" | "b" => Ok(Which::B),
            _ => Err(Error::InvalidArgument(format!("unknown polynomial {s:?}"))),
        }
    }
}

/// Integer polynomial in j, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct JPoly(pub Vec<Integer>);

impl JPoly {
    fn constant(c: Integer) -> Self {
        JPoly(vec![c]).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| *c == 0) {
            self.0.pop();
        }
        self
    }

    fn add(&self, o: &JPoly) -> JPoly {
        let n = self.0.len().max(o.0.len());
        let mut out = vec![Integer::new(); n];
        for (k, c) in self.0.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in o.0.iter().enumerate() {
            out[k] += c;
        }
        JPoly(out).trimmed()
    }

    fn neg(&self) -> JPoly {
        JPoly(self.0.iter().map(|c| Integer::from(-c)).collect())
    }

    fn mul(&self, o: &JPoly) -> JPoly {
        if self.0.is_empty() || o.0.is_empty() {
            return JPoly::default();
        }
        let mut out = vec![Integer::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (k, b) in o.0.iter().enumerate() {
                out[i + k] += Integer::from(a * b);
            }
        }
        JPoly(out).trimmed()
    }

    fn pow(&self, e: u32) -> JPoly {
        let mut acc = JPoly::constant(Integer::from(1));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval_int(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.0.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval(&self, x: &AppComplex) -> AppComplex {
        let prec = x.prec();
        let mut acc = AppComplex::zero(prec);
        for c in self.0.iter().rev() {
            acc = (&acc * x).add_real(&Float::with_val(prec, c));
        }
        acc
    }
}

impl fmt::Display for JPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mag = Integer::from(c.abs_ref());
            if first {
                if *c < 0 {
                    write!(f, "- ")?;
                }
            } else {
                write!(f, " {} ", if *c < 0 { '-' } else { '+' })?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag} * j")?,
                _ => write!(f, "{mag} * j^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// constant * prod factor_i^e_i, as printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factored {
    pub constant: Integer,
    pub factors: Vec<(JPoly, u32)>,
}

impl Factored {
    pub fn expand(&self) -> JPoly {
        let mut acc = JPoly::constant(self.constant.clone());
        for (p, e) in &self.factors {
            acc = acc.mul(&p.pow(*e));
        }
        acc
    }

    pub fn eval(&self, j: &AppComplex) -> AppComplex {
        let mut acc = AppComplex::from_integer(j.prec(), &self.constant);
        for (p, e) in &self.factors {
            acc *= &p.eval(j).powi(*e as i64).expect("nonnegative power");
        }
        acc
    }
}

impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (p, e) in &self.factors {
            write!(f, " * ({p})")?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), pos: 0 }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<Integer> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Integer::from_str_radix(txt, 10).map_err(|e| Error::Parse(e.to_string()))
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.eat(b'^') {
            self.integer()?
                .to_u32()
                .ok_or_else(|| self.err("exponent out of range"))
        } else {
            Ok(1)
        }
    }

    /// Top level: [-] factor (* factor)*, with parenthesized factors kept apart.
    fn factored(&mut self) -> Result<Factored> {
        let mut constant = Integer::from(if self.eat(b'-') { -1 } else { 1 });
        let mut factors = Vec::new();
        loop {
            match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    let p = self.sum()?;
                    if !self.eat(b')') {
                        return Err(self.err("expected ')'"));
                    }
                    let e = self.exponent()?;
                    factors.push((p, e));
                }
                Some(b'j') => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    factors.push((JPoly(vec![Integer::new(), Integer::from(1)]), e));
                }
                Some(c) if c.is_ascii_digit() => {
                    let base = self.integer()?;
                    let e = self.exponent()?;
                    constant *= base.pow(e);
                }
                _ => return Err(self.err("expected factor")),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(Factored { constant, factors })
    }

    /// Inside parentheses: signed sum of products of int^e and j^e.
    fn sum(&mut self) -> Result<JPoly> {
        let mut acc = JPoly::default();
        let mut negative = self.eat(b'-');
        loop {
            let t = self.term()?;
            acc = acc.add(&if negative { t.neg() } else { t });
            if self.eat(b'+') {
                negative = false;
            } else if self.eat(b'-') {
                negative = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<JPoly> {
        let mut acc = JPoly::constant(Integer::from(1));
        loop {
            match self.peek() {
                Some(b'j') => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    acc = acc.mul(&JPoly(vec![Integer::new(), Integer::from(1)]).pow(e));
                }
                Some(c) if c.is_ascii_digit() => {
                    let base = self.integer()?;
                    let e = self.exponent()?;
                    acc = acc.mul(&JPoly::constant(base.pow(e)));
                }
                _ => return Err(self.err("expected integer or j")),
            }
            if !self.eat(b'*') {
                return Ok(acc);
            }
        }
    }
}

pub fn parse_factored(s: &str) -> Result<Factored> {
    Parser::new(s).factored()
}

/// X^12 + sum_{i<12} c_i(j) X^i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendixPolynomial {
    pub which: Which,
    /// coeffs[i] multiplies X^i.
    pub coeffs: Vec<Factored>,
}

impl AppendixPolynomial {
    pub fn load(which: Which) -> Result<Self> {
        Self::from_text(which, DATA)
    }

    pub fn from_text(which: Which, text: &str) -> Result<Self> {
        let mut slots: Vec<Option<Factored>> = vec![None; DEGREE];
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (name, expr) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("missing '=' in {line:?}")))?;
            let name = name.trim();
            let Some(idx) = name.strip_prefix(which.prefix()) else {
                continue;
            };
            let i: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient name {name:?}")))?;
            if i >= DEGREE || slots[i].is_some() {
                return Err(Error::Parse(format!("unexpected coefficient {name:?}")));
            }
            slots[i] = Some(parse_factored(expr)?);
        }
        let coeffs = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Error::Parse(format!("missing {}{i}", which.prefix()))))
            .collect::<Result<_>>()?;
        Ok(AppendixPolynomial { which, coeffs })
    }

    pub fn expanded(&self) -> Vec<JPoly> {
        self.coeffs.iter().map(Factored::expand).collect()
    }

    /// Renders the factored data back to the input language.
    pub fn render(&self) -> String {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .map(|(i, c)| format!("{}{i} = {c}\n", self.which.prefix()))
            .collect()
    }

    /// Coefficients of X^12, X^11, ..., X^0 at the given j.
    pub fn at(&self, j: &AppComplex) -> Vec<AppComplex> {
        let mut out = vec![AppComplex::one(j.prec())];
        out.extend(self.coeffs.iter().rev().map(|c| c.eval(j)));
        out
    }
}

/// Right coset representatives of Gamma0(level) in SL2(Z).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSystem {
    pub level: u32,
    pub reps: Vec<IntMatrix>,
}

impl CosetSystem {
    /// Every pair is inequivalent: r_i r_k^-1 is not in Gamma0(level).
    pub fn is_pairwise_inequivalent(&self) -> bool {
        for (i, x) in self.reps.iter().enumerate() {
            for y in &self.reps[i + 1..] {
                match x.mul(&y.adjugate()) {
                    Ok(m) if m.c.rem_euclid(self.level as i64) != 0 => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Closure of the identity under right multiplication by T and S,
/// keeping only elements inequivalent to those already kept.
pub fn coset_reps(level: u32) -> Result<CosetSystem> {
    if level != 6 {
        return Err(Error::InvalidArgument(format!("coset system for level {level} not supported")));
    }
    let l = level as i64;
    let mut reps = vec![IntMatrix::IDENTITY];
    let mut frontier = vec![IntMatrix::IDENTITY];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for h in [IntMatrix::T, IntMatrix::S] {
                let x = g.mul(&h)?;
                let mut new = true;
                for r in &reps {
                    if x.mul(&r.adjugate())?.c.rem_euclid(l) == 0 {
                        new = false;
                        break;
                    }
                }
                if new {
                    reps.push(x);
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    Ok(CosetSystem { level, reps })
}

fn pick(which: Which, c: &crate::maass::Components) -> AppComplex {
    match which {
        Which::APrime => c.a_prime.clone(),
        Which::B => c.b.clone(),
    }
}

/// Coefficients of X^12 .. X^0 of prod over cosets of (X - g(gamma z)).
pub fn psi_numeric(which: Which, z: &AppComplex, desc: &FormDescriptor, cfg: &PrecisionConfig) -> Result<Vec<AppComplex>> {
    let cos = coset_reps(6)?;
    let z = z.with_prec(cfg.prec());
    let vals: Vec<AppComplex> = cos
        .reps
        .par_iter()
        .map(|g| Ok(pick(which, &components(desc, &g.apply(&z)?, cfg)?)))
        .collect::<Result<_>>()?;
    let mut coeffs = vec![AppComplex::one(cfg.prec())];
    for v in &vals {
        let mut next = coeffs.clone();
        next.push(AppComplex::zero(cfg.prec()));
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] -= &(c * v);
        }
        coeffs = next;
    }
    Ok(coeffs)
}

/// Closed form evaluated at j, coefficients of X^12 .. X^0.
pub fn psi_appendix(which: Which, j_value: &AppComplex) -> Result<Vec<AppComplex>> {
    Ok(AppendixPolynomial::load(which)?.at(j_value))
}

/// Per-coefficient deviations |numeric - closed form| / (1 + |closed form|).
pub fn appendix_deviations(which: Which, z: &AppComplex, cfg: &PrecisionConfig) -> Result<Vec<Float>> {
    let desc = FormDescriptor::fp();
    let z = z.with_prec(cfg.prec());
    let num = psi_numeric(which, &z, &desc, cfg)?;
    let j = crate::maass::eval_j(&z, cfg)?;
    let app = psi_appendix(which, &j)?;
    Ok(num
        .iter()
        .zip(&app)
        .map(|(n, a)| {
            let scale = Float::with_val(cfg.prec(), a.abs() + 1u32);
            (n - a).abs() / scale
        })
        .collect())
}

pub fn verify_appendix(which: Which, z: &AppComplex, cfg: &PrecisionConfig) -> Result<Float> {
    let devs = appendix_deviations(which, z, cfg)?;
    Ok(devs.into_iter().fold(Float::with_val(cfg.prec(), 0), |m, d| m.max(&d)))
}

/// |Psi(g(alpha))| at j = j(alpha), relative to the sum of the absolute terms.
pub fn psi_root_check(which: Which, alpha: &CMPoint, cfg: &PrecisionConfig) -> Result<Float> {
    let desc = FormDescriptor::fp();
    let c = components(&desc, &alpha.embed.with_prec(cfg.prec()), cfg)?;
    let x = pick(which, &c);
    let coeffs = psi_appendix(which, &c.j)?;
    let mut acc = AppComplex::zero(cfg.prec());
    let mut size = Float::with_val(cfg.prec(), 0);
    let xabs = x.abs();
    for co in &coeffs {
        acc = &(&acc * &x) + co;
        size = size * &xabs + co.abs();
    }
    Ok(acc.abs() / size)
}

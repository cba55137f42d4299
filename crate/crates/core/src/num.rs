//! Adaptive-precision complex arithmetic.
//!
//! Everything numerical in the crate is built on [`AppComplex`], a pair of
//! MPFR floats at a common binary precision, and on [`run_adaptive`], which
//! reruns a deterministic computation at doubling precision until two
//! consecutive runs agree to an absolute tolerance.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

pub const DEFAULT_WORKING_BITS: u32 = 256;
pub const DEFAULT_MAX_BITS: u32 = 8192;
pub const DEFAULT_GUARD_BITS: u32 = 32;

/// Precision settings shared read-only by every numerical routine.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionConfig {
    pub working_bits: u32,
    pub max_bits: u32,
    pub guard_bits: u32,
    abs_tol_override: Option<Float>,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            working_bits: DEFAULT_WORKING_BITS,
            max_bits: DEFAULT_MAX_BITS,
            guard_bits: DEFAULT_GUARD_BITS,
            abs_tol_override: None,
        }
    }
}

impl PrecisionConfig {
    pub fn new(working_bits: u32, max_bits: u32, guard_bits: u32) -> Result<Self> {
        if working_bits < 16 {
            return Err(Error::InvalidConfig(format!(
                "working_bits = {working_bits} is too small"
            )));
        }
        if working_bits > max_bits {
            return Err(Error::InvalidConfig(format!(
                "working_bits {working_bits} exceeds max_bits {max_bits}"
            )));
        }
        if guard_bits < 16 {
            return Err(Error::InvalidConfig(format!(
                "guard_bits {guard_bits} must be at least 16"
            )));
        }
        Ok(PrecisionConfig {
            working_bits,
            max_bits,
            guard_bits,
            abs_tol_override: None,
        })
    }

    /// Fixed-precision configuration (no headroom for the ladder).
    pub fn fixed(bits: u32) -> Self {
        PrecisionConfig {
            working_bits: bits,
            max_bits: bits,
            guard_bits: DEFAULT_GUARD_BITS,
            abs_tol_override: None,
        }
    }

    pub fn with_abs_tol(mut self, tol: Float) -> Self {
        self.abs_tol_override = Some(tol);
        self
    }

    pub fn with_max_bits(mut self, max_bits: u32) -> Self {
        self.max_bits = max_bits.max(self.working_bits);
        self
    }

    /// Absolute rounding tolerance: the override if set, else 2^(-working_bits/2).
    pub fn abs_tol(&self) -> Float {
        match &self.abs_tol_override {
            Some(t) => t.clone(),
            None => pow2(-(self.working_bits as i64 / 2)),
        }
    }

    pub fn has_tol_override(&self) -> bool {
        self.abs_tol_override.is_some()
    }

    /// The same configuration at a different working precision.
    pub fn at_bits(&self, bits: u32) -> Self {
        PrecisionConfig {
            working_bits: bits,
            max_bits: self.max_bits.max(bits),
            guard_bits: self.guard_bits,
            abs_tol_override: self.abs_tol_override.clone(),
        }
    }

    pub fn prec(&self) -> u32 {
        self.working_bits
    }

    /// Error slack 2^(-working_bits + guard_bits) granted to transcendental routines.
    pub fn slack(&self) -> Float {
        pow2(self.guard_bits as i64 - self.working_bits as i64)
    }

    /// Threshold 2^(-working_bits/4) below which a denominator counts as vanishing.
    pub fn singular_threshold(&self) -> Float {
        pow2(-(self.working_bits as i64 / 4))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec(), Constant::Pi)
    }
}

/// 2^e as a 64-bit float (exact).
pub fn pow2(e: i64) -> Float {
    let e = e.clamp(i32::MIN as i64 + 1, i32::MAX as i64) as i32;
    Float::with_val(64, Float::i_exp(1, e))
}

/// Floor of log2 |x|, or `i64::MIN` for zero.
pub fn log2_floor(x: &Float) -> i64 {
    if x.is_zero() {
        return i64::MIN;
    }
    x.get_exp().map(|e| e as i64 - 1).unwrap_or(i64::MAX)
}

/// A complex number at a fixed binary precision.
#[derive(Clone, PartialEq)]
pub struct AppComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for AppComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re.to_string_radix(10, Some(25)), self.im.to_string_radix(10, Some(25)))
    }
}

impl AppComplex {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().max(im.prec());
        AppComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        AppComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(prec, 1, 0)
    }

    pub fn i(prec: u32) -> Self {
        Self::from_i64(prec, 0, 1)
    }

    pub fn from_i64(prec: u32, re: i64, im: i64) -> Self {
        AppComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        AppComplex { re, im: Float::new(prec) }
    }

    pub fn from_integer(prec: u32, n: &Integer) -> Self {
        AppComplex {
            re: Float::with_val(prec, n),
            im: Float::new(prec),
        }
    }

    pub fn from_rationals(prec: u32, re: &Rational, im: &Rational) -> Self {
        AppComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Rounds (or exactly extends) both parts to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        AppComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        AppComplex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let r2 = Float::with_val(p, self.re.square_ref());
        let i2 = Float::with_val(p, self.im.square_ref());
        r2 + i2
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn mul_i(&self) -> Self {
        AppComplex {
            re: Float::with_val(self.im.prec(), -&self.im),
            im: self.re.clone(),
        }
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        AppComplex {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        let p = self.prec();
        let s = Float::with_val(64.max(p), s);
        self.scale(&s)
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        let s = Float::with_val(self.prec(), s);
        self.scale(&s)
    }

    pub fn add_real(&self, s: &Float) -> Self {
        AppComplex {
            re: Float::with_val(self.prec(), &self.re + s),
            im: self.im.clone(),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("complex reciprocal"));
        }
        let n = self.norm_sqr();
        let p = self.prec();
        Ok(AppComplex {
            re: Float::with_val(p, &self.re / &n),
            im: -Float::with_val(p, &self.im / &n),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn square(&self) -> Self {
        let p = self.prec();
        let sum = Float::with_val(p, &self.re + &self.im);
        let diff = Float::with_val(p, &self.re - &self.im);
        let cross = Float::with_val(p, &self.re * &self.im);
        AppComplex { re: sum * diff, im: cross * 2u32 }
    }

    /// Integer power by repeated squaring; negative exponents go through the reciprocal.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.recip()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = AppComplex::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Result<Self> {
        let p = self.prec();
        let mag = Float::with_val(p, self.re.exp_ref());
        if !mag.is_finite() {
            return Err(Error::Overflow("complex exponential"));
        }
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        Ok(AppComplex {
            re: Float::with_val(p, &mag * &c),
            im: Float::with_val(p, &mag * &s),
        })
    }

    /// Principal square root: Re >= 0, and Im >= 0 on the negative real axis.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return AppComplex::zero(p);
        }
        let r = self.abs();
        if self.re.is_sign_positive() || self.re.is_zero() {
            let t = Float::with_val(p, Float::with_val(p, &r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(p, &self.im / Float::with_val(p, &t * 2u32));
            AppComplex { re: t, im }
        } else {
            let t = Float::with_val(p, Float::with_val(p, &r - &self.re) / 2u32).sqrt();
            let re = Float::with_val(p, &self.im / Float::with_val(p, &t * 2u32)).abs();
            let im = if self.im.is_sign_negative() && !self.im.is_zero() { -t } else { t };
            AppComplex { re, im }
        }
    }

    /// Decimal rendering of both parts with `digits` significant digits.
    pub fn to_decimal_pair(&self, digits: usize) -> (String, String) {
        (float_to_decimal(&self.re, digits), float_to_decimal(&self.im, digits))
    }
}

/// Canonical decimal rendering used in every JSON output.
pub fn float_to_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Decimal digits that a `bits`-bit mantissa carries.
pub fn digits_for_bits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

/// Parses a decimal literal into a float at `prec` bits.
pub fn parse_float(s: &str, prec: u32) -> Result<Float> {
    let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b AppComplex> for &'a AppComplex {
            type Output = AppComplex;
            fn $method(self, rhs: &'b AppComplex) -> AppComplex {
                let f: fn(&AppComplex, &AppComplex) -> AppComplex = $body;
                f(self, rhs)
            }
        }
        impl $tr<AppComplex> for AppComplex {
            type Output = AppComplex;
            fn $method(self, rhs: AppComplex) -> AppComplex {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $tr<&'b AppComplex> for AppComplex {
            type Output = AppComplex;
            fn $method(self, rhs: &'b AppComplex) -> AppComplex {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<AppComplex> for &'a AppComplex {
            type Output = AppComplex;
            fn $method(self, rhs: AppComplex) -> AppComplex {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| {
    let p = a.prec().max(b.prec());
    AppComplex {
        re: Float::with_val(p, &a.re + &b.re),
        im: Float::with_val(p, &a.im + &b.im),
    }
});

forward_binop!(Sub, sub, |a, b| {
    let p = a.prec().max(b.prec());
    AppComplex {
        re: Float::with_val(p, &a.re - &b.re),
        im: Float::with_val(p, &a.im - &b.im),
    }
});

/// Above this precision a complex product uses three real products instead of four.
const THREE_MULT_BITS: u32 = 2048;

forward_binop!(Mul, mul, |a, b| {
    let p = a.prec().max(b.prec());
    if p >= THREE_MULT_BITS {
        // k1 = c (a + b), k2 = a (d - c), k3 = b (c + d)
        let k1 = Float::with_val(p, &a.re + &a.im) * &b.re;
        let k2 = Float::with_val(p, &b.im - &b.re) * &a.re;
        let k3 = Float::with_val(p, &b.re + &b.im) * &a.im;
        return AppComplex { re: Float::with_val(p, &k1 - &k3), im: k1 + k2 };
    }
    let rr = Float::with_val(p, &a.re * &b.re);
    let ii = Float::with_val(p, &a.im * &b.im);
    let ri = Float::with_val(p, &a.re * &b.im);
    let ir = Float::with_val(p, &a.im * &b.re);
    AppComplex { re: rr - ii, im: ri + ir }
});

forward_binop!(Div, div, |a, b| {
    let p = a.prec().max(b.prec());
    let n = b.norm_sqr();
    let rr = Float::with_val(p, &a.re * &b.re);
    let ii = Float::with_val(p, &a.im * &b.im);
    let ir = Float::with_val(p, &a.im * &b.re);
    let ri = Float::with_val(p, &a.re * &b.im);
    AppComplex {
        re: Float::with_val(p, rr + ii) / &n,
        im: Float::with_val(p, ir - ri) / &n,
    }
});

impl Neg for AppComplex {
    type Output = AppComplex;
    fn neg(self) -> AppComplex {
        AppComplex { re: -self.re, im: -self.im }
    }
}

impl Neg for &AppComplex {
    type Output = AppComplex;
    fn neg(self) -> AppComplex {
        -self.clone()
    }
}

impl AddAssign<&AppComplex> for AppComplex {
    fn add_assign(&mut self, rhs: &AppComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&AppComplex> for AppComplex {
    fn sub_assign(&mut self, rhs: &AppComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&AppComplex> for AppComplex {
    fn mul_assign(&mut self, rhs: &AppComplex) {
        *self = &*self * rhs;
    }
}

/// e^z at the configured precision.
pub fn complex_exp(z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    z.with_prec(cfg.prec()).exp()
}

/// Principal branch of the square root at the configured precision.
pub fn principal_sqrt(z: &AppComplex, cfg: &PrecisionConfig) -> Result<AppComplex> {
    let w = z.with_prec(cfg.prec()).sqrt();
    if !w.is_finite() {
        return Err(Error::Overflow("principal square root"));
    }
    Ok(w)
}

/// e^(2 pi i z).
pub fn q_of(z: &AppComplex) -> Result<AppComplex> {
    let p = z.prec();
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    z.scale(&two_pi).mul_i().exp()
}

/// Distance between two results of the same computation at different precisions.
pub trait Deviation {
    fn deviation(&self, other: &Self) -> Float;
}

impl Deviation for Float {
    fn deviation(&self, other: &Self) -> Float {
        let p = self.prec().max(other.prec());
        Float::with_val(p, self - other).abs()
    }
}

impl Deviation for AppComplex {
    fn deviation(&self, other: &Self) -> Float {
        (self - other).abs()
    }
}

/// Compared relative to its size (for values far from unit magnitude).
#[derive(Clone, Debug, PartialEq)]
pub struct Relative(pub AppComplex);

impl Deviation for Relative {
    fn deviation(&self, other: &Self) -> Float {
        let scale = self.0.abs().max(&other.0.abs()).clone();
        let d = (&self.0 - &other.0).abs();
        if scale.is_zero() {
            d
        } else {
            d / scale
        }
    }
}

impl<T: Deviation> Deviation for Vec<T> {
    fn deviation(&self, other: &Self) -> Float {
        if self.len() != other.len() {
            return Float::with_val(64, rug::float::Special::Infinity);
        }
        let mut worst = Float::new(64);
        for (a, b) in self.iter().zip(other) {
            let d = a.deviation(b);
            if d > worst || d.is_nan() {
                worst = d;
            }
        }
        worst
    }
}

impl<A: Deviation, B: Deviation> Deviation for (A, B) {
    fn deviation(&self, other: &Self) -> Float {
        let a = self.0.deviation(&other.0);
        let b = self.1.deviation(&other.1);
        if a > b || a.is_nan() {
            a
        } else {
            b
        }
    }
}

/// Result of an adaptive computation.
#[derive(Clone, Debug)]
pub struct Adaptive<T> {
    /// Value from the highest-precision run.
    pub value: T,
    /// Working precision of the lower run of the agreeing pair.
    pub achieved_bits: u32,
    /// Precision of the returned value.
    pub final_bits: u32,
    /// Deviation between the two agreeing runs.
    pub deviation: Float,
}

/// Reruns `task` at doubling precision until two consecutive results agree
/// to `cfg.abs_tol()`.
///
/// The ladder starts at `cfg.working_bits`; the last rung is capped at
/// `cfg.max_bits`. Running out of headroom is `PrecisionExhausted`.
pub fn run_adaptive<T, F>(cfg: &PrecisionConfig, mut task: F) -> Result<Adaptive<T>>
where
    T: Deviation,
    F: FnMut(&PrecisionConfig) -> Result<T>,
{
    let tol = cfg.abs_tol();
    let mut bits = cfg.working_bits;
    let mut prev = task(&cfg.at_bits(bits))?;
    let mut last_dev: Option<Float> = None;
    loop {
        if bits >= cfg.max_bits {
            return Err(Error::PrecisionExhausted {
                max_bits: cfg.max_bits,
                last_log2_deviation: last_dev.as_ref().map(log2_floor).unwrap_or(i64::MAX),
            });
        }
        let next_bits = bits.saturating_mul(2).min(cfg.max_bits);
        let cur = task(&cfg.at_bits(next_bits))?;
        let dev = prev.deviation(&cur);
        if dev < tol {
            return Ok(Adaptive {
                value: cur,
                achieved_bits: bits,
                final_bits: next_bits,
                deviation: dev,
            });
        }
        last_dev = Some(dev);
        prev = cur;
        bits = next_bits;
    }
}

/// Rounds a real float to the nearest integer, returning the rounding error.
pub fn round_float(x: &Float) -> Option<(Integer, Float)> {
    let n = x.to_integer()?;
    let err = Float::with_val(x.prec(), x - &n).abs();
    Some((n, err))
}

/// x^k for a real float and nonnegative k.
pub fn float_powu(x: &Float, k: u32) -> Float {
    Float::with_val(x.prec(), x.pow(k))
}

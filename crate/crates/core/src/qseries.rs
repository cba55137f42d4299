//! Exact truncated Laurent series in q with rational coefficients.
//!
//! A [`FormalSeries`] stores the coefficients of q^e for
//! `start_exp <= e < order`; everything at or beyond `order` is unknown.
//! Arithmetic tracks validity honestly, so a product or quotient never
//! claims more terms than its operands determine.

use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maass::FormDescriptor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    start_exp: i64,
    coeffs: Vec<Rational>,
    order: i64,
}

impl FormalSeries {
    /// Builds a series from coefficients of q^start, q^(start+1), ... valid below `order`.
    /// Terms at or beyond `order` are dropped; leading zeros are stripped.
    pub fn new(start_exp: i64, coeffs: Vec<Rational>, order: i64) -> Self {
        let mut s = FormalSeries {
            start_exp,
            coeffs,
            order,
        };
        s.normalize();
        s
    }

    pub fn from_integers(start_exp: i64, coeffs: &[i64], order: i64) -> Self {
        Self::new(
            start_exp,
            coeffs.iter().map(|&c| Rational::from(c)).collect(),
            order,
        )
    }

    pub fn zero(order: i64) -> Self {
        FormalSeries {
            start_exp: order,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(Rational::from(1), 0, order)
    }

    pub fn monomial(c: Rational, exp: i64, order: i64) -> Self {
        Self::new(exp, vec![c], order)
    }

    fn normalize(&mut self) {
        let keep = (self.order - self.start_exp).max(0) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(|c| *c == 0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| *c != 0);
        match lead {
            Some(k) => {
                if k > 0 {
                    self.coeffs.drain(..k);
                    self.start_exp += k as i64;
                }
            }
            None => {
                self.coeffs.clear();
                self.start_exp = self.order;
            }
        }
    }

    /// Exponent of the first nonzero term (equals `order` for the zero series).
    pub fn start_exp(&self) -> i64 {
        self.start_exp
    }

    /// Truncation exponent: coefficients are known for exponents below it.
    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of q^exp; `None` at or beyond the truncation order.
    pub fn coeff(&self, exp: i64) -> Option<Rational> {
        if exp >= self.order {
            return None;
        }
        if exp < self.start_exp {
            return Some(Rational::new());
        }
        Some(
            self.coeffs
                .get((exp - self.start_exp) as usize)
                .cloned()
                .unwrap_or_default(),
        )
    }

    /// Stored coefficients from `start_exp` up (trailing zeros omitted).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Dense coefficient list for exponents `start_exp..order`.
    pub fn dense_coeffs(&self) -> Vec<Rational> {
        (self.start_exp..self.order)
            .map(|e| self.coeff(e).unwrap())
            .collect()
    }

    pub fn truncate(&self, order: i64) -> Self {
        Self::new(self.start_exp, self.coeffs.clone(), order.min(self.order))
    }

    /// Multiplies by q^k.
    pub fn shift(&self, k: i64) -> Self {
        FormalSeries {
            start_exp: self.start_exp + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(
            self.start_exp,
            self.coeffs.iter().map(|x| Rational::from(x * c)).collect(),
            self.order,
        )
    }

    /// Substitutes q -> q^d.
    pub fn dilate(&self, d: u32) -> Self {
        assert!(d >= 1, "dilation factor must be positive");
        let d = d as i64;
        if self.is_zero() {
            return Self::zero(self.order * d);
        }
        let mut coeffs = vec![Rational::new(); (self.coeffs.len() - 1) * d as usize + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * d as usize] = c.clone();
        }
        Self::new(self.start_exp * d, coeffs, self.order * d)
    }

    /// The operator q d/dq.
    pub fn theta(&self) -> Self {
        Self::new(
            self.start_exp,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| Rational::from(c * (self.start_exp + k as i64)))
                .collect(),
            self.order,
        )
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let len = (self.order - self.start_exp) as usize;
        let c0_inv = Rational::from(self.coeffs[0].recip_ref());
        let mut out: Vec<Rational> = Vec::with_capacity(len);
        out.push(c0_inv.clone());
        for n in 1..len {
            let mut acc = Rational::new();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                acc += Rational::from(&self.coeffs[k] * &out[n - k]);
            }
            out.push(-(acc * &c0_inv));
        }
        Ok(Self::new(-self.start_exp, out, self.order - 2 * self.start_exp))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one(base.order - base.start_exp);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// First exponent below `limit` whose coefficient is not an integer.
    pub fn first_nonintegral(&self, limit: i64) -> Option<i64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (self.start_exp + k as i64, c))
            .take_while(|(e, _)| *e < limit)
            .find(|(_, c)| *c.denom() != 1)
            .map(|(e, _)| e)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            start_exp: self.start_exp,
            order: self.order,
            coeffs: self.dense_coeffs().iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| s.parse::<Rational>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(j.start_exp, coeffs, j.order))
    }
}

/// JSON form of a series; coefficients are decimal strings "p/q" (or "p" when integral).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub start_exp: i64,
    pub order: i64,
    pub coeffs: Vec<String>,
}

impl<'a, 'b> Add<&'b FormalSeries> for &'a FormalSeries {
    type Output = FormalSeries;
    fn add(self, rhs: &'b FormalSeries) -> FormalSeries {
        let order = self.order.min(rhs.order);
        let start = self.start_exp.min(rhs.start_exp).min(order);
        let len = (order - start).max(0) as usize;
        let coeffs = (0..len)
            .map(|k| {
                let e = start + k as i64;
                self.coeff(e).unwrap() + rhs.coeff(e).unwrap()
            })
            .collect();
        FormalSeries::new(start, coeffs, order)
    }
}

impl<'a> Neg for &'a FormalSeries {
    type Output = FormalSeries;
    fn neg(self) -> FormalSeries {
        FormalSeries {
            start_exp: self.start_exp,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
            order: self.order,
        }
    }
}

impl<'a, 'b> Sub<&'b FormalSeries> for &'a FormalSeries {
    type Output = FormalSeries;
    fn sub(self, rhs: &'b FormalSeries) -> FormalSeries {
        self + &(-rhs)
    }
}

impl<'a, 'b> Mul<&'b FormalSeries> for &'a FormalSeries {
    type Output = FormalSeries;
    fn mul(self, rhs: &'b FormalSeries) -> FormalSeries {
        let order = (self.order + rhs.start_exp).min(rhs.order + self.start_exp);
        if self.is_zero() || rhs.is_zero() {
            return FormalSeries::zero(order);
        }
        let start = self.start_exp + rhs.start_exp;
        let len = (order - start).max(0) as usize;
        let mut out = vec![Rational::new(); len];
        let mut tmp = Rational::new();
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                tmp.assign_mul(a, b);
                out[i + j] += &tmp;
            }
        }
        FormalSeries::new(start, out, order)
    }
}

trait AssignMul {
    fn assign_mul(&mut self, a: &Rational, b: &Rational);
}

impl AssignMul for Rational {
    fn assign_mul(&mut self, a: &Rational, b: &Rational) {
        use rug::Assign;
        self.assign(a * b);
    }
}

/// sigma_k(n) for 1 <= n < len (index 0 unused).
pub fn divisor_sums(k: u32, len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for d in 1..len {
        let dk = Integer::from(Integer::u_pow_u(d as u32, k));
        let mut m = d;
        while m < len {
            out[m] += &dk;
            m += d;
        }
    }
    out
}

/// E_k for k in {2, 4, 6}, valid below q^order.
pub fn eisenstein_series(k: u32, order: i64) -> Result<FormalSeries> {
    let c: i64 = match k {
        2 => -24,
        4 => 240,
        6 => -504,
        _ => return Err(Error::UnsupportedWeight(k)),
    };
    if order < 1 {
        return Err(Error::InvalidArgument(format!("order {order} < 1")));
    }
    let len = order as usize;
    let sig = divisor_sums(k - 1, len);
    let coeffs = (0..len)
        .map(|n| {
            if n == 0 {
                Rational::from(1)
            } else {
                Rational::from(Integer::from(&sig[n] * c))
            }
        })
        .collect();
    Ok(FormalSeries::new(0, coeffs, order))
}

/// Prod_{n>=1} (1 - q^n) via Euler's pentagonal theorem, valid below q^order.
pub fn euler_product(order: i64) -> FormalSeries {
    let len = order.max(0) as usize;
    let mut coeffs = vec![Rational::new(); len];
    if len > 0 {
        coeffs[0] = Rational::from(1);
    }
    let mut k: i64 = 1;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        if g1 as usize >= len {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        coeffs[g1 as usize] += sign;
        let g2 = g1 + k;
        if (g2 as usize) < len {
            coeffs[g2 as usize] += sign;
        }
        k += 1;
    }
    FormalSeries::new(0, coeffs, order)
}

/// A product of eta functions: prefactor * prod eta(d z)^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    pub factors: Vec<(u32, i64)>,
    pub prefactor: Rational,
}

impl EtaQuotient {
    pub fn new(factors: Vec<(u32, i64)>) -> Self {
        EtaQuotient {
            factors,
            prefactor: Rational::from(1),
        }
    }

    /// Sum of d*e; the q-power of the quotient is this over 24.
    pub fn shift_numerator(&self) -> i64 {
        self.factors.iter().map(|&(d, e)| d as i64 * e).sum()
    }

    /// Integral q-power of the quotient, or `FractionalPower`.
    pub fn q_shift(&self) -> Result<i64> {
        let s = self.shift_numerator();
        if s % 24 != 0 {
            return Err(Error::FractionalPower { numerator: s });
        }
        Ok(s / 24)
    }

    /// Weight = half the total eta exponent.
    pub fn weight_twice(&self) -> i64 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }
}

/// Exact q-expansion of an eta quotient, valid below q^order.
pub fn eta_quotient_series(desc: &EtaQuotient, order: i64) -> Result<FormalSeries> {
    let shift = desc.q_shift()?;
    let rel = order - shift;
    if rel <= 0 {
        return Ok(FormalSeries::zero(order));
    }
    let mut acc = FormalSeries::one(rel);
    for &(d, e) in &desc.factors {
        if e == 0 {
            continue;
        }
        let base_len = (rel + d as i64 - 1) / d as i64 + 1;
        let base = euler_product(base_len).dilate(d).truncate(rel);
        acc = &acc * &base.pow(e)?;
    }
    Ok(acc.scale(&desc.prefactor).shift(shift).truncate(order))
}

/// Delta = eta^24 = q - 24 q^2 + ...
pub fn delta_series(order: i64) -> FormalSeries {
    eta_quotient_series(&EtaQuotient::new(vec![(1, 24)]), order).expect("integral shift")
}

/// j = E4^3 / Delta, valid below q^order.
pub fn j_series(order: i64) -> Result<FormalSeries> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("order {order} < 2")));
    }
    let e4 = eisenstein_series(4, order + 2)?;
    let e4c = &(&e4 * &e4) * &e4;
    let delta = delta_series(order + 3);
    Ok(e4c.div(&delta)?.truncate(order))
}

/// q-expansion of a descriptor form: prefactor * sum c_d E2(d z) / (eta quotient).
pub fn form_series(desc: &FormDescriptor, order: i64) -> Result<FormalSeries> {
    let shift = desc.denominator.q_shift()?;
    let num_order = (order + shift).max(1);
    let mut num = FormalSeries::zero(num_order);
    let e2 = eisenstein_series(2, num_order)?;
    for (d, c) in &desc.e2_combination {
        num = &num + &e2.dilate(*d).truncate(num_order).scale(c);
    }
    let den_order = order + 2 * shift - num.start_exp().min(num_order);
    let den = eta_quotient_series(&desc.denominator, den_order.max(shift + 1))?;
    let out = num.div(&den)?.scale(&desc.prefactor);
    Ok(out.truncate(order))
}

/// F_p = (E2(z) - 2E2(2z) - 3E2(3z) + 6E2(6z)) / (2 eta(z)^2 eta(2z)^2 eta(3z)^2 eta(6z)^2).
pub fn fp_series(order: i64) -> Result<FormalSeries> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("order {order} < 2")));
    }
    form_series(&FormDescriptor::fp(), order)
}

/// Outcome of the integrality test at the cusp at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub f_integral: bool,
    pub companion_integral: bool,
    pub first_failure: Option<i64>,
    pub checked_below: i64,
}

/// theta F + F (E2 E4 - E6) / (6 E4), valid below q^order.
pub fn companion_series(f: &FormalSeries, order: i64) -> Result<FormalSeries> {
    let order = order.min(f.order());
    let need = (order - f.start_exp().min(0) + 2).max(2);
    let e2 = eisenstein_series(2, need)?;
    let e4 = eisenstein_series(4, need)?;
    let e6 = eisenstein_series(6, need)?;
    let num = &(&e2 * &e4) - &e6;
    let g = num.div(&e4.scale(&Rational::from(6)))?;
    Ok((&f.theta() + &(f * &g)).truncate(order))
}

/// Checks that F and its companion have integral coefficients below q^order.
pub fn hypothesis_check(f: &FormalSeries, order: i64) -> Result<HypothesisReport> {
    let limit = order.min(f.order());
    if f.is_zero() {
        return Ok(HypothesisReport {
            f_integral: true,
            companion_integral: true,
            first_failure: None,
            checked_below: limit,
        });
    }
    let comp = companion_series(f, limit)?;
    let limit = limit.min(comp.order());
    let ff = f.first_nonintegral(limit);
    let cf = comp.first_nonintegral(limit);
    let first_failure = match (ff, cf) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(HypothesisReport {
        f_integral: ff.is_none(),
        companion_integral: cf.is_none(),
        first_failure,
        checked_below: limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &FormalSeries, from: i64, to: i64) -> Vec<i64> {
        (from..to).map(|e| s.coeff(e).unwrap().to_f64() as i64).collect()
    }

    #[test]
    fn product_and_shift_examples() {
        let a = FormalSeries::from_integers(0, &[1, 1], 10);
        let b = FormalSeries::from_integers(0, &[1, -1], 10);
        let p = &a * &b;
        assert_eq!(ints(&p, 0, 4), vec![1, 0, -1, 0]);
        assert_eq!(p.order(), 10);

        let qinv = FormalSeries::from_integers(-1, &[1], 10);
        let q = FormalSeries::from_integers(1, &[1], 10);
        let one = &qinv * &q;
        assert_eq!(one.start_exp(), 0);
        assert_eq!(one.coeff(0).unwrap(), 1);
        // validity of q^-1 * q: min(10 + 1, 10 - 1)
        assert_eq!(one.order(), 9);
    }

    #[test]
    fn inverse_examples() {
        let g = FormalSeries::from_integers(0, &[1, -1], 8).inv().unwrap();
        assert_eq!(ints(&g, 0, 8), vec![1; 8]);
        let q = FormalSeries::from_integers(-1, &[1], 8).inv().unwrap();
        assert_eq!(q.start_exp(), 1);
        assert_eq!(q.coeff(1).unwrap(), 1);
        assert_eq!(FormalSeries::zero(5).inv(), Err(Error::ZeroLeadingCoefficient));
    }

    #[test]
    fn theta_examples() {
        let q = FormalSeries::from_integers(-1, &[1], 5).theta();
        assert_eq!(q.coeff(-1).unwrap(), -1);
        assert!(FormalSeries::one(5).theta().is_zero());
    }

    #[test]
    fn eisenstein_coefficients() {
        assert_eq!(eisenstein_series(2, 5).unwrap().coeff(1).unwrap(), -24);
        assert_eq!(eisenstein_series(4, 5).unwrap().coeff(2).unwrap(), 2160);
        assert_eq!(eisenstein_series(6, 5).unwrap().coeff(2).unwrap(), -16632);
        assert_eq!(eisenstein_series(8, 5), Err(Error::UnsupportedWeight(8)));
        let e4 = eisenstein_series(4, 5).unwrap();
        assert_eq!((&e4 * &e4).coeff(1).unwrap(), 480);
        assert_eq!(e4.inv().unwrap().coeff(1).unwrap(), -240);
    }

    #[test]
    fn eta_quotients() {
        let d = delta_series(6);
        assert_eq!(ints(&d, 1, 6), vec![1, -24, 252, -1472, 4830]);
        let den = EtaQuotient::new(vec![(1, 2), (2, 2), (3, 2), (6, 2)]);
        assert_eq!(eta_quotient_series(&den, 10).unwrap().start_exp(), 1);
        let eta = EtaQuotient::new(vec![(1, 1)]);
        assert_eq!(
            eta_quotient_series(&eta, 10),
            Err(Error::FractionalPower { numerator: 1 })
        );
    }

    #[test]
    fn fp_and_j_leading_terms() {
        let f = fp_series(10).unwrap();
        assert_eq!(f.start_exp(), -1);
        assert_eq!(ints(&f, -1, 2), vec![1, -10, -29]);
        assert_eq!(f.order(), 10);
        let j = j_series(4).unwrap();
        assert_eq!(ints(&j, -1, 2), vec![1, 744, 196884]);
        let tj = j.theta();
        assert_eq!(ints(&tj, -1, 2), vec![-1, 0, 196884]);
    }

    #[test]
    fn hypothesis_examples() {
        let r = hypothesis_check(&FormalSeries::zero(20), 20).unwrap();
        assert!(r.f_integral && r.companion_integral);
        let half = FormalSeries::monomial(Rational::from((1, 2)), -1, 20);
        let r = hypothesis_check(&half, 20).unwrap();
        assert!(!r.f_integral);
        assert_eq!(r.first_failure, Some(-1));
        let r = hypothesis_check(&fp_series(60).unwrap(), 60).unwrap();
        assert!(r.f_integral && r.companion_integral, "{r:?}");
        assert_eq!(r.checked_below, 60);
    }

    #[test]
    fn json_round_trip() {
        let s = FormalSeries::new(
            -1,
            vec![Rational::from(1), Rational::from((-3, 7)), Rational::from(0)],
            4,
        );
        let j = s.to_json();
        assert_eq!(j.coeffs, vec!["1", "-3/7", "0", "0", "0"]);
        assert_eq!(FormalSeries::from_json(&j).unwrap(), s);
        let bad = SeriesJson { start_exp: 0, order: 1, coeffs: vec!["x".into()] };
        assert!(FormalSeries::from_json(&bad).is_err());
    }
}

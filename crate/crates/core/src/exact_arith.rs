//! Number-theoretic and exact-arithmetic primitives.
//!
//! Everything here works over `num_bigint::BigInt` and `num_rational::BigRational`;
//! rationals are kept in lowest terms by the underlying type on every construction.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type BigRat = BigRational;

pub fn rat(num: i64, den: i64) -> BigRat {
    BigRat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int<T: Into<BigInt>>(v: T) -> BigRat {
    BigRat::from_integer(v.into())
}

/// Serializes a rational as `"num/den"`, or `"k"` when it is an integer.
pub fn rat_to_string(q: &BigRat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRat::new(n, d))
        }
        None => Ok(rat_int(s.parse::<BigInt>().map_err(|_| bad())?)),
    }
}

/// Parses a plain decimal such as `0.05` or `-1.25` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRat> {
    let s = s.trim();
    if s.contains('/') {
        return parse_rat(s);
    }
    let bad = || Error::Parse(format!("not a decimal: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let q = BigRat::new(num, den);
    Ok(if neg { -q } else { q })
}

pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// `d_n = lcm(1, 2, ..., n)`.
pub fn lcm_upto(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, m| acc.lcm(&BigInt::from(m)))
}

/// Primes `p <= bound` by the sieve of Eratosthenes.
pub fn primes_upto(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut m = i * i;
        while m <= n {
            composite[m] = true;
            m += i;
        }
    }
    primes
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Product of all primes `p <= x`; 1 if there are none.
pub fn primorial_below(x: f64) -> BigInt {
    if x.is_nan() || x < 2.0 {
        return BigInt::one();
    }
    primes_upto(x.floor() as u64).into_iter().map(BigInt::from).product()
}

/// All positive divisors of `d`, increasing.
pub fn divisors(d: u64) -> Vec<u64> {
    assert!(d >= 1, "divisors of zero");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1;
    while k * k <= d {
        if d.is_multiple_of(k) {
            small.push(k);
            if k * k != d {
                large.push(d / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn int_valuation(p: &BigInt, x: &BigInt) -> i64 {
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// `v_p(q) = v_p(num) - v_p(den)`.
pub fn padic_valuation(p: u64, q: &BigRat) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let p = BigInt::from(p);
    Ok(int_valuation(&p, q.numer()) - int_valuation(&p, q.denom()))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

pub fn is_integer(q: &BigRat) -> bool {
    q.denom().is_one()
}

pub fn pow_rat(q: &BigRat, e: u32) -> BigRat {
    num_traits::pow(q.clone(), e as usize)
}

// Akiyama-Tanigawa state: the working row and every Bernoulli number produced so far.
struct BernoulliTable {
    row: Vec<BigRat>,
    values: Vec<BigRat>,
}

static BERNOULLI: Mutex<BernoulliTable> = Mutex::new(BernoulliTable {
    row: Vec::new(),
    values: Vec::new(),
});

/// Exact Bernoulli number `B_k` (with the `B_1 = +1/2` convention of the
/// Akiyama-Tanigawa recurrence; only even indices are used downstream).
pub fn bernoulli(k: usize) -> BigRat {
    let mut table = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    while table.values.len() <= k {
        let m = table.values.len();
        table.row.push(rat(1, m as i64 + 1));
        for j in (1..=m).rev() {
            let diff = &table.row[j - 1] - &table.row[j];
            table.row[j - 1] = diff * rat_int(j as i64);
        }
        let b = table.row[0].clone();
        table.values.push(b);
    }
    table.values[k].clone()
}

/// A polynomial (exact degree, no trailing zeros) or a power series truncated
/// after the `u^order` term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySeries {
    coeffs: Vec<BigRat>,
    order: Option<usize>,
}

impl PolySeries {
    pub fn polynomial(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolySeries { coeffs, order: None }
    }

    pub fn series(mut coeffs: Vec<BigRat>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRat::zero());
        PolySeries { coeffs, order: Some(order) }
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::polynomial(coeffs.into_iter().map(rat_int).collect())
    }

    pub fn one() -> Self {
        Self::polynomial(vec![BigRat::one()])
    }

    /// `None` for a polynomial, `Some(n)` for a series known modulo `u^(n+1)`.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// Degree of a polynomial; `None` for the zero polynomial or for series.
    pub fn degree(&self) -> Option<usize> {
        match self.order {
            None => self.coeffs.len().checked_sub(1),
            Some(_) => None,
        }
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        match self.order {
            None => Self::polynomial(coeffs),
            Some(o) => Self::series(coeffs, o),
        }
    }

    /// Evaluates a polynomial exactly.
    pub fn eval(&self, t: &BigRat) -> BigRat {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRat::zero(), |acc, c| acc * t + c)
    }

    fn effective_order(&self, requested: usize) -> usize {
        self.order.map_or(requested, |o| o.min(requested))
    }
}

/// Product truncated after `u^order` (and after the inputs' own truncation).
pub fn series_mul(a: &PolySeries, b: &PolySeries, order: usize) -> PolySeries {
    let order = b.effective_order(a.effective_order(order));
    let mut out = vec![BigRat::zero(); order + 1];
    for (i, x) in a.coeffs.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    PolySeries::series(out, order)
}

/// Multiplicative inverse modulo `u^(order+1)`.
pub fn series_inv(a: &PolySeries, order: usize) -> Result<PolySeries> {
    let order = a.effective_order(order);
    let c0 = a.coeff(0);
    if c0.is_zero() {
        return Err(Error::NonInvertibleSeries);
    }
    let inv0 = c0.recip();
    let mut out: Vec<BigRat> = Vec::with_capacity(order + 1);
    out.push(inv0.clone());
    for m in 1..=order {
        let mut acc = BigRat::zero();
        for i in 1..=m.min(a.coeffs.len().saturating_sub(1)) {
            acc += &a.coeffs[i] * &out[m - i];
        }
        out.push(-acc * &inv0);
    }
    Ok(PolySeries::series(out, order))
}

/// `p(u) -> p(u + c)`, truncated after `u^order`.
pub fn series_shift(a: &PolySeries, c: &BigRat, order: usize) -> PolySeries {
    let order = a.effective_order(order);
    // Horner in the shifted variable: each step multiplies by (u + c).
    let mut acc: Vec<BigRat> = Vec::new();
    for coeff in a.coeffs.iter().rev() {
        let mut next = vec![BigRat::zero(); (acc.len() + 1).min(order + 1)];
        for (i, x) in acc.iter().enumerate() {
            next[i] += x * c;
            if i < order {
                next[i + 1] += x;
            }
        }
        next[0] += coeff;
        acc = next;
    }
    match a.order {
        None if a.coeffs.len() <= order + 1 => PolySeries::polynomial(acc),
        _ => PolySeries::series(acc, order),
    }
}

//! Fixed-point reals with a certified absolute error bound.
//!
//! A [`PrecReal`] stores `mant * 2^-prec` together with an error radius
//! `err * 2^-prec`; every operation rounds and widens the radius so the true
//! value always lies in `[value - radius, value + radius]`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::BigRat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecReal {
    mant: BigInt,
    prec: u32,
    err: BigUint,
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

/// Nearest integer to `num / den` (`den > 0`), ties away from zero.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    if (r << 1u8) >= *den {
        q + 1
    } else {
        q
    }
}

fn shr_round(x: &BigInt, sh: u32) -> BigInt {
    if sh == 0 {
        return x.clone();
    }
    div_round(x, &pow2(sh))
}

fn ceil_shr(x: &BigUint, sh: u32) -> BigUint {
    if sh == 0 {
        return x.clone();
    }
    let (q, r) = x.div_rem(&(BigUint::one() << sh));
    if r.is_zero() {
        q
    } else {
        q + 1u8
    }
}

/// Upper bound on a nonnegative rational in units of `2^-prec`.
fn rat_to_ulps_ceil(q: &BigRat, prec: u32) -> BigUint {
    let scaled = q.abs() * BigRat::from_integer(pow2(prec));
    scaled.ceil().to_integer().to_biguint().unwrap_or_default()
}

/// Approximate `log2 |x|` for a nonzero big integer.
pub(crate) fn log2_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap_or(f64::MAX).log2();
    }
    let sh = bits - 64;
    let top = (x.abs() >> sh).to_f64().unwrap();
    top.log2() + sh as f64
}

pub(crate) fn log2_rat(q: &BigRat) -> f64 {
    log2_big(q.numer()) - log2_big(q.denom())
}

impl PrecReal {
    pub fn zero(prec: u32) -> Self {
        PrecReal { mant: BigInt::zero(), prec, err: BigUint::zero() }
    }

    pub fn from_parts(mant: BigInt, prec: u32, err: BigUint) -> Self {
        PrecReal { mant, prec, err }
    }

    /// Rounds `q` to the nearest multiple of `2^-prec`.
    pub fn from_rat(q: &BigRat, prec: u32) -> Self {
        let num = q.numer() << prec;
        let mant = div_round(&num, q.denom());
        let exact = (&mant * q.denom()) == num;
        PrecReal { mant, prec, err: if exact { BigUint::zero() } else { BigUint::one() } }
    }

    pub fn from_int(v: i64, prec: u32) -> Self {
        PrecReal { mant: BigInt::from(v) << prec, prec, err: BigUint::zero() }
    }

    /// `floor(sqrt(v))` at `prec` bits, for a nonnegative integer.
    pub fn sqrt_int(v: &BigInt, prec: u32) -> Self {
        let scaled = v << (2 * prec);
        let root = scaled.sqrt();
        let exact = &root * &root == scaled;
        PrecReal { mant: root, prec, err: if exact { BigUint::zero() } else { BigUint::one() } }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn err_ulps(&self) -> &BigUint {
        &self.err
    }

    pub fn value(&self) -> BigRat {
        BigRat::new(self.mant.clone(), pow2(self.prec))
    }

    pub fn error_bound(&self) -> BigRat {
        BigRat::new(BigInt::from(self.err.clone()), pow2(self.prec))
    }

    pub fn lower(&self) -> BigRat {
        self.value() - self.error_bound()
    }

    pub fn upper(&self) -> BigRat {
        self.value() + self.error_bound()
    }

    /// `m` such that the error radius is at most `2^-m` (`None` when exact).
    pub fn error_exponent(&self) -> Option<i64> {
        if self.err.is_zero() {
            None
        } else {
            // ceil(log2 err)
            let c = if self.err.count_ones() == 1 { self.err.bits() - 1 } else { self.err.bits() };
            Some(self.prec as i64 - c as i64)
        }
    }

    /// Upper estimate of `log2` of the error radius; `-inf` when exact.
    pub fn error_log2(&self) -> f64 {
        if self.err.is_zero() {
            f64::NEG_INFINITY
        } else {
            log2_big(&BigInt::from(self.err.clone())) - self.prec as f64
        }
    }

    /// Whether the error radius is at most `2^-bits`.
    pub fn error_within_bits(&self, bits: u32) -> bool {
        let bound = BigRat::new(BigInt::one(), pow2(bits));
        self.error_bound() <= bound
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let sh = bits.saturating_sub(64);
        let top = (&self.mant >> sh).to_f64().unwrap_or(0.0);
        let e = sh as f64 - self.prec as f64;
        if e.abs() < 1000.0 {
            top * e.exp2()
        } else {
            // split the scaling to avoid intermediate overflow
            top * (e / 2.0).exp2() * (e / 2.0).exp2()
        }
    }

    /// Approximate `log2 |value|`.
    pub fn log2_abs(&self) -> f64 {
        if self.mant.is_zero() {
            return f64::NEG_INFINITY;
        }
        log2_big(&self.mant) - self.prec as f64
    }

    pub fn is_positive(&self) -> bool {
        self.mant.sign() == Sign::Plus && self.mant.magnitude() > &self.err
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus && self.mant.magnitude() > &self.err
    }

    /// Certified `self < other`.
    pub fn definitely_lt(&self, other: &PrecReal) -> bool {
        other.sub(self).is_positive()
    }

    /// Certified comparison, `None` when the error intervals overlap.
    pub fn certified_cmp(&self, other: &PrecReal) -> Option<Ordering> {
        let d = self.sub(other);
        if d.is_positive() {
            Some(Ordering::Greater)
        } else if d.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn contains(&self, q: &BigRat) -> bool {
        (q - self.value()).abs() <= self.error_bound()
    }

    /// `|self - other|` as an exact rational (ignores both error radii).
    pub fn distance(&self, other: &PrecReal) -> BigRat {
        (self.value() - other.value()).abs()
    }

    /// Rescales to `prec` bits, rounding when precision drops.
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let sh = prec - self.prec;
                PrecReal { mant: &self.mant << sh, prec, err: &self.err << sh }
            }
            Ordering::Less => {
                let sh = self.prec - prec;
                let mant = shr_round(&self.mant, sh);
                let exact = (&mant << sh) == self.mant;
                let mut err = ceil_shr(&self.err, sh);
                if !exact {
                    err += 1u8;
                }
                PrecReal { mant, prec, err }
            }
        }
    }

    pub fn widen(&self, extra: &BigRat) -> Self {
        let mut out = self.clone();
        out.err += rat_to_ulps_ceil(extra, self.prec);
        out
    }

    pub fn neg(&self) -> Self {
        PrecReal { mant: -&self.mant, prec: self.prec, err: self.err.clone() }
    }

    pub fn add(&self, other: &PrecReal) -> Self {
        let p = self.prec.max(other.prec);
        let a = self.with_prec(p);
        let b = other.with_prec(p);
        PrecReal { mant: a.mant + b.mant, prec: p, err: a.err + b.err }
    }

    pub fn sub(&self, other: &PrecReal) -> Self {
        self.add(&other.neg())
    }

    pub fn add_rat(&self, q: &BigRat) -> Self {
        self.add(&PrecReal::from_rat(q, self.prec))
    }

    pub fn mul(&self, other: &PrecReal) -> Self {
        let p = self.prec.max(other.prec);
        let full = self.prec + other.prec;
        let prod = &self.mant * &other.mant;
        let mant = shr_round(&prod, full - p);
        let inexact = (&mant << (full - p)) != prod;
        let prop = self.mant.magnitude() * &other.err
            + other.mant.magnitude() * &self.err
            + &self.err * &other.err;
        let mut err = ceil_shr(&prop, full - p);
        if inexact {
            err += 1u8;
        }
        PrecReal { mant, prec: p, err }
    }

    pub fn mul_rat(&self, q: &BigRat) -> Self {
        let num = &self.mant * q.numer();
        let mant = div_round(&num, q.denom());
        let inexact = (&mant * q.denom()) != num;
        let scaled_err = BigRat::from_integer(BigInt::from(self.err.clone())) * q.abs();
        let mut err = scaled_err.ceil().to_integer().to_biguint().unwrap_or_default();
        if inexact {
            err += 1u8;
        }
        PrecReal { mant, prec: self.prec, err }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.mul_rat(&BigRat::from_integer(BigInt::from(k)))
    }

    /// Natural logarithm, accurate to about `2^-prec` plus the propagated input error.
    pub fn ln(&self, prec: u32) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::NonPositiveLog);
        }
        let v = self.value();
        let base = ln_rat(&v, prec + 4)?;
        // |ln(v + e) - ln(v)| <= e / (v - e)
        let e = self.error_bound();
        if e.is_zero() {
            return Ok(base);
        }
        let prop = &e / (&v - &e);
        Ok(base.widen(&prop))
    }

    /// Exponential, accurate to about `2^-prec` plus the propagated input error.
    pub fn exp(&self, prec: u32) -> Result<Self> {
        let x = self.to_f64();
        if x.is_nan() || x.abs() >= 1.0e7 {
            return Err(Error::ExpOverflow);
        }
        let k = (x / std::f64::consts::LN_2).round() as i64;
        let w = prec + 24 + k.max(0) as u32 + 2 * (64 - (k.unsigned_abs()).leading_zeros());
        let ln2 = ln2(w);
        let r = self.with_prec(w.max(self.prec)).sub(&ln2.mul_int(k)).with_prec(w);
        let r_err = r.error_bound();
        if r_err > BigRat::new(BigInt::one(), BigInt::from(64)) {
            return Err(Error::ExpOverflow);
        }
        let (sum, sum_err) = exp_series(&r.mant, w);
        let mut out = PrecReal { mant: sum, prec: w, err: sum_err };
        // exp(r + d) - exp(r) <= exp(r) (e^|d| - 1) <= 2 |d| exp(r) for |d| <= 1/64; exp(r) <= 2.
        out = out.widen(&(r_err * BigRat::from_integer(BigInt::from(4))));
        let shifted = if k >= 0 {
            let sh = k as u32;
            PrecReal { mant: out.mant, prec: w - sh, err: out.err }
        } else {
            PrecReal { mant: out.mant, prec: w + (-k) as u32, err: out.err }
        };
        Ok(shifted.with_prec(prec + 8))
    }

    /// Decimal rendering truncated at the digit of the error radius, followed by
    /// `± 2^-m`.
    pub fn to_decimal_string(&self) -> String {
        let bound = match self.error_exponent() {
            None => "± 0".to_string(),
            Some(m) => format!("± 2^{}", -m),
        };
        let v = self.value();
        let e = self.error_bound();
        if v.is_zero() {
            return format!("0e0 {bound}");
        }
        let abs = v.abs();
        let exp10 = floor_log10(&abs);
        let last = if e.is_zero() {
            exp10 - 39
        } else {
            ceil_log10(&e).min(exp10)
        };
        if e >= abs {
            return format!("0e{last} {bound}");
        }
        let sig = (exp10 - last + 1) as u32;
        let scale = pow10_rat(-(last as i64));
        let digits = (abs * scale).floor().to_integer().to_string();
        let digits = format!("{:0>width$}", digits, width = sig as usize);
        let sign = if v.is_negative() { "-" } else { "" };
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp10} {bound}")
        } else {
            format!("{sign}{head}.{tail}e{exp10} {bound}")
        }
    }
}

impl fmt::Display for PrecReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl serde::Serialize for PrecReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

fn pow10_rat(e: i64) -> BigRat {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRat::from_integer(p)
    } else {
        BigRat::new(BigInt::one(), p)
    }
}

fn floor_log10(q: &BigRat) -> i32 {
    let mut e = (log2_rat(q) * std::f64::consts::LOG10_2).floor() as i32;
    while pow10_rat(e as i64) > *q {
        e -= 1;
    }
    while pow10_rat(e as i64 + 1) <= *q {
        e += 1;
    }
    e
}

fn ceil_log10(q: &BigRat) -> i32 {
    let f = floor_log10(q);
    if pow10_rat(f as i64) == *q {
        f
    } else {
        f + 1
    }
}

/// `2 atanh(z)` for `|z| <= 1/3` given as an exact rational, at `w` fractional bits.
/// Returns the mantissa and an error bound in ulps.
fn two_atanh(z: &BigRat, w: u32) -> (BigInt, BigUint) {
    debug_assert!(z.abs() * BigRat::from_integer(BigInt::from(3)) <= BigRat::one());
    let zf = div_round(&(z.numer() << w), z.denom());
    let z2 = shr_round(&(&zf * &zf), w);
    // (1/3)^(2R+1) <= 2^-w
    let terms = ((w as f64 / 3f64.log2() - 1.0) / 2.0).ceil().max(0.0) as u64 + 1;
    let mut power = zf;
    let mut sum = BigInt::zero();
    for r in 0..terms {
        sum += div_round(&power, &BigInt::from(2 * r + 1));
        power = shr_round(&(&power * &z2), w);
    }
    // Each term carries at most 8 ulps of rounding and propagation error; the
    // truncated tail is below 2 ulps.
    let err = BigUint::from(8 * terms + 4);
    (sum << 1u8, err << 1u8)
}

static LN2_CACHE: Mutex<Option<PrecReal>> = Mutex::new(None);

/// `ln 2 = 2 atanh(1/3)`.
pub fn ln2(prec: u32) -> PrecReal {
    let mut cache = LN2_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(c) = cache.as_ref() {
        if c.prec >= prec + 16 {
            return c.with_prec(prec + 16);
        }
    }
    let w = prec + 32;
    let third = BigRat::new(BigInt::one(), BigInt::from(3));
    let (mant, err) = two_atanh(&third, w);
    let value = PrecReal { mant, prec: w, err };
    *cache = Some(value.clone());
    value.with_prec(prec + 16)
}

/// `ln q` for an exact positive rational.
pub fn ln_rat(q: &BigRat, prec: u32) -> Result<PrecReal> {
    if !q.is_positive() {
        return Err(Error::NonPositiveLog);
    }
    // q = 2^k m with m in [2/3, 4/3]
    let mut k = q.numer().bits() as i64 - q.denom().bits() as i64;
    let two = BigRat::from_integer(BigInt::from(2));
    let mut m = if k >= 0 {
        q / BigRat::from_integer(pow2(k as u32))
    } else {
        q * BigRat::from_integer(pow2((-k) as u32))
    };
    let lo = BigRat::new(BigInt::from(2), BigInt::from(3));
    let hi = BigRat::new(BigInt::from(4), BigInt::from(3));
    while m > hi {
        m /= &two;
        k += 1;
    }
    while m < lo {
        m *= &two;
        k -= 1;
    }
    let kbits = 64 - k.unsigned_abs().leading_zeros();
    let w = prec + 16 + kbits;
    let z = (&m - BigRat::one()) / (&m + BigRat::one());
    let (mant, err) = two_atanh(&z, w);
    let mut out = PrecReal { mant, prec: w, err };
    if k != 0 {
        out = out.add(&ln2(w).mul_int(k));
    }
    Ok(out.with_prec(prec + 8))
}

/// Taylor series of `exp(r)` for `|r| <= 0.36`, `r = r_mant 2^-w`.
fn exp_series(r_mant: &BigInt, w: u32) -> (BigInt, BigUint) {
    let mut term = pow2(w);
    let mut sum = term.clone();
    let mut m: u64 = 1;
    loop {
        term = div_round(&(&term * r_mant), &(BigInt::from(m) << w));
        if term.is_zero() {
            break;
        }
        sum += &term;
        m += 1;
    }
    // A vanishing term bounds the remainder by about 2 ulps; 4 ulps per computed term.
    (sum, BigUint::from(4 * m + 4))
}

//! Direct summation of `r_{n,j} = sum_{k >= 0} c_{k,j}`, `c_{k,j} = R_n(n + k + j/D)`.
//!
//! Terms are advanced with the exact rational ratio
//! `c_{k+1,j} / c_{k,j} = prod_{l=1}^{D} (Dk+3Dn+j+l)/(Dk+j+l-1) * ((Dk+Dn+j)/(Dk+2Dn+D+j))^{s+1}`
//! in truncated binary floating point, so every rounding is downward and the
//! accumulated deficit has a closed-form bound.
//!
//! The ratio tends to 1 as `k -> oo`, so the remainder is bounded with the
//! polynomial estimate
//! `R_n(t) <= S u^{-(beta-alpha)} (1 - n^2/(4u^2))^{-beta/2}`, `u = t + n/2`,
//! where `S = D^{3Dn} n!^{s+1-3D}`, `alpha = 3Dn+1`, `beta = (n+1)(s+1)`
//! (AM-GM on the numerator, pairing `k` with `n-k` in the denominator), and
//! summed against `int_{u_K - 1}^oo u^{-e} du`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::prec::{log2_big, log2_rat, PrecReal};
use crate::construction::Params;
use crate::error::{Error, Result};
use crate::exact_arith::{factorial, BigRat};

/// Largest number of terms a single summation may use.
pub const MAX_TERMS: u64 = 4_000_000;

/// Result of a direct summation, with bookkeeping used by tests and reports.
#[derive(Debug, Clone)]
pub struct SeriesSum {
    pub value: PrecReal,
    pub terms: u64,
    pub peak_index: u64,
    /// Certified bound on the neglected remainder.
    pub tail_bound: BigRat,
}

// Positive binary float m * 2^e with m kept at `bits` significant bits by truncation.
#[derive(Clone)]
struct Float {
    m: BigInt,
    e: i64,
}

impl Float {
    fn normalize(mut self, bits: u64) -> Self {
        let b = self.m.bits();
        if b > bits {
            let sh = b - bits;
            self.m >>= sh;
            self.e += sh as i64;
        }
        self
    }

    fn from_rat(q: &BigRat, bits: u64) -> Self {
        let sh = bits as i64 + q.denom().bits() as i64 - q.numer().bits() as i64 + 1;
        let (m, e) = if sh >= 0 {
            ((q.numer() << sh as u64) / q.denom(), -sh)
        } else {
            (q.numer() / (q.denom() << (-sh) as u64), -sh)
        };
        Float { m, e }.normalize(bits)
    }

    fn mul_ratio(&self, num: &BigInt, den: &BigInt, bits: u64) -> Self {
        let prod = &self.m * num;
        let sh = (bits as i64 + den.bits() as i64 - prod.bits() as i64 + 1).max(0);
        let m = (prod << sh as u64) / den;
        Float { m, e: self.e - sh }.normalize(bits)
    }

    /// floor(value * 2^w)
    fn to_fixed(&self, w: u32) -> BigInt {
        let sh = self.e + w as i64;
        if sh >= 0 {
            &self.m << sh as u64
        } else {
            &self.m >> (-sh) as u64
        }
    }
}

struct Shape {
    s: u64,
    d: u64,
    n: u64,
    j: u64,
}

impl Shape {
    fn new(params: &Params, j: u32) -> Result<Self> {
        if j < 1 || j > params.d {
            return Err(Error::ShiftOutOfRange { j, d: params.d });
        }
        Ok(Shape { s: params.s as u64, d: params.d as u64, n: params.n as u64, j: j as u64 })
    }

    fn alpha(&self) -> u64 {
        3 * self.d * self.n + 1
    }

    fn beta(&self) -> u64 {
        (self.n + 1) * (self.s + 1)
    }

    /// Exact `c_{0,j} = n!^{s+1-3D}/D * prod_{l=0}^{3Dn} (j+l) / prod_{l=0}^{n} ((Dn+j+Dl)/D)^{s+1}`.
    fn first_term(&self) -> BigRat {
        let Shape { s, d, n, j } = *self;
        let mut num = num_traits::pow(factorial(n), (s + 1 - 3 * d) as usize);
        for l in 0..=3 * d * n {
            num *= BigInt::from(j + l);
        }
        let mut den_base = BigInt::one();
        for l in 0..=n {
            den_base *= BigInt::from(d * n + j + d * l);
        }
        let den = num_traits::pow(den_base, (s + 1) as usize);
        // each of the (n+1)(s+1) denominator factors carried a 1/D
        let d_pow = num_traits::pow(BigInt::from(d), ((n + 1) * (s + 1)) as usize);
        BigRat::new(num * d_pow, den * BigInt::from(d))
    }

    fn ratio(&self, k: u64) -> (BigInt, BigInt) {
        let Shape { s, d, n, j } = *self;
        let mut num = num_traits::pow(BigInt::from(d * k + d * n + j), (s + 1) as usize);
        let mut den = num_traits::pow(BigInt::from(d * k + 2 * d * n + d + j), (s + 1) as usize);
        for l in 1..=d {
            num *= BigInt::from(d * k + 3 * d * n + j + l);
            den *= BigInt::from(d * k + j + l - 1);
        }
        (num, den)
    }

    fn ratio_log2(&self, k: u64) -> f64 {
        let Shape { s, d, n, j } = *self;
        let kf = (d * k) as f64;
        let mut l = (s + 1) as f64
            * (((kf + (d * n + j) as f64) / (kf + (2 * d * n + d + j) as f64)).log2());
        for ell in 1..=d {
            l += ((kf + (3 * d * n + j + ell) as f64) / (kf + (j + ell - 1) as f64)).log2();
        }
        l
    }

    fn log2_scalar(&self) -> f64 {
        let Shape { s, d, n, .. } = *self;
        3.0 * (d * n) as f64 * (d as f64).log2()
            + (s + 1 - 3 * d) as f64 * log2_big(&factorial(n).max(BigInt::one()))
    }

    /// `u_K = n + K + j/D + n/2` as an exact rational.
    fn u_at(&self, k: u64) -> BigRat {
        let Shape { d, n, j, .. } = *self;
        BigRat::new(BigInt::from(2 * d * (n + k) + 2 * j + d * n), BigInt::from(2 * d))
    }

    fn tail_log2(&self, k: u64) -> f64 {
        let u = (self.n + k) as f64 + self.j as f64 / self.d as f64 + self.n as f64 / 2.0;
        let e = (self.beta() - self.alpha()) as f64;
        let nf = self.n as f64;
        self.log2_scalar() - (self.beta() / 2) as f64 * (1.0 - nf * nf / (4.0 * u * u)).log2()
            - (e - 1.0) * (u - 1.0).log2()
            - (e - 1.0).log2()
    }

    fn tail_bound(&self, k: u64) -> BigRat {
        let Shape { s, d, n, .. } = *self;
        let scalar = num_traits::pow(BigInt::from(d), (3 * d * n) as usize)
            * num_traits::pow(factorial(n), (s + 1 - 3 * d) as usize);
        let u = self.u_at(k);
        let four_u2 = &u * &u * BigRat::from_integer(BigInt::from(4));
        let n2 = BigRat::from_integer(BigInt::from(n * n));
        let widen = num_traits::pow(&four_u2 / (&four_u2 - n2), (self.beta() / 2) as usize);
        let e = self.beta() - self.alpha();
        let integral = num_traits::pow((u - BigRat::one()).recip(), (e - 1) as usize)
            / BigRat::from_integer(BigInt::from(e - 1));
        BigRat::from_integer(scalar) * widen * integral
    }

    /// Smallest `K` whose remainder estimate is below `2^target`.
    fn cutoff(&self, target_log2: f64) -> u64 {
        let mut hi: u64 = 1;
        while self.tail_log2(hi) > target_log2 {
            hi *= 2;
            if hi > MAX_TERMS * 64 {
                return hi;
            }
        }
        let mut lo = 0;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.tail_log2(mid) > target_log2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Approximate `log2 r_{n,j}` from a floating-point pass over the terms.
pub fn estimate_log2(params: &Params, j: u32) -> Result<f64> {
    let shape = Shape::new(params, j)?;
    let mut l = log2_rat(&shape.first_term());
    let mut peak = l;
    let mut acc = 0.0f64; // sum of 2^(l - peak)
    let mut k = 0u64;
    loop {
        if l > peak {
            acc *= (peak - l).exp2();
            peak = l;
        }
        acc += (l - peak).exp2();
        if l < peak - 60.0 && shape.tail_log2(k + 1) < peak - 60.0 {
            break;
        }
        l += shape.ratio_log2(k);
        k += 1;
        if k > MAX_TERMS {
            break;
        }
    }
    Ok(peak + acc.log2())
}

/// `r_{n,j}` with certified absolute error at most `2^-prec`.
pub fn sum_series(params: &Params, j: u32, prec: u32) -> Result<PrecReal> {
    Ok(sum_series_detailed(params, j, prec)?.value)
}

/// `r_{n,j}` with about `rel_bits` correct leading bits.
pub fn sum_series_relative(params: &Params, j: u32, rel_bits: u32) -> Result<PrecReal> {
    let mag = estimate_log2(params, j)?;
    let prec = (rel_bits as f64 - mag).ceil().max(rel_bits as f64) as u32;
    sum_series(params, j, prec)
}

pub fn sum_series_detailed(params: &Params, j: u32, prec: u32) -> Result<SeriesSum> {
    let shape = Shape::new(params, j)?;
    let target = -(prec as f64) - 3.0;
    let cutoff = shape.cutoff(target - 2.0);
    if cutoff > MAX_TERMS {
        return Err(Error::InfeasiblePrecision { terms: cutoff as f64, limit: MAX_TERMS });
    }

    let first = shape.first_term();
    // floating-point pass for the peak, which sets the working mantissa length
    let mut l = log2_rat(&first);
    let mut peak_log2 = l;
    let mut peak_index = 0;
    for k in 0..cutoff {
        if l > peak_log2 {
            peak_log2 = l;
            peak_index = k;
        }
        l += shape.ratio_log2(k);
    }

    let count_bits = 64 - cutoff.leading_zeros() as u64;
    let w = prec + count_bits as u32 + 8;
    let mut bits = (prec as f64 + peak_log2.max(0.0)).ceil() as u64 + 2 * count_bits + 24;
    loop {
        let mut sum = BigInt::zero();
        let mut term = Float::from_rat(&first, bits);
        let mut k: u64 = 0;
        let mut terms = cutoff;
        let mut tail = shape.tail_bound(terms);
        let bound = BigRat::new(BigInt::one(), BigInt::one() << (prec + 2));
        while tail > bound {
            terms += terms / 8 + 1;
            tail = shape.tail_bound(terms);
        }
        while k < terms {
            sum += term.to_fixed(w);
            let (num, den) = shape.ratio(k);
            term = term.mul_ratio(&num, &den, bits);
            k += 1;
        }
        // Every rounding truncates, so the computed sum is below the true one by at most
        // one ulp per term, plus the relative deficit (2K+1) 2^(2-bits) of the largest
        // accumulated term, plus the remainder.
        let rel = BigRat::new(BigInt::from(2 * terms + 1), BigInt::one() << (bits - 2));
        let deficit = BigRat::new(sum.clone(), BigInt::one() << w) * &rel * BigRat::from_integer(BigInt::from(2));
        let err_rat = BigRat::new(BigInt::from(terms), BigInt::one() << w) + deficit + &tail;
        let value = PrecReal::from_parts(sum, w, BigUint::zero()).widen(&err_rat);
        if value.error_within_bits(prec) {
            return Ok(SeriesSum { value, terms, peak_index, tail_bound: tail });
        }
        bits += 32;
    }
}

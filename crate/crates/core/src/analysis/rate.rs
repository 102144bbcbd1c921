//! The rate functions
//! `f(x) = ((x+3)/x)^D ((x+1)/(x+2))^{s+1}` and
//! `g(x) = D^{3D} (x+3)^{3D} (x+1)^{s+1} / (x+2)^{2(s+1)}`,
//! the root `x_0` of `f = 1`, and the resulting bounds.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::prec::{ln_rat, PrecReal};
use crate::error::{Error, Result};
use crate::exact_arith::{rat_int, BigRat};
use crate::SCHEMA;

/// Certified `log f(x)` for an exact positive rational `x`.
pub fn log_f(x: &BigRat, s: u32, d: u32, prec: u32) -> Result<PrecReal> {
    let w = prec + 8 + bit_len(s as u64 + d as u64);
    let one = BigRat::one();
    let lx = ln_rat(x, w)?;
    let l1 = ln_rat(&(x + &one), w)?;
    let l2 = ln_rat(&(x + rat_int(2)), w)?;
    let l3 = ln_rat(&(x + rat_int(3)), w)?;
    Ok(l3.sub(&lx).mul_int(d as i64).add(&l1.sub(&l2).mul_int(s as i64 + 1)))
}

/// `log g(x)` for a real `x > 0` carrying its own error radius.
pub fn log_g(x: &PrecReal, s: u32, d: u32, prec: u32) -> Result<PrecReal> {
    let w = prec + 8 + bit_len(s as u64 + d as u64);
    let x = x.with_prec(x.prec().max(w));
    let shift = |c: i64| x.add(&PrecReal::from_int(c, x.prec()));
    let l1 = shift(1).ln(w)?;
    let l2 = shift(2).ln(w)?;
    let l3 = shift(3).ln(w)?;
    let ld = ln_rat(&rat_int(d as i64), w)?;
    let three_d = 3 * d as i64;
    let s1 = s as i64 + 1;
    Ok(ld
        .add(&l3)
        .mul_int(three_d)
        .add(&l1.mul_int(s1))
        .sub(&l2.mul_int(2 * s1)))
}

/// `g(x)` with propagated error.
pub fn g_eval(x: &PrecReal, s: u32, d: u32, prec: u32) -> Result<PrecReal> {
    let lg = log_g(x, s, d, prec + 8)?;
    lg.exp(prec)
}

/// Exact `g(x)` at a rational point.
pub fn g_exact(x: &BigRat, s: u32, d: u32) -> BigRat {
    let dd = rat_int(d as i64);
    num_traits::pow(dd * (x + rat_int(3)), (3 * d) as usize)
        * num_traits::pow(x + rat_int(1), (s + 1) as usize)
        / num_traits::pow(x + rat_int(2), (2 * (s + 1)) as usize)
}

fn bit_len(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// `x_0`, `g(x_0)` and the comparison quantities, all certified.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub s: u32,
    pub d: u32,
    pub precision: u32,
    pub x0: PrecReal,
    /// Bracket `[lo, hi]` with `f(lo) > 1 > f(hi)`.
    pub bracket: (BigRat, BigRat),
    pub x1: PrecReal,
    /// `max |log f|` over the bracket endpoints.
    pub log_f_residual: PrecReal,
    pub log_gx0: PrecReal,
    pub gx0: Option<PrecReal>,
    /// `log 3^{-(s+1)}`.
    pub log_threshold: PrecReal,
    /// `a = 4 * 2^{-(s+1)/D}` and its logarithm.
    pub bound_a: PrecReal,
    pub log_bound_a: PrecReal,
    pub x0_below_a: bool,
    pub gx0_below_threshold: bool,
    /// `e * g(x_0)^{1/(s+1)} < 1`, i.e. `log g(x_0) < -(s+1)`.
    pub contradiction: bool,
}

impl RateReport {
    /// Certified `log g(x_0) < bound`.
    pub fn log_gx0_below(&self, bound: i64) -> bool {
        self.log_gx0.definitely_lt(&PrecReal::from_int(bound, self.log_gx0.prec()))
    }

    /// Whether `|f(x_0) - 1| <= 2^-bits` is certified for the reported bracket.
    pub fn f_residual_within(&self, bits: u32) -> bool {
        // |f - 1| <= e^{|log f|} - 1 <= 2 |log f| for |log f| <= 1
        let bound = self.log_f_residual.upper() * rat_int(2);
        bound <= BigRat::new(BigInt::one(), BigInt::one() << bits)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "kind": "rate_report",
            "s": self.s,
            "D": self.d,
            "precision_bits": self.precision,
            "x0": self.x0.to_decimal_string(),
            "x1": self.x1.to_decimal_string(),
            "log_f_residual": self.log_f_residual.to_decimal_string(),
            "log_g_x0": self.log_gx0.to_decimal_string(),
            "g_x0": self.gx0.as_ref().map(PrecReal::to_decimal_string),
            "log_threshold": self.log_threshold.to_decimal_string(),
            "bound_a": self.bound_a.to_decimal_string(),
            "x0_below_a": self.x0_below_a,
            "g_x0_below_threshold": self.gx0_below_threshold,
            "contradiction_inequality": self.contradiction,
        })
    }
}

/// Positive root `x_1` of `a x^2 + 3a x - 6D`, `a = s + 1 - 3D`.
pub fn critical_point(s: u32, d: u32, prec: u32) -> PrecReal {
    let a = (s + 1 - 3 * d) as i64;
    let disc = BigInt::from(9 * a * a + 24 * a * d as i64);
    let root = PrecReal::sqrt_int(&disc, prec + 4);
    root.add(&PrecReal::from_int(-3 * a, prec + 4))
        .mul_rat(&BigRat::new(BigInt::one(), BigInt::from(2 * a)))
}

fn dyadic(mant: &BigInt, prec: u32) -> BigRat {
    BigRat::new(mant.clone(), BigInt::one() << prec)
}

/// Bisection for the unique positive root of `f(x) = 1`, certified to `2^-prec`.
pub fn find_x0(s: u32, d: u32, prec: u32) -> Result<RateReport> {
    if s < 3 * d || d == 0 {
        return Err(Error::Params(crate::error::ParamError::SBelowThreeD {
            s: s as i64,
            three_d: 3 * d as i64,
        }));
    }
    let work = prec + 16;
    let sign_of = |x: &BigRat| -> Result<std::cmp::Ordering> {
        let mut p = work;
        loop {
            let lf = log_f(x, s, d, p)?;
            if let Some(o) = lf.certified_cmp(&PrecReal::zero(p)) {
                return Ok(o);
            }
            if p > work + 512 {
                return Ok(std::cmp::Ordering::Equal);
            }
            p += 64;
        }
    };

    let x1 = critical_point(s, d, work);
    // f has its minimum (< 1) at x_1; any rational near it works as the right end.
    let mut hi = dyadic(&x1.with_prec(64).mantissa().clone(), 64);
    if hi.is_zero() {
        hi = BigRat::new(BigInt::one(), BigInt::from(1u64 << 32));
    }
    use std::cmp::Ordering::*;
    while sign_of(&hi)? != Less {
        hi *= rat_int(2);
    }
    let mut lo = &hi / rat_int(2);
    while sign_of(&lo)? != Greater {
        hi = lo.clone();
        lo = &lo / rat_int(2);
    }
    // relative bisection: stop once hi - lo <= 2^-prec * lo
    let tol_bits = prec + 8;
    loop {
        let width = &hi - &lo;
        if width * (BigInt::one() << tol_bits) <= lo {
            break;
        }
        let mid = (&lo + &hi) / rat_int(2);
        match sign_of(&mid)? {
            Greater => lo = mid,
            Less => hi = mid,
            Equal => {
                lo = mid.clone();
                hi = mid;
                break;
            }
        }
    }

    // x_0 in [lo, hi]; represent with enough bits for the scale of lo
    let scale_bits = (-super::prec::log2_rat(&lo)).max(0.0).ceil() as u32;
    let xp = prec + scale_bits + 16;
    let mid = (&lo + &hi) / rat_int(2);
    let x0 = PrecReal::from_rat(&mid, xp).widen(&((&hi - &lo) / rat_int(2)));

    let lf_lo = log_f(&lo, s, d, work)?;
    let lf_hi = log_f(&hi, s, d, work)?;
    let residual = if lf_lo.upper().abs() >= lf_hi.upper().abs() { lf_lo } else { lf_hi.neg() };

    let log_gx0 = log_g(&x0, s, d, work)?;
    let gx0 = if (s as u64) <= 4096 {
        let g_lo = g_exact(&lo, s, d);
        let g_hi = g_exact(&hi, s, d);
        let (gmin, gmax) = if g_lo <= g_hi { (g_lo, g_hi) } else { (g_hi, g_lo) };
        let gscale = (-super::prec::log2_rat(&gmin)).max(0.0).ceil() as u32;
        // g is monotone on a bracket this narrow, so g(x_0) lies between the endpoint values
        let centre = (&gmin + &gmax) / rat_int(2);
        let radius = (&gmax - &gmin) / rat_int(2);
        Some(PrecReal::from_rat(&centre, prec + gscale + 16).widen(&radius))
    } else {
        None
    };

    let ln3 = ln_rat(&rat_int(3), work + 24)?;
    let log_threshold = ln3.mul_int(-(s as i64 + 1));
    let ln2 = super::prec::ln2(work + 24);
    // log a = 2 ln 2 - (s+1)/D ln 2
    let log_bound_a = ln2.mul_rat(&(rat_int(2) - BigRat::new(BigInt::from(s + 1), BigInt::from(d))));
    let a_scale = (s + 1) / d + 4;
    let bound_a = log_bound_a.exp(prec + a_scale)?;

    let x0_upper = PrecReal::from_rat(&hi, xp);
    let x0_below_a = x0_upper.definitely_lt(&bound_a);
    let gx0_below_threshold = log_gx0.definitely_lt(&log_threshold);
    let contradiction = log_gx0.definitely_lt(&PrecReal::from_int(-(s as i64 + 1), log_gx0.prec()));

    Ok(RateReport {
        s,
        d,
        precision: prec,
        x0,
        bracket: (lo, hi),
        x1,
        log_f_residual: residual,
        log_gx0,
        gx0,
        log_threshold,
        bound_a,
        log_bound_a,
        x0_below_a,
        gx0_below_threshold,
        contradiction,
    })
}

//! Hurwitz zeta `zeta(i, alpha) = sum_{m >= 0} (m + alpha)^-i` by Euler-Maclaurin.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::prec::{log2_rat, PrecReal};
use crate::error::{Error, Result};
use crate::exact_arith::{bernoulli, factorial, rat_to_string, BigRat};

const MAX_CORRECTIONS: u32 = 64;

fn rising(i: u32, len: u32) -> BigInt {
    (0..len).map(|r| BigInt::from(i + r)).product()
}

/// `|B_{2m}| / (2m)! * i (i+1) ... (i+2m-2) * (N + alpha)^{-(i+2m-1)}`, estimated in log2.
fn correction_log2(i: u32, m: u32, base: f64) -> f64 {
    // |B_{2m}|/(2m)! = 2 zeta(2m) / (2 pi)^{2m} <= 3.3 / (2 pi)^{2m}
    let mut l = 3.3f64.log2() - 2.0 * m as f64 * (2.0 * std::f64::consts::PI).log2();
    for r in 0..(2 * m - 1) {
        l += ((i + r) as f64).log2();
    }
    l - (i + 2 * m - 1) as f64 * base.log2()
}

/// Picks the number of direct terms `N` and Bernoulli corrections `M`.
fn choose_cutoffs(i: u32, alpha: f64, target_log2: f64) -> (u64, u32) {
    let mut n: u64 = 4;
    loop {
        let base = n as f64 + alpha;
        for m in 1..=MAX_CORRECTIONS {
            if correction_log2(i, m + 1, base) + 2.0 < target_log2 {
                return (n, m);
            }
        }
        n = n + n / 4 + 1;
    }
}

/// `zeta(i, alpha)` with absolute error at most `2^-prec`.
pub fn hurwitz_zeta(i: u32, alpha: &BigRat, prec: u32) -> Result<PrecReal> {
    if i < 2 {
        return Err(Error::DivergentZeta(i));
    }
    if !alpha.is_positive() || *alpha > BigRat::one() {
        return Err(Error::AlphaOutOfRange(rat_to_string(alpha)));
    }
    let p = alpha.numer().clone();
    let q = alpha.denom().clone();
    let alpha_f = 2f64.powf(log2_rat(alpha));
    let target = -(prec as f64) - 4.0;
    let (mut big_n, mut m) = choose_cutoffs(i, alpha_f, target);
    loop {
        let guard = 12 + (64 - (big_n + 2 * m as u64 + 8).leading_zeros());
        let w = prec + guard;
        let mut acc = PrecReal::zero(w);
        let q_pow_i = num_traits::pow(q.clone(), i as usize);
        let mut ulps: u64 = 0;
        let scaled_num = &q_pow_i << w;
        for k in 0..big_n {
            let den = num_traits::pow(BigInt::from(k) * &q + &p, i as usize);
            let term = (&scaled_num + (&den >> 1u8)) / &den;
            acc = acc.add(&PrecReal::from_parts(term, w, BigUint::zero()));
            ulps += 1;
        }
        let base = BigRat::new(BigInt::from(big_n) * &q + &p, q.clone());
        let inv_base = base.recip();
        let inv_pow_i = num_traits::pow(inv_base.clone(), i as usize);
        let tail = &inv_pow_i * &base / BigRat::from_integer(BigInt::from(i - 1));
        let half = &inv_pow_i / BigRat::from_integer(BigInt::from(2));
        acc = acc.add(&PrecReal::from_rat(&tail, w)).add(&PrecReal::from_rat(&half, w));
        let inv_sq = &inv_base * &inv_base;
        let mut pow = &inv_pow_i * &inv_base;
        for mm in 1..=m {
            let coeff = bernoulli(2 * mm as usize)
                * BigRat::new(rising(i, 2 * mm - 1), factorial(2 * mm as u64));
            acc = acc.add(&PrecReal::from_rat(&(&coeff * &pow), w));
            pow *= &inv_sq;
        }
        // Remainder: bounded by the first omitted correction (all even derivatives of
        // (x + alpha)^-i share a sign); doubled for margin.
        let omitted = bernoulli(2 * m as usize + 2).abs()
            * BigRat::new(rising(i, 2 * m + 1), factorial(2 * m as u64 + 2))
            * &pow
            * BigRat::from_integer(BigInt::from(2));
        let bound = BigRat::new(BigInt::one(), BigInt::one() << (prec + 2));
        if omitted > bound {
            big_n *= 2;
            m = MAX_CORRECTIONS.min(m + 4);
            continue;
        }
        let mut out = acc.widen(&omitted);
        out = PrecReal::from_parts(
            out.mantissa().clone(),
            w,
            out.err_ulps() + BigUint::from(ulps),
        );
        debug_assert!(out.error_within_bits(prec));
        return Ok(out);
    }
}

/// Riemann zeta value `zeta(i) = zeta(i, 1)`.
pub fn riemann_zeta(i: u32, prec: u32) -> Result<PrecReal> {
    hurwitz_zeta(i, &BigRat::one(), prec)
}

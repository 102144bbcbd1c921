//! Certified numerics: Hurwitz zeta, direct summation of the forms, the rate
//! functions `f`, `g` and the empirical limits.

pub mod hurwitz;
pub mod limits;
pub mod prec;
pub mod rate;
pub mod series;

pub use hurwitz::{hurwitz_zeta, riemann_zeta};
pub use limits::{empirical_limits, LimitRow, LimitsTable};
pub use prec::PrecReal;
pub use rate::{find_x0, g_eval, RateReport};
pub use series::{sum_series, sum_series_relative};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{rat, BigRat};
use crate::forms::LinearFormCoefficients;

/// `rho_{0,j} + sum_i rho_i zeta(i, j/D)` with absolute error at most `2^-prec`.
pub fn reconstruct_form(lf: &LinearFormCoefficients, j: u32, prec: u32) -> Result<PrecReal> {
    let d = lf.params.d;
    if j == 0 || j > d {
        return Err(Error::ShiftOutOfRange { j, d });
    }
    let alpha = rat(j as i64, d as i64);
    let guard = 4 + (32 - (lf.rho.len() as u32 + 1).leading_zeros());
    let w = prec + guard;
    let mut acc = PrecReal::from_rat(lf.rho0(j), w);
    for (&i, rho) in &lf.rho {
        if rho.is_zero() {
            continue;
        }
        let acc_term = zeta_times(i, &alpha, rho, w)?;
        acc = acc.add(&acc_term);
    }
    Ok(acc)
}

/// `c * zeta(i, alpha)` with absolute error at most about `2^-w`.
pub(crate) fn zeta_times(i: u32, alpha: &BigRat, c: &BigRat, w: u32) -> Result<PrecReal> {
    let mag = prec::log2_rat(&c.abs()).max(0.0).ceil() as u32;
    let z = hurwitz_zeta(i, alpha, w + mag + 2)?;
    Ok(z.mul_rat(c).with_prec(w + 2))
}

//! Choice of `D` as a primorial for a given `epsilon` and `s`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Value};

use crate::analysis::find_x0;
use crate::error::{Error, ParamError, Result};
use crate::exact_arith::{divisors, primes_upto, rat, rat_to_string, BigRat};
use crate::SCHEMA;

#[derive(Debug, Clone)]
pub struct PlanReport {
    pub epsilon: BigRat,
    pub s: u64,
    /// `(1 - 2 epsilon) ln s`.
    pub prime_bound: f64,
    pub primes: Vec<u64>,
    pub d: u64,
    pub delta: usize,
    pub log_d: f64,
    /// `(1 - epsilon) ln s`.
    pub log_d_target: f64,
    pub d_log_d: f64,
    /// `s^{1-epsilon} ln s`.
    pub d_log_d_target: f64,
    /// `log2` of `2^{(1-epsilon) ln s / ln ln s}`.
    pub irrationality_bound_log2: f64,
    pub s_at_least_3d: bool,
    /// `Some(flag)` when `g(x_0) < 3^{-(s+1)}` was tested, `None` when `s < 3D`.
    pub rate_certified: Option<bool>,
    pub log_gx0: Option<String>,
}

impl PlanReport {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "kind": "plan",
            "epsilon": rat_to_string(&self.epsilon),
            "s": self.s,
            "prime_bound": self.prime_bound,
            "primes": self.primes,
            "D": self.d,
            "delta": self.delta,
            "log_D": self.log_d,
            "log_D_target": self.log_d_target,
            "log_D_below_target": self.log_d <= self.log_d_target,
            "D_log_D": self.d_log_d,
            "D_log_D_target": self.d_log_d_target,
            "irrationality_count_log2": self.irrationality_bound_log2,
            "s_at_least_3D": self.s_at_least_3d,
            "rate_certified": self.rate_certified,
            "log_g_x0": self.log_gx0,
        })
    }
}

pub fn plan_parameters(epsilon: &BigRat, s: u64) -> Result<PlanReport> {
    if !epsilon.is_positive() || *epsilon >= rat(1, 3) {
        return Err(Error::EpsilonOutOfRange(rat_to_string(epsilon)));
    }
    if s.is_multiple_of(2) {
        return Err(Error::Params(ParamError::EvenS { s: s as i64 }));
    }
    if s < 3 {
        return Err(Error::Params(ParamError::SBelowThreeD { s: s as i64, three_d: 3 }));
    }
    let eps = epsilon.to_f64().unwrap_or(0.0);
    let ln_s = (s as f64).ln();
    let prime_bound = (1.0 - 2.0 * eps) * ln_s;
    let primes = if prime_bound >= 2.0 { primes_upto(prime_bound.floor() as u64) } else { Vec::new() };
    let d_big: BigInt = primes.iter().map(|&p| BigInt::from(p)).product::<BigInt>().max(BigInt::one());
    let d = d_big.to_u64().ok_or_else(|| Error::EpsilonOutOfRange("primorial does not fit in 64 bits".into()))?;
    let delta = divisors(d).len();
    let log_d = (d as f64).ln();
    let s_at_least_3d = s >= 3 * d;
    let (rate_certified, log_gx0) = if s_at_least_3d && s <= u32::MAX as u64 && d <= u32::MAX as u64 {
        let report = find_x0(s as u32, d as u32, 64)?;
        (Some(report.gx0_below_threshold), Some(report.log_gx0.to_decimal_string()))
    } else {
        (None, None)
    };
    Ok(PlanReport {
        epsilon: epsilon.clone(),
        s,
        prime_bound,
        primes,
        d,
        delta,
        log_d,
        log_d_target: (1.0 - eps) * ln_s,
        d_log_d: d as f64 * log_d,
        d_log_d_target: (s as f64).powf(1.0 - eps) * ln_s,
        irrationality_bound_log2: (1.0 - eps) * ln_s / ln_s.ln(),
        s_at_least_3d,
        rate_certified,
        log_gx0,
    })
}

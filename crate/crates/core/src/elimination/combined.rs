//! `r^_{n,d} = sum_{j=1}^d r_{n, jD/d}` and the eliminated form
//! `r~_n = sum_d w_d r^_{n,d}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use super::weights::EliminationPlan;
use crate::analysis::{reconstruct_form, zeta_times, PrecReal};
use crate::construction::Params;
use crate::error::{Error, Result};
use crate::exact_arith::{is_integer, lcm_upto, rat_int, rat_to_string, BigRat};
use crate::forms::LinearFormCoefficients;
use crate::SCHEMA;

/// `constant + sum_i coefficients[i] zeta(i)` with absolute error `2^-prec`.
fn zeta_combination(constant: &BigRat, coefficients: &BTreeMap<u32, BigRat>, prec: u32) -> Result<PrecReal> {
    let guard = 4 + (32 - (coefficients.len() as u32 + 1).leading_zeros());
    let w = prec + guard;
    let one = BigRat::from_integer(BigInt::from(1));
    let mut acc = PrecReal::from_rat(constant, w);
    for (&i, c) in coefficients {
        if !c.is_zero() {
            acc = acc.add(&zeta_times(i, &one, c, w)?);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct CombinedForm {
    pub params: Params,
    pub d: u32,
    pub constant: BigRat,
    /// Coefficient of `zeta(i)`, equal to `rho_i d^i`.
    pub coefficients: BTreeMap<u32, BigRat>,
    pub value: PrecReal,
    /// The same quantity as `sum_j reconstruct_form(jD/d)`.
    pub by_shifts: PrecReal,
}

impl CombinedForm {
    /// Both evaluations agree within their error radii.
    pub fn consistent(&self) -> bool {
        self.value.distance(&self.by_shifts) <= self.value.error_bound() + self.by_shifts.error_bound()
    }
}

pub fn combined_form(lf: &LinearFormCoefficients, d: u32, prec: u32) -> Result<CombinedForm> {
    let big_d = lf.params.d;
    if d == 0 || !big_d.is_multiple_of(d) {
        return Err(Error::NotDivisor { d: d as u64, big_d: big_d as u64 });
    }
    let step = big_d / d;
    let constant: BigRat = (1..=d).map(|j| lf.rho0(j * step)).sum();
    let coefficients: BTreeMap<u32, BigRat> = lf
        .rho
        .iter()
        .map(|(&i, r)| (i, r * rat_int(num_traits::pow(BigInt::from(d), i as usize))))
        .collect();
    let value = zeta_combination(&constant, &coefficients, prec + 2)?;
    let mut by_shifts = PrecReal::zero(prec + 8);
    let per = prec + 2 + (32 - d.leading_zeros());
    for j in 1..=d {
        by_shifts = by_shifts.add(&reconstruct_form(lf, j * step, per)?);
    }
    Ok(CombinedForm { params: lf.params, d, constant, coefficients, value, by_shifts })
}

#[derive(Debug, Clone)]
pub struct EliminatedForm {
    pub params: Params,
    pub plan: EliminationPlan,
    pub constant: BigRat,
    /// Coefficient of `zeta(i)` for every odd `i` in `3..=s`; exactly zero at the plan indices.
    pub coefficients: BTreeMap<u32, BigRat>,
    pub value: PrecReal,
    /// `(sum_d w_d d) r_{n,1}`, the leading-order approximation of the value.
    pub leading_estimate: PrecReal,
    pub constant_integral: bool,
    pub coefficients_integral: BTreeMap<u32, bool>,
}

impl EliminatedForm {
    /// Surviving indices `I = {3, 5, ..., s} \ {i_1, ...}`.
    pub fn surviving(&self) -> Vec<u32> {
        self.coefficients.keys().copied().filter(|i| !self.plan.indices.contains(i)).collect()
    }

    pub fn eliminated_exactly(&self) -> bool {
        self.plan.indices.iter().all(|i| self.coefficients[i].is_zero())
    }

    pub fn integral(&self) -> bool {
        self.constant_integral && self.coefficients_integral.values().all(|&b| b)
    }

    pub fn to_json(&self) -> Value {
        let coeffs: BTreeMap<String, String> =
            self.coefficients.iter().map(|(i, c)| (i.to_string(), rat_to_string(c))).collect();
        let integral: BTreeMap<String, bool> =
            self.coefficients_integral.iter().map(|(i, b)| (i.to_string(), *b)).collect();
        json!({
            "schema": SCHEMA,
            "kind": "eliminated_form",
            "s": self.params.s,
            "D": self.params.d,
            "n": self.params.n,
            "plan": self.plan.to_json(),
            "constant": rat_to_string(&self.constant),
            "coefficients": coeffs,
            "surviving": self.surviving(),
            "eliminated_exactly": self.eliminated_exactly(),
            "value": self.value.to_decimal_string(),
            "leading_estimate": self.leading_estimate.to_decimal_string(),
            "constant_integral": self.constant_integral,
            "coefficients_integral": integral,
            "integral": self.integral(),
        })
    }
}

pub fn eliminated_form(lf: &LinearFormCoefficients, plan: &EliminationPlan, prec: u32) -> Result<EliminatedForm> {
    let Params { s, d: big_d, n } = lf.params;
    if plan.d != big_d {
        return Err(Error::PlanMismatch(format!("plan is for D = {}, form has D = {big_d}", plan.d)));
    }
    if let Some(i) = plan.indices.iter().find(|&&i| !lf.rho.contains_key(&i)) {
        return Err(Error::PlanMismatch(format!("index {i} is not an odd value in [3, {s}]")));
    }
    let mut constant = BigRat::zero();
    for (&dv, w) in &plan.weights {
        let step = big_d / dv as u32;
        let c: BigRat = (1..=dv as u32).map(|j| lf.rho0(j * step)).sum();
        constant += c * rat_int(w.clone());
    }
    let coefficients: BTreeMap<u32, BigRat> =
        lf.rho.iter().map(|(&i, r)| (i, r * rat_int(plan.power_sum(i)))).collect();
    if let Some(i) = plan.indices.iter().find(|i| !coefficients[i].is_zero()) {
        return Err(Error::PlanMismatch(format!("coefficient of zeta({i}) did not cancel")));
    }
    let value = zeta_combination(&constant, &coefficients, prec)?;
    let leading_estimate = reconstruct_form(lf, 1, prec)?.mul_rat(&rat_int(plan.power_sum(1)));

    let dn1 = lcm_upto(n as u64 + 1);
    let constant_integral = is_integer(&(&constant * rat_int(num_traits::pow(dn1.clone(), (s + 1) as usize))));
    let coefficients_integral = coefficients
        .iter()
        .map(|(&i, c)| (i, is_integer(&(c * rat_int(num_traits::pow(dn1.clone(), (s + 1 - i) as usize))))))
        .collect();
    Ok(EliminatedForm {
        params: lf.params,
        plan: plan.clone(),
        constant,
        coefficients,
        value,
        leading_estimate,
        constant_integral,
        coefficients_integral,
    })
}

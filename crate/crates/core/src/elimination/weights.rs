//! Integer weights `w_d` over the divisors of `D` with
//! `sum_d w_d d^{i_j} = 0` for the chosen indices and `sum_d w_d d != 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::vandermonde::bareiss_det;
use crate::error::{Error, Result};
use crate::exact_arith::divisors;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationPlan {
    pub d: u32,
    pub divisors: Vec<u64>,
    pub delta: usize,
    /// `i_1 < ... < i_{delta-1}`; `i_0 = 1` is implicit.
    pub indices: Vec<u32>,
    pub weights: BTreeMap<u64, BigInt>,
}

impl EliminationPlan {
    /// `sum_d w_d d^i`.
    pub fn power_sum(&self, i: u32) -> BigInt {
        self.weights.iter().map(|(&d, w)| w * num_traits::pow(BigInt::from(d), i as usize)).sum()
    }

    pub fn to_json(&self) -> Value {
        let weights: BTreeMap<String, String> =
            self.weights.iter().map(|(d, w)| (d.to_string(), w.to_string())).collect();
        json!({
            "D": self.d,
            "divisors": self.divisors,
            "delta": self.delta,
            "indices": self.indices,
            "weights": weights,
            "weighted_sum": self.power_sum(1).to_string(),
        })
    }
}

/// The first `count` odd integers from 3.
pub fn default_indices(count: usize) -> Vec<u32> {
    (0..count as u32).map(|k| 3 + 2 * k).collect()
}

/// Validates the indices and builds the weights from the cofactors of
/// `M = [d^{i_j}]` (rows `j = 0..delta-1`, columns `d`), so that `M w = det(M) e_0`.
pub fn solve_weights(d: u32, s: u32, indices: &[u32]) -> Result<EliminationPlan> {
    if d == 0 {
        return Err(Error::Indices("D must be positive".into()));
    }
    let divs = divisors(d as u64);
    let delta = divs.len();
    if indices.len() + 1 != delta {
        return Err(Error::Indices(format!(
            "D = {d} has {delta} divisors, so exactly {} indices are needed (got {})",
            delta - 1,
            indices.len()
        )));
    }
    if let Some(&i) = indices.iter().find(|&&i| i % 2 == 0) {
        return Err(Error::Indices(format!("index {i} is even")));
    }
    if let Some(&i) = indices.iter().find(|&&i| i < 3 || i > s) {
        return Err(Error::Indices(format!("index {i} outside [3, {s}]")));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Indices("indices must be strictly increasing without repeats".into()));
    }

    let exps: Vec<u32> = std::iter::once(1).chain(indices.iter().copied()).collect();
    let m: Vec<Vec<BigInt>> = exps
        .iter()
        .map(|&e| divs.iter().map(|&dv| num_traits::pow(BigInt::from(dv), e as usize)).collect())
        .collect();

    // w_c = (-1)^c det(M without row 0 and column c)
    let mut w: Vec<BigInt> = (0..delta)
        .map(|c| {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, x)| x.clone()).collect())
                .collect();
            let det = bareiss_det(minor);
            if c % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect();

    let det_m: BigInt = w.iter().zip(&m[0]).map(|(a, b)| a * b).sum();
    if det_m.is_zero() {
        return Err(Error::Vandermonde("singular power matrix".into()));
    }
    for (j, row) in m.iter().enumerate() {
        let v: BigInt = w.iter().zip(row).map(|(a, b)| a * b).sum();
        let expected = if j == 0 { det_m.clone() } else { BigInt::zero() };
        if v != expected {
            return Err(Error::Vandermonde(format!("weight check failed in row {j}")));
        }
    }

    let g = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_one() {
        for x in w.iter_mut() {
            *x = &*x / &g;
        }
    }
    if det_m.is_negative() {
        // keep sum_d w_d d positive
        for x in w.iter_mut() {
            *x = -&*x;
        }
    }
    let weights = divs.iter().copied().zip(w).collect();
    let plan = EliminationPlan { d, divisors: divs, delta, indices: indices.to_vec(), weights };
    debug_assert!(plan.power_sum(1).is_positive());
    Ok(plan)
}

//! Linear-form coefficients `rho_i`, `rho_{0,j}` and the exact integrality checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::construction::{Params, PartialFractionExpansion};
use crate::error::{Error, Result};
use crate::exact_arith::{is_integer, lcm_upto, rat, rat_int, rat_to_string, BigRat};
use crate::SCHEMA;

/// `r_{n,j} = rho_{0,j} + sum_{odd i >= 3} rho_i zeta(i, j/D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormCoefficients {
    pub params: Params,
    /// Odd `i` in `3..=s`.
    pub rho: BTreeMap<u32, BigRat>,
    /// `j` in `1..=D`.
    pub rho0: BTreeMap<u32, BigRat>,
}

impl LinearFormCoefficients {
    pub fn rho(&self, i: u32) -> &BigRat {
        &self.rho[&i]
    }

    pub fn rho0(&self, j: u32) -> &BigRat {
        &self.rho0[&j]
    }

    pub fn scaled(&self, c: &BigRat) -> Self {
        LinearFormCoefficients {
            params: self.params,
            rho: self.rho.iter().map(|(&i, r)| (i, r * c)).collect(),
            rho0: self.rho0.iter().map(|(&j, r)| (j, r * c)).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let rho: BTreeMap<String, String> =
            self.rho.iter().map(|(i, r)| (i.to_string(), rat_to_string(r))).collect();
        let rho0: BTreeMap<String, String> =
            self.rho0.iter().map(|(j, r)| (j.to_string(), rat_to_string(r))).collect();
        json!({ "s": self.params.s, "D": self.params.d, "n": self.params.n, "rho": rho, "rho0": rho0 })
    }
}

/// `rho_i = sum_k a_{i,k}` and
/// `rho_{0,j} = - sum_{k=0}^n sum_{l=0}^k sum_{i=1}^s a_{i,k} / (l + j/D)^i`.
///
/// Fails if any even-index `rho_i` (or `rho_1`) is nonzero; that would mean the
/// expansion is wrong.
pub fn linear_form_coeffs(pf: &PartialFractionExpansion) -> Result<LinearFormCoefficients> {
    let Params { s, d, n } = pf.params;
    let residue = pf.residue_sum();
    if !residue.is_zero() {
        return Err(Error::ResidueSumNonzero(rat_to_string(&residue)));
    }
    let mut rho = BTreeMap::new();
    for i in 2..=s {
        let sum: BigRat = pf.a[(i - 1) as usize].iter().sum();
        if i % 2 == 0 {
            if !sum.is_zero() {
                return Err(Error::EvenRhoNonzero { i, value: rat_to_string(&sum) });
            }
        } else {
            rho.insert(i, sum);
        }
    }

    let rho0 = (1..=d)
        .into_par_iter()
        .map(|j| {
            // inv_pows[l][i-1] = 1 / (l + j/D)^i
            let inv_pows: Vec<Vec<BigRat>> = (0..=n)
                .map(|l| {
                    let base = (rat(l as i64, 1) + rat(j as i64, d as i64)).recip();
                    let mut p = BigRat::one();
                    (0..s)
                        .map(|_| {
                            p *= &base;
                            p.clone()
                        })
                        .collect()
                })
                .collect();
            let mut total = BigRat::zero();
            for k in 0..=n as usize {
                for pows in inv_pows.iter().take(k + 1) {
                    for (i, p) in pows.iter().enumerate() {
                        let a = &pf.a[i][k];
                        if !a.is_zero() {
                            total += a * p;
                        }
                    }
                }
            }
            (j, -total)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    Ok(LinearFormCoefficients { params: pf.params, rho, rho0 })
}

/// Scaled values `d_n^{s+1-i} rho_i` and `d_{n+1}^{s+1} rho_{0,j}` with pass flags.
#[derive(Debug, Clone)]
pub struct IntegralityCertificate {
    pub params: Params,
    pub rho_scaled: BTreeMap<u32, BigRat>,
    pub rho0_scaled: BTreeMap<u32, BigRat>,
    pub rho_ok: BTreeMap<u32, bool>,
    pub rho0_ok: BTreeMap<u32, bool>,
    pub pass: bool,
}

impl IntegralityCertificate {
    pub fn to_json(&self) -> Value {
        let table = |scaled: &BTreeMap<u32, BigRat>, ok: &BTreeMap<u32, bool>| -> Value {
            scaled
                .iter()
                .map(|(k, v)| {
                    (k.to_string(), json!({ "value": rat_to_string(v), "integral": ok[k] }))
                })
                .collect::<serde_json::Map<_, _>>()
                .into()
        };
        json!({
            "schema": SCHEMA,
            "kind": "integrality_certificate",
            "s": self.params.s,
            "D": self.params.d,
            "n": self.params.n,
            "rho_scaled": table(&self.rho_scaled, &self.rho_ok),
            "rho0_scaled": table(&self.rho0_scaled, &self.rho0_ok),
            "pass": self.pass,
        })
    }
}

pub fn verify_integrality(lf: &LinearFormCoefficients) -> IntegralityCertificate {
    let Params { s, n, .. } = lf.params;
    let dn = lcm_upto(n as u64);
    let dn1 = lcm_upto(n as u64 + 1);
    let rho_scaled: BTreeMap<u32, BigRat> = lf
        .rho
        .iter()
        .map(|(&i, r)| (i, r * rat_int(num_traits::pow(dn.clone(), (s + 1 - i) as usize))))
        .collect();
    let scale0 = rat_int(num_traits::pow(dn1, (s + 1) as usize));
    let rho0_scaled: BTreeMap<u32, BigRat> =
        lf.rho0.iter().map(|(&j, r)| (j, r * &scale0)).collect();
    let rho_ok: BTreeMap<u32, bool> = rho_scaled.iter().map(|(&i, v)| (i, is_integer(v))).collect();
    let rho0_ok: BTreeMap<u32, bool> =
        rho0_scaled.iter().map(|(&j, v)| (j, is_integer(v))).collect();
    let pass = rho_ok.values().chain(rho0_ok.values()).all(|&b| b);
    IntegralityCertificate { params: lf.params, rho_scaled, rho0_scaled, rho_ok, rho0_ok, pass }
}

/// `d_n^{s+1-i} a_{i,k}` is an integer for every `i`, `k`.
pub fn coefficient_level_integrality(pf: &PartialFractionExpansion) -> bool {
    let Params { s, n, .. } = pf.params;
    let dn = lcm_upto(n as u64);
    pf.a.iter().enumerate().all(|(idx, row)| {
        let i = idx as u32 + 1;
        let scale = rat_int(num_traits::pow(dn.clone(), (s + 1 - i) as usize));
        row.iter().all(|a| is_integer(&(a * &scale)))
    })
}

/// Whether `d_n^{e} rho_i` is integral for the given exponent; used to probe how
/// tight the `e = s + 1 - i` scaling is.
pub fn rho_integral_with_exponent(lf: &LinearFormCoefficients, i: u32, exponent: u32) -> bool {
    let dn: BigInt = lcm_upto(lf.params.n as u64);
    is_integer(&(lf.rho(i) * rat_int(num_traits::pow(dn, exponent as usize))))
}

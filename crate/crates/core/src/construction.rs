//! The rational function `R_n(t)` and its exact partial-fraction expansion.
//!
//! ```text
//! R_n(t) = D^{3Dn} n!^{s+1-3D} prod_{j=0}^{3Dn} (t - n + j/D) / prod_{k=0}^{n} (t + k)^{s+1}
//!        = sum_{i=1}^{s} sum_{k=0}^{n} a_{i,k} / (t + k)^i
//! ```

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, ParamError, Result};
use crate::exact_arith::{
    binomial, factorial, parse_rat, rat, rat_int, rat_to_string, series_inv, series_mul,
    series_shift, BigRat, PolySeries,
};
use crate::SCHEMA;

/// A validated `(s, D, n)`: `s` odd, `s >= 3D`, `D*n` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub s: u32,
    #[serde(rename = "D")]
    pub d: u32,
    pub n: u32,
}

pub fn make_params(s: i64, d: i64, n: i64) -> std::result::Result<Params, ParamError> {
    for (name, value) in [("s", s), ("D", d), ("n", n)] {
        if value <= 0 {
            return Err(ParamError::NonPositive { name, value });
        }
    }
    if s % 2 == 0 {
        return Err(ParamError::EvenS { s });
    }
    if s < 3 * d {
        return Err(ParamError::SBelowThreeD { s, three_d: 3 * d });
    }
    if (d * n) % 2 != 0 {
        return Err(ParamError::OddDn { d, n });
    }
    let narrow = |name, v: i64| {
        u32::try_from(v).map_err(|_| ParamError::NonPositive { name, value: v })
    };
    Ok(Params {
        s: narrow("s", s)?,
        d: narrow("D", d)?,
        n: narrow("n", n)?,
    })
}

impl Params {
    pub fn new(s: i64, d: i64, n: i64) -> std::result::Result<Self, ParamError> {
        make_params(s, d, n)
    }

    /// `D^{3Dn} n!^{s+1-3D}`.
    pub fn scalar(&self) -> BigInt {
        let d = BigInt::from(self.d);
        num_traits::pow(d, (3 * self.d * self.n) as usize)
            * num_traits::pow(factorial(self.n as u64), (self.s + 1 - 3 * self.d) as usize)
    }

    pub fn numerator_degree(&self) -> u64 {
        3 * self.d as u64 * self.n as u64 + 1
    }

    pub fn denominator_degree(&self) -> u64 {
        (self.n as u64 + 1) * (self.s as u64 + 1)
    }
}

/// Zeros, poles and normalising scalar of `R_n`.
#[derive(Debug, Clone)]
pub struct RationalFunctionSpec {
    pub params: Params,
    /// `n - j/D` for `0 <= j <= 3Dn`.
    pub numerator_roots: Vec<BigRat>,
    /// `-k` for `0 <= k <= n`, each of multiplicity `s + 1`.
    pub denominator_roots: Vec<i64>,
    pub scalar: BigInt,
}

impl RationalFunctionSpec {
    pub fn new(params: Params) -> Self {
        let Params { s: _, d, n } = params;
        let numerator_roots = (0..=3 * d * n)
            .map(|j| rat(n as i64, 1) - rat(j as i64, d as i64))
            .collect();
        let denominator_roots = (0..=n as i64).map(|k| -k).collect();
        let spec = RationalFunctionSpec {
            params,
            numerator_roots,
            denominator_roots,
            scalar: params.scalar(),
        };
        debug_assert!(spec.degree_gap() >= 2);
        spec
    }

    pub fn multiplicity(&self) -> u32 {
        self.params.s + 1
    }

    pub fn degree_gap(&self) -> i64 {
        self.params.denominator_degree() as i64 - self.params.numerator_degree() as i64
    }

    /// The numerator with denominators cleared: `prod_{j=0}^{3Dn} (D t - D n + j)`,
    /// so that `R_n(t) = n!^{s+1-3D} / D * N(t) / prod (t+k)^{s+1}`.
    pub fn integer_numerator(&self) -> PolySeries {
        let Params { d, n, .. } = self.params;
        let mut coeffs: Vec<BigInt> = vec![BigInt::one()];
        for j in 0..=3 * d * n {
            let c0 = BigInt::from(j as i64 - (d * n) as i64);
            let mut next = vec![BigInt::zero(); coeffs.len() + 1];
            for (i, x) in coeffs.iter().enumerate() {
                next[i] += x * &c0;
                next[i + 1] += x * d;
            }
            coeffs = next;
        }
        PolySeries::polynomial(coeffs.into_iter().map(BigRat::from_integer).collect())
    }

    fn cleared_scalar(&self) -> BigRat {
        let Params { s, d, n } = self.params;
        let nf = num_traits::pow(factorial(n as u64), (s + 1 - 3 * d) as usize);
        BigRat::new(nf, BigInt::from(d))
    }

    pub fn evaluate(&self, t: &BigRat) -> Result<BigRat> {
        evaluate_r(self, t)
    }
}

/// Exact value of `R_n(t)`.
pub fn evaluate_r(spec: &RationalFunctionSpec, t: &BigRat) -> Result<BigRat> {
    let mut den = BigRat::one();
    for &k in &spec.denominator_roots {
        let f = t - rat_int(k);
        if f.is_zero() {
            return Err(Error::Pole(rat_to_string(t)));
        }
        den *= f;
    }
    let num: BigRat = spec.numerator_roots.iter().map(|r| t - r).product();
    let den = num_traits::pow(den, spec.multiplicity() as usize);
    Ok(rat_int(spec.scalar.clone()) * num / den)
}

/// Exact coefficients `a_{i,k}` (`1 <= i <= s`, `0 <= k <= n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFractionExpansion {
    pub params: Params,
    /// `a[i-1][k]`.
    pub a: Vec<Vec<BigRat>>,
}

impl PartialFractionExpansion {
    pub fn coeff(&self, i: u32, k: u32) -> &BigRat {
        &self.a[(i - 1) as usize][k as usize]
    }

    /// `sum_k a_{1,k}`, which vanishes because the degree gap is at least 2.
    pub fn residue_sum(&self) -> BigRat {
        self.a[0].iter().sum()
    }

    /// Whether `a_{i,n-k} = (-1)^{i+1} a_{i,k}` for every entry.
    pub fn is_symmetric(&self) -> bool {
        let n = self.params.n as usize;
        self.a.iter().enumerate().all(|(idx, row)| {
            let i = idx + 1;
            (0..=n).all(|k| {
                let mirrored = &row[n - k];
                if i % 2 == 1 {
                    *mirrored == row[k]
                } else {
                    *mirrored == -&row[k]
                }
            })
        })
    }

    /// `sum_{i,k} a_{i,k} / (t + k)^i`.
    pub fn reconstruct(&self, t: &BigRat) -> Result<BigRat> {
        let mut total = BigRat::zero();
        for k in 0..=self.params.n {
            let base = t + rat_int(k as i64);
            if base.is_zero() {
                return Err(Error::Pole(rat_to_string(t)));
            }
            let inv = base.recip();
            let mut pow = BigRat::one();
            for row in &self.a {
                pow *= &inv;
                total += &row[k as usize] * &pow;
            }
        }
        Ok(total)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<String>> = self
            .a
            .iter()
            .map(|row| row.iter().map(rat_to_string).collect())
            .collect();
        json!({
            "schema": SCHEMA,
            "s": self.params.s,
            "D": self.params.d,
            "n": self.params.n,
            "a": rows,
        })
    }

    /// Parses the JSON produced by [`PartialFractionExpansion::to_json`], re-validating
    /// the parameters and the matrix shape.
    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Parse(format!("missing integer field {name:?}")))
        };
        let params = make_params(field("s")?, field("D")?, field("n")?)?;
        let rows = v
            .get("a")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array field \"a\"".into()))?;
        if rows.len() != params.s as usize {
            return Err(Error::Parse(format!("expected {} rows, got {}", params.s, rows.len())));
        }
        let mut a = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .filter(|r| r.len() == params.n as usize + 1)
                .ok_or_else(|| Error::Parse("row has wrong length".into()))?;
            let parsed = row
                .iter()
                .map(|x| {
                    x.as_str()
                        .ok_or_else(|| Error::Parse("coefficients must be strings".into()))
                        .and_then(parse_rat)
                })
                .collect::<Result<Vec<_>>>()?;
            a.push(parsed);
        }
        Ok(PartialFractionExpansion { params, a })
    }
}

/// Per-pole Taylor expansion. At `t = u - k`,
/// `Q_k(u) = R_n(u - k) u^{s+1} = c * N(u - k) / prod_{k' != k} (u + k' - k)^{s+1}`
/// and `a_{i,k}` is the coefficient of `u^{s+1-i}`.
pub fn partial_fractions(spec: &RationalFunctionSpec) -> PartialFractionExpansion {
    let Params { s, n, .. } = spec.params;
    let order = s as usize;
    let numerator = spec.integer_numerator();
    let scalar = spec.cleared_scalar();
    let mult = spec.multiplicity() as u64;

    let columns: Vec<Vec<BigRat>> = (0..=n as i64)
        .into_par_iter()
        .map(|k| {
            let shifted = series_shift(&numerator, &rat(-k, 1), order);
            let mut den = PolySeries::one();
            for kp in 0..=n as i64 {
                if kp == k {
                    continue;
                }
                // (u + m)^{s+1} by the binomial theorem, truncated.
                let m = BigInt::from(kp - k);
                let factor: Vec<BigRat> = (0..=order.min(mult as usize))
                    .map(|r| {
                        rat_int(
                            binomial(mult, r as u64)
                                * num_traits::pow(m.clone(), mult as usize - r),
                        )
                    })
                    .collect();
                den = series_mul(&den, &PolySeries::series(factor, order), order);
            }
            let inv = series_inv(&den, order).expect("poles are distinct");
            let q = series_mul(&shifted, &inv, order);
            assert!(
                q.coeff(0).is_zero(),
                "numerator must vanish at every pole of R_n"
            );
            (1..=s as usize)
                .map(|i| q.coeff(s as usize + 1 - i) * &scalar)
                .collect()
        })
        .collect();

    let a = (0..s as usize)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    PartialFractionExpansion {
        params: spec.params,
        a,
    }
}

/// The integers `A_{alpha,k}` of `F_alpha(t) = sum_k A_{alpha,k} / (t + k)` where
/// `F_alpha(t) = D^n prod_{j=1}^n (t + alpha + j/D) / prod_{j=0}^n (t + j)`.
pub fn factor_coeffs_a(alpha: &BigRat, params: &Params) -> Result<Vec<BigInt>> {
    let Params { d, n, .. } = *params;
    let scaled = alpha * rat_int(d as i64);
    if !scaled.is_integer() {
        return Err(Error::NotInLattice(rat_to_string(alpha)));
    }
    let d_alpha = scaled.to_integer();
    let n_big = BigInt::from(n);
    let coeffs = (0..=n as u64)
        .map(|k| {
            // m = D(alpha - k)
            let m = &d_alpha - BigInt::from(d as u64 * k);
            let value = if !m.is_negative() {
                binomial(n as u64, k) * binomial_big(&(&m + &n_big), n as u64)
            } else if -&m <= n_big {
                BigInt::zero()
            } else {
                let sign = if n % 2 == 0 { 1 } else { -1 };
                binomial(n as u64, k) * binomial_big(&(-&m - 1), n as u64) * sign
            };
            if k % 2 == 0 {
                value
            } else {
                -value
            }
        })
        .collect();
    Ok(coeffs)
}

fn binomial_big(top: &BigInt, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (top - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

/// `G(t) = n! / prod_{j=0}^n (t + j) = sum_k (-1)^k C(n,k) / (t + k)`.
pub fn g_coeffs(n: u32) -> Vec<BigInt> {
    (0..=n as u64)
        .map(|k| {
            let b = binomial(n as u64, k);
            if k % 2 == 0 {
                b
            } else {
                -b
            }
        })
        .collect()
}

/// The shifts `alpha = -n + l n / D`, `0 <= l < 3D`, of the `F_alpha` factors.
pub fn factor_alphas(params: &Params) -> Vec<BigRat> {
    let Params { d, n, .. } = *params;
    (0..3 * d)
        .map(|l| rat(-(n as i64), 1) + rat((l * n) as i64, d as i64))
        .collect()
}

/// Evaluates the product form `(t - n) G(t)^{s+1-3D} prod_l F_{alpha_l}(t)` using the
/// simple-pole expansions of `G` and every `F_alpha`.
pub fn evaluate_factored(params: &Params, t: &BigRat) -> Result<BigRat> {
    let simple = |coeffs: &[BigInt]| -> Result<BigRat> {
        let mut acc = BigRat::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let base = t + rat_int(k as i64);
            if base.is_zero() {
                return Err(Error::Pole(rat_to_string(t)));
            }
            acc += rat_int(c.clone()) / base;
        }
        Ok(acc)
    };
    let g = simple(&g_coeffs(params.n))?;
    let mut value = (t - rat_int(params.n as i64))
        * num_traits::pow(g, (params.s + 1 - 3 * params.d) as usize);
    for alpha in factor_alphas(params) {
        value *= simple(&factor_coeffs_a(&alpha, params)?)?;
    }
    Ok(value)
}

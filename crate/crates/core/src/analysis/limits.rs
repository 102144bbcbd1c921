//! Sweeps over `n` for the limits `r_{n,j}^{1/n} -> g(x_0)` and `r_{n,j'}/r_{n,j} -> 1`.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::prec::PrecReal;
use super::rate::find_x0;
use super::series::sum_series_relative;
use crate::construction::make_params;
use crate::error::Result;
use crate::exact_arith::{rat, BigRat};
use crate::SCHEMA;

/// One `(n, j)` cell of a sweep.
#[derive(Debug, Clone)]
pub struct LimitRow {
    pub n: u32,
    pub j: u32,
    pub r: PrecReal,
    pub ln_r: PrecReal,
    /// `r_{n,j}^{1/n}`.
    pub nth_root: PrecReal,
    /// `r_{n,j} / r_{n,1}`.
    pub ratio_to_j1: PrecReal,
}

#[derive(Debug, Clone)]
pub struct LimitsTable {
    pub s: u32,
    pub d: u32,
    pub rows: Vec<LimitRow>,
    pub log_gx0: PrecReal,
    /// `(n, n', (ln r_{n',1} - ln r_{n,1}) / (n' - n))` for consecutive sweep points.
    pub log_ratios: Vec<(u32, u32, PrecReal)>,
}

impl LimitsTable {
    pub fn row(&self, n: u32, j: u32) -> Option<&LimitRow> {
        self.rows.iter().find(|r| r.n == n && r.j == j)
    }

    /// `|r_{n,j}/r_{n,1} - 1|` in sweep order, as `f64`.
    pub fn ratio_deviations(&self, j: u32) -> Vec<(u32, f64)> {
        self.rows
            .iter()
            .filter(|r| r.j == j)
            .map(|r| (r.n, r.ratio_to_j1.add(&PrecReal::from_int(-1, r.ratio_to_j1.prec())).to_f64().abs()))
            .collect()
    }

    /// `|log-ratio - log g(x_0)|` in sweep order, as `f64`.
    pub fn rate_deviations(&self) -> Vec<(u32, f64)> {
        let lg = self.log_gx0.to_f64();
        self.log_ratios.iter().map(|(_, n2, v)| (*n2, (v.to_f64() - lg).abs())).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,r_value,nth_root,ratio_to_j1\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.j,
                r.r.to_decimal_string(),
                r.nth_root.to_decimal_string(),
                r.ratio_to_j1.to_decimal_string()
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "j": r.j,
                    "r_value": r.r.to_decimal_string(),
                    "nth_root": r.nth_root.to_decimal_string(),
                    "ratio_to_j1": r.ratio_to_j1.to_decimal_string(),
                })
            })
            .collect();
        let steps: Vec<Value> = self
            .log_ratios
            .iter()
            .map(|(a, b, v)| json!({ "from": a, "to": b, "log_ratio_per_n": v.to_decimal_string() }))
            .collect();
        json!({
            "schema": SCHEMA,
            "kind": "empirical_limits",
            "s": self.s,
            "D": self.d,
            "log_g_x0": self.log_gx0.to_decimal_string(),
            "rows": rows,
            "log_ratios": steps,
        })
    }
}

/// Evaluates `r_{n,j}` for every `n` in `ns` and every `j` in `1..=D` with about
/// `rel_bits + 2n` leading bits, in parallel over `n`. The extra bits keep
/// `r_{n,j}/r_{n,1} - 1`, which shrinks geometrically in `n`, resolvable.
pub fn empirical_limits(s: u32, d: u32, ns: &[u32], rel_bits: u32) -> Result<LimitsTable> {
    let report = find_x0(s, d, rel_bits.max(64))?;
    let per_n: Vec<Result<Vec<LimitRow>>> = ns
        .par_iter()
        .map(|&n| {
            let params = make_params(s as i64, d as i64, n as i64)?;
            let bits = rel_bits + 2 * n;
            let w = bits + 16;
            let mut vals = Vec::with_capacity(d as usize);
            for j in 1..=d {
                let r = sum_series_relative(&params, j, bits + 8)?;
                let ln_r = r.ln(w)?;
                vals.push((j, r, ln_r));
            }
            let ln_r1 = vals[0].2.clone();
            let inv_n: BigRat = rat(1, n as i64);
            vals.into_iter()
                .map(|(j, r, ln_r)| {
                    let nth_root = ln_r.mul_rat(&inv_n).exp(w)?;
                    let ratio_to_j1 = ln_r.sub(&ln_r1).exp(w)?;
                    Ok(LimitRow { n, j, r, ln_r, nth_root, ratio_to_j1 })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_n {
        rows.extend(r?);
    }
    let firsts: Vec<&LimitRow> = rows.iter().filter(|r| r.j == 1).collect();
    let log_ratios = firsts
        .windows(2)
        .map(|p| {
            let step = rat(1, (p[1].n as i64) - (p[0].n as i64));
            (p[0].n, p[1].n, p[1].ln_r.sub(&p[0].ln_r).mul_rat(&step))
        })
        .collect();
    Ok(LimitsTable { s, d, rows, log_gx0: report.log_gx0, log_ratios })
}

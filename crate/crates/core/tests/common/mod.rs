//! Independent reference computations shared by the integration tests. None of
//! them call into the library's expansion, series or zeta code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `R_n(t)` straight from the defining product.
pub fn r_direct(s: u32, d: u32, n: u32, t: &Q) -> Q {
    let dq = q(d as i64, 1);
    let mut num = num_traits::pow(dq.clone(), (3 * d * n) as usize);
    let e = s as i64 + 1 - 3 * d as i64;
    let nf = Q::from_integer(factorial(n as u64));
    num *= if e >= 0 { num_traits::pow(nf, e as usize) } else { num_traits::pow(nf.recip(), (-e) as usize) };
    for j in 0..=3 * d * n {
        num *= t - q(n as i64, 1) + q(j as i64, d as i64);
    }
    let mut den = Q::one();
    for k in 0..=n {
        den *= num_traits::pow(t + q(k as i64, 1), (s + 1) as usize);
    }
    num / den
}

/// Solves a square system by Gaussian elimination over the rationals.
#[allow(clippy::needless_range_loop)]
pub fn solve(mut m: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Vec<Q> {
    let size = m.len();
    for col in 0..size {
        let piv = (col..size).find(|&r| !m[r][col].is_zero()).expect("singular system");
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].recip();
        for r in 0..size {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                for c in col..size {
                    let v = &f * &m[col][c];
                    m[r][c] -= v;
                }
                let v = &f * &rhs[col];
                rhs[r] -= v;
            }
        }
    }
    (0..size).map(|i| &rhs[i] / &m[i][i]).collect()
}

/// `a[i-1][k]` recovered by evaluating `R_n` at rational points `p/q`, `q` in {7, 11, 13},
/// and solving the linear system for the unknown coefficients. Two extra points are
/// used as a consistency check.
pub fn interpolation_oracle(s: u32, d: u32, n: u32) -> Vec<Vec<Q>> {
    let unknowns: Vec<(u32, u32)> = (1..=s).flat_map(|i| (0..=n).map(move |k| (i, k))).collect();
    let count = unknowns.len();
    let mut points = Vec::new();
    let mut p = 1i64;
    while points.len() < count + 2 {
        for den in [7i64, 11, 13] {
            if points.len() < count + 2 && p % den != 0 {
                points.push(q(p, den));
            }
        }
        p += 1;
    }
    let row = |t: &Q| -> Vec<Q> {
        unknowns.iter().map(|&(i, k)| num_traits::pow((t + q(k as i64, 1)).recip(), i as usize)).collect()
    };
    let m: Vec<Vec<Q>> = points[..count].iter().map(row).collect();
    let rhs: Vec<Q> = points[..count].iter().map(|t| r_direct(s, d, n, t)).collect();
    let sol = solve(m, rhs);
    for t in &points[count..] {
        let v: Q = row(t).iter().zip(&sol).map(|(a, b)| a * b).sum();
        assert_eq!(v, r_direct(s, d, n, t), "interpolation check point");
    }
    let mut a = vec![vec![Q::zero(); n as usize + 1]; s as usize];
    for ((i, k), v) in unknowns.into_iter().zip(sol) {
        a[i as usize - 1][k as usize] = v;
    }
    a
}

/// Partial fractions of a product of simple-pole factors, by repeated use of
/// `1/((t+k)(t+k')) = (1/(t+k) - 1/(t+k')) / (k'-k)` and
/// `(t-n)/(t+k) = 1 - (k+n)/(t+k)`.
///
/// State: a constant plus `sum c_{k,a} / (t+k)^a`.
#[derive(Clone, Default)]
struct Pf {
    constant: Q,
    terms: BTreeMap<(i64, u32), Q>,
}

impl Pf {
    fn add(&mut self, k: i64, a: u32, c: Q) {
        if a == 0 {
            self.constant += c;
            return;
        }
        let e = self.terms.entry((k, a)).or_insert_with(Q::zero);
        *e += c;
    }

    /// Multiplies by `sum_k' r_k' / (t+k')`.
    fn times_simple(&self, factor: &BTreeMap<i64, Q>) -> Pf {
        let mut out = Pf::default();
        for (&k2, r) in factor {
            out.add(k2, 1, &self.constant * r);
        }
        for (&(k, a), c) in &self.terms {
            for (&k2, r) in factor {
                let coef = c * r;
                if k == k2 {
                    out.add(k, a + 1, coef);
                    continue;
                }
                // 1/((t+k)^a (t+k2)) = (1/(t+k)^a - 1/((t+k)^(a-1)(t+k2))) / (k2-k)
                let inv = q(1, k2 - k);
                let mut scale = coef;
                for b in (1..=a).rev() {
                    out.add(k, b, &scale * &inv);
                    scale = -(&scale * &inv);
                }
                out.add(k2, 1, scale);
            }
        }
        out
    }

    fn times_t_minus(&self, n: i64) -> Pf {
        assert!(self.constant.is_zero(), "polynomial part would have positive degree");
        let mut out = Pf::default();
        for (&(k, a), c) in &self.terms {
            // (t-n)/(t+k)^a = 1/(t+k)^(a-1) - (k+n)/(t+k)^a
            out.add(k, a - 1, c.clone());
            out.add(k, a, -(c * q(k + n, 1)));
        }
        out
    }
}

fn simple_residues(num_roots: &[Q], scale: &Q, n: u32) -> BTreeMap<i64, Q> {
    // scale * prod (t - root) / prod_{j=0}^n (t + j), with n roots
    (0..=n as i64)
        .map(|k| {
            let t = q(-k, 1);
            let mut v = scale.clone();
            for r in num_roots {
                v *= &t - r;
            }
            for j in 0..=n as i64 {
                if j != k {
                    v /= &t + q(j, 1);
                }
            }
            (k, v)
        })
        .collect()
}

/// `a[i-1][k]` by the product decomposition `(t-n) G^{s+1-3D} prod_l F_{-n+ln/D}`.
pub fn reduction_oracle(s: u32, d: u32, n: u32) -> Vec<Vec<Q>> {
    let nf = Q::from_integer(factorial(n as u64));
    let g = simple_residues(&[], &nf, n);
    let mut acc = Pf { constant: Q::one(), terms: BTreeMap::new() };
    for _ in 0..(s + 1 - 3 * d) {
        acc = acc.times_simple(&g);
    }
    let dn = num_traits::pow(q(d as i64, 1), n as usize);
    for l in 0..3 * d {
        let alpha = q(-(n as i64), 1) + q((l * n) as i64, d as i64);
        let roots: Vec<Q> = (1..=n).map(|j| -(&alpha + q(j as i64, d as i64))).collect();
        acc = acc.times_simple(&simple_residues(&roots, &dn, n));
    }
    let acc = acc.times_t_minus(n as i64);
    assert!(acc.constant.is_zero());
    let mut a = vec![vec![Q::zero(); n as usize + 1]; s as usize];
    for ((k, i), c) in acc.terms {
        if c.is_zero() {
            continue;
        }
        assert!(i >= 1 && i <= s, "unexpected pole order {i}");
        a[i as usize - 1][k as usize] = c;
    }
    a
}

/// Rational bracket `[lo, hi]` around `pi` from Machin's formula
/// `pi = 16 atan(1/5) - 4 atan(1/239)` and alternating-series bounds.
pub fn pi_bracket(bits: u32) -> (Q, Q) {
    // partial sums of atan(1/x) alternate around the limit; the error is below the next term
    let atan = |x: i64| -> (Q, Q) {
        let x2 = BigInt::from(x * x);
        let mut sum = Q::zero();
        let mut pow = BigInt::from(x);
        let mut m = 0u64;
        let tol = Q::new(BigInt::one(), BigInt::one() << (bits + 8));
        loop {
            let term = Q::new(BigInt::one(), &pow * BigInt::from(2 * m + 1));
            if term < tol {
                return (sum.clone() - &term, sum + term);
            }
            if m.is_multiple_of(2) {
                sum += term;
            } else {
                sum -= term;
            }
            pow *= &x2;
            m += 1;
        }
    };
    let (a_lo, a_hi) = atan(5);
    let (b_lo, b_hi) = atan(239);
    (q(16, 1) * a_lo - q(4, 1) * b_hi, q(16, 1) * a_hi - q(4, 1) * b_lo)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Schur polynomial `s_lambda(xs)` as a sum over semistandard tableaux.
pub fn schur_by_tableaux(lambda: &[u32], xs: &[Q]) -> Q {
    let mut shape: Vec<usize> = lambda.iter().map(|&l| l as usize).filter(|&l| l > 0).collect();
    shape.sort_unstable_by(|a, b| b.cmp(a));
    let cells: Vec<(usize, usize)> =
        shape.iter().enumerate().flat_map(|(r, &len)| (0..len).map(move |c| (r, c))).collect();
    let mut fill = vec![vec![0usize; shape.first().copied().unwrap_or(0)]; shape.len()];
    fn rec(idx: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<usize>>, xs: &[Q], acc: &mut Q) {
        if idx == cells.len() {
            let mut term = Q::one();
            for &(r, c) in cells {
                term *= &xs[fill[r][c]];
            }
            *acc += term;
            return;
        }
        let (r, c) = cells[idx];
        let lo_row = if c > 0 { fill[r][c - 1] } else { 0 };
        let lo_col = if r > 0 { fill[r - 1][c] + 1 } else { 0 };
        for v in lo_row.max(lo_col)..xs.len() {
            fill[r][c] = v;
            rec(idx + 1, cells, fill, xs, acc);
        }
    }
    let mut acc = Q::zero();
    rec(0, &cells, &mut fill, xs, &mut acc);
    acc
}

/// `prod_{i<j} (x_j - x_i)`.
pub fn vandermonde_product(xs: &[Q]) -> Q {
    let mut v = Q::one();
    for j in 0..xs.len() {
        for i in 0..j {
            v *= &xs[j] - &xs[i];
        }
    }
    v
}

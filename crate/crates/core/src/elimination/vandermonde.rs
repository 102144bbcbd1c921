//! Exact generalized Vandermonde determinants `det [x_j^{alpha_i}]` and the
//! associated Schur polynomial values.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{rat_to_string, BigRat};

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let t = m.len();
    if t == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..t - 1 {
        if m[k][k].is_zero() {
            match (k + 1..t).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..t {
            for j in k + 1..t {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[t - 1][t - 1]
}

fn check_inputs(xs: &[BigRat], alphas: &[u32]) -> Result<()> {
    if xs.is_empty() || xs.len() != alphas.len() {
        return Err(Error::Vandermonde(format!(
            "need equally many nodes and exponents (got {} and {})",
            xs.len(),
            alphas.len()
        )));
    }
    if let Some(x) = xs.iter().find(|x| !x.is_positive()) {
        return Err(Error::Vandermonde(format!("node {} is not positive", rat_to_string(x))));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Vandermonde("nodes must be strictly increasing".into()));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Vandermonde("exponents must be strictly increasing".into()));
    }
    Ok(())
}

/// `det [x_j^{alpha_i}]`; positive for increasing positive nodes and increasing exponents.
pub fn gen_vandermonde_det(xs: &[BigRat], alphas: &[u32]) -> Result<BigRat> {
    check_inputs(xs, alphas)?;
    let amax = *alphas.last().unwrap() as usize;
    // column j times q_j^amax is integral: p_j^alpha q_j^(amax - alpha)
    let m: Vec<Vec<BigInt>> = alphas
        .iter()
        .map(|&a| {
            xs.iter()
                .map(|x| {
                    num_traits::pow(x.numer().clone(), a as usize)
                        * num_traits::pow(x.denom().clone(), amax - a as usize)
                })
                .collect()
        })
        .collect();
    let cleared: BigInt = xs.iter().map(|x| num_traits::pow(x.denom().clone(), amax)).product();
    Ok(BigRat::new(bareiss_det(m), cleared))
}

/// Classical Vandermonde `prod_{i<j} (x_j - x_i)`.
pub fn vandermonde(xs: &[BigRat]) -> BigRat {
    let mut v = BigRat::one();
    for j in 0..xs.len() {
        for i in 0..j {
            v *= &xs[j] - &xs[i];
        }
    }
    v
}

/// Partition `lambda_i = alpha_{t+1-i} + i - t` attached to the exponents.
pub fn partition_of(alphas: &[u32]) -> Vec<u32> {
    let t = alphas.len();
    (1..=t).map(|i| alphas[t - i] + i as u32 - t as u32).collect()
}

/// `s_lambda(xs) = det / vandermonde`, checked to be positive.
pub fn schur_positivity_check(xs: &[BigRat], alphas: &[u32]) -> Result<BigRat> {
    let det = gen_vandermonde_det(xs, alphas)?;
    let s = det / vandermonde(xs);
    if !s.is_positive() {
        return Err(Error::Vandermonde(format!("Schur value {} is not positive", rat_to_string(&s))));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{rat, rat_int};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigRat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    // Leibniz expansion, independent of the elimination code.
    fn leibniz(m: &[Vec<BigRat>]) -> BigRat {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(k - 1) {
                for pos in 0..k {
                    let mut q = p.clone();
                    q.insert(pos, k - 1);
                    out.push(q);
                }
            }
            out
        }
        let t = m.len();
        let mut total = BigRat::zero();
        for p in perms(t) {
            let inversions = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let mut term = BigRat::one();
            for (i, &pi) in p.iter().enumerate() {
                term *= &m[i][pi];
            }
            if inversions % 2 == 1 {
                term = -term;
            }
            total += term;
        }
        total
    }

    // Schur polynomial as a sum over semistandard tableaux of shape lambda.
    fn schur_by_tableaux(lambda: &[u32], xs: &[BigRat]) -> BigRat {
        let shape: Vec<usize> = lambda.iter().rev().map(|&l| l as usize).filter(|&l| l > 0).collect();
        let shape: Vec<usize> = {
            let mut s = shape;
            s.sort_unstable_by(|a, b| b.cmp(a));
            s
        };
        let cells: Vec<(usize, usize)> =
            shape.iter().enumerate().flat_map(|(r, &len)| (0..len).map(move |c| (r, c))).collect();
        let mut fill = vec![vec![0usize; shape.first().copied().unwrap_or(0)]; shape.len()];
        fn rec(
            idx: usize,
            cells: &[(usize, usize)],
            fill: &mut Vec<Vec<usize>>,
            xs: &[BigRat],
            acc: &mut BigRat,
        ) {
            if idx == cells.len() {
                let mut term = BigRat::one();
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
        let mut acc = BigRat::zero();
        rec(0, &cells, &mut fill, xs, &mut acc);
        acc
    }

    #[test]
    fn small_examples() {
        assert_eq!(gen_vandermonde_det(&[rat(3, 2)], &[4]).unwrap(), rat(81, 16));
        assert_eq!(gen_vandermonde_det(&ints(&[1, 2]), &[0, 2]).unwrap(), rat(3, 1));
        let xs = ints(&[2, 3, 5, 7]);
        assert_eq!(gen_vandermonde_det(&xs, &[0, 1, 2, 3]).unwrap(), vandermonde(&xs));
        assert_eq!(schur_positivity_check(&xs, &[0, 1, 2, 3]).unwrap(), rat(1, 1));
        assert_eq!(schur_positivity_check(&ints(&[1, 2]), &[0, 2]).unwrap(), rat(3, 1));
        assert_eq!(partition_of(&[0, 2]), vec![1, 0]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(gen_vandermonde_det(&ints(&[2, 1]), &[0, 1]).is_err());
        assert!(gen_vandermonde_det(&ints(&[1, 2]), &[1, 1]).is_err());
        assert!(gen_vandermonde_det(&[rat(0, 1), rat(1, 1)], &[0, 1]).is_err());
        assert!(gen_vandermonde_det(&ints(&[1, 2]), &[0]).is_err());
    }

    #[test]
    fn bareiss_matches_leibniz_with_pivoting() {
        let m = vec![
            vec![BigInt::from(0), BigInt::from(2), BigInt::from(-1)],
            vec![BigInt::from(3), BigInt::from(0), BigInt::from(4)],
            vec![BigInt::from(1), BigInt::from(5), BigInt::from(2)],
        ];
        let r: Vec<Vec<BigRat>> = m.iter().map(|row| row.iter().map(|x| BigRat::from_integer(x.clone())).collect()).collect();
        assert_eq!(BigRat::from_integer(bareiss_det(m)), leibniz(&r));
    }

    fn nodes_and_exponents(max_t: usize, max_alpha: u32) -> impl Strategy<Value = (Vec<BigRat>, Vec<u32>)> {
        (1..=max_t).prop_flat_map(move |t| {
            (
                proptest::collection::btree_set((1i64..=50, 1i64..=50).prop_map(|(p, q)| (p, q)), t),
                proptest::collection::btree_set(0..=max_alpha, t),
            )
                .prop_filter_map("distinct nodes", move |(nodes, alphas)| {
                    let mut xs: Vec<BigRat> = nodes.into_iter().map(|(p, q)| rat(p, q)).collect();
                    xs.sort();
                    xs.dedup();
                    if xs.len() != t || alphas.len() != t {
                        return None;
                    }
                    Some((xs, alphas.into_iter().collect()))
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn determinant_is_positive((xs, alphas) in nodes_and_exponents(6, 30)) {
            let det = gen_vandermonde_det(&xs, &alphas).unwrap();
            prop_assert!(det.is_positive());
            if xs.len() <= 4 {
                let m: Vec<Vec<BigRat>> = alphas.iter().map(|&a| xs.iter().map(|x| num_traits::pow(x.clone(), a as usize)).collect()).collect();
                prop_assert_eq!(&det, &leibniz(&m));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn schur_identity((xs, alphas) in nodes_and_exponents(4, 5)) {
            let lambda = partition_of(&alphas);
            prop_assume!(lambda.iter().sum::<u32>() <= 8);
            let s = schur_by_tableaux(&lambda, &xs);
            let det = gen_vandermonde_det(&xs, &alphas).unwrap();
            prop_assert_eq!(det, &s * vandermonde(&xs));
            prop_assert_eq!(schur_positivity_check(&xs, &alphas).unwrap(), s);
        }
    }
}

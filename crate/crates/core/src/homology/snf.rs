//! Smith normal form over the integers (dense, arbitrary precision).
//!
//! Intended for verification on cell-sized matrices; the Betti pipeline
//! itself only needs ranks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntegerMatrix;

fn min_abs_nonzero(
    a: &[Vec<BigInt>],
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if a[i][j].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<BigInt>], x: usize, y: usize) {
    for row in a.iter_mut() {
        row.swap(x, y);
    }
}

/// Invariant factors `d1 | d2 | ... | dr` (all positive) of `m`; `r` is its rank.
pub fn smith_normal_form(m: &IntegerMatrix) -> Vec<BigInt> {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let mut a: Vec<Vec<BigInt>> = m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    let mut diag = Vec::new();

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_abs_nonzero(&a, t..rows, t..cols) else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                for j in t..cols {
                    let v = &a[t][j] * &q;
                    a[i][j] -= v;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                for row in a.iter_mut().skip(t) {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
                clean &= a[t][j].is_zero();
            }
            if clean {
                break;
            }
            // a remainder is now smaller than the pivot; bring it to (t, t)
            let in_col = min_abs_nonzero(&a, t..rows, t..t + 1);
            let in_row = min_abs_nonzero(&a, t..t + 1, t..cols);
            let (bi, bj) = match (in_col, in_row) {
                (Some(c), Some(r)) => {
                    if a[c.0][c.1].abs() <= a[r.0][r.1].abs() {
                        c
                    } else {
                        r
                    }
                }
                (Some(c), None) => c,
                (None, Some(r)) => r,
                (None, None) => unreachable!("pivot row and column cannot both vanish"),
            };
            a.swap(t, bi);
            swap_cols(&mut a, t, bj);
        }
        diag.push(a[t][t].abs());
    }

    // diagonal -> divisibility chain via pairwise (gcd, lcm)
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = &diag[i] / &g * &diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    }
    debug_assert!(diag.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
    diag
}

/// True when every invariant factor equals one.
pub fn is_unimodular_diagonal(factors: &[BigInt]) -> bool {
    factors.iter().all(One::is_one)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(rows: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&IntegerMatrix::from_dense(rows)).into_iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    /// Determinant by cofactor expansion.
    fn det(m: &[Vec<i64>]) -> i64 {
        match m.len() {
            0 => 1,
            1 => m[0][0],
            n => (0..n)
                .map(|j| {
                    let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    sign * m[0][j] * det(&minor)
                })
                .sum(),
        }
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (0..n)
            .flat_map(|last| {
                subsets(last, k - 1).into_iter().map(move |mut s| {
                    s.push(last);
                    s
                })
            })
            .collect()
    }

    /// Invariant factors from determinantal divisors: d_k = D_k / D_{k-1},
    /// D_k = gcd of all k x k minors.
    fn determinantal_factors(m: &[Vec<i64>]) -> Vec<i64> {
        let (rows, cols) = (m.len(), m.first().map_or(0, Vec::len));
        let mut prev = 1i64;
        let mut out = Vec::new();
        for k in 1..=rows.min(cols) {
            let mut g = 0i64;
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let minor: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                    g = g.gcd(&det(&minor));
                }
            }
            if g == 0 {
                break;
            }
            out.push(g / prev);
            prev = g;
        }
        out
    }

    #[test]
    fn small_examples() {
        assert_eq!(factors(&[vec![1, 0], vec![0, 1]]), vec![1, 1]);
        assert_eq!(factors(&[vec![2, 0], vec![0, 0]]), vec![2]);
        assert_eq!(factors(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(factors(&[vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(factors(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
    }

    #[test]
    fn agrees_with_determinantal_divisors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rows = rng.random_range(1..=4);
            let cols = rng.random_range(1..=4);
            let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-6..=6)).collect()).collect();
            assert_eq!(factors(&m), determinantal_factors(&m), "{m:?}");
        }
    }
}

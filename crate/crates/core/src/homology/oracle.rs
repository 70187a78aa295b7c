//! Independent cross-checks for the homology pipeline.
//!
//! None of these share code with the simplex enumeration or the rank routines.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, Zero};
use petgraph::unionfind::UnionFind;

use super::matrix::IntegerMatrix;
use super::HomologyError;
use crate::img::BinaryImage;

/// Largest dimension accepted by [`oracle_naive_rank`].
pub const NAIVE_RANK_LIMIT: usize = 500;

/// Number of 8-connected foreground components, by union-find over the
/// pixel grid.
pub fn oracle_beta0_unionfind(img: &BinaryImage) -> usize {
    let (h, w) = (img.height(), img.width());
    let mask = img.to_mask();
    let mut uf = UnionFind::<usize>::new(h * w);
    for r in 0..h {
        for c in 0..w {
            if !mask[r * w + c] {
                continue;
            }
            for (dr, dc) in [(-1isize, -1isize), (-1, 0), (-1, 1), (0, -1)] {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr >= 0 && nc >= 0 && (nc as usize) < w && mask[nr as usize * w + nc as usize] {
                    uf.union(r * w + c, nr as usize * w + nc as usize);
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..h * w).filter(|&i| mask[i]).map(|i| uf.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Number of 4-connected background components that do not touch the image
/// border, i.e. the holes of the foreground in the classical (8, 4) sense.
pub fn background_holes_4(img: &BinaryImage) -> usize {
    // pad by one pixel so the outside is a single component
    let (h, w) = (img.height() + 2, img.width() + 2);
    let mut bg = vec![true; h * w];
    for &(r, c) in img.foreground() {
        bg[(r + 1) * w + c + 1] = false;
    }
    let mut seen = vec![false; h * w];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..h * w {
        if !bg[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            let mut visit = |j: usize| {
                if bg[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
        }
    }
    // the padded border belongs to the single unbounded component
    components - 1
}

fn echelon_rank<T>(mut a: Vec<Vec<T>>, cols: usize) -> Option<usize>
where
    T: Clone + Zero + CheckedMul + CheckedSub + CheckedDiv,
{
    let rows = a.len();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].checked_div(&a[r][c])?;
            for j in c..cols {
                if a[r][j].is_zero() {
                    continue;
                }
                let delta = factor.checked_mul(&a[r][j])?;
                a[i][j] = a[i][j].checked_sub(&delta)?;
            }
        }
        r += 1;
    }
    Some(r)
}

/// Rank by textbook row reduction over exact rationals.
///
/// Runs with 128-bit rationals and redoes the work with big rationals if any
/// intermediate value overflows.
pub fn oracle_naive_rank(m: &IntegerMatrix) -> Result<usize, HomologyError> {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    if rows > NAIVE_RANK_LIMIT || cols > NAIVE_RANK_LIMIT {
        return Err(HomologyError::TooLarge { n_rows: rows, n_cols: cols, limit: NAIVE_RANK_LIMIT });
    }
    let dense = m.to_dense();
    let small: Vec<Vec<Ratio<i128>>> =
        dense.iter().map(|row| row.iter().map(|&v| Ratio::from_integer(v as i128)).collect()).collect();
    if let Some(r) = echelon_rank(small, cols) {
        return Ok(r);
    }
    let big: Vec<Vec<BigRational>> =
        dense.iter().map(|row| row.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect()).collect();
    Ok(echelon_rank(big, cols).expect("big rationals do not overflow"))
}

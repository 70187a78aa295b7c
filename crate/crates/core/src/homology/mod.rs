//! Betti numbers and Euler characteristic of the 8-adjacency clique complex.
//!
//! Pipeline: enumerate simplices, build the boundary matrices `B1`, `B2`, `B3`,
//! take exact ranks, then
//!
//! ```text
//! beta0 = s0 - rank(B1)                  // dim C0 - dim im B1
//! beta1 = (s1 - rank(B1)) - rank(B2)      // dim ker B1 - dim im B2
//! chi   = beta0 - beta1
//! ```
//!
//! `chi` is cross-checked against `s0 - s1 + s2 - s3`; a mismatch is reported
//! as [`HomologyError::Inconsistent`] and never returned as data.

pub mod matrix;
pub mod oracle;
pub mod rank;
pub mod snf;

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::complex::{enumerate_simplices, SimplexCounts, SimplicialComplex};
use crate::img::BinaryImage;

pub use matrix::{boundary_matrix, IntegerMatrix};
pub use oracle::{oracle_beta0_unionfind, oracle_naive_rank};
pub use rank::integer_rank;
pub use snf::smith_normal_form;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("boundary dimension {0} out of range 1..=3")]
    DimensionOutOfRange(usize),
    #[error("complex is not closed: face {face} of {q}-simplex {simplex} is missing")]
    MissingFace { q: usize, simplex: String, face: String },
    #[error("entry ({row}, {col}) outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, n_rows: usize, n_cols: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("{n_rows}x{n_cols} matrix exceeds the dense oracle limit of {limit}")]
    TooLarge { n_rows: usize, n_cols: usize, limit: usize },
    #[error(
        "internal inconsistency: beta0 - beta1 = {betti_chi} but s0 - s1 + s2 - s3 = {simplex_chi} (s = {counts:?})"
    )]
    Inconsistent { betti_chi: i64, simplex_chi: i64, counts: SimplexCounts },
}

/// Topological signature of one image or grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HomologyProfile {
    pub beta0: usize,
    pub beta1: usize,
    pub chi: i64,
    pub s: SimplexCounts,
    pub rank1: usize,
    pub rank2: usize,
    pub rank3: usize,
    pub consistent: bool,
}

impl HomologyProfile {
    /// `s2 - rank(B2) - rank(B3)`, the second Betti number; zero for planar
    /// 8-adjacency complexes.
    pub fn beta2(&self) -> i64 {
        self.s[2] as i64 - self.rank2 as i64 - self.rank3 as i64
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [s0, s1, s2, s3] = self.s;
        write!(
            f,
            "beta0={} beta1={} chi={} s={s0},{s1},{s2},{s3} consistent={}",
            self.beta0, self.beta1, self.chi, self.consistent
        )
    }
}

pub fn euler_characteristic(s: SimplexCounts) -> i64 {
    s[0] as i64 - s[1] as i64 + s[2] as i64 - s[3] as i64
}

/// Profile of an already enumerated complex; the `consistent` flag is set
/// but not enforced.
pub fn profile_of_complex(k: &SimplicialComplex) -> Result<HomologyProfile, HomologyError> {
    let s = k.counts();
    let rank1 = integer_rank(&boundary_matrix(k, 1)?);
    let rank2 = integer_rank(&boundary_matrix(k, 2)?);
    let rank3 = integer_rank(&boundary_matrix(k, 3)?);
    // B1 * B2 = 0, so im B2 sits inside ker B1 and the difference is never negative
    let beta0 = s[0] - rank1;
    let beta1_signed = (s[1] - rank1) as i64 - rank2 as i64;
    let beta1 = beta1_signed.max(0) as usize;
    let chi = beta0 as i64 - beta1_signed;
    let consistent = beta1_signed >= 0 && chi == euler_characteristic(s);
    Ok(HomologyProfile { beta0, beta1, chi, s, rank1, rank2, rank3, consistent })
}

/// Betti numbers and Euler characteristic of a binary image under 8-adjacency.
pub fn betti_numbers(img: &BinaryImage) -> Result<HomologyProfile, HomologyError> {
    let profile = profile_of_complex(&enumerate_simplices(img))?;
    if !profile.consistent {
        return Err(HomologyError::Inconsistent {
            betti_chi: profile.chi,
            simplex_chi: euler_characteristic(profile.s),
            counts: profile.s,
        });
    }
    Ok(profile)
}

/// Invariant factors of `B1` and `B2`; torsion-free homology means all are one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfReport {
    pub b1: Vec<BigInt>,
    pub b2: Vec<BigInt>,
}

impl SnfReport {
    pub fn torsion_free(&self) -> bool {
        snf::is_unimodular_diagonal(&self.b1) && snf::is_unimodular_diagonal(&self.b2)
    }
}

/// Optional Smith normal form verification. Dense, so meant for small images.
pub fn snf_check(img: &BinaryImage) -> Result<SnfReport, HomologyError> {
    let k = enumerate_simplices(img);
    Ok(SnfReport { b1: smith_normal_form(&boundary_matrix(&k, 1)?), b2: smith_normal_form(&boundary_matrix(&k, 2)?) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring3() -> BinaryImage {
        let mut ring = BinaryImage::empty(3, 3);
        for r in 0..3 {
            for c in 0..3 {
                if (r, c) != (1, 1) {
                    ring.set(r, c, true);
                }
            }
        }
        ring
    }

    fn bbc(img: &BinaryImage) -> (usize, usize, i64) {
        let p = betti_numbers(img).unwrap();
        (p.beta0, p.beta1, p.chi)
    }

    #[test]
    fn golden_profiles() {
        assert_eq!(bbc(&BinaryImage::empty(5, 5)), (0, 0, 0));
        assert_eq!(bbc(&ring3()), (1, 1, 0));
        assert_eq!(bbc(&BinaryImage::from_pixels(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap()), (1, 0, 1));
        assert_eq!(bbc(&BinaryImage::from_pixels(1, 3, [(0, 0), (0, 2)]).unwrap()), (2, 0, 2));
    }

    #[test]
    fn ring_ranks() {
        let p = betti_numbers(&ring3()).unwrap();
        assert_eq!(p.s, [8, 12, 4, 0]);
        assert_eq!(p.rank1, 7);
        assert_eq!((p.rank2, p.rank3), (4, 0));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_characteristic([4, 6, 4, 1]), 1);
        assert_eq!(euler_characteristic([8, 12, 4, 0]), 0);
        assert_eq!(euler_characteristic([1, 0, 0, 0]), 1);
    }

    #[test]
    fn display_line() {
        let p = betti_numbers(&BinaryImage::from_pixels(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap()).unwrap();
        assert_eq!(p.to_string(), "beta0=1 beta1=0 chi=1 s=4,6,4,1 consistent=true");
    }

    #[test]
    fn inconsistent_complex_is_flagged() {
        use crate::complex::{Pixel, Simplex};
        // a hollow tetrahedron boundary would carry beta2; fake one by dropping the 3-cell
        let v: Vec<Pixel> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(r, c)| Pixel::new(r, c)).collect();
        let mut lists: [Vec<Simplex>; 4] = Default::default();
        for i in 0..4 {
            lists[0].push(Simplex::new(&[v[i]]));
            for j in i + 1..4 {
                lists[1].push(Simplex::new(&[v[i], v[j]]));
                for k in j + 1..4 {
                    lists[2].push(Simplex::new(&[v[i], v[j], v[k]]));
                }
            }
        }
        let p = profile_of_complex(&SimplicialComplex::from_simplices(lists)).unwrap();
        assert!(!p.consistent);
        assert_eq!(p.beta2(), 1);
    }

    #[test]
    fn snf_of_small_images_is_torsion_free() {
        let report = snf_check(&ring3()).unwrap();
        assert_eq!(report.b1.len(), 7);
        assert_eq!(report.b2.len(), 4);
        assert!(report.torsion_free());
    }
}

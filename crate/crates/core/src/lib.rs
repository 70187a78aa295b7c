//! Digital simplicial homology of binary images and grid-based topological
//! features for classification.
//!
//! The crate is organised bottom-up:
//!
//! * [`img`]: PGM/csv01 loading, binarization, grid partitioning.
//! * [`complex`]: 8-adjacency cliques as a simplicial complex.
//! * [`homology`]: boundary matrices, exact ranks, Betti numbers, oracles.
//! * [`features`]: per-cell `(beta0, beta1, beta1/beta0)` vectors and CSV I/O.
//! * [`learn`]: scaling, PCA, logistic regression, 1-NN, linear SVM and the
//!   repeated stratified evaluation loop.
//! * [`synth`]: labelled synthetic binary-texture datasets.
//! * [`check`]: randomized oracle-equivalence suite.

pub mod check;
pub mod complex;
pub mod features;
pub mod homology;
pub mod img;
pub mod learn;
pub mod synth;

/// SplitMix64 finalizer, used to derive independent seeds from tuples.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

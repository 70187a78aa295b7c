//! Classical learning harness: min-max scaling, PCA, multinomial logistic
//! regression, k-NN, linear SVM, stratified splits and the repeated
//! evaluation loop.
//!
//! Data matrices are `nalgebra::DMatrix<f64>` with one sample per row.

pub mod eval;
pub mod knn;
pub mod logreg;
pub mod pca;
pub mod scaler;
pub mod split;
pub mod svm;

use nalgebra::DMatrix;
use thiserror::Error;

pub use eval::{evaluate, EvalConfig, EvalReport, ModelKind, Protocol};
pub use knn::knn_predict;
pub use logreg::{LogRegModel, LogRegParams};
pub use pca::PcaModel;
pub use scaler::ScalerModel;
pub use split::stratified_split;
pub use svm::{SvmModel, SvmParams};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("no samples")]
    Empty,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("need at least two classes, found {0}")]
    SingleClass(usize),
    #[error("class {label:?} has {count} sample(s); at least 2 are required")]
    ClassTooSmall { label: String, count: usize },
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("{what} must lie in {range}, got {value}")]
    OutOfRange { what: &'static str, range: &'static str, value: f64 },
    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("label count {labels} does not match row count {rows}")]
    LabelMismatch { labels: usize, rows: usize },
    #[error("k = {k} exceeds the {train} training samples")]
    KTooLarge { k: usize, train: usize },
    #[error("run with seed {seed} failed: {source}")]
    RunFailed { seed: u64, source: Box<LearnError> },
}

/// Stacks equally long rows into a matrix.
pub fn to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, LearnError> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(LearnError::DimensionMismatch { expected: d, got: bad.len() });
    }
    Ok(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
}

pub fn check_finite(x: &DMatrix<f64>) -> Result<(), LearnError> {
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if !x[(i, j)].is_finite() {
                return Err(LearnError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Sorted, deduplicated class list and each label's index into it.
pub fn encode_labels(labels: &[String]) -> (Vec<String>, Vec<usize>) {
    let mut classes = labels.to_vec();
    classes.sort();
    classes.dedup();
    let idx = labels.iter().map(|l| classes.binary_search(l).expect("label is in class list")).collect();
    (classes, idx)
}

/// Rows of `x` at the given indices, in order.
pub fn select_rows(x: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), x.ncols(), |i, j| x[(idx[i], j)])
}

/// Fraction of exact label matches.
pub fn accuracy(predicted: &[String], truth: &[String]) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    if truth.is_empty() {
        return 0.0;
    }
    predicted.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / truth.len() as f64
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_and_argmax() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(accuracy(&s(&["a", "b", "a"]), &s(&["a", "b", "b"])), 2.0 / 3.0);
        assert_eq!(argmax([1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(argmax([f64::NAN, 1.0]), 1);
    }

    #[test]
    fn label_encoding_is_sorted() {
        let labels: Vec<String> = ["b", "a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let (classes, idx) = encode_labels(&labels);
        assert_eq!(classes, vec!["a", "b", "c"]);
        assert_eq!(idx, vec![1, 0, 1, 2]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(to_matrix(&[vec![1.0], vec![1.0, 2.0]]), Err(LearnError::DimensionMismatch { .. })));
    }
}

use nalgebra::{DMatrix, DVector};

use super::LearnError;

/// Principal components of the centered training data, from its SVD.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    pub mean: DVector<f64>,
    /// All components as rows, by decreasing singular value. Only the first
    /// `k` are used for projection.
    pub components: DMatrix<f64>,
    /// Fraction of total variance carried by each component.
    pub explained_variance_ratio: Vec<f64>,
    pub k: usize,
    /// Set when the training rows are all identical (zero total variance).
    pub degenerate: bool,
}

impl PcaModel {
    /// Keeps the smallest `k` whose cumulative explained variance reaches
    /// `variance_fraction`.
    pub fn fit(x: &DMatrix<f64>, variance_fraction: f64) -> Result<Self, LearnError> {
        if !(variance_fraction > 0.0 && variance_fraction <= 1.0) {
            return Err(LearnError::OutOfRange {
                what: "variance fraction",
                range: "(0, 1]",
                value: variance_fraction,
            });
        }
        let (n, d) = x.shape();
        if n < 2 {
            return Err(LearnError::TooFewSamples { needed: 2, got: n });
        }
        let mean = x.row_mean().transpose();
        let mut centered = x.clone();
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }

        let svd = centered.svd(false, true);
        let mut components = svd.v_t.expect("v_t requested");
        let sv = svd.singular_values;
        // sign convention: largest-magnitude loading of each component is positive
        for mut row in components.row_iter_mut() {
            let pivot = row.iter().copied().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
            if pivot < 0.0 {
                row.neg_mut();
            }
        }

        let energy: Vec<f64> = sv.iter().map(|s| s * s).collect();
        let total: f64 = energy.iter().sum();
        let degenerate = total.is_nan() || total <= 0.0;
        let (ratios, k) = if degenerate {
            (vec![0.0; energy.len()], 1)
        } else {
            let ratios: Vec<f64> = energy.iter().map(|e| e / total).collect();
            let mut cum = 0.0;
            let mut k = ratios.len();
            for (i, r) in ratios.iter().enumerate() {
                cum += r;
                if cum >= variance_fraction - 1e-10 {
                    k = i + 1;
                    break;
                }
            }
            (ratios, k)
        };
        if components.nrows() == 0 {
            // d == 0: nothing to project onto
            components = DMatrix::zeros(1, d);
        }
        Ok(Self { mean, components, explained_variance_ratio: ratios, k, degenerate })
    }

    /// The `k x d` projection matrix.
    pub fn retained(&self) -> DMatrix<f64> {
        self.components.rows(0, self.k).into_owned()
    }

    /// Centered projection onto the first `k` components.
    pub fn transform(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LearnError> {
        if x.ncols() != self.mean.len() {
            return Err(LearnError::DimensionMismatch { expected: self.mean.len(), got: x.ncols() });
        }
        let mut centered = x.clone();
        for mut row in centered.row_iter_mut() {
            row -= self.mean.transpose();
        }
        Ok(centered * self.retained().transpose())
    }

    pub fn inverse_transform(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = z * self.retained();
        for mut row in x.row_iter_mut() {
            row += self.mean.transpose();
        }
        x
    }
}

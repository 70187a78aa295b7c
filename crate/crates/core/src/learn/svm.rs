//! One-vs-rest linear SVM trained with seeded stochastic subgradient descent.
//!
//! Each binary problem minimizes
//! `lambda/2 ||w||^2 + 1/n sum_i max(0, 1 - y_i <w, [x_i, 1]>)` with
//! `lambda = 1 / (C n)` and step size `1 / (lambda t)`. The bias is the last
//! coordinate of `w` and is regularized along with the weights.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{argmax, check_finite, encode_labels, LearnError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, epochs: 50, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub classes: Vec<String>,
    /// `classes x (features + 1)`, bias in the last column.
    pub weights: DMatrix<f64>,
    pub params: SvmParams,
}

impl SvmModel {
    pub fn fit(x: &DMatrix<f64>, labels: &[String], params: SvmParams) -> Result<Self, LearnError> {
        let (n, d) = x.shape();
        if n == 0 {
            return Err(LearnError::Empty);
        }
        if labels.len() != n {
            return Err(LearnError::LabelMismatch { labels: labels.len(), rows: n });
        }
        if params.c.is_nan() || params.c <= 0.0 {
            return Err(LearnError::OutOfRange { what: "SVM C", range: "(0, inf)", value: params.c });
        }
        check_finite(x)?;
        let (classes, targets) = encode_labels(labels);
        if classes.len() < 2 {
            return Err(LearnError::SingleClass(classes.len()));
        }
        let lambda = 1.0 / (params.c * n as f64);
        let mut weights = DMatrix::zeros(classes.len(), d + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut order: Vec<usize> = (0..n).collect();
        // one shared visiting order per epoch keeps the classes independent of each other
        let schedule: Vec<Vec<usize>> = (0..params.epochs)
            .map(|_| {
                order.shuffle(&mut rng);
                order.clone()
            })
            .collect();

        for (c, mut w_row) in weights.row_iter_mut().enumerate() {
            let mut w = DVector::<f64>::zeros(d + 1);
            let mut t = 0usize;
            for epoch in &schedule {
                for &i in epoch {
                    t += 1;
                    let eta = 1.0 / (lambda * t as f64);
                    let y = if targets[i] == c { 1.0 } else { -1.0 };
                    let margin = y * (x.row(i).transpose().dot(&w.rows(0, d)) + w[d]);
                    w *= 1.0 - eta * lambda;
                    if margin < 1.0 {
                        for j in 0..d {
                            w[j] += eta * y * x[(i, j)];
                        }
                        w[d] += eta * y;
                    }
                }
            }
            w_row.copy_from(&w.transpose());
        }
        Ok(Self { classes, weights, params })
    }

    pub fn decision_function(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LearnError> {
        let d = self.weights.ncols() - 1;
        if x.ncols() != d {
            return Err(LearnError::DimensionMismatch { expected: d, got: x.ncols() });
        }
        let w = self.weights.columns(0, d);
        let mut scores = x * w.transpose();
        for mut row in scores.row_iter_mut() {
            row += self.weights.column(d).transpose();
        }
        Ok(scores)
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<String>, LearnError> {
        let scores = self.decision_function(x)?;
        Ok(scores.row_iter().map(|r| self.classes[argmax(r.iter().copied())].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn blobs() -> (DMatrix<f64>, Vec<String>) {
        let x = DMatrix::from_row_slice(
            8,
            2,
            &[0.0, 0.0, 0.2, 0.1, 0.1, 0.3, -0.2, 0.1, 2.0, 2.0, 2.2, 1.9, 1.8, 2.1, 2.1, 2.3],
        );
        (x, labels(&["a", "a", "a", "a", "b", "b", "b", "b"]))
    }

    #[test]
    fn separable_training_accuracy() {
        let (x, y) = blobs();
        let m = SvmModel::fit(&x, &y, SvmParams::default()).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y);
    }

    #[test]
    fn seeded_determinism() {
        let (x, y) = blobs();
        let a = SvmModel::fit(&x, &y, SvmParams { seed: 4, ..Default::default() }).unwrap();
        let b = SvmModel::fit(&x.clone(), &y.clone(), SvmParams { seed: 4, ..Default::default() }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_class_rejected() {
        let (x, _) = blobs();
        assert!(matches!(
            SvmModel::fit(&x, &vec!["a".to_string(); 8], SvmParams::default()),
            Err(LearnError::SingleClass(1))
        ));
    }
}

//! Multinomial logistic regression with an L2 penalty on the weights.
//!
//! Objective over `n` samples and `K` classes, with scores `z = W x + b`:
//!
//! ```text
//! f(W, b) = sum_i [ logsumexp(z_i) - z_i[y_i] ] + ||W||^2 / (2 C)
//! ```
//!
//! The bias is not penalized. Minimized with L-BFGS from all-zero parameters;
//! the solver stops once the gradient norm drops to `tol` or after
//! `max_iter` iterations.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::{argmax, check_finite, encode_labels, LearnError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRegParams {
    pub c: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self { c: 10.0, max_iter: 1000, tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogRegModel {
    pub classes: Vec<String>,
    /// `classes x features`
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub params: LogRegParams,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

const HISTORY: usize = 10;

/// Objective and gradient at flattened parameters `theta = [W row-major, b]`.
pub fn objective(x: &DMatrix<f64>, targets: &[usize], n_classes: usize, c: f64, theta: &[f64]) -> (f64, Vec<f64>) {
    let (n, d) = x.shape();
    let w = DMatrix::from_row_slice(n_classes, d, &theta[..n_classes * d]);
    let b = &theta[n_classes * d..];
    let mut scores = x * w.transpose();
    let mut loss = 0.0;
    for i in 0..n {
        let mut row = scores.row_mut(i);
        for k in 0..n_classes {
            row[k] += b[k];
        }
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|z| (z - max).exp()).sum();
        let lse = max + sum.ln();
        loss += lse - row[targets[i]];
        // row becomes the residual p - y
        for k in 0..n_classes {
            row[k] = (row[k] - lse).exp();
        }
        row[targets[i]] -= 1.0;
    }
    loss += w.norm_squared() / (2.0 * c);

    let grad_w = scores.transpose() * x + &w / c;
    let mut grad = Vec::with_capacity(theta.len());
    for k in 0..n_classes {
        grad.extend(grad_w.row(k).iter());
    }
    for k in 0..n_classes {
        grad.push(scores.column(k).sum());
    }
    (loss, grad)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Minimum {
    theta: Vec<f64>,
    iterations: usize,
    gradient_norm: f64,
    converged: bool,
}

/// L-BFGS with a backtracking Armijo line search.
fn lbfgs<F>(f: F, start: Vec<f64>, max_iter: usize, tol: f64) -> Minimum
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut theta = start;
    let (mut fx, mut g) = f(&theta);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut iterations = 0;
    while iterations < max_iter {
        let gnorm = norm(&g);
        if gnorm <= tol {
            return Minimum { theta, iterations, gradient_norm: gnorm, converged: true };
        }
        iterations += 1;

        // two-loop recursion for d = -H g
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = history.back().map_or(1.0 / gnorm.max(1.0), |(s, y, _)| dot(s, y) / dot(y, y));
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let beta = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - beta) * si;
            }
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if slope >= 0.0 {
            history.clear();
            dir = g.iter().map(|v| -v / gnorm.max(1.0)).collect();
            slope = dot(&g, &dir);
        }

        let mut step = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + step * d).collect();
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                break Some((trial, ft, gt));
            }
            step *= 0.5;
            if step < 1e-20 {
                break None;
            }
        };
        let Some((next, f_next, g_next)) = accepted else {
            // no decrease representable in floating point: at the optimum to machine precision
            let gradient_norm = norm(&g);
            return Minimum { theta, iterations, gradient_norm, converged: gradient_norm <= tol };
        };
        let s: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_next.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        theta = next;
        fx = f_next;
        g = g_next;
    }
    let gradient_norm = norm(&g);
    Minimum { theta, iterations, gradient_norm, converged: gradient_norm <= tol }
}

impl LogRegModel {
    pub fn fit(x: &DMatrix<f64>, labels: &[String], params: LogRegParams) -> Result<Self, LearnError> {
        if x.nrows() == 0 {
            return Err(LearnError::Empty);
        }
        if labels.len() != x.nrows() {
            return Err(LearnError::LabelMismatch { labels: labels.len(), rows: x.nrows() });
        }
        if params.c.is_nan() || params.c <= 0.0 {
            return Err(LearnError::OutOfRange { what: "C", range: "(0, inf)", value: params.c });
        }
        check_finite(x)?;
        let (classes, targets) = encode_labels(labels);
        if classes.len() < 2 {
            return Err(LearnError::SingleClass(classes.len()));
        }
        let (k, d) = (classes.len(), x.ncols());
        let min = lbfgs(|t| objective(x, &targets, k, params.c, t), vec![0.0; k * d + k], params.max_iter, params.tol);
        Ok(Self {
            classes,
            weights: DMatrix::from_row_slice(k, d, &min.theta[..k * d]),
            bias: DVector::from_column_slice(&min.theta[k * d..]),
            params,
            iterations: min.iterations,
            gradient_norm: min.gradient_norm,
            converged: min.converged,
        })
    }

    /// Class scores `W x + b`, one row per sample.
    pub fn decision_function(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LearnError> {
        if x.ncols() != self.weights.ncols() {
            return Err(LearnError::DimensionMismatch { expected: self.weights.ncols(), got: x.ncols() });
        }
        let mut scores = x * self.weights.transpose();
        for mut row in scores.row_iter_mut() {
            row += self.bias.transpose();
        }
        Ok(scores)
    }

    /// Highest-scoring class; ties go to the first class in sorted order.
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

    #[test]
    fn separable_1d() {
        let x = DMatrix::from_column_slice(2, 1, &[-1.0, 1.0]);
        let y = labels(&["A", "B"]);
        let m = LogRegModel::fit(&x, &y, LogRegParams::default()).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y);
        assert!(m.converged);
        assert!(m.gradient_norm <= 1e-6);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let x = DMatrix::from_row_slice(5, 2, &[0.1, 2.0, -1.0, 0.5, 0.3, -0.7, 1.5, 1.1, -0.4, 0.0]);
        let targets = [0, 2, 1, 2, 0];
        let theta: Vec<f64> = (0..9).map(|i| 0.1 * i as f64 - 0.35).collect();
        let (_, g) = objective(&x, &targets, 3, 2.0, &theta);
        let h = 1e-6;
        for i in 0..theta.len() {
            let mut up = theta.clone();
            let mut down = theta.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (objective(&x, &targets, 3, 2.0, &up).0 - objective(&x, &targets, 3, 2.0, &down).0) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "component {i}: fd {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn optimum_gradient_below_tol() {
        let x = DMatrix::from_row_slice(6, 2, &[0.0, 0.1, 0.2, 0.9, 1.0, 0.8, 0.9, 0.2, 0.5, 0.5, 0.1, 0.7]);
        let y = labels(&["a", "b", "c", "a", "b", "c"]);
        let m = LogRegModel::fit(&x, &y, LogRegParams::default()).unwrap();
        let mut theta: Vec<f64> = m.weights.transpose().as_slice().to_vec();
        theta.extend(m.bias.iter());
        let (_, targets) = encode_labels(&y);
        let (_, g) = objective(&x, &targets, 3, 10.0, &theta);
        assert!(norm(&g) <= 1e-6, "gradient norm {}", norm(&g));
    }

    #[test]
    fn rejects_single_class_and_nan() {
        let x = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert!(matches!(
            LogRegModel::fit(&x, &labels(&["a", "a"]), LogRegParams::default()),
            Err(LearnError::SingleClass(1))
        ));
        let bad = DMatrix::from_column_slice(2, 1, &[0.0, f64::NAN]);
        assert!(matches!(
            LogRegModel::fit(&bad, &labels(&["a", "b"]), LogRegParams::default()),
            Err(LearnError::NonFinite { .. })
        ));
    }

    #[test]
    fn tie_goes_to_first_class() {
        let m = LogRegModel {
            classes: labels(&["x", "y"]),
            weights: DMatrix::zeros(2, 1),
            bias: DVector::zeros(2),
            params: LogRegParams::default(),
            iterations: 0,
            gradient_norm: 0.0,
            converged: true,
        };
        assert_eq!(m.predict(&DMatrix::from_element(1, 1, 3.0)).unwrap(), labels(&["x"]));
    }

    #[test]
    fn positive_score_scaling_keeps_predictions() {
        let x = DMatrix::from_row_slice(6, 2, &[0.0, 0.1, 0.2, 0.9, 1.0, 0.8, 0.9, 0.2, 0.5, 0.5, 0.1, 0.7]);
        let y = labels(&["a", "b", "c", "a", "b", "c"]);
        let m = LogRegModel::fit(&x, &y, LogRegParams::default()).unwrap();
        let scores = m.decision_function(&x).unwrap();
        for factor in [0.01, 3.0, 1e4] {
            let scaled = &scores * factor;
            let picked: Vec<String> = scaled.row_iter().map(|r| m.classes[argmax(r.iter().copied())].clone()).collect();
            assert_eq!(picked, m.predict(&x).unwrap());
        }
    }

    #[test]
    fn training_row_order_does_not_change_predictions() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let centers = [(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)];
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for (i, &(cx, cy)) in centers.iter().enumerate() {
            for j in 0..8 {
                let t = j as f64 * 0.7;
                rows.push(vec![cx + 0.5 * t.cos(), cy + 0.5 * t.sin()]);
                y.push(format!("c{i}"));
            }
        }
        let x = super::super::to_matrix(&rows).unwrap();
        let grid =
            DMatrix::from_fn(
                49,
                2,
                |i, j| if j == 0 { (i / 7) as f64 * 0.6 - 0.3 } else { (i % 7) as f64 * 0.6 - 0.3 },
            );
        let base = LogRegModel::fit(&x, &y, LogRegParams::default()).unwrap().predict(&grid).unwrap();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.shuffle(&mut rng);
        let xs = super::super::select_rows(&x, &order);
        let ys: Vec<String> = order.iter().map(|&i| y[i].clone()).collect();
        assert_eq!(LogRegModel::fit(&xs, &ys, LogRegParams::default()).unwrap().predict(&grid).unwrap(), base);
    }
}

use nalgebra::DMatrix;

use super::LearnError;

/// k-nearest-neighbour classification under the Euclidean metric.
///
/// Neighbours are ranked by `(distance, training index)`, so equidistant
/// points resolve to the lower index. For `k > 1` the majority label wins and
/// vote ties go to the label whose best-ranked neighbour comes first.
pub fn knn_predict(
    x_train: &DMatrix<f64>,
    y_train: &[String],
    x_test: &DMatrix<f64>,
    k: usize,
) -> Result<Vec<String>, LearnError> {
    let n = x_train.nrows();
    if n == 0 {
        return Err(LearnError::Empty);
    }
    if y_train.len() != n {
        return Err(LearnError::LabelMismatch { labels: y_train.len(), rows: n });
    }
    if k == 0 || k > n {
        return Err(LearnError::KTooLarge { k, train: n });
    }
    if x_test.ncols() != x_train.ncols() {
        return Err(LearnError::DimensionMismatch { expected: x_train.ncols(), got: x_test.ncols() });
    }

    let mut out = Vec::with_capacity(x_test.nrows());
    let mut ranked: Vec<(f64, usize)> = Vec::with_capacity(n);
    for q in x_test.row_iter() {
        ranked.clear();
        ranked.extend(x_train.row_iter().enumerate().map(|(i, r)| ((r - q).norm_squared(), i)));
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes: Vec<(&str, usize)> = Vec::new();
        for &(_, i) in &ranked[..k] {
            match votes.iter_mut().find(|(l, _)| *l == y_train[i]) {
                Some(v) => v.1 += 1,
                None => votes.push((&y_train[i], 1)),
            }
        }
        // first maximum in neighbour order
        let mut best = votes[0];
        for &v in &votes[1..] {
            if v.1 > best.1 {
                best = v;
            }
        }
        out.push(best.0.to_string());
    }
    Ok(out)
}

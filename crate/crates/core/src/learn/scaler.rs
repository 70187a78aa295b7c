use nalgebra::DMatrix;

use super::LearnError;

/// Per-feature min-max scaling fitted on training rows only.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalerModel {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalerModel {
    pub fn fit(x: &DMatrix<f64>) -> Result<Self, LearnError> {
        if x.nrows() == 0 {
            return Err(LearnError::Empty);
        }
        let min = x.column_iter().map(|c| c.iter().copied().fold(f64::INFINITY, f64::min)).collect();
        let max = x.column_iter().map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
        Ok(Self { min, max })
    }

    /// `(x - min) / (max - min)`, unclipped; constant training features map to 0.
    pub fn transform(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LearnError> {
        if x.ncols() != self.min.len() {
            return Err(LearnError::DimensionMismatch { expected: self.min.len(), got: x.ncols() });
        }
        Ok(DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            let range = self.max[j] - self.min[j];
            if range > 0.0 {
                (x[(i, j)] - self.min[j]) / range
            } else {
                0.0
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn examples() {
        let s = ScalerModel::fit(&col(&[2.0, 4.0, 6.0])).unwrap();
        assert_eq!(s.transform(&col(&[2.0, 4.0, 6.0])).unwrap().as_slice(), &[0.0, 0.5, 1.0]);
        assert_eq!(s.transform(&col(&[8.0])).unwrap()[(0, 0)], 1.5);

        let c = ScalerModel::fit(&col(&[5.0, 5.0])).unwrap();
        assert_eq!(c.transform(&col(&[5.0, 5.0])).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(ScalerModel::fit(&DMatrix::zeros(0, 2)), Err(LearnError::Empty)));
        let s = ScalerModel::fit(&DMatrix::zeros(2, 2)).unwrap();
        assert!(matches!(s.transform(&DMatrix::zeros(1, 3)), Err(LearnError::DimensionMismatch { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn training_rows_land_in_unit_interval(v in proptest::collection::vec(-1e6f64..1e6, 2..40)) {
                let x = DMatrix::from_column_slice(v.len() / 2, 2, &v[..v.len() / 2 * 2]);
                prop_assume!(x.nrows() > 0);
                let s = ScalerModel::fit(&x).unwrap();
                let t = s.transform(&x).unwrap();
                prop_assert!(t.iter().all(|&y| (0.0..=1.0).contains(&y)));
            }
        }
    }
}

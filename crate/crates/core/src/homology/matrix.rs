use crate::complex::{SimplicialComplex, MAX_DIM};

use super::HomologyError;

/// Sparse integer matrix stored by column; each column is sorted by row with no
/// zero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    n_rows: usize,
    n_cols: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl IntegerMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, cols: vec![Vec::new(); n_cols] }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Zero values are dropped;
    /// duplicate positions and out-of-bounds indices are rejected.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, entries: I) -> Result<Self, HomologyError>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let mut m = Self::zeros(n_rows, n_cols);
        for (r, c, v) in entries {
            if r >= n_rows || c >= n_cols {
                return Err(HomologyError::IndexOutOfBounds { row: r, col: c, n_rows, n_cols });
            }
            if v != 0 {
                m.cols[c].push((r, v));
            }
        }
        for (c, col) in m.cols.iter_mut().enumerate() {
            col.sort_unstable_by_key(|&(r, _)| r);
            if let Some(w) = col.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(HomologyError::DuplicateEntry { row: w[0].0, col: c });
            }
        }
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n_rows, n_cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged dense matrix");
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.cols[c].push((r, v));
                }
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(usize, i64)] {
        &self.cols[c]
    }

    /// Nonzero entries as `(row, col, value)`, column-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.cols[c].binary_search_by_key(&r, |&(row, _)| row).map_or(0, |i| self.cols[c][i].1)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.n_cols]; self.n_rows];
        for (r, c, v) in self.entries() {
            d[r][c] = v;
        }
        d
    }
}

/// Boundary operator from `q`-chains to `(q-1)`-chains, shape `s_{q-1} x s_q`.
///
/// Column `j` holds `sum_i (-1)^i [face_i]` of the `j`-th canonical `q`-simplex,
/// where `face_i` drops vertex `i`.
pub fn boundary_matrix(k: &SimplicialComplex, q: usize) -> Result<IntegerMatrix, HomologyError> {
    if q == 0 || q > MAX_DIM {
        return Err(HomologyError::DimensionOutOfRange(q));
    }
    let faces = k.simplices(q - 1);
    let mut m = IntegerMatrix::zeros(faces.len(), k.simplices(q).len());
    for (j, s) in k.simplices(q).iter().enumerate() {
        let col = &mut m.cols[j];
        for i in 0..=q {
            let face = s.face(i);
            let row = k.index_of(&face).ok_or_else(|| HomologyError::MissingFace {
                q,
                simplex: format!("{s:?}"),
                face: format!("{face:?}"),
            })?;
            col.push((row, if i % 2 == 0 { 1 } else { -1 }));
        }
        col.sort_unstable_by_key(|&(r, _)| r);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_simplices, Pixel, Simplex};
    use crate::img::BinaryImage;

    fn px(r: usize, c: usize) -> Pixel {
        Pixel::new(r, c)
    }

    #[test]
    fn edge_column() {
        let img = BinaryImage::from_pixels(1, 2, [(0, 0), (0, 1)]).unwrap();
        let b1 = boundary_matrix(&enumerate_simplices(&img), 1).unwrap();
        assert_eq!(b1.to_dense(), vec![vec![-1], vec![1]]);
    }

    #[test]
    fn triangle_column() {
        let img = BinaryImage::from_pixels(2, 2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        let k = enumerate_simplices(&img);
        let b2 = boundary_matrix(&k, 2).unwrap();
        assert_eq!((b2.n_rows(), b2.n_cols()), (3, 1));
        let (v0, v1, v2) = (px(0, 0), px(0, 1), px(1, 0));
        let idx = |a, b| k.index_of(&Simplex::new(&[a, b])).unwrap();
        assert_eq!(b2.get(idx(v1, v2), 0), 1);
        assert_eq!(b2.get(idx(v0, v2), 0), -1);
        assert_eq!(b2.get(idx(v0, v1), 0), 1);
    }

    #[test]
    fn empty_shapes_and_range() {
        let img = BinaryImage::from_pixels(1, 3, [(0, 0), (0, 1), (0, 2)]).unwrap();
        let k = enumerate_simplices(&img);
        let b2 = boundary_matrix(&k, 2).unwrap();
        assert_eq!((b2.n_rows(), b2.n_cols()), (2, 0));
        assert!(matches!(boundary_matrix(&k, 0), Err(HomologyError::DimensionOutOfRange(0))));
        assert!(matches!(boundary_matrix(&k, 4), Err(HomologyError::DimensionOutOfRange(4))));
    }

    #[test]
    fn missing_face_is_an_error() {
        let lists = [vec![Simplex::new(&[px(0, 0)])], vec![Simplex::new(&[px(0, 0), px(0, 1)])], vec![], vec![]];
        let k = SimplicialComplex::from_simplices(lists);
        assert!(matches!(boundary_matrix(&k, 1), Err(HomologyError::MissingFace { .. })));
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let mut img = BinaryImage::empty(4, 4);
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 2), (3, 1), (2, 1)] {
            img.set(r, c, true);
        }
        let k = enumerate_simplices(&img);
        for q in 1..MAX_DIM {
            let lo = boundary_matrix(&k, q).unwrap().to_dense();
            let hi = boundary_matrix(&k, q + 1).unwrap().to_dense();
            for i in 0..lo.len() {
                for j in 0..hi.first().map_or(0, Vec::len) {
                    let dot: i64 = (0..hi.len()).map(|t| lo[i][t] * hi[t][j]).sum();
                    assert_eq!(dot, 0);
                }
            }
        }
    }

    #[test]
    fn triplets_validation() {
        assert!(matches!(
            IntegerMatrix::from_triplets(2, 2, [(0, 0, 1), (0, 0, 2)]),
            Err(HomologyError::DuplicateEntry { .. })
        ));
        assert!(matches!(IntegerMatrix::from_triplets(2, 2, [(2, 0, 1)]), Err(HomologyError::IndexOutOfBounds { .. })));
        let m = IntegerMatrix::from_triplets(2, 2, [(1, 1, 3), (0, 1, 0)]).unwrap();
        assert_eq!(m.nnz(), 1);
    }
}

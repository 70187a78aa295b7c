//! Digital adjacency and the clique complex of a binary image.
//!
//! A digital `m`-simplex is a set of `m + 1` foreground pixels that are
//! pairwise adjacent. Under 8-adjacency every such clique lies inside a 2x2
//! block, so simplices stop at dimension 3.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use crate::img::BinaryImage;

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

impl Pixel {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Pixel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Adjacency {
    Four,
    Eight,
}

/// Whether two distinct pixels are neighbours. A pixel is never adjacent to itself.
pub fn are_adjacent(p: Pixel, q: Pixel, adj: Adjacency) -> bool {
    let dr = p.row.abs_diff(q.row);
    let dc = p.col.abs_diff(q.col);
    match adj {
        Adjacency::Four => dr + dc == 1,
        Adjacency::Eight => dr <= 1 && dc <= 1 && (dr, dc) != (0, 0),
    }
}

/// An oriented simplex with vertices in strictly increasing row-major order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Simplex {
    len: u8,
    verts: [Pixel; MAX_DIM + 1],
}

impl Simplex {
    /// Sorts the vertices into canonical order. Panics on duplicates or more than 4 vertices.
    pub fn new(vertices: &[Pixel]) -> Self {
        assert!(!vertices.is_empty() && vertices.len() <= MAX_DIM + 1, "simplex must have 1..=4 vertices");
        let mut verts = [Pixel::default(); MAX_DIM + 1];
        verts[..vertices.len()].copy_from_slice(vertices);
        verts[..vertices.len()].sort_unstable();
        assert!(verts[..vertices.len()].windows(2).all(|w| w[0] < w[1]), "duplicate vertex in simplex");
        Self { len: vertices.len() as u8, verts }
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    pub fn vertices(&self) -> &[Pixel] {
        &self.verts[..self.len as usize]
    }

    /// The face obtained by dropping vertex `i`; keeps canonical order.
    pub fn face(&self, i: usize) -> Simplex {
        assert!(self.dim() >= 1 && i <= self.dim());
        let mut verts = [Pixel::default(); MAX_DIM + 1];
        let mut k = 0;
        for (j, &v) in self.vertices().iter().enumerate() {
            if j != i {
                verts[k] = v;
                k += 1;
            }
        }
        Simplex { len: self.len - 1, verts }
    }

    pub fn is_clique(&self, adj: Adjacency) -> bool {
        let v = self.vertices();
        (0..v.len()).all(|i| (i + 1..v.len()).all(|j| are_adjacent(v[i], v[j], adj)))
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices().cmp(other.vertices())
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, v) in self.vertices().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ">")
    }
}

/// Simplex counts `(s0, s1, s2, s3)`.
pub type SimplexCounts = [usize; MAX_DIM + 1];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: [Vec<Simplex>; MAX_DIM + 1],
}

impl SimplicialComplex {
    /// Builds a complex from arbitrary simplex lists; they are sorted and
    /// deduplicated but closure under faces is *not* enforced.
    pub fn from_simplices(mut lists: [Vec<Simplex>; MAX_DIM + 1]) -> Self {
        for (q, list) in lists.iter_mut().enumerate() {
            assert!(list.iter().all(|s| s.dim() == q), "simplex of wrong dimension in list {q}");
            list.sort_unstable();
            list.dedup();
        }
        Self { simplices: lists }
    }

    pub fn simplices(&self, q: usize) -> &[Simplex] {
        &self.simplices[q]
    }

    /// Column/row index of a simplex within its dimension, if present.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.simplices[s.dim()].binary_search(s).ok()
    }

    pub fn counts(&self) -> SimplexCounts {
        std::array::from_fn(|q| self.simplices[q].len())
    }

    pub fn is_closed(&self) -> bool {
        (1..=MAX_DIM).all(|q| self.simplices[q].iter().all(|s| (0..=q).all(|i| self.index_of(&s.face(i)).is_some())))
    }

    /// Text dump, one simplex per line as `q: (r,c) (r,c) ...`, canonical order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for list in &self.simplices {
            for s in list {
                let _ = write!(out, "{}:", s.dim());
                for v in s.vertices() {
                    let _ = write!(out, " {v}");
                }
                out.push('\n');
            }
        }
        out
    }
}

// Neighbours that come after a pixel in row-major order.
const FORWARD: [(isize, isize); 4] = [(0, 1), (1, -1), (1, 0), (1, 1)];

/// Enumerates every 8-adjacency clique of the foreground.
///
/// Each simplex is emitted once, from its smallest vertex, by looking only at
/// that vertex's forward neighbours.
pub fn enumerate_simplices(img: &BinaryImage) -> SimplicialComplex {
    let mut lists: [Vec<Simplex>; MAX_DIM + 1] = Default::default();
    let mut fwd: Vec<Pixel> = Vec::with_capacity(4);
    for &(r, c) in img.foreground() {
        let p = Pixel::new(r, c);
        lists[0].push(Simplex::new(&[p]));
        fwd.clear();
        for (dr, dc) in FORWARD {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nc >= 0 && img.contains(nr as usize, nc as usize) {
                fwd.push(Pixel::new(nr as usize, nc as usize));
            }
        }
        let adj = |a: Pixel, b: Pixel| are_adjacent(a, b, Adjacency::Eight);
        for (i, &x) in fwd.iter().enumerate() {
            lists[1].push(Simplex::new(&[p, x]));
            for (j, &y) in fwd.iter().enumerate().skip(i + 1) {
                if !adj(x, y) {
                    continue;
                }
                lists[2].push(Simplex::new(&[p, x, y]));
                for &z in fwd.iter().skip(j + 1) {
                    if adj(x, z) && adj(y, z) {
                        lists[3].push(Simplex::new(&[p, x, y, z]));
                    }
                }
            }
        }
    }
    for list in &mut lists {
        list.sort_unstable();
    }
    SimplicialComplex { simplices: lists }
}

pub fn simplex_counts(k: &SimplicialComplex) -> SimplexCounts {
    k.counts()
}

//! Uniform cell-centered grids in one to three dimensions.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    pub dims: usize,
    pub n: Vec<usize>,
    pub extents: Vec<(f64, f64)>,
}

impl Grid {
    pub fn new(n: &[usize], extents: &[(f64, f64)]) -> Grid {
        assert!(!n.is_empty() && n.len() <= 3 && n.len() == extents.len());
        Grid {
            dims: n.len(),
            n: n.to_vec(),
            extents: extents.to_vec(),
        }
    }

    pub fn cells(&self) -> usize {
        self.n.iter().product()
    }

    pub fn dx(&self, axis: usize) -> f64 {
        let (lo, hi) = self.extents[axis];
        (hi - lo) / self.n[axis] as f64
    }

    pub fn min_dx(&self) -> f64 {
        (0..self.dims).map(|a| self.dx(a)).fold(f64::MAX, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dims).map(|a| self.dx(a)).product()
    }

    /// Center coordinate of cell index i along an axis.
    pub fn center(&self, axis: usize, i: usize) -> f64 {
        let (lo, _) = self.extents[axis];
        lo + (i as f64 + 0.5) * self.dx(axis)
    }

    /// Row-major linear index.
    pub fn index(&self, idx: &[usize]) -> usize {
        let mut linear = 0usize;
        for (a, &i) in idx.iter().enumerate() {
            linear = linear * self.n[a] + i;
        }
        linear
    }

    /// Decompose a linear index into per-axis indices.
    pub fn unindex(&self, mut linear: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.dims).rev() {
            idx[a] = linear % self.n[a];
            linear /= self.n[a];
        }
        idx
    }

    /// Neighbor along an axis with the given offset; `None` past a wall.
    pub fn neighbor(&self, idx: &[usize; 3], axis: usize, offset: isize) -> Option<[usize; 3]> {
        let i = idx[axis] as isize + offset;
        if i < 0 || i >= self.n[axis] as isize {
            return None;
        }
        let mut out = *idx;
        out[axis] = i as usize;
        Some(out)
    }

    /// Neighbor with periodic wrap.
    pub fn neighbor_periodic(&self, idx: &[usize; 3], axis: usize, offset: isize) -> [usize; 3] {
        let n = self.n[axis] as isize;
        let i = (idx[axis] as isize + offset).rem_euclid(n);
        let mut out = *idx;
        out[axis] = i as usize;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_roundtrip() {
        let g = Grid::new(&[4, 3], &[(0.0, 1.0), (0.0, 2.0)]);
        for lin in 0..g.cells() {
            let idx = g.unindex(lin);
            assert_eq!(g.index(&idx[..2]), lin);
        }
        assert_eq!(g.dx(1), 2.0 / 3.0);
        assert!((g.center(0, 0) - 0.125).abs() < 1e-15);
    }
}

//! Thin helpers around `faer` sparse matrices.

use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Mat};
use faer::reborrow::Reborrow;

use crate::error::{Error, Result};

pub type SparseMatrix = SparseColMat<usize, f64>;

/// Coordinate-format accumulator; duplicate entries are summed on build.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<Triplet<usize, usize, f64>>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if val != 0.0 {
            self.entries.push(Triplet::new(row, col, val));
        }
    }

    /// Adds every entry of `m` shifted by `(row0, col0)`, scaled by `alpha`.
    pub fn push_block(&mut self, row0: usize, col0: usize, m: &SparseMatrix, alpha: f64) {
        for t in m.triplet_iter() {
            self.push(row0 + t.row, col0 + t.col, alpha * *t.val);
        }
    }

    pub fn build(&self) -> Result<SparseMatrix> {
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &self.entries)
            .map_err(|e| Error::Factorization(format!("sparse assembly: {e:?}")))
    }
}

pub fn matvec(a: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len());
    let x = Col::from_fn(x.len(), |i| x[i]);
    let y: Col<f64> = a * &x;
    (0..y.nrows()).map(|i| y[i]).collect()
}

pub fn transpose(a: &SparseMatrix) -> SparseMatrix {
    a.rb()
        .transpose()
        .to_col_major()
        .expect("transpose of a valid sparse matrix")
}

pub fn to_dense(a: &SparseMatrix) -> Mat<f64> {
    a.to_dense()
}

/// `max |a_ij - b_ij|` over the union of both patterns.
pub fn max_abs_diff(a: &SparseMatrix, b: &SparseMatrix) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut acc = TripletBuilder::new(a.nrows(), a.ncols());
    acc.push_block(0, 0, a, 1.0);
    acc.push_block(0, 0, b, -1.0);
    let d = acc.build().expect("difference of compatible matrices");
    d.triplet_iter().map(|t| t.val.abs()).fold(0.0, f64::max)
}

pub fn norm_1(a: &SparseMatrix) -> f64 {
    let mut colsum = vec![0.0; a.ncols()];
    for t in a.triplet_iter() {
        colsum[t.col] += t.val.abs();
    }
    colsum.into_iter().fold(0.0, f64::max)
}

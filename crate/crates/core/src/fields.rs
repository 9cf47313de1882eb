//! Piecewise-constant discrete functions and the discrete inner products,
//! norms and seminorms built on them.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::grid::{ClusterPartition, EdgeCells, Grid};

/// One value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(pub Vec<f64>);

/// Two scalar components on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self(vec![0.0; grid.cell_count()])
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self(vec![c; grid.cell_count()])
    }

    /// Evaluates `f` at the cell centres (the interpolation `r_T`).
    pub fn sample(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self(
            (0..grid.cell_count())
                .map(|k| {
                    let [x, y] = grid.cell_center(k);
                    f(x, y)
                })
                .collect(),
        )
    }

    pub fn from_fn(grid: &Grid, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..grid.cell_count()).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.0.len() != grid.cell_count() {
            return Err(Error::GridMismatch {
                expected: grid.cell_count(),
                found: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self(self.0.iter().map(|v| a * v).collect())
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> ScalarField {
        ScalarField(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> ScalarField {
        ScalarField(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&ScalarField> for f64 {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        rhs.scaled(self)
    }
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn sample(grid: &Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let vals: Vec<[f64; 2]> = (0..grid.cell_count())
            .map(|k| {
                let [x, y] = grid.cell_center(k);
                f(x, y)
            })
            .collect();
        Self {
            x: ScalarField(vals.iter().map(|v| v[0]).collect()),
            y: ScalarField(vals.iter().map(|v| v[1]).collect()),
        }
    }

    pub fn at(&self, k: usize) -> [f64; 2] {
        [self.x.0[k], self.y.0[k]]
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        self.x.check(grid)?;
        self.y.check(grid)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            x: self.x.scaled(a),
            y: self.y.scaled(a),
        }
    }

    /// Components stacked as `[x; y]`.
    pub fn to_stacked(&self) -> Vec<f64> {
        self.x.0.iter().chain(&self.y.0).copied().collect()
    }

    pub fn from_stacked(v: &[f64]) -> Self {
        let n = v.len() / 2;
        Self {
            x: ScalarField(v[..n].to_vec()),
            y: ScalarField(v[n..2 * n].to_vec()),
        }
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: Self) -> VectorField {
        VectorField {
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
        }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: Self) -> VectorField {
        VectorField {
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
        }
    }
}

fn check_pair(grid: &Grid, v: &ScalarField, w: &ScalarField) -> Result<()> {
    v.check(grid)?;
    w.check(grid)
}

/// Discrete H¹ inner product with edge weights `|σ|/d_σ` (1 on interior and
/// 2 on boundary edges of a uniform grid).
pub fn h1_inner(grid: &Grid, v: &ScalarField, w: &ScalarField) -> Result<f64> {
    check_pair(grid, v, w)?;
    let (v, w) = (&v.0, &w.0);
    Ok(grid
        .edges()
        .iter()
        .map(|e| {
            let t = e.transmissivity();
            match e.cells {
                EdgeCells::Interior { k, l } => t * (v[k] - v[l]) * (w[k] - w[l]),
                EdgeCells::Boundary { k } => t * v[k] * w[k],
            }
        })
        .sum())
}

pub fn h1_norm(grid: &Grid, v: &ScalarField) -> Result<f64> {
    Ok(h1_inner(grid, v, v)?.sqrt())
}

pub fn h1_inner_vec(grid: &Grid, v: &VectorField, w: &VectorField) -> Result<f64> {
    Ok(h1_inner(grid, &v.x, &w.x)? + h1_inner(grid, &v.y, &w.y)?)
}

pub fn h1_norm_vec(grid: &Grid, v: &VectorField) -> Result<f64> {
    Ok(h1_inner_vec(grid, v, v)?.sqrt())
}

/// `∫ v w dx` for piecewise-constant functions.
pub fn l2_inner(grid: &Grid, v: &ScalarField, w: &ScalarField) -> Result<f64> {
    check_pair(grid, v, w)?;
    Ok((0..grid.cell_count())
        .map(|k| grid.cell_area(k) * v.0[k] * w.0[k])
        .sum())
}

pub fn l2_norm(grid: &Grid, v: &ScalarField) -> Result<f64> {
    Ok(l2_inner(grid, v, v)?.sqrt())
}

pub fn l2_inner_vec(grid: &Grid, v: &VectorField, w: &VectorField) -> Result<f64> {
    Ok(l2_inner(grid, &v.x, &w.x)? + l2_inner(grid, &v.y, &w.y)?)
}

pub fn l2_norm_vec(grid: &Grid, v: &VectorField) -> Result<f64> {
    Ok(l2_inner_vec(grid, v, v)?.sqrt())
}

fn jump_sum(grid: &Grid, p: &[f64], q: &[f64], edges: &[usize]) -> f64 {
    edges
        .iter()
        .map(|&id| match grid.edge(id).cells {
            EdgeCells::Interior { k, l } => (p[k] - p[l]) * (q[k] - q[l]),
            EdgeCells::Boundary { .. } => 0.0,
        })
        .sum()
}

/// `[p, q]_T`: unweighted sum of jump products over interior edges.
pub fn jump_inner(grid: &Grid, p: &ScalarField, q: &ScalarField) -> Result<f64> {
    check_pair(grid, p, q)?;
    Ok(jump_sum(grid, &p.0, &q.0, grid.interior_edge_ids()))
}

pub fn jump_seminorm(grid: &Grid, q: &ScalarField) -> Result<f64> {
    Ok(jump_inner(grid, q, q)?.sqrt())
}

/// `(|q|_□, |q|_+)`: jump seminorm restricted to cross-cluster and to
/// intra-cluster edges.
pub fn split_seminorms(
    grid: &Grid,
    q: &ScalarField,
    partition: &ClusterPartition,
) -> Result<(f64, f64)> {
    q.check(grid)?;
    partition.check_grid(grid)?;
    let cross = jump_sum(grid, &q.0, &q.0, partition.cross_edge_ids());
    let intra = jump_sum(grid, &q.0, &q.0, partition.intra_edge_ids());
    Ok((cross.sqrt(), intra.sqrt()))
}

/// Area-weighted mean.
pub fn mean(grid: &Grid, q: &ScalarField) -> Result<f64> {
    q.check(grid)?;
    let integral: f64 = (0..grid.cell_count())
        .map(|k| grid.cell_area(k) * q.0[k])
        .sum();
    Ok(integral / grid.total_area())
}

/// Projection onto zero-mean fields.
pub fn zero_mean_project(grid: &Grid, q: &ScalarField) -> Result<ScalarField> {
    let m = mean(grid, q)?;
    Ok(ScalarField(q.0.iter().map(|v| v - m).collect()))
}

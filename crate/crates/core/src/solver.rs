//! Direct solution of the saddle systems and the dense inf-sup probe.

use std::str::FromStr;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::{Mat, Side};
use serde::Deserialize;

use crate::assembly::SaddleSystem;
use crate::error::{Error, Result, SingularityKind};
use crate::fields::{mean, ScalarField, VectorField};
use crate::grid::{ClusterPartition, Grid};
use crate::operators::{divergence_matrix, laplacian_matrix};
use crate::sparse::{matvec, norm_1, transpose, SparseMatrix, TripletBuilder};

/// Reciprocal condition estimates below this value are reported as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// Largest pressure dimension accepted by the dense eigen-probe.
pub const DENSE_EIGEN_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Sparse LU with partial pivoting.
    #[default]
    SparseLu,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse-lu" | "lu" | "direct" => Ok(Backend::SparseLu),
            other => Err(Error::Config(format!("unknown solver backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub tol: f64,
    pub backend: Backend,
    /// Also factor the system without boundary pressure fluxes to expose
    /// pressure modes that only the boundary keeps alive.
    pub check_boundary_modes: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            backend: Backend::SparseLu,
            check_boundary_modes: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorStats {
    pub dim: usize,
    pub nnz: usize,
    /// 1-norm reciprocal condition estimate of the full system.
    pub rcond: f64,
    /// Same estimate for the interior-coupling companion, when computed.
    pub interior_rcond: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub u: VectorField,
    /// Cell pressures, zero mean.
    pub p: ScalarField,
    /// Pressure unknowns as solved (cells or clusters).
    pub pressure_dofs: Vec<f64>,
    /// `‖b − K x‖ / ‖b‖` (absolute when `b = 0`).
    pub residual_norm: f64,
    pub multiplier: f64,
    pub stats: FactorStats,
}

fn factor(m: &SparseMatrix) -> Result<Lu<usize, f64>> {
    m.sp_lu()
        .map_err(|e| Error::Factorization(format!("sparse LU: {e:?}")))
}

fn solve_vec(lu: &Lu<usize, f64>, b: &[f64], transposed: bool) -> Vec<f64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = if transposed {
        lu.solve_transpose(&rhs)
    } else {
        lu.solve(&rhs)
    };
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Hager–Higham estimate of `‖K⁻¹‖₁`; infinite when the factorization
/// produced non-finite values.
fn inverse_norm1_estimate(lu: &Lu<usize, f64>, n: usize) -> f64 {
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for iter in 0..5 {
        let y = solve_vec(lu, &x, false);
        if y.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        est = norm1(&y);
        let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = solve_vec(lu, &xi, true);
        if z.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if iter > 0 && zmax <= ztx {
            break;
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        x[j] = 1.0;
    }
    // alternating test vector guards against the estimator's blind spots
    let denom = (n.max(2) - 1) as f64;
    let b: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / denom)
        })
        .collect();
    let y = solve_vec(lu, &b, false);
    if y.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    est.max(2.0 * norm1(&y) / (3.0 * n as f64))
}

/// Reciprocal 1-norm condition estimate of `m` given its LU factors.
pub fn rcond_estimate(m: &SparseMatrix, lu: &Lu<usize, f64>) -> f64 {
    let inv = inverse_norm1_estimate(lu, m.nrows());
    if inv.is_finite() {
        1.0 / (norm_1(m) * inv)
    } else {
        0.0
    }
}

fn factor_checked(m: &SparseMatrix, kind: SingularityKind) -> Result<(Lu<usize, f64>, f64)> {
    let lu = match factor(m) {
        Ok(lu) => lu,
        Err(_) => return Err(Error::Singular { kind, rcond: 0.0 }),
    };
    let rcond = rcond_estimate(m, &lu);
    if !(rcond >= RCOND_THRESHOLD) {
        return Err(Error::Singular { kind, rcond });
    }
    Ok((lu, rcond))
}

/// Solves with the default options and tolerance `tol`.
pub fn solve(system: &SaddleSystem, tol: f64) -> Result<SolveReport> {
    solve_with(
        system,
        &SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_with(system: &SaddleSystem, opts: &SolverOptions) -> Result<SolveReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!("solver tolerance must be positive, got {}", opts.tol)));
    }
    let Backend::SparseLu = opts.backend;
    let k = system.matrix()?;
    let (lu, rcond) = factor_checked(&k, SingularityKind::System)?;
    let interior_rcond = if opts.check_boundary_modes {
        let companion = system.interior_coupling_matrix()?;
        let (_, r) = factor_checked(&companion, SingularityKind::BoundaryOnlyPressureMode)?;
        Some(r)
    } else {
        None
    };

    let b = system.full_rhs();
    let x = solve_vec(&lu, &b, false);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular {
            kind: SingularityKind::System,
            rcond: 0.0,
        });
    }
    let kx = matvec(&k, &x);
    let res: f64 = kx.iter().zip(&b).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
    let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let residual_norm = if bn > 0.0 { res / bn } else { res };
    if !(residual_norm <= opts.tol) {
        return Err(Error::NotConverged {
            residual: residual_norm,
            tol: opts.tol,
        });
    }

    let nv = system.velocity_dofs();
    let np = system.pressure_dofs();
    let u = VectorField::from_stacked(&x[..nv]);
    let pressure_dofs = x[nv..nv + np].to_vec();
    let p = system.cell_pressure(&pressure_dofs);
    let m = mean(&system.grid, &p)?;
    let p = ScalarField(p.0.iter().map(|v| v - m).collect());
    Ok(SolveReport {
        u,
        p,
        pressure_dofs,
        residual_norm,
        multiplier: x[nv + np],
        stats: FactorStats {
            dim: k.nrows(),
            nnz: k.compute_nnz(),
            rcond,
            interior_rcond,
        },
    })
}

/// Cholesky factors of the scalar H¹ matrix; the velocity block is two
/// copies of it.
pub struct H1Factor {
    llt: Llt<usize, f64>,
    n: usize,
}

impl H1Factor {
    pub fn new(grid: &Grid) -> Result<Self> {
        Self::from_matrix(&laplacian_matrix(grid)?)
    }

    pub fn from_matrix(lap: &SparseMatrix) -> Result<Self> {
        let llt = lap
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("H1 Cholesky: {e:?}")))?;
        Ok(Self {
            llt,
            n: lap.nrows(),
        })
    }

    /// Solves `A x = b` for a stacked two-component right-hand side.
    pub fn solve_stacked(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), 2 * self.n);
        let rhs = Mat::from_fn(self.n, 2, |i, c| b[c * self.n + i]);
        let x = self.llt.solve(&rhs);
        (0..2 * self.n).map(|i| x[(i % self.n, i / self.n)]).collect()
    }

    /// `A⁻¹ R` for a dense `2N × m` right-hand side.
    fn solve_dense(&self, r: &Mat<f64>) -> Mat<f64> {
        let n = self.n;
        let m = r.ncols();
        let stacked = Mat::from_fn(n, 2 * m, |i, c| {
            let (col, comp) = (c % m, c / m);
            r[(comp * n + i, col)]
        });
        let x = self.llt.solve(&stacked);
        Mat::from_fn(2 * n, m, |i, c| x[(i % n, (i / n) * m + c)])
    }
}

/// Pressure space probed by [`schur_smallest_eigen`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureSpace {
    /// One pressure per cell.
    Full,
    /// Pressures constant on each 2×2 cluster.
    ClusterConstant,
}

impl FromStr for PressureSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(PressureSpace::Full),
            "cluster" | "cluster-constant" => Ok(PressureSpace::ClusterConstant),
            other => Err(Error::Config(format!("unknown pressure space `{other}`"))),
        }
    }
}

/// `β_h²`: smallest eigenvalue of `M⁻¹ B A⁻¹ Bᵀ` on zero-mean pressures of
/// the given space, `M` being the diagonal area matrix. `None` when the
/// zero-mean space is `{0}`.
pub fn schur_smallest_eigen(system: &SaddleSystem, space: PressureSpace) -> Result<Option<f64>> {
    let grid = &system.grid;
    let div = if system.prolongation.is_none() {
        system.divergence.clone()
    } else {
        divergence_matrix(grid)?
    };
    let (div, mass) = match space {
        PressureSpace::Full => (div, grid.areas()),
        PressureSpace::ClusterConstant => {
            let part = ClusterPartition::new(grid)?;
            let mut pr = TripletBuilder::new(grid.cell_count(), part.cluster_count());
            for k in 0..grid.cell_count() {
                pr.push(k, part.cluster_of(k), 1.0);
            }
            let prt = transpose(&pr.build()?);
            let areas = grid.areas();
            let mass = (0..part.cluster_count())
                .map(|c| part.members(c).iter().map(|&k| areas[k]).sum())
                .collect();
            (&prt * &div, mass)
        }
    };
    let a_scalar = laplacian_matrix(grid)?;
    schur_eigen_dense(&a_scalar, &div, &mass)
}

/// Dense kernel of [`schur_smallest_eigen`] for explicit blocks.
pub fn schur_eigen_dense(a_scalar: &SparseMatrix, b: &SparseMatrix, mass: &[f64]) -> Result<Option<f64>> {
    let np = b.nrows();
    if np > DENSE_EIGEN_CAP {
        return Err(Error::DimensionCap {
            dim: np,
            cap: DENSE_EIGEN_CAP,
        });
    }
    if np <= 1 {
        return Ok(None);
    }
    let fac = H1Factor::from_matrix(a_scalar)?;
    let bt = transpose(b).to_dense();
    let x = fac.solve_dense(&bt);
    let s = b * &x;
    let isq: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let total: f64 = mass.iter().sum();
    let w: Vec<f64> = mass.iter().map(|m| (m / total).sqrt()).collect();
    let mut sh = Mat::from_fn(np, np, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]) * isq[i] * isq[j]);
    // lift the constant direction above the spectrum
    let shift = 1.0 + (0..np).map(|i| sh[(i, i)].abs()).sum::<f64>();
    for i in 0..np {
        for j in 0..np {
            sh[(i, j)] += shift * w[i] * w[j];
        }
    }
    let eig = sh
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Factorization(format!("dense eigensolve: {e:?}")))?;
    Ok(Some(eig[0].max(0.0)))
}

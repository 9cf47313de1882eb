//! Saddle-point systems for the natural, pressure-jump stabilized and
//! cluster-constant-pressure schemes.
//!
//! Every equation is multiplied by the cell area, so that the velocity block
//! is the discrete H¹ Gram matrix and the pressure coupling blocks are exact
//! transposes of each other. Unknowns are ordered `[u_x; u_y; p; μ]`, `μ`
//! being the multiplier of the zero-mean pressure constraint:
//!
//! ```text
//! [  A   G   0 ] [u]   [F]
//! [ -B  -C   m ] [p] = [0]
//! [  0   mᵀ  0 ] [μ]   [0]
//! ```
//!
//! `A`: H¹ matrix (two components), `G = |K| ∇_T`, `B = |K| div_T`
//! (`G = -Bᵀ`), `C = λ Σ |σ| d_σ [p][q]` over the stabilized edges, `m`: areas
//! of the pressure supports, `F = |K| f_K`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::{h1_inner_vec, ScalarField, VectorField};
use crate::grid::{ClusterPartition, Grid};
use crate::operators::{
    divergence_matrix, gradient_matrix, interior_gradient_matrix, laplacian_matrix,
    stabilization_matrix, StabVariant,
};
use crate::sparse::{matvec, transpose, SparseMatrix, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Natural,
    BrezziPitkaranta,
    ClusterJump,
    ClusterConstantPressure,
}

impl SchemeKind {
    pub fn uses_lambda(self) -> bool {
        matches!(self, SchemeKind::BrezziPitkaranta | SchemeKind::ClusterJump)
    }

    pub fn needs_partition(self) -> bool {
        matches!(
            self,
            SchemeKind::ClusterJump | SchemeKind::ClusterConstantPressure
        )
    }

    /// Short name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Natural => "natural",
            SchemeKind::BrezziPitkaranta => "bp",
            SchemeKind::ClusterJump => "cluster",
            SchemeKind::ClusterConstantPressure => "cluster-constant",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "natural" => Ok(SchemeKind::Natural),
            "bp" | "brezzi-pitkaranta" => Ok(SchemeKind::BrezziPitkaranta),
            "cluster" | "cluster-jump" => Ok(SchemeKind::ClusterJump),
            "cluster-constant" => Ok(SchemeKind::ClusterConstantPressure),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    /// Ignored by `Natural` and `ClusterConstantPressure`.
    pub lambda: f64,
    pub partition: Option<ClusterPartition>,
}

impl SchemeSpec {
    pub fn natural() -> Self {
        Self {
            kind: SchemeKind::Natural,
            lambda: 0.0,
            partition: None,
        }
    }

    pub fn brezzi_pitkaranta(lambda: f64) -> Self {
        Self {
            kind: SchemeKind::BrezziPitkaranta,
            lambda,
            partition: None,
        }
    }

    pub fn cluster_jump(lambda: f64, partition: ClusterPartition) -> Self {
        Self {
            kind: SchemeKind::ClusterJump,
            lambda,
            partition: Some(partition),
        }
    }

    pub fn cluster_constant(partition: ClusterPartition) -> Self {
        Self {
            kind: SchemeKind::ClusterConstantPressure,
            lambda: 0.0,
            partition: Some(partition),
        }
    }

    /// Builds the spec for `kind` on `grid`, creating the cluster partition
    /// when the scheme needs one.
    pub fn for_grid(kind: SchemeKind, lambda: f64, grid: &Grid) -> Result<Self> {
        let partition = if kind.needs_partition() {
            Some(ClusterPartition::new(grid)?)
        } else {
            None
        };
        let spec = Self {
            kind,
            lambda,
            partition,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.uses_lambda() && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidLambda(self.lambda));
        }
        if self.kind.needs_partition() && self.partition.is_none() {
            return Err(Error::MissingPartition(self.kind.name()));
        }
        Ok(())
    }

    /// λ actually applied to the stabilization block.
    pub fn effective_lambda(&self) -> f64 {
        if self.kind.uses_lambda() {
            self.lambda
        } else {
            0.0
        }
    }
}

/// Gauss–Legendre rule on `[0, 1]` with `order` points.
fn gauss_rule(order: usize) -> Result<(&'static [f64], &'static [f64])> {
    const X1: [f64; 1] = [0.5];
    const W1: [f64; 1] = [1.0];
    const X2: [f64; 2] = [0.211_324_865_405_187_13, 0.788_675_134_594_812_9];
    const W2: [f64; 2] = [0.5, 0.5];
    const X3: [f64; 3] = [0.112_701_665_379_258_31, 0.5, 0.887_298_334_620_741_7];
    const W3: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    match order {
        1 => Ok((&X1, &W1)),
        2 => Ok((&X2, &W2)),
        3 => Ok((&X3, &W3)),
        _ => Err(Error::Config(format!(
            "quadrature order must be 1, 2 or 3, got {order}"
        ))),
    }
}

pub const DEFAULT_QUADRATURE: usize = 3;

/// Cell means `(1/|K|) ∫_K f` by a tensor Gauss rule with `order` points per
/// direction (exact for polynomials of degree `2·order − 1`).
pub fn cell_means(
    grid: &Grid,
    f: impl Fn(f64, f64) -> [f64; 2],
    order: usize,
) -> Result<VectorField> {
    let (xs, ws) = gauss_rule(order)?;
    let vals: Vec<[f64; 2]> = (0..grid.cell_count())
        .map(|k| {
            let ([x0, x1], [y0, y1]) = grid.cell_bounds(k);
            let mut acc = [0.0, 0.0];
            for (a, wa) in xs.iter().zip(ws) {
                for (b, wb) in xs.iter().zip(ws) {
                    let v = f(x0 + a * (x1 - x0), y0 + b * (y1 - y0));
                    acc[0] += wa * wb * v[0];
                    acc[1] += wa * wb * v[1];
                }
            }
            acc
        })
        .collect();
    Ok(VectorField {
        x: ScalarField(vals.iter().map(|v| v[0]).collect()),
        y: ScalarField(vals.iter().map(|v| v[1]).collect()),
    })
}

/// Assembled saddle-point system.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub kind: SchemeKind,
    pub lambda: f64,
    pub grid: Grid,
    /// Velocity H¹ block, `2N × 2N`.
    pub a: SparseMatrix,
    /// Pressure gradient block `|K| ∇_T`, `2N × n_p`.
    pub gradient: SparseMatrix,
    /// Divergence block `|K| div_T`, `n_p × 2N`.
    pub divergence: SparseMatrix,
    /// Gradient without boundary-edge pressure fluxes, `2N × n_p`.
    pub interior_gradient: SparseMatrix,
    /// Pressure stabilization (λ included), `n_p × n_p`.
    pub c: SparseMatrix,
    /// Stabilization on cell pressures (λ included), `N × N`.
    pub c_cells: SparseMatrix,
    /// Areas of the pressure supports (cells or clusters).
    pub mass: Vec<f64>,
    /// Cell → pressure unknown map for cluster-constant pressures.
    pub prolongation: Option<SparseMatrix>,
    /// `|K| f_K`, stacked `[x; y]`.
    pub rhs: Vec<f64>,
}

impl SaddleSystem {
    pub fn cell_count(&self) -> usize {
        self.grid.cell_count()
    }

    pub fn velocity_dofs(&self) -> usize {
        2 * self.cell_count()
    }

    pub fn pressure_dofs(&self) -> usize {
        self.mass.len()
    }

    /// Total size including the multiplier.
    pub fn size(&self) -> usize {
        self.velocity_dofs() + self.pressure_dofs() + 1
    }

    /// Full right-hand side `[F; 0; 0]`.
    pub fn full_rhs(&self) -> Vec<f64> {
        let mut b = self.rhs.clone();
        b.resize(self.size(), 0.0);
        b
    }

    /// The complete symmetric matrix.
    pub fn matrix(&self) -> Result<SparseMatrix> {
        self.build_matrix(&self.gradient, &transpose(&self.gradient), true)
    }

    /// Companion matrix in which the boundary-edge pressure fluxes are
    /// removed from both coupling blocks.
    pub fn interior_coupling_matrix(&self) -> Result<SparseMatrix> {
        self.build_matrix(&self.interior_gradient, &transpose(&self.interior_gradient), true)
    }

    /// Matrix with the mass rows built from the divergence block (`-B`)
    /// rather than from `Gᵀ`; identical up to rounding.
    pub fn matrix_from_divergence(&self) -> Result<SparseMatrix> {
        self.build_matrix(&self.gradient, &self.divergence, false)
    }

    fn build_matrix(
        &self,
        grad: &SparseMatrix,
        mass_rows: &SparseMatrix,
        rows_are_gradient_transpose: bool,
    ) -> Result<SparseMatrix> {
        let nv = self.velocity_dofs();
        let np = self.pressure_dofs();
        let mut t = TripletBuilder::new(nv + np + 1, nv + np + 1);
        t.push_block(0, 0, &self.a, 1.0);
        t.push_block(0, nv, grad, 1.0);
        // Gᵀ = −B, so the mass rows are `Gᵀ u − C p + m μ = 0` either way
        let sign = if rows_are_gradient_transpose { 1.0 } else { -1.0 };
        t.push_block(nv, 0, mass_rows, sign);
        t.push_block(nv, nv, &self.c, -1.0);
        for (i, &w) in self.mass.iter().enumerate() {
            t.push(nv + i, nv + np, w);
            t.push(nv + np, nv + i, w);
        }
        t.build()
    }

    /// Cell pressures from pressure unknowns.
    pub fn cell_pressure(&self, p: &[f64]) -> ScalarField {
        match &self.prolongation {
            Some(pr) => ScalarField(matvec(pr, p)),
            None => ScalarField(p.to_vec()),
        }
    }

    /// `∫ f · u dx` with the assembled cell means.
    pub fn load(&self, u: &VectorField) -> f64 {
        self.rhs
            .iter()
            .zip(u.to_stacked())
            .map(|(f, v)| f * v)
            .sum()
    }
}

/// Assembles the system for `spec` on `grid` with cell-mean forcing `f_means`
/// (per unit area).
pub fn assemble_with_means(spec: &SchemeSpec, grid: &Grid, f_means: &VectorField) -> Result<SaddleSystem> {
    spec.validate()?;
    f_means.check(grid)?;
    if let Some(p) = &spec.partition {
        p.check_grid(grid)?;
    }
    let n = grid.cell_count();
    let lap = laplacian_matrix(grid)?;
    let mut a = TripletBuilder::new(2 * n, 2 * n);
    a.push_block(0, 0, &lap, 1.0);
    a.push_block(n, n, &lap, 1.0);
    let a = a.build()?;

    let lambda = spec.effective_lambda();
    let c_cells = match spec.kind {
        SchemeKind::BrezziPitkaranta => {
            scale(&stabilization_matrix(grid, StabVariant::Full, None)?, lambda)?
        }
        SchemeKind::ClusterJump => scale(
            &stabilization_matrix(grid, StabVariant::IntraCluster, spec.partition.as_ref())?,
            lambda,
        )?,
        SchemeKind::Natural | SchemeKind::ClusterConstantPressure => {
            TripletBuilder::new(n, n).build()?
        }
    };

    let grad = gradient_matrix(grid)?;
    let igrad = interior_gradient_matrix(grid)?;
    let div = divergence_matrix(grid)?;
    let areas = grid.areas();

    let (gradient, interior_gradient, divergence, c, mass, prolongation) = match spec.kind {
        SchemeKind::ClusterConstantPressure => {
            let part = spec.partition.as_ref().expect("validated");
            let mut pr = TripletBuilder::new(n, part.cluster_count());
            for k in 0..n {
                pr.push(k, part.cluster_of(k), 1.0);
            }
            let pr = pr.build()?;
            let prt = transpose(&pr);
            let gradient = multiply(&grad, &pr)?;
            let interior_gradient = multiply(&igrad, &pr)?;
            let divergence = multiply(&prt, &div)?;
            let mass = (0..part.cluster_count())
                .map(|c| part.members(c).iter().map(|&k| areas[k]).sum())
                .collect();
            let c = TripletBuilder::new(part.cluster_count(), part.cluster_count()).build()?;
            (gradient, interior_gradient, divergence, c, mass, Some(pr))
        }
        _ => (grad, igrad, div, c_cells.clone(), areas.clone(), None),
    };

    let rhs: Vec<f64> = f_means
        .to_stacked()
        .iter()
        .enumerate()
        .map(|(i, f)| areas[i % n] * f)
        .collect();

    Ok(SaddleSystem {
        kind: spec.kind,
        lambda,
        grid: grid.clone(),
        a,
        gradient,
        divergence,
        interior_gradient,
        c,
        c_cells,
        mass,
        prolongation,
        rhs,
    })
}

/// Assembles the system with forcing `f`, averaged over each cell with a
/// Gauss rule of `quad_order` points per direction.
pub fn assemble(
    spec: &SchemeSpec,
    grid: &Grid,
    f: impl Fn(f64, f64) -> [f64; 2],
    quad_order: usize,
) -> Result<SaddleSystem> {
    let means = cell_means(grid, f, quad_order)?;
    assemble_with_means(spec, grid, &means)
}

fn scale(m: &SparseMatrix, alpha: f64) -> Result<SparseMatrix> {
    let mut t = TripletBuilder::new(m.nrows(), m.ncols());
    t.push_block(0, 0, m, alpha);
    t.build()
}

fn multiply(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    let p: SparseMatrix = a * b;
    // drop explicit zeros from cancellation
    let mut t = TripletBuilder::new(p.nrows(), p.ncols());
    t.push_block(0, 0, &p, 1.0);
    t.build()
}

/// The two quadratic terms of the energy identity: `‖u‖_T²` and the
/// stabilization seminorm `pᵀ C p` (`λ h² |p|_T²` for the BP scheme on a
/// uniform grid, `λ h² |p|_+²` for the cluster scheme).
pub fn energy_functional(system: &SaddleSystem, u: &VectorField, p: &ScalarField) -> Result<(f64, f64)> {
    let grid = &system.grid;
    p.check(grid)?;
    let ku = h1_inner_vec(grid, u, u)?;
    let cp = matvec(&system.c_cells, &p.0);
    let stab = cp.iter().zip(&p.0).map(|(a, b)| a * b).sum();
    Ok((ku, stab))
}

//! Discrete Laplacian, gradient, divergence and pressure-jump operators.
//!
//! Every operator comes in three shapes: per-edge numerical fluxes
//! ([`FluxSet`]), a cell-update form (`*_apply`, values per unit area), and
//! an assembled sparse matrix acting on integrated quantities (rows
//! multiplied by `|K|`). On tensor grids the divergence flux interpolates the
//! velocity linearly to the edge,
//! `G_σ = |σ| (h⊥_L u_K + h⊥_K u_L)/(h⊥_K + h⊥_L) · n_σ`,
//! and the pressure flux is its transpose,
//! `H_σ = |σ| (h⊥_K p_K + h⊥_L p_L)/(h⊥_K + h⊥_L) n_σ`.

use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField};
use crate::grid::{ClusterPartition, Edge, EdgeCells, EdgeClass, Grid};
use crate::sparse::{SparseMatrix, TripletBuilder};

/// One flux per edge, oriented along the edge's stored normal (from `k` to
/// `l`, or outward on the boundary).
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSet<T> {
    pub values: Vec<T>,
}

impl FluxSet<f64> {
    /// Flux leaving `cell` through `edge`.
    pub fn outward(&self, grid: &Grid, edge: usize, cell: usize) -> f64 {
        match grid.edge(edge).cells {
            EdgeCells::Interior { l, .. } if l == cell => -self.values[edge],
            _ => self.values[edge],
        }
    }
}

/// Weights `(w_K, w_L)` of the linear interpolation from the cell centres to
/// the edge: `w_K = h⊥_L / (h⊥_K + h⊥_L)`.
fn interpolation_weights(e: &Edge) -> (f64, f64) {
    let [hk, hl] = e.h_perp;
    (hl / (hk + hl), hk / (hk + hl))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabVariant {
    /// All interior edges.
    Full,
    /// Only edges inside a cluster.
    IntraCluster,
}

fn stab_edges<'a>(
    grid: &'a Grid,
    variant: StabVariant,
    partition: Option<&'a ClusterPartition>,
) -> Result<Vec<usize>> {
    match variant {
        StabVariant::Full => Ok(grid.interior_edge_ids().to_vec()),
        StabVariant::IntraCluster => {
            let p = partition.ok_or(Error::MissingPartition("intra-cluster stabilization"))?;
            p.check_grid(grid)?;
            Ok(grid
                .interior_edge_ids()
                .iter()
                .copied()
                .filter(|&id| p.edge_class(id) == Some(EdgeClass::Intra))
                .collect())
        }
    }
}

// ---------------------------------------------------------------- fluxes

/// `F_σ(u)`: diffusive flux of `-∇u`, two-point on interior edges and towards
/// a zero boundary value on boundary edges.
pub fn laplacian_fluxes(grid: &Grid, u: &ScalarField) -> Result<FluxSet<f64>> {
    u.check(grid)?;
    let u = &u.0;
    let values = grid
        .edges()
        .iter()
        .map(|e| match e.cells {
            EdgeCells::Interior { k, l } => e.transmissivity() * (u[k] - u[l]),
            EdgeCells::Boundary { k } => e.transmissivity() * u[k],
        })
        .collect();
    Ok(FluxSet { values })
}

/// `G_σ(u)`; zero on boundary edges.
pub fn divergence_fluxes(grid: &Grid, u: &VectorField) -> Result<FluxSet<f64>> {
    u.check(grid)?;
    let values = grid
        .edges()
        .iter()
        .map(|e| match e.cells {
            EdgeCells::Interior { k, l } => {
                let (wk, wl) = interpolation_weights(e);
                let (a, b) = (u.at(k), u.at(l));
                e.length
                    * ((wk * a[0] + wl * b[0]) * e.normal[0] + (wk * a[1] + wl * b[1]) * e.normal[1])
            }
            EdgeCells::Boundary { .. } => 0.0,
        })
        .collect();
    Ok(FluxSet { values })
}

/// `H_σ(p)`; `|σ| p_K n_σ` on boundary edges.
pub fn gradient_fluxes(grid: &Grid, p: &ScalarField) -> Result<FluxSet<[f64; 2]>> {
    p.check(grid)?;
    let p = &p.0;
    let values = grid
        .edges()
        .iter()
        .map(|e| {
            let s = match e.cells {
                EdgeCells::Interior { k, l } => {
                    let (wk, wl) = interpolation_weights(e);
                    // swapped: the larger cell weighs on its own value
                    e.length * (wl * p[k] + wk * p[l])
                }
                EdgeCells::Boundary { k } => e.length * p[k],
            };
            [s * e.normal[0], s * e.normal[1]]
        })
        .collect();
    Ok(FluxSet { values })
}

impl FluxSet<[f64; 2]> {
    /// Flux leaving `cell` through `edge`.
    pub fn outward(&self, grid: &Grid, edge: usize, cell: usize) -> [f64; 2] {
        let v = self.values[edge];
        match grid.edge(edge).cells {
            EdgeCells::Interior { l, .. } if l == cell => [-v[0], -v[1]],
            _ => v,
        }
    }
}

// ---------------------------------------------------------- cell updates

/// `(-Δ_T u)_K = (1/|K|) Σ_σ F_σ(u)`.
pub fn laplacian_apply(grid: &Grid, u: &ScalarField) -> Result<ScalarField> {
    let f = laplacian_fluxes(grid, u)?;
    Ok(ScalarField::from_fn(grid, |k| {
        grid.cell_edges(k)
            .iter()
            .map(|&id| f.outward(grid, id, k))
            .sum::<f64>()
            / grid.cell_area(k)
    }))
}

pub fn laplacian_apply_vec(grid: &Grid, u: &VectorField) -> Result<VectorField> {
    Ok(VectorField {
        x: laplacian_apply(grid, &u.x)?,
        y: laplacian_apply(grid, &u.y)?,
    })
}

/// `(∇_T p)_K = (1/|K|) Σ_σ H_σ(p)`.
pub fn gradient_apply(grid: &Grid, p: &ScalarField) -> Result<VectorField> {
    let f = gradient_fluxes(grid, p)?;
    let vals: Vec<[f64; 2]> = (0..grid.cell_count())
        .map(|k| {
            let a = grid.cell_area(k);
            let s = grid.cell_edges(k).iter().fold([0.0, 0.0], |acc, &id| {
                let v = f.outward(grid, id, k);
                [acc[0] + v[0], acc[1] + v[1]]
            });
            [s[0] / a, s[1] / a]
        })
        .collect();
    Ok(VectorField {
        x: ScalarField(vals.iter().map(|v| v[0]).collect()),
        y: ScalarField(vals.iter().map(|v| v[1]).collect()),
    })
}

/// `(div_T u)_K = (1/|K|) Σ_{σ=K|L} G_σ(u)`.
pub fn divergence_apply(grid: &Grid, u: &VectorField) -> Result<ScalarField> {
    let f = divergence_fluxes(grid, u)?;
    Ok(ScalarField::from_fn(grid, |k| {
        grid.cell_edges(k)
            .iter()
            .map(|&id| f.outward(grid, id, k))
            .sum::<f64>()
            / grid.cell_area(k)
    }))
}

/// Pressure Laplacian used for stabilization,
/// `(1/|K|) Σ (|σ|/d_σ)(p_K − p_L)` over all interior edges (`Full`) or the
/// intra-cluster ones; `(1/h²) Σ (p_K − p_L)` on uniform grids.
pub fn stab_laplacian_apply(
    grid: &Grid,
    p: &ScalarField,
    variant: StabVariant,
    partition: Option<&ClusterPartition>,
) -> Result<ScalarField> {
    jump_operator_apply(grid, p, variant, partition, Edge::transmissivity)
}

/// Mass-balance stabilization term `T_S / λ`:
/// `(1/|K|) Σ |σ| d_σ (p_K − p_L)`, which is `h² (−Δ_S p)_K` on uniform grids.
pub fn stabilization_apply(
    grid: &Grid,
    p: &ScalarField,
    variant: StabVariant,
    partition: Option<&ClusterPartition>,
) -> Result<ScalarField> {
    jump_operator_apply(grid, p, variant, partition, stab_weight)
}

fn stab_weight(e: &Edge) -> f64 {
    e.length * e.distance
}

fn jump_operator_apply(
    grid: &Grid,
    p: &ScalarField,
    variant: StabVariant,
    partition: Option<&ClusterPartition>,
    weight: fn(&Edge) -> f64,
) -> Result<ScalarField> {
    p.check(grid)?;
    let edges = stab_edges(grid, variant, partition)?;
    let mut out = vec![0.0; grid.cell_count()];
    for id in edges {
        let e = grid.edge(id);
        if let EdgeCells::Interior { k, l } = e.cells {
            let flux = weight(e) * (p.0[k] - p.0[l]);
            out[k] += flux;
            out[l] -= flux;
        }
    }
    for (k, v) in out.iter_mut().enumerate() {
        *v /= grid.cell_area(k);
    }
    Ok(ScalarField(out))
}

/// `∫ ∇_T p · v dx + ∫ p div_T v dx`, zero up to rounding.
pub fn duality_defect(grid: &Grid, p: &ScalarField, v: &VectorField) -> Result<f64> {
    let (a, b) = duality_terms(grid, p, v)?;
    Ok(a + b)
}

/// The two terms of [`duality_defect`] separately.
pub fn duality_terms(grid: &Grid, p: &ScalarField, v: &VectorField) -> Result<(f64, f64)> {
    v.check(grid)?;
    let g = gradient_apply(grid, p)?;
    let d = divergence_apply(grid, v)?;
    let mut a = 0.0;
    let mut b = 0.0;
    for k in 0..grid.cell_count() {
        let area = grid.cell_area(k);
        a += area * (g.x.0[k] * v.x.0[k] + g.y.0[k] * v.y.0[k]);
        b += area * p.0[k] * d.0[k];
    }
    Ok((a, b))
}

// -------------------------------------------------------------- matrices

/// `|K| (−Δ_T u)_K` for one scalar component: the discrete H¹ Gram matrix.
pub fn laplacian_matrix(grid: &Grid) -> Result<SparseMatrix> {
    let n = grid.cell_count();
    let mut t = TripletBuilder::new(n, n);
    for e in grid.edges() {
        let w = e.transmissivity();
        match e.cells {
            EdgeCells::Interior { k, l } => {
                t.push(k, k, w);
                t.push(l, l, w);
                t.push(k, l, -w);
                t.push(l, k, -w);
            }
            EdgeCells::Boundary { k } => t.push(k, k, w),
        }
    }
    t.build()
}

/// `|K| (∇_T p)_K`, rows `[x-components; y-components]`, `2N × N`.
pub fn gradient_matrix(grid: &Grid) -> Result<SparseMatrix> {
    gradient_matrix_impl(grid, true)
}

/// Gradient without the boundary-edge fluxes `|σ| p_K n_σ`.
pub fn interior_gradient_matrix(grid: &Grid) -> Result<SparseMatrix> {
    gradient_matrix_impl(grid, false)
}

fn gradient_matrix_impl(grid: &Grid, with_boundary: bool) -> Result<SparseMatrix> {
    let n = grid.cell_count();
    let mut t = TripletBuilder::new(2 * n, n);
    for e in grid.edges() {
        match e.cells {
            EdgeCells::Interior { k, l } => {
                let (wk, wl) = interpolation_weights(e);
                for c in 0..2 {
                    let s = e.length * e.normal[c];
                    if s == 0.0 {
                        continue;
                    }
                    // H_σ enters K with +n and L with −n
                    t.push(c * n + k, k, s * wl);
                    t.push(c * n + k, l, s * wk);
                    t.push(c * n + l, k, -s * wl);
                    t.push(c * n + l, l, -s * wk);
                }
            }
            EdgeCells::Boundary { k } if with_boundary => {
                for c in 0..2 {
                    t.push(c * n + k, k, e.length * e.normal[c]);
                }
            }
            EdgeCells::Boundary { .. } => {}
        }
    }
    t.build()
}

/// `|K| (div_T u)_K`, `N × 2N` acting on `[u_x; u_y]`.
pub fn divergence_matrix(grid: &Grid) -> Result<SparseMatrix> {
    let n = grid.cell_count();
    let mut t = TripletBuilder::new(n, 2 * n);
    for e in grid.interior_edges() {
        if let EdgeCells::Interior { k, l } = e.cells {
            let (wk, wl) = interpolation_weights(e);
            for c in 0..2 {
                let s = e.length * e.normal[c];
                if s == 0.0 {
                    continue;
                }
                t.push(k, c * n + k, s * wk);
                t.push(k, c * n + l, s * wl);
                t.push(l, c * n + k, -s * wk);
                t.push(l, c * n + l, -s * wl);
            }
        }
    }
    t.build()
}

/// `|K| T_S / λ`: symmetric positive semidefinite jump matrix with edge
/// weights `|σ| d_σ`.
pub fn stabilization_matrix(
    grid: &Grid,
    variant: StabVariant,
    partition: Option<&ClusterPartition>,
) -> Result<SparseMatrix> {
    let n = grid.cell_count();
    let mut t = TripletBuilder::new(n, n);
    for id in stab_edges(grid, variant, partition)? {
        let e = grid.edge(id);
        if let EdgeCells::Interior { k, l } = e.cells {
            let w = stab_weight(e);
            t.push(k, k, w);
            t.push(l, l, w);
            t.push(k, l, -w);
            t.push(l, k, -w);
        }
    }
    t.build()
}

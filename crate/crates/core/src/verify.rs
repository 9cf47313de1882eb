//! Executable checks: checkerboard instability, the cluster inequality, the
//! measured pressure-stability inequality, flux consistency and
//! manufactured-solution convergence.

use std::f64::consts::PI;
use std::io::Write;
use std::str::FromStr;

use crate::assembly::{assemble, cell_means, SchemeKind, SchemeSpec};
use crate::error::{Error, Result};
use crate::fields::{
    h1_norm_vec, jump_seminorm, l2_norm, l2_norm_vec, split_seminorms, zero_mean_project,
    ScalarField, VectorField,
};
use crate::grid::{ClusterPartition, EdgeCells, Grid};
use crate::operators::{divergence_fluxes, gradient_apply, gradient_matrix, laplacian_fluxes};
use crate::solver::{schur_smallest_eigen, solve_with, H1Factor, PressureSpace, SolverOptions};
use crate::sparse::matvec;

// ------------------------------------------------------ manufactured cases

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManufacturedCase {
    /// `u = 0`, `p = cos πx cos πy`.
    Ms0,
    /// Stream function `ψ = x²(1−x)²y²(1−y)²`, `p = cos πx cos πy`.
    Ms1,
}

impl FromStr for ManufacturedCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ms0" => Ok(Self::Ms0),
            "ms1" => Ok(Self::Ms1),
            other => Err(Error::Config(format!("unknown manufactured case `{other}`"))),
        }
    }
}

// x²(1−x)² and its first three derivatives
fn bump(x: f64) -> [f64; 4] {
    let x1 = 1.0 - x;
    [
        x * x * x1 * x1,
        2.0 * x * x1 * (1.0 - 2.0 * x),
        2.0 * (1.0 - 6.0 * x + 6.0 * x * x),
        24.0 * x - 12.0,
    ]
}

impl ManufacturedCase {
    pub fn id(self) -> &'static str {
        match self {
            Self::Ms0 => "ms0",
            Self::Ms1 => "ms1",
        }
    }

    pub fn stream_function(self, x: f64, y: f64) -> f64 {
        match self {
            Self::Ms0 => 0.0,
            Self::Ms1 => bump(x)[0] * bump(y)[0],
        }
    }

    pub fn velocity(self, x: f64, y: f64) -> [f64; 2] {
        match self {
            Self::Ms0 => [0.0, 0.0],
            Self::Ms1 => {
                let (bx, by) = (bump(x), bump(y));
                [bx[0] * by[1], -bx[1] * by[0]]
            }
        }
    }

    pub fn pressure(self, x: f64, y: f64) -> f64 {
        (PI * x).cos() * (PI * y).cos()
    }

    pub fn pressure_gradient(self, x: f64, y: f64) -> [f64; 2] {
        [
            -PI * (PI * x).sin() * (PI * y).cos(),
            -PI * (PI * x).cos() * (PI * y).sin(),
        ]
    }

    /// `−Δu`.
    pub fn minus_laplacian(self, x: f64, y: f64) -> [f64; 2] {
        match self {
            Self::Ms0 => [0.0, 0.0],
            Self::Ms1 => {
                let (bx, by) = (bump(x), bump(y));
                [
                    -(bx[2] * by[1] + bx[0] * by[3]),
                    bx[3] * by[0] + bx[1] * by[2],
                ]
            }
        }
    }

    /// `f = −Δu + ∇p`.
    pub fn forcing(self, x: f64, y: f64) -> [f64; 2] {
        let l = self.minus_laplacian(x, y);
        let g = self.pressure_gradient(x, y);
        [l[0] + g[0], l[1] + g[1]]
    }
}

// ------------------------------------------------------------ convergence

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub err_u_h1: f64,
    pub err_p_l2: f64,
    /// Orders relative to the previous row.
    pub order_u: Option<f64>,
    pub order_p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub scheme: SchemeKind,
    pub lambda: f64,
    pub rows: Vec<ConvergenceRow>,
}

pub const CONVERGENCE_HEADER: [&str; 8] = [
    "scheme", "lambda", "n", "h", "err_u_h1", "err_p_l2", "order_u", "order_p",
];

/// Full-precision decimal used in every CSV output.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl ConvergenceTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(CONVERGENCE_HEADER)?;
        for r in &self.rows {
            wr.write_record([
                self.scheme.name().to_string(),
                fmt_f64(self.lambda),
                r.n.to_string(),
                fmt_f64(r.h),
                fmt_f64(r.err_u_h1),
                fmt_f64(r.err_p_l2),
                fmt_opt(r.order_u),
                fmt_opt(r.order_p),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn last_orders(&self) -> Option<(f64, f64)> {
        let r = self.rows.last()?;
        Some((r.order_u?, r.order_p?))
    }
}

fn order(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

/// Discrete errors of a solution against the interpolated exact one:
/// `(‖r_T u − u_h‖_T, ‖r_T p − p_h‖_L²)`, pressures aligned to zero mean.
pub fn solution_errors(
    grid: &Grid,
    case: ManufacturedCase,
    u: &VectorField,
    p: &ScalarField,
) -> Result<(f64, f64)> {
    let ue = VectorField::sample(grid, |x, y| case.velocity(x, y));
    let pe = zero_mean_project(grid, &ScalarField::sample(grid, |x, y| case.pressure(x, y)))?;
    let ph = zero_mean_project(grid, p)?;
    Ok((h1_norm_vec(grid, &(&ue - u))?, l2_norm(grid, &(&pe - &ph))?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub quad_order: usize,
    pub solver: SolverOptions,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            quad_order: crate::assembly::DEFAULT_QUADRATURE,
            solver: SolverOptions::default(),
        }
    }
}

/// Solves `case` on uniform grids `n_list` with the scheme of `spec` (the
/// partition is rebuilt for each grid).
pub fn run_convergence(
    spec: &SchemeSpec,
    case: ManufacturedCase,
    n_list: &[usize],
    opts: &ConvergenceOptions,
) -> Result<ConvergenceTable> {
    if n_list.is_empty() {
        return Err(Error::Config("empty list of grid sizes".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("grid sizes must be strictly increasing".into()));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = Grid::uniform(n)?;
        let spec = SchemeSpec::for_grid(spec.kind, spec.lambda, &grid)?;
        let sys = assemble(&spec, &grid, |x, y| case.forcing(x, y), opts.quad_order)?;
        let rep = solve_with(&sys, &opts.solver)?;
        let (eu, ep) = solution_errors(&grid, case, &rep.u, &rep.p)?;
        let h = 1.0 / n as f64;
        let (order_u, order_p) = match rows.last() {
            Some(prev) => (
                Some(order(prev.err_u_h1, eu, prev.h, h)),
                Some(order(prev.err_p_l2, ep, prev.h, h)),
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            n,
            h,
            err_u_h1: eu,
            err_p_l2: ep,
            order_u,
            order_p,
        });
    }
    Ok(ConvergenceTable {
        scheme: spec.kind,
        lambda: spec.effective_lambda(),
        rows,
    })
}

// ---------------------------------------------------------------- stability

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub n: usize,
    pub u_h1: f64,
    pub p_l2: f64,
    pub f_l2: f64,
}

impl StabilityRow {
    /// `(‖u_h‖_T + ‖p_h‖_L²) / ‖f‖_L²`.
    pub fn ratio(&self) -> f64 {
        (self.u_h1 + self.p_l2) / self.f_l2
    }
}

/// Solution norms for the forcing of `case` over a sequence of grids.
pub fn stability_sweep(
    spec: &SchemeSpec,
    case: ManufacturedCase,
    n_list: &[usize],
    opts: &ConvergenceOptions,
) -> Result<Vec<StabilityRow>> {
    n_list
        .iter()
        .map(|&n| {
            let grid = Grid::uniform(n)?;
            let spec = SchemeSpec::for_grid(spec.kind, spec.lambda, &grid)?;
            let f = cell_means(&grid, |x, y| case.forcing(x, y), opts.quad_order)?;
            let sys = crate::assembly::assemble_with_means(&spec, &grid, &f)?;
            let rep = solve_with(&sys, &opts.solver)?;
            Ok(StabilityRow {
                n,
                u_h1: h1_norm_vec(&grid, &rep.u)?,
                p_l2: l2_norm(&grid, &rep.p)?,
                f_l2: l2_norm_vec(&grid, &f)?,
            })
        })
        .collect()
}

// ------------------------------------------------------------- checkerboard

/// `(p_cb)_K = (−1)^{i+j}` on a uniform grid with an even number of cells
/// per direction.
pub fn checkerboard_field(grid: &Grid) -> Result<ScalarField> {
    if grid.uniform_step().is_none() {
        return Err(Error::Checkerboard("grid is not uniform".into()));
    }
    if grid.nx() % 2 != 0 || grid.ny() % 2 != 0 {
        return Err(Error::Checkerboard(format!(
            "{}×{} cells: the field would not have zero mean",
            grid.nx(),
            grid.ny()
        )));
    }
    Ok(ScalarField::from_fn(grid, |k| {
        let (i, j) = grid.ij(k);
        if (i + j) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }))
}

/// `sup_v ∫∇_T q·v / ‖v‖_T` with the H¹ factors supplied.
pub fn gradient_dual_norm_with(grid: &Grid, factor: &H1Factor, q: &ScalarField) -> Result<f64> {
    q.check(grid)?;
    let g = matvec(&gradient_matrix(grid)?, &q.0);
    let x = factor.solve_stacked(&g);
    let s: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(s.max(0.0).sqrt())
}

/// `sup_v ∫∇_T q·v dx / ‖v‖_T`, computed as `√(gᵀ A⁻¹ g)` with `g` the
/// gradient load vector.
pub fn gradient_dual_norm(grid: &Grid, q: &ScalarField) -> Result<f64> {
    gradient_dual_norm_with(grid, &H1Factor::new(grid)?, q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualNormRow {
    pub n: usize,
    pub h: f64,
    pub dual_cb: f64,
    /// `dual(p_cb) / ‖p_cb‖_L²`.
    pub ratio_cb: f64,
    /// Same ratio for the sampled `cos πx cos πy`.
    pub ratio_smooth: f64,
}

/// Least-squares slope of `log ys` against `log xs`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

pub fn checkerboard_sweep(n_list: &[usize]) -> Result<Vec<DualNormRow>> {
    n_list
        .iter()
        .map(|&n| {
            let grid = Grid::uniform(n)?;
            let fac = H1Factor::new(&grid)?;
            let cb = checkerboard_field(&grid)?;
            let smooth = zero_mean_project(
                &grid,
                &ScalarField::sample(&grid, |x, y| (PI * x).cos() * (PI * y).cos()),
            )?;
            let dual_cb = gradient_dual_norm_with(&grid, &fac, &cb)?;
            let dual_s = gradient_dual_norm_with(&grid, &fac, &smooth)?;
            Ok(DualNormRow {
                n,
                h: 1.0 / n as f64,
                dual_cb,
                ratio_cb: dual_cb / l2_norm(&grid, &cb)?,
                ratio_smooth: dual_s / l2_norm(&grid, &smooth)?,
            })
        })
        .collect()
}

/// Decay exponent `α` in `ratio_cb ∝ h^α`.
pub fn checkerboard_exponent(rows: &[DualNormRow]) -> f64 {
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let rs: Vec<f64> = rows.iter().map(|r| r.ratio_cb).collect();
    log_slope(&hs, &rs)
}

// ---------------------------------------------------------------- inf-sup

#[derive(Debug, Clone, PartialEq)]
pub struct InfSupRow {
    pub n: usize,
    /// `None` when the zero-mean pressure space is trivial.
    pub beta: Option<f64>,
}

pub fn infsup_sweep(space: PressureSpace, n_list: &[usize]) -> Result<Vec<InfSupRow>> {
    n_list
        .iter()
        .map(|&n| {
            let grid = Grid::uniform(n)?;
            let sys = assemble(&SchemeSpec::natural(), &grid, |_, _| [0.0, 0.0], 1)?;
            let beta = schur_smallest_eigen(&sys, space)?.map(f64::sqrt);
            Ok(InfSupRow { n, beta })
        })
        .collect()
}

// ---------------------------------------------------------------- clusters

/// Test velocity of the cluster inequality: `v_K = (q_{L□} − q_K, q_{M□} − q_K)`
/// for a cell in the upper-right corner of its cluster, `L□`, `M□` being the
/// neighbours across the cross-cluster edges in x and y. Other cells use the
/// mirrored construction, so a component changes sign when its cross-cluster
/// neighbour lies in the negative direction. A component is zero where that
/// neighbour lies outside the domain.
pub fn lemma3_test_velocity(
    grid: &Grid,
    q: &ScalarField,
    partition: Option<&ClusterPartition>,
) -> Result<VectorField> {
    let partition = partition.ok_or(Error::MissingPartition("cluster test velocity"))?;
    partition.check_grid(grid)?;
    q.check(grid)?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut v = VectorField::zeros(grid);
    for k in 0..grid.cell_count() {
        let (i, j) = grid.ij(k);
        let ni = if i % 2 == 0 { i.checked_sub(1) } else { Some(i + 1).filter(|&a| a < nx) };
        let nj = if j % 2 == 0 { j.checked_sub(1) } else { Some(j + 1).filter(|&b| b < ny) };
        let sx = if i % 2 == 0 { -1.0 } else { 1.0 };
        let sy = if j % 2 == 0 { -1.0 } else { 1.0 };
        if let Some(a) = ni {
            v.x.0[k] = sx * (q.0[grid.index(a, j)] - q.0[k]);
        }
        if let Some(b) = nj {
            v.y.0[k] = sy * (q.0[grid.index(i, b)] - q.0[k]);
        }
    }
    Ok(v)
}

/// Both sides of `∫∇_T q·v dx ≥ (h/2)(|q|_□² − |q|_+²)` for the test
/// velocity of `q` on a uniform clustered grid.
pub fn lemma3_sides(grid: &Grid, q: &ScalarField, partition: &ClusterPartition) -> Result<(f64, f64)> {
    let h = grid
        .uniform_step()
        .ok_or_else(|| Error::InvalidGrid("cluster inequality needs a uniform grid".into()))?;
    let v = lemma3_test_velocity(grid, q, Some(partition))?;
    let g = gradient_apply(grid, q)?;
    let lhs = (0..grid.cell_count())
        .map(|k| grid.cell_area(k) * (g.x.0[k] * v.x.0[k] + g.y.0[k] * v.y.0[k]))
        .sum();
    let (cross, intra) = split_seminorms(grid, q, partition)?;
    Ok((lhs, 0.5 * h * (cross * cross - intra * intra)))
}

// ---------------------------------------------------- pressure inequality

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Sample {
    /// Dual norm of the gradient.
    pub dual: f64,
    pub l2: f64,
    /// `h |q|_T`.
    pub h_jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Probe {
    pub h: f64,
    pub samples: Vec<Lemma2Sample>,
    /// Fitted `c₁ = c₂`; `None` when every sample is degenerate (`q = 0`),
    /// `+∞` when no sample constrains it.
    pub constant: Option<f64>,
}

impl Lemma2Probe {
    pub fn c1(&self) -> Option<f64> {
        self.constant
    }

    pub fn c2(&self) -> Option<f64> {
        self.constant
    }

    pub fn is_skipped(&self) -> bool {
        self.constant.is_none()
    }
}

/// Measures `dual(q) ≥ c₁‖q‖_L² − c₂ h|q|_T` over the samples (each
/// projected to zero mean). The constants are fitted with `c₁ = c₂ = c`, the
/// largest `c` compatible with every sample:
/// `c = min { dual / (‖q‖ − h|q|_T) : ‖q‖ > h|q|_T }`.
pub fn lemma2_inequality_probe(grid: &Grid, samples: &[ScalarField]) -> Result<Lemma2Probe> {
    let h = grid.max_step();
    let fac = H1Factor::new(grid)?;
    let mut out = Vec::new();
    for q in samples {
        let q = zero_mean_project(grid, q)?;
        let l2 = l2_norm(grid, &q)?;
        if l2 == 0.0 {
            continue;
        }
        out.push(Lemma2Sample {
            dual: gradient_dual_norm_with(grid, &fac, &q)?,
            l2,
            h_jump: h * jump_seminorm(grid, &q)?,
        });
    }
    let constant = if out.is_empty() {
        None
    } else {
        Some(
            out.iter()
                .filter(|s| s.l2 > s.h_jump)
                .map(|s| s.dual / (s.l2 - s.h_jump))
                .fold(f64::INFINITY, f64::min),
        )
    };
    Ok(Lemma2Probe {
        h,
        samples: out,
        constant,
    })
}

// ------------------------------------------------------------- consistency

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConsistencyReport {
    /// Max over interior edges of both flux defects for the affine basis.
    pub interior: f64,
    /// Max boundary defect of the diffusive flux for affine fields vanishing
    /// on the edge.
    pub boundary: f64,
}

impl ConsistencyReport {
    pub fn max(&self) -> f64 {
        self.interior.max(self.boundary)
    }
}

/// Flux defects `|F_σ(r_T φ) + ∫_σ ∇φ·n|` and `|G_σ(r_T φ) − ∫_σ φ·n|` over
/// the affine basis (`1, x, y` in each component).
pub fn consistency_check(grid: &Grid) -> Result<ConsistencyReport> {
    type Affine = fn(f64, f64) -> f64;
    let basis: [(Affine, [f64; 2]); 3] = [
        (|_, _| 1.0, [0.0, 0.0]),
        (|x, _| x, [1.0, 0.0]),
        (|_, y| y, [0.0, 1.0]),
    ];
    let mut rep = ConsistencyReport::default();
    for (phi, grad) in basis {
        let s = ScalarField::sample(grid, phi);
        let f = laplacian_fluxes(grid, &s)?;
        for comp in 0..2 {
            let v = if comp == 0 {
                VectorField {
                    x: s.clone(),
                    y: ScalarField::zeros(grid),
                }
            } else {
                VectorField {
                    x: ScalarField::zeros(grid),
                    y: s.clone(),
                }
            };
            let g = divergence_fluxes(grid, &v)?;
            for &id in grid.interior_edge_ids() {
                let e = grid.edge(id);
                let dn = grad[0] * e.normal[0] + grad[1] * e.normal[1];
                rep.interior = rep.interior.max((f.values[id] + e.length * dn).abs());
                let [mx, my] = e.midpoint;
                let exact = e.length * phi(mx, my) * e.normal[comp];
                rep.interior = rep.interior.max((g.values[id] - exact).abs());
            }
        }
    }
    // boundary: φ = (x − m_σ)·n vanishes on σ and has unit normal derivative
    for &id in grid.boundary_edge_ids() {
        let e = grid.edge(id);
        let EdgeCells::Boundary { k } = e.cells else { continue };
        let c = grid.cell_center(k);
        let phi_k = (c[0] - e.midpoint[0]) * e.normal[0] + (c[1] - e.midpoint[1]) * e.normal[1];
        let flux = e.transmissivity() * phi_k;
        rep.boundary = rep.boundary.max((flux + e.length).abs());
    }
    Ok(rep)
}

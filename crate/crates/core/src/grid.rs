//! Structured control-volume meshes of the unit square (or any rectangle)
//! and their 2×2 cluster partitions.
//!
//! Cells are numbered lexicographically, `k = j * nx + i`, where `i` is the
//! column (x index) and `j` the row (y index). Every cell centre is the mass
//! centre of the cell.

use std::str::FromStr;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cells adjacent to an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeCells {
    /// `k` is the cell on the lower-coordinate side; the stored normal points
    /// from `k` to `l`.
    Interior { k: usize, l: usize },
    /// The stored normal points out of the domain.
    Boundary { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Edge normal along x (a vertical edge).
    X,
    /// Edge normal along y (a horizontal edge).
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub cells: EdgeCells,
    pub axis: Axis,
    /// Unit normal, `n_{K|L}` for interior edges, outward for boundary edges.
    pub normal: [f64; 2],
    /// `|σ|`.
    pub length: f64,
    /// `d_{KL}` for interior edges, `d_{Kσ}` for boundary edges.
    pub distance: f64,
    /// Widths of the adjacent cells perpendicular to the edge; the second
    /// entry is zero on boundary edges.
    pub h_perp: [f64; 2],
    pub midpoint: [f64; 2],
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        matches!(self.cells, EdgeCells::Interior { .. })
    }

    /// Transmissivity `|σ| / d_σ`.
    pub fn transmissivity(&self) -> f64 {
        self.length / self.distance
    }

    /// Normal oriented outward from `cell`.
    ///
    /// Panics if `cell` is not adjacent to the edge.
    pub fn normal_from(&self, cell: usize) -> [f64; 2] {
        match self.cells {
            EdgeCells::Interior { k, .. } if cell == k => self.normal,
            EdgeCells::Interior { l, .. } if cell == l => [-self.normal[0], -self.normal[1]],
            EdgeCells::Boundary { k } if cell == k => self.normal,
            _ => panic!("cell {cell} is not adjacent to edge {self:?}"),
        }
    }

    /// The cell across the edge from `cell`, if any.
    pub fn other(&self, cell: usize) -> Option<usize> {
        match self.cells {
            EdgeCells::Interior { k, l } if cell == k => Some(l),
            EdgeCells::Interior { k, l } if cell == l => Some(k),
            _ => None,
        }
    }
}

/// Tensor-product grid with edge topology and geometric measures.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    edges: Vec<Edge>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    /// Per cell: west, east, south, north edge ids.
    cell_edges: Vec<[usize; 4]>,
    uniform_step: Option<f64>,
}

impl Grid {
    /// Uniform `n × n` grid of the unit square, `h = 1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells per direction, got {n}"
            )));
        }
        let coords: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let mut grid = Self::tensor(coords.clone(), coords)?;
        grid.uniform_step = Some(1.0 / n as f64);
        Ok(grid)
    }

    /// Tensor-product grid from strictly increasing abscissas and ordinates.
    pub fn tensor(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_coords("x", &xs)?;
        check_coords("y", &ys)?;
        let nx = xs.len() - 1;
        let ny = ys.len() - 1;
        let dx: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let dy: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
        let cx = |i: usize| 0.5 * (xs[i] + xs[i + 1]);
        let cy = |j: usize| 0.5 * (ys[j] + ys[j + 1]);
        let idx = |i: usize, j: usize| j * nx + i;

        let mut edges = Vec::with_capacity((nx + 1) * ny + nx * (ny + 1));
        let mut cell_edges = vec![[usize::MAX; 4]; nx * ny];

        // vertical edges (normal along x)
        for j in 0..ny {
            for e in 0..=nx {
                let id = edges.len();
                let midpoint = [xs[e], cy(j)];
                let length = dy[j];
                let edge = if e == 0 {
                    cell_edges[idx(0, j)][0] = id;
                    Edge {
                        cells: EdgeCells::Boundary { k: idx(0, j) },
                        axis: Axis::X,
                        normal: [-1.0, 0.0],
                        length,
                        distance: 0.5 * dx[0],
                        h_perp: [dx[0], 0.0],
                        midpoint,
                    }
                } else if e == nx {
                    cell_edges[idx(nx - 1, j)][1] = id;
                    Edge {
                        cells: EdgeCells::Boundary { k: idx(nx - 1, j) },
                        axis: Axis::X,
                        normal: [1.0, 0.0],
                        length,
                        distance: 0.5 * dx[nx - 1],
                        h_perp: [dx[nx - 1], 0.0],
                        midpoint,
                    }
                } else {
                    let (k, l) = (idx(e - 1, j), idx(e, j));
                    cell_edges[k][1] = id;
                    cell_edges[l][0] = id;
                    Edge {
                        cells: EdgeCells::Interior { k, l },
                        axis: Axis::X,
                        normal: [1.0, 0.0],
                        length,
                        distance: cx(e) - cx(e - 1),
                        h_perp: [dx[e - 1], dx[e]],
                        midpoint,
                    }
                };
                edges.push(edge);
            }
        }
        // horizontal edges (normal along y)
        for e in 0..=ny {
            for i in 0..nx {
                let id = edges.len();
                let midpoint = [cx(i), ys[e]];
                let length = dx[i];
                let edge = if e == 0 {
                    cell_edges[idx(i, 0)][2] = id;
                    Edge {
                        cells: EdgeCells::Boundary { k: idx(i, 0) },
                        axis: Axis::Y,
                        normal: [0.0, -1.0],
                        length,
                        distance: 0.5 * dy[0],
                        h_perp: [dy[0], 0.0],
                        midpoint,
                    }
                } else if e == ny {
                    cell_edges[idx(i, ny - 1)][3] = id;
                    Edge {
                        cells: EdgeCells::Boundary { k: idx(i, ny - 1) },
                        axis: Axis::Y,
                        normal: [0.0, 1.0],
                        length,
                        distance: 0.5 * dy[ny - 1],
                        h_perp: [dy[ny - 1], 0.0],
                        midpoint,
                    }
                } else {
                    let (k, l) = (idx(i, e - 1), idx(i, e));
                    cell_edges[k][3] = id;
                    cell_edges[l][2] = id;
                    Edge {
                        cells: EdgeCells::Interior { k, l },
                        axis: Axis::Y,
                        normal: [0.0, 1.0],
                        length,
                        distance: cy(e) - cy(e - 1),
                        h_perp: [dy[e - 1], dy[e]],
                        midpoint,
                    }
                };
                edges.push(edge);
            }
        }

        let (interior, boundary): (Vec<usize>, Vec<usize>) =
            (0..edges.len()).partition(|&id| edges[id].is_interior());

        Ok(Self {
            xs,
            ys,
            edges,
            interior,
            boundary,
            cell_edges,
            uniform_step: None,
        })
    }

    pub fn nx(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn ny(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn x_coords(&self) -> &[f64] {
        &self.xs
    }

    pub fn y_coords(&self) -> &[f64] {
        &self.ys
    }

    pub fn cell_count(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx() && j < self.ny());
        j * self.nx() + i
    }

    /// `(i, j)` = (column, row) of cell `k`.
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx(), k / self.nx())
    }

    pub fn cell_center(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        [
            0.5 * (self.xs[i] + self.xs[i + 1]),
            0.5 * (self.ys[j] + self.ys[j + 1]),
        ]
    }

    pub fn cell_size(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        [self.xs[i + 1] - self.xs[i], self.ys[j + 1] - self.ys[j]]
    }

    pub fn cell_area(&self, k: usize) -> f64 {
        let [a, b] = self.cell_size(k);
        a * b
    }

    pub fn cell_bounds(&self, k: usize) -> ([f64; 2], [f64; 2]) {
        let (i, j) = self.ij(k);
        ([self.xs[i], self.xs[i + 1]], [self.ys[j], self.ys[j + 1]])
    }

    pub fn areas(&self) -> Vec<f64> {
        (0..self.cell_count()).map(|k| self.cell_area(k)).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn interior_edge_ids(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_edge_ids(&self) -> &[usize] {
        &self.boundary
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.interior.iter().map(move |&id| &self.edges[id])
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.boundary.iter().map(move |&id| &self.edges[id])
    }

    /// Edge ids of cell `k`: west, east, south, north.
    pub fn cell_edges(&self, k: usize) -> [usize; 4] {
        self.cell_edges[k]
    }

    /// Neighbouring cells of `k` together with the shared edge id.
    pub fn neighbours(&self, k: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cell_edges[k]
            .into_iter()
            .filter_map(move |id| self.edges[id].other(k).map(|l| (id, l)))
    }

    /// Whether cell `k` touches the domain boundary.
    pub fn is_boundary_cell(&self, k: usize) -> bool {
        self.cell_edges[k]
            .iter()
            .any(|&id| !self.edges[id].is_interior())
    }

    /// `Some(h)` for grids built by [`Grid::uniform`].
    pub fn uniform_step(&self) -> Option<f64> {
        self.uniform_step
    }

    /// Largest cell width in either direction.
    pub fn max_step(&self) -> f64 {
        self.xs
            .windows(2)
            .chain(self.ys.windows(2))
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        (self.xs[self.nx()] - self.xs[0]) * (self.ys[self.ny()] - self.ys[0])
    }

    /// `Σ_{σ∈E(K)} |σ| n_σ` with outward normals; zero for every cell.
    pub fn closure_defect(&self, k: usize) -> [f64; 2] {
        self.cell_edges[k].iter().fold([0.0, 0.0], |acc, &id| {
            let e = &self.edges[id];
            let n = e.normal_from(k);
            [acc[0] + e.length * n[0], acc[1] + e.length * n[1]]
        })
    }
}

fn check_coords(name: &str, c: &[f64]) -> Result<()> {
    if c.len() < 3 {
        return Err(Error::InvalidGrid(format!(
            "{name} coordinates need at least 3 entries (2 cells), got {}",
            c.len()
        )));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} coordinates must be finite")));
    }
    if let Some(w) = c.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "{name} coordinates not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Grid description as found in configs and on the command line.
///
/// Accepted text forms: `uniform n=<int>`, `uniform:<int>`,
/// `tensor:<x0>,<x1>,...;<y0>,<y1>,...`, or a JSON object
/// `{"x":[...],"y":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Uniform { n: usize },
    Tensor { x: Vec<f64>, y: Vec<f64> },
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        match self {
            GridSpec::Uniform { n } => Grid::uniform(*n),
            GridSpec::Tensor { x, y } => Grid::tensor(x.clone(), y.clone()),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let bad = || Error::Parse(format!("unrecognised grid description `{s}`"));
        if let Some(rest) = s.strip_prefix("uniform") {
            let rest = rest.trim_start_matches([':', ' ']).trim();
            let rest = rest.strip_prefix("n=").unwrap_or(rest);
            let n = rest.trim().parse().map_err(|_| bad())?;
            return Ok(GridSpec::Uniform { n });
        }
        if let Some(rest) = s.strip_prefix("tensor:") {
            let (xs, ys) = rest.split_once(';').ok_or_else(bad)?;
            let list = |t: &str| -> Result<Vec<f64>> {
                t.split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                    .collect()
            };
            return Ok(GridSpec::Tensor {
                x: list(xs)?,
                y: list(ys)?,
            });
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Separates two cells of the same cluster (`E_int^ic`).
    Intra,
    /// Separates two different clusters (`E_int^ec`).
    Cross,
}

/// Grouping of the cells into 2×2 clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition {
    nx: usize,
    ny: usize,
    cluster_of: Vec<usize>,
    members: Vec<[usize; 4]>,
    edge_class: Vec<Option<EdgeClass>>,
    intra: Vec<usize>,
    cross: Vec<usize>,
}

impl ClusterPartition {
    /// Pairs columns `(2c, 2c+1)` and rows `(2r, 2r+1)`.
    pub fn new(grid: &Grid) -> Result<Self> {
        let (nx, ny) = (grid.nx(), grid.ny());
        if nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::ClusterPartition(format!(
                "cell counts must be even in both directions, got {nx}×{ny}"
            )));
        }
        let cnx = nx / 2;
        let cluster_of: Vec<usize> = (0..grid.cell_count())
            .map(|k| {
                let (i, j) = grid.ij(k);
                (j / 2) * cnx + i / 2
            })
            .collect();
        let members = (0..cnx * (ny / 2))
            .map(|c| {
                let (ci, cj) = (c % cnx, c / cnx);
                [
                    grid.index(2 * ci, 2 * cj),
                    grid.index(2 * ci + 1, 2 * cj),
                    grid.index(2 * ci, 2 * cj + 1),
                    grid.index(2 * ci + 1, 2 * cj + 1),
                ]
            })
            .collect();
        let mut edge_class = vec![None; grid.edges().len()];
        let mut intra = Vec::new();
        let mut cross = Vec::new();
        for &id in grid.interior_edge_ids() {
            if let EdgeCells::Interior { k, l } = grid.edge(id).cells {
                if cluster_of[k] == cluster_of[l] {
                    edge_class[id] = Some(EdgeClass::Intra);
                    intra.push(id);
                } else {
                    edge_class[id] = Some(EdgeClass::Cross);
                    cross.push(id);
                }
            }
        }
        Ok(Self {
            nx,
            ny,
            cluster_of,
            members,
            edge_class,
            intra,
            cross,
        })
    }

    pub fn cluster_count(&self) -> usize {
        self.members.len()
    }

    pub fn cluster_of(&self, k: usize) -> usize {
        self.cluster_of[k]
    }

    pub fn members(&self, cluster: usize) -> [usize; 4] {
        self.members[cluster]
    }

    /// `None` for boundary edges.
    pub fn edge_class(&self, edge: usize) -> Option<EdgeClass> {
        self.edge_class[edge]
    }

    pub fn intra_edge_ids(&self) -> &[usize] {
        &self.intra
    }

    pub fn cross_edge_ids(&self) -> &[usize] {
        &self.cross
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.nx() != self.nx || grid.ny() != self.ny {
            return Err(Error::GridMismatch {
                expected: self.nx * self.ny,
                found: grid.cell_count(),
            });
        }
        Ok(())
    }
}

/// Minimum over cells of the cluster regularity criterion: for each cell with
/// neighbours outside its own cluster, the smallest eigenvalue of the Gram
/// matrix of the normals `n_{K|L}` towards those neighbours. `+∞` when no cell
/// has an external neighbour.
pub fn cluster_regularity(grid: &Grid, partition: &ClusterPartition) -> Result<f64> {
    partition.check_grid(grid)?;
    let mut min = f64::INFINITY;
    for k in 0..grid.cell_count() {
        let normals: Vec<[f64; 2]> = grid
            .neighbours(k)
            .filter(|&(_, l)| partition.cluster_of(l) != partition.cluster_of(k))
            .map(|(id, _)| grid.edge(id).normal_from(k))
            .collect();
        if !normals.is_empty() {
            min = min.min(normal_set_criterion(&normals));
        }
    }
    Ok(min)
}

/// `inf_a |Σ a_L n_L|² / Σ a_L²` for the given normals.
pub fn normal_set_criterion(normals: &[[f64; 2]]) -> f64 {
    let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    match normals {
        [] => f64::INFINITY,
        [n] => dot(*n, *n),
        [a, b] => {
            let (p, q, r) = (dot(*a, *a), dot(*a, *b), dot(*b, *b));
            let mean = 0.5 * (p + r);
            let dev = (0.25 * (p - r) * (p - r) + q * q).sqrt();
            (mean - dev).max(0.0)
        }
        _ => {
            let m = normals.len();
            let gram = Mat::from_fn(m, m, |i, j| dot(normals[i], normals[j]));
            gram.self_adjoint_eigenvalues(Side::Lower)
                .map(|ev| ev[0].max(0.0))
                .unwrap_or(0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_two_by_two_counts() {
        let g = Grid::uniform(2).unwrap();
        assert_eq!(g.cell_count(), 4);
        assert_eq!(g.interior_edge_ids().len(), 4);
        assert_eq!(g.boundary_edge_ids().len(), 8);
    }

    #[test]
    fn uniform_measures() {
        let g = Grid::uniform(4).unwrap();
        assert_eq!(g.cell_center(0), [0.125, 0.125]);
        let h = 0.25;
        for e in g.edges() {
            assert!((e.length - h).abs() < 1e-15);
            let d = if e.is_interior() { h } else { h / 2.0 };
            assert!((e.distance - d).abs() < 1e-15);
        }
        for k in 0..g.cell_count() {
            assert!((g.cell_area(k) - h * h).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_cells_and_edge_incidence() {
        let g = Grid::uniform(3).unwrap();
        for k in 0..g.cell_count() {
            let d = g.closure_defect(k);
            assert!(d[0].abs() < 1e-15 && d[1].abs() < 1e-15);
        }
        let mut incidence = vec![0; g.edges().len()];
        for k in 0..g.cell_count() {
            for id in g.cell_edges(k) {
                incidence[id] += 1;
            }
        }
        for (id, e) in g.edges().iter().enumerate() {
            assert_eq!(incidence[id], if e.is_interior() { 2 } else { 1 });
            if let EdgeCells::Interior { k, l } = e.cells {
                let (a, b) = (e.normal_from(k), e.normal_from(l));
                assert_eq!(a, [-b[0], -b[1]]);
            }
        }
    }

    #[test]
    fn tensor_matches_uniform() {
        let t = Grid::tensor(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
        let mut u = Grid::uniform(2).unwrap();
        u.uniform_step = None;
        assert_eq!(t, u);
    }

    #[test]
    fn tensor_center_distance() {
        let g = Grid::tensor(vec![0.0, 0.25, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
        let e = g
            .interior_edges()
            .find(|e| e.axis == Axis::X)
            .copied()
            .unwrap();
        assert!((e.distance - 0.5).abs() < 1e-15);
        assert_eq!(e.h_perp, [0.25, 0.75]);
    }

    #[test]
    fn invalid_grids() {
        assert!(matches!(Grid::uniform(1), Err(Error::InvalidGrid(_))));
        assert!(Grid::tensor(vec![0.0, 1.0], vec![0.0, 0.5, 1.0]).is_err());
        assert!(Grid::tensor(vec![0.0, 0.6, 0.5, 1.0], vec![0.0, 0.5, 1.0]).is_err());
        assert!(Grid::tensor(vec![0.0, 0.0, 1.0], vec![0.0, 0.5, 1.0]).is_err());
    }

    #[test]
    fn cluster_counts() {
        let g = Grid::uniform(4).unwrap();
        let p = ClusterPartition::new(&g).unwrap();
        assert_eq!(p.cluster_count(), 4);
        assert_eq!(p.intra_edge_ids().len(), 16);
        assert_eq!(p.cross_edge_ids().len(), 8);
        assert_eq!(g.interior_edge_ids().len(), 24);
        assert_eq!(
            p.intra_edge_ids().len() + p.cross_edge_ids().len(),
            g.interior_edge_ids().len()
        );
        let mut seen = vec![0; g.cell_count()];
        for c in 0..p.cluster_count() {
            for k in p.members(c) {
                seen[k] += 1;
                assert_eq!(p.cluster_of(k), c);
            }
        }
        assert!(seen.iter().all(|&s| s == 1));

        let g2 = Grid::uniform(2).unwrap();
        let p2 = ClusterPartition::new(&g2).unwrap();
        assert_eq!(p2.cluster_count(), 1);
        assert_eq!(p2.intra_edge_ids().len(), 4);
        assert!(p2.cross_edge_ids().is_empty());

        let g3 = Grid::uniform(3).unwrap();
        assert!(matches!(
            ClusterPartition::new(&g3),
            Err(Error::ClusterPartition(_))
        ));
    }

    #[test]
    fn regularity_small_cases() {
        assert_eq!(normal_set_criterion(&[[1.0, 0.0], [0.0, 1.0]]), 1.0);
        let v = normal_set_criterion(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]);
        assert!(v.abs() < 1e-14);
        for n in [4, 8] {
            let g = Grid::uniform(n).unwrap();
            let p = ClusterPartition::new(&g).unwrap();
            assert!((cluster_regularity(&g, &p).unwrap() - 1.0).abs() < 1e-14);
        }
        let g = Grid::uniform(2).unwrap();
        let p = ClusterPartition::new(&g).unwrap();
        assert_eq!(cluster_regularity(&g, &p).unwrap(), f64::INFINITY);
    }

    #[test]
    fn parse_specs() {
        assert_eq!(
            "uniform n=8".parse::<GridSpec>().unwrap(),
            GridSpec::Uniform { n: 8 }
        );
        assert_eq!(
            "uniform:4".parse::<GridSpec>().unwrap(),
            GridSpec::Uniform { n: 4 }
        );
        assert_eq!(
            r#"{"x":[0,0.5,1],"y":[0,0.25,1]}"#.parse::<GridSpec>().unwrap(),
            GridSpec::Tensor {
                x: vec![0.0, 0.5, 1.0],
                y: vec![0.0, 0.25, 1.0]
            }
        );
        assert_eq!(
            "tensor:0,0.2,1;0,0.5,1".parse::<GridSpec>().unwrap(),
            GridSpec::Tensor {
                x: vec![0.0, 0.2, 1.0],
                y: vec![0.0, 0.5, 1.0]
            }
        );
        assert!("hex 4".parse::<GridSpec>().is_err());
    }
}

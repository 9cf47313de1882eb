use faer::{Mat, Side};
use proptest::prelude::*;

use stokes_fv::assembly::{assemble_with_means, energy_functional, SchemeKind, SchemeSpec};
use stokes_fv::fields::{
    h1_inner, h1_norm, jump_seminorm, l2_inner, split_seminorms, zero_mean_project, ScalarField,
    VectorField,
};
use stokes_fv::grid::{cluster_regularity, ClusterPartition, Grid};
use stokes_fv::io::{read_matrix_market, write_matrix_market};
use stokes_fv::operators::{
    divergence_apply, divergence_matrix, duality_terms, gradient_apply, gradient_matrix,
    laplacian_apply, laplacian_apply_vec, laplacian_matrix,
};
use stokes_fv::solver::{schur_eigen_dense, solve};
use stokes_fv::sparse::{max_abs_diff, transpose, TripletBuilder};
use stokes_fv::verify::lemma3_sides;

fn coords(steps: Vec<f64>) -> Vec<f64> {
    let total: f64 = steps.iter().sum();
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for s in &steps[..steps.len() - 1] {
        acc += s / total;
        out.push(acc);
    }
    out.push(1.0);
    out
}

fn tensor_grid(max: usize) -> impl Strategy<Value = Grid> {
    (
        prop::collection::vec(0.2f64..1.0, 2..=max),
        prop::collection::vec(0.2f64..1.0, 2..=max),
    )
        .prop_map(|(a, b)| Grid::tensor(coords(a), coords(b)).unwrap())
}

/// Tensor grid with an even number of cells in each direction.
fn even_grid() -> impl Strategy<Value = Grid> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(a, b)| {
            (
                prop::collection::vec(0.3f64..1.0, 2 * a),
                prop::collection::vec(0.3f64..1.0, 2 * b),
            )
        })
        .prop_map(|(a, b)| Grid::tensor(coords(a), coords(b)).unwrap())
}

fn field(g: &Grid, vals: &[f64], offset: usize) -> ScalarField {
    ScalarField::from_fn(g, |k| vals[(k + offset) % vals.len()])
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 97)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_cells(g in tensor_grid(7)) {
        for k in 0..g.cell_count() {
            let d = g.closure_defect(k);
            prop_assert!(d[0].abs() < 1e-15 && d[1].abs() < 1e-15);
        }
    }

    #[test]
    fn edge_classes_partition(g in even_grid()) {
        let p = ClusterPartition::new(&g).unwrap();
        prop_assert_eq!(p.intra_edge_ids().len() + p.cross_edge_ids().len(), g.interior_edge_ids().len());
        let r = cluster_regularity(&g, &p).unwrap();
        if p.cluster_count() > 1 {
            prop_assert_eq!(r, 1.0);
        } else {
            prop_assert_eq!(r, f64::INFINITY);
        }
    }

    #[test]
    fn inner_products_bilinear_symmetric(g in tensor_grid(6), v in values(), a in -3.0f64..3.0) {
        let (p, q, r) = (field(&g, &v, 0), field(&g, &v, 31), field(&g, &v, 57));
        let pq = &p + &(a * &q);
        for ip in [h1_inner, l2_inner] {
            let norm = |f: &ScalarField| ip(&g, f, f).unwrap().sqrt();
            let (np, nq, nr) = (norm(&p), norm(&q), norm(&r));
            prop_assert!((ip(&g, &p, &q).unwrap() - ip(&g, &q, &p).unwrap()).abs() <= 1e-14 * np * nq);
            let lhs = ip(&g, &pq, &r).unwrap();
            let rhs = ip(&g, &p, &r).unwrap() + a * ip(&g, &q, &r).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * (np + a.abs() * nq) * nr);
        }
    }

    #[test]
    fn split_identity(g in even_grid(), v in values()) {
        let p = ClusterPartition::new(&g).unwrap();
        let q = field(&g, &v, 5);
        let (c, i) = split_seminorms(&g, &q, &p).unwrap();
        let t = jump_seminorm(&g, &q).unwrap();
        prop_assert!(close(c * c + i * i, t * t, 1e-13));
    }

    #[test]
    fn duality_and_coercivity(g in tensor_grid(7), v in values()) {
        let q = field(&g, &v, 3);
        let u = VectorField { x: field(&g, &v, 11), y: field(&g, &v, 29) };
        let (a, b) = duality_terms(&g, &q, &u).unwrap();
        let gq = gradient_apply(&g, &q).unwrap();
        let du = divergence_apply(&g, &u).unwrap();
        let scale: f64 = (0..g.cell_count())
            .map(|k| {
                g.cell_area(k)
                    * ((gq.x.0[k] * u.x.0[k]).abs() + (gq.y.0[k] * u.y.0[k]).abs() + (q.0[k] * du.0[k]).abs())
            })
            .sum();
        prop_assert!((a + b).abs() <= 1e-12 * scale);
        let lu = laplacian_apply_vec(&g, &u).unwrap();
        let lhs: f64 = (0..g.cell_count())
            .map(|k| g.cell_area(k) * (lu.x.0[k] * u.x.0[k] + lu.y.0[k] * u.y.0[k]))
            .sum();
        let rhs = h1_norm(&g, &u.x).unwrap().powi(2) + h1_norm(&g, &u.y).unwrap().powi(2);
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn operators_linear(g in tensor_grid(6), v in values(), a in -2.0f64..2.0) {
        let (p, q) = (field(&g, &v, 0), field(&g, &v, 13));
        let s = &p + &(a * &q);
        let ls = laplacian_apply(&g, &s).unwrap();
        let lp = laplacian_apply(&g, &p).unwrap();
        let lq = laplacian_apply(&g, &q).unwrap();
        let gs = gradient_apply(&g, &s).unwrap();
        let gp = gradient_apply(&g, &p).unwrap();
        let gq = gradient_apply(&g, &q).unwrap();
        for k in 0..g.cell_count() {
            let scale = 1.0 + lp.0[k].abs() + lq.0[k].abs();
            prop_assert!((ls.0[k] - lp.0[k] - a * lq.0[k]).abs() <= 1e-12 * scale);
            let scale = 1.0 + gp.x.0[k].abs() + gq.x.0[k].abs();
            prop_assert!((gs.x.0[k] - gp.x.0[k] - a * gq.x.0[k]).abs() <= 1e-12 * scale);
        }
        let u = VectorField { x: p.clone(), y: q.clone() };
        let d1 = divergence_apply(&g, &u).unwrap();
        let d2 = divergence_apply(&g, &VectorField { x: a * &p, y: a * &q }).unwrap();
        for k in 0..g.cell_count() {
            prop_assert!((d2.0[k] - a * d1.0[k]).abs() <= 1e-12 * (1.0 + d1.0[k].abs()));
        }
    }

    #[test]
    fn gradient_is_minus_divergence_transpose(g in tensor_grid(6)) {
        let gm = gradient_matrix(&g).unwrap();
        let dt = transpose(&divergence_matrix(&g).unwrap());
        let mut neg = TripletBuilder::new(dt.nrows(), dt.ncols());
        neg.push_block(0, 0, &dt, -1.0);
        prop_assert!(max_abs_diff(&gm, &neg.build().unwrap()) <= 1e-14);
    }

    #[test]
    fn cluster_test_velocity_inequality(n in 1usize..=5, v in values()) {
        let g = Grid::uniform(2 * n).unwrap();
        let p = ClusterPartition::new(&g).unwrap();
        let q = zero_mean_project(&g, &field(&g, &v, 7)).unwrap();
        let (lhs, rhs) = lemma3_sides(&g, &q, &p).unwrap();
        prop_assert!(lhs - rhs >= -1e-12);
    }

    #[test]
    fn matrix_market_roundtrip(g in tensor_grid(5)) {
        let m = laplacian_matrix(&g).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &m).unwrap();
        let back = read_matrix_market(&buf[..]).unwrap();
        prop_assert_eq!(max_abs_diff(&m, &back), 0.0);
    }
}

fn forcing(g: &Grid, v: &[f64], off: usize) -> VectorField {
    VectorField {
        x: field(g, v, off),
        y: field(g, v, off + 41),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_is_linear_in_forcing(g in even_grid(), v in values(), kind in 0usize..3, lambda in 0.01f64..10.0) {
        let kind = [SchemeKind::BrezziPitkaranta, SchemeKind::ClusterJump, SchemeKind::ClusterConstantPressure][kind];
        let spec = SchemeSpec::for_grid(kind, lambda, &g).unwrap();
        let (f1, f2) = (forcing(&g, &v, 0), forcing(&g, &v, 17));
        let r1 = solve(&assemble_with_means(&spec, &g, &f1).unwrap(), 1e-10).unwrap();
        let r2 = solve(&assemble_with_means(&spec, &g, &f2).unwrap(), 1e-10).unwrap();
        let r12 = solve(&assemble_with_means(&spec, &g, &(&f1 + &f2)).unwrap(), 1e-10).unwrap();
        let sum_u = &r1.u + &r2.u;
        let sum_p = &r1.p + &r2.p;
        let su = sum_u.to_stacked();
        let scale_u = su.iter().chain(r12.u.to_stacked().iter()).fold(0.0f64, |a, b| a.max(b.abs()));
        for (a, b) in su.iter().zip(r12.u.to_stacked()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale_u);
        }
        let scale_p = sum_p.0.iter().chain(r12.p.0.iter()).fold(0.0f64, |a, b| a.max(b.abs()));
        for (a, b) in sum_p.0.iter().zip(&r12.p.0) {
            prop_assert!((a - b).abs() <= 1e-10 * scale_p);
        }
    }

    #[test]
    fn energy_identity(g in even_grid(), v in values(), cluster in any::<bool>(), lambda in 0.01f64..10.0) {
        let kind = if cluster { SchemeKind::ClusterJump } else { SchemeKind::BrezziPitkaranta };
        let spec = SchemeSpec::for_grid(kind, lambda, &g).unwrap();
        let sys = assemble_with_means(&spec, &g, &forcing(&g, &v, 3)).unwrap();
        let r = solve(&sys, 1e-10).unwrap();
        let (ku, stab) = energy_functional(&sys, &r.u, &r.p).unwrap();
        prop_assert!(stab >= 0.0);
        prop_assert!(close(ku + stab, sys.load(&r.u), 1e-10));
    }

    #[test]
    fn stabilized_systems_nonsingular(g in even_grid(), kind in 0usize..3, lambda in 0.01f64..10.0) {
        let kind = [SchemeKind::BrezziPitkaranta, SchemeKind::ClusterJump, SchemeKind::ClusterConstantPressure][kind];
        let spec = SchemeSpec::for_grid(kind, lambda, &g).unwrap();
        let f = VectorField::sample(&g, |x, y| [y - 0.5, x * x]);
        prop_assert!(solve(&assemble_with_means(&spec, &g, &f).unwrap(), 1e-10).is_ok());
    }

    #[test]
    fn infsup_permutation_invariant(n in 2usize..=4, seed in any::<u64>()) {
        let g = Grid::uniform(2 * n).unwrap();
        let a = laplacian_matrix(&g).unwrap();
        let b = divergence_matrix(&g).unwrap();
        let m = g.areas();
        let np = b.nrows();
        // Fisher–Yates with a small LCG driven by the seed
        let mut perm: Vec<usize> = (0..np).collect();
        let mut s = seed;
        for i in (1..np).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut pb = TripletBuilder::new(np, b.ncols());
        for t in b.triplet_iter() {
            pb.push(perm[t.row], t.col, *t.val);
        }
        let mut pm = vec![0.0; np];
        for (i, &w) in m.iter().enumerate() {
            pm[perm[i]] = w;
        }
        let e1 = schur_eigen_dense(&a, &b, &m).unwrap().unwrap();
        let e2 = schur_eigen_dense(&a, &pb.build().unwrap(), &pm).unwrap().unwrap();
        prop_assert!(e1 >= 0.0);
        prop_assert!((e1 - e2).abs() <= 1e-10 * e1.max(1e-300));
    }
}

/// Largest `‖v‖_L² / ‖v‖_T` on a grid: `1/√λ_min` of the generalized
/// eigenproblem `L v = λ M v`.
fn poincare_constant(g: &Grid) -> f64 {
    let l = laplacian_matrix(g).unwrap().to_dense();
    let m = g.areas();
    let n = m.len();
    let s = Mat::from_fn(n, n, |i, j| l[(i, j)] / (m[i] * m[j]).sqrt());
    let eig = s.self_adjoint_eigenvalues(Side::Lower).unwrap();
    1.0 / eig[0].sqrt()
}

#[test]
fn discrete_poincare_constant_does_not_grow() {
    let c0 = poincare_constant(&Grid::uniform(4).unwrap());
    for n in [8, 16, 32] {
        assert!(poincare_constant(&Grid::uniform(n).unwrap()) <= 1.1 * c0);
    }
    let c0 = poincare_constant(&Grid::tensor(coords(vec![1.0, 2.0, 1.0]), coords(vec![1.0, 1.0, 3.0])).unwrap());
    for k in [2, 4, 8] {
        let xs = coords((0..3 * k).map(|i| [1.0, 2.0, 1.0][i / k]).collect());
        let ys = coords((0..3 * k).map(|i| [1.0, 1.0, 3.0][i / k]).collect());
        assert!(poincare_constant(&Grid::tensor(xs, ys).unwrap()) <= 1.1 * c0);
    }
}

#[test]
fn checkerboard_gradient_only_on_boundary() {
    for n in [4, 6, 8] {
        let g = Grid::uniform(n).unwrap();
        let cb = stokes_fv::verify::checkerboard_field(&g).unwrap();
        let grad = gradient_apply(&g, &cb).unwrap();
        for k in 0..g.cell_count() {
            let [a, b] = grad.at(k);
            if g.is_boundary_cell(k) {
                assert!(a.abs() + b.abs() > 0.0);
            } else {
                assert!(a.abs() < 1e-13 && b.abs() < 1e-13);
            }
        }
    }
}

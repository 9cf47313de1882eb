use std::f64::consts::PI;

use stokes_fv::assembly::{assemble, SchemeSpec};
use stokes_fv::fields::ScalarField;
use stokes_fv::grid::Grid;
use stokes_fv::solver::solve;
use stokes_fv::verify::{
    checkerboard_field, lemma2_inequality_probe, run_convergence, ManufacturedCase,
};

#[test]
fn bp_ms1_residual() {
    let g = Grid::uniform(8).unwrap();
    let sys = assemble(
        &SchemeSpec::brezzi_pitkaranta(0.05),
        &g,
        |x, y| ManufacturedCase::Ms1.forcing(x, y),
        3,
    )
    .unwrap();
    let r = solve(&sys, 1e-10).unwrap();
    assert!(r.residual_norm <= 1e-10);
}

fn smooth_samples(g: &Grid) -> Vec<ScalarField> {
    (1..=3)
        .flat_map(|a| {
            (1..=3).map(move |b| {
                ScalarField::sample(g, move |x, y| (a as f64 * PI * x).cos() * (b as f64 * PI * y).cos())
            })
        })
        .collect()
}

#[test]
fn jump_probe_constant_stable_under_refinement() {
    let cs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let g = Grid::uniform(n).unwrap();
            lemma2_inequality_probe(&g, &smooth_samples(&g)).unwrap().c1().unwrap()
        })
        .collect();
    let (hi, lo) = (cs.iter().cloned().fold(0.0, f64::max), cs.iter().cloned().fold(f64::INFINITY, f64::min));
    assert!(lo > 0.0 && hi / lo <= 2.0, "{cs:?}");
}

#[test]
fn jump_probe_with_checkerboard_stays_positive() {
    for n in [8, 16] {
        let g = Grid::uniform(n).unwrap();
        let mut samples = smooth_samples(&g);
        samples.push(checkerboard_field(&g).unwrap());
        let probe = lemma2_inequality_probe(&g, &samples).unwrap();
        let c = probe.c1().unwrap();
        assert!(c > 0.0 && c.is_finite());
        let cb = probe.samples.last().unwrap();
        // the jump term dominates for the checkerboard
        assert!(cb.h_jump > cb.l2);
    }
}

#[test]
fn ms0_velocity_error_at_stabilization_level() {
    let t = run_convergence(
        &SchemeSpec::brezzi_pitkaranta(0.05),
        ManufacturedCase::Ms0,
        &[8, 16, 32, 64],
        &Default::default(),
    )
    .unwrap();
    assert!(t.rows.windows(2).all(|w| w[1].err_p_l2 < w[0].err_p_l2));
    assert!(t.rows.iter().all(|r| r.err_u_h1 < 0.05));
}

#[test]
fn cluster_scheme_lambda_robust() {
    let errs: Vec<(f64, f64)> = [0.05, 1.0, 20.0]
        .iter()
        .map(|&l| {
            let spec = SchemeSpec {
                kind: stokes_fv::assembly::SchemeKind::ClusterJump,
                lambda: l,
                partition: None,
            };
            let t = run_convergence(&spec, ManufacturedCase::Ms1, &[16], &Default::default()).unwrap();
            (t.rows[0].err_u_h1, t.rows[0].err_p_l2)
        })
        .collect();
    for pick in [|e: &(f64, f64)| e.0, |e: &(f64, f64)| e.1] {
        let v: Vec<f64> = errs.iter().map(pick).collect();
        let hi = v.iter().cloned().fold(0.0, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 3.0);
    }
}

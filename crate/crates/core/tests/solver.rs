mod common;

use std::f64::consts::PI;

use common::*;
use sks_core::convergence::convergence_study;
use sks_core::estimates::{calibrate_constants, fourth_root_27, ConstantsLedger};
use sks_core::mild::{
    apply_f, free_evolution, picard_solve, solve_global, step_exponential_euler, tau_one, tau_two,
};
use sks_core::noise::{sample_wa_path, to_field_path};
use sks_core::{
    stream_rng, Error, FieldPath, NoiseProfile, NoiseSpec, SolverConfig, SpectralField, StreamId,
};

fn unit_ledger() -> ConstantsLedger {
    ConstantsLedger::analytic(2.0, 1.0, 1.0 / fourth_root_27()).unwrap()
}

#[test]
fn apply_f_of_zero_path_is_zero() {
    let g = galerkin(16.0, 0.5, 8);
    let zero = FieldPath::sample(0.5, 20, |_| g.zeros()).unwrap();
    assert!(apply_f(&zero, &g, 4).unwrap().fields().iter().all(|f| f.is_zero()));
}

#[test]
fn apply_f_linear_closed_form() {
    let g = galerkin(16.0, 0.5, 8).with_advection(false);
    let c = 0.5;
    for k in [1, 3, 8] {
        let u = SpectralField::single_mode(8, k, 0.7);
        let path = FieldPath::sample(1.0, 50, |_| u.clone()).unwrap();
        let f = apply_f(&path, &g, 1).unwrap();
        let lam = g.eigenvalues()[k - 1];
        for (t, field) in f.times().iter().zip(f.fields()) {
            let want = c * 0.7 * ((lam * t).exp() - 1.0) / lam;
            assert!((field.coeffs()[k - 1] - want).abs() <= 1e-8, "k = {k}, t = {t}");
        }
    }
}

#[test]
fn apply_f_matches_riemann_quadrature() {
    let g = galerkin(16.0, 0.5, 16);
    let mut r = rng(21);
    let f0 = random_field(16, 1.0, &mut r);
    let f1 = random_field(16, 1.0, &mut r);
    let u = |t: f64| {
        let mut v = f0.clone();
        v.axpy((PI * t).sin(), &f1);
        v
    };
    let path = FieldPath::sample(1.0, 100, u).unwrap();
    let f = apply_f(&path, &g, 16).unwrap();
    for n in [25, 60, 100] {
        let t = path.times()[n];
        let oracle = riemann_duhamel(u, t, &g, 200_000);
        let err = max_abs_diff(f.fields()[n].coeffs(), &oracle);
        assert!(err <= 1e-4 * max_abs(&oracle), "t = {t}: {err}");
    }
}

#[test]
fn apply_f_rejects_non_uniform_grid() {
    let g = galerkin(16.0, 0.5, 4);
    let path = FieldPath::new(vec![0.0, 0.1, 0.3], vec![g.zeros(); 3]).unwrap();
    assert!(matches!(apply_f(&path, &g, 2), Err(Error::NonUniformGrid { .. })));
}

#[test]
fn tau_one_collapses_for_unit_constants() {
    let g = galerkin(0.5, 1.0, 4);
    let t = tau_one(&g.zeros(), &unit_ledger(), &g, 1.0).unwrap();
    assert!((t - 1.0 / 1296.0).abs() < 1e-18);
    let doubled = ConstantsLedger::analytic(2.0, 1.0, 2.0 / fourth_root_27()).unwrap();
    let t2 = tau_one(&g.zeros(), &doubled, &g, 1.0).unwrap();
    assert!((t / t2 - 16.0).abs() < 1e-12);
}

#[test]
fn tau_one_matches_transcription() {
    let l = PI / 2.0;
    let g = galerkin(l, 0.5, 16);
    let ledger = calibrate_constants(&g, 500, 1.0, 3).unwrap().ledger;
    let u0 = SpectralField::single_mode(16, 1, 1.0);
    let got = tau_one(&u0, &ledger, &g, 1.0).unwrap();
    let want = tau_one_transcribed(l.sqrt(), (2.0 * l).sqrt(), ledger.k, ledger.m, 0.5, l);
    assert!((got - want).abs() <= 1e-13 * want, "{got} vs {want}");
}

#[test]
fn tau_two_trivial_cases() {
    let g = galerkin(16.0, 0.5, 8);
    let silent = FieldPath::sample(1.0, 10, |_| g.zeros()).unwrap();
    let t = tau_two(&silent, 0.1, &g).unwrap();
    assert_eq!((t.time, t.index, t.below_resolution), (1.0, 10, false));
    let phi = SpectralField::single_mode(8, 1, 1.0);
    let loud = FieldPath::sample(1.0, 10, |t| phi.scaled(t)).unwrap();
    assert_eq!(tau_two(&loud, 1e300, &g).unwrap().time, 1.0);
    let early = tau_two(&loud, 1e-12, &g).unwrap();
    assert_eq!((early.time, early.below_resolution), (0.0, true));
    let shifted = FieldPath::sample(1.0, 10, |_| phi.clone()).unwrap();
    assert!(tau_two(&shifted, 1.0, &g).is_err());
}

#[test]
fn tau_two_matches_closed_form_threshold() {
    let l = 16.0;
    let g = galerkin(l, 0.5, 8);
    let phi = SpectralField::single_mode(8, 1, 1.0);
    let steps = 1000;
    let path = FieldPath::sample(1.0, steps, |t| phi.scaled(t.powf(0.25))).unwrap();
    let alpha = 3.0;
    // int_0^t s ||phi||^4 ds = t^2 (3 l / 4) / 2 = alpha / 2
    let exact = (4.0 * alpha / (3.0 * l)).sqrt();
    let t = tau_two(&path, alpha, &g).unwrap();
    assert!((t.time - exact).abs() <= 1.0 / steps as f64, "{} vs {exact}", t.time);
}

#[test]
fn picard_trivial_problem_converges_at_once() {
    let g = galerkin(16.0, 0.5, 8);
    let zero = FieldPath::sample(1e-3, 16, |_| g.zeros()).unwrap();
    let out = picard_solve(&g.zeros(), &zero, &g, &SolverConfig::default(), &unit_ledger()).unwrap();
    assert_eq!(out.iterations, 1);
    assert!(out.z.fields().iter().all(|f| f.is_zero()));
}

#[test]
fn picard_matches_dense_ode_on_local_interval() {
    let g = default_galerkin();
    let ledger = calibrate_constants(&g, 1000, 1.0, 1).unwrap().ledger;
    let u0 = SpectralField::single_mode(64, 1, 0.01);
    let tau = tau_one(&u0, &ledger, &g, 1.0).unwrap();
    let steps = 64;
    let wa = FieldPath::sample(tau, steps, |_| g.zeros()).unwrap();
    let cfg = SolverConfig::default();
    let out = picard_solve(&u0, &wa, &g, &cfg, &ledger).unwrap();
    assert!(out.max_ratio() <= 0.55);
    assert!(out.within_ball());
    assert!(out.residual <= 10.0 * cfg.picard_tol * out.z_norm.max(f64::MIN_POSITIVE));
    let sub = 4;
    let dense = dense_galerkin(u0.coeffs(), 16.0, tau / (steps * sub) as f64, steps * sub, sub);
    let scale = g.sup_h(&out.u);
    let worst = out
        .u
        .fields()
        .iter()
        .zip(&dense)
        .map(|(a, b)| g.h_norm(&a.sub(&SpectralField::from_coeffs(b.clone()))))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-5 * scale, "{worst} vs {scale}");
}

#[test]
fn picard_reports_non_convergence() {
    let g = galerkin(16.0, 0.5, 8);
    let u0 = SpectralField::single_mode(8, 1, 0.5);
    let wa = FieldPath::sample(1e-3, 16, |_| g.zeros()).unwrap();
    let cfg = SolverConfig {
        picard_max_iters: 1,
        ..SolverConfig::default()
    };
    assert!(matches!(
        picard_solve(&u0, &wa, &g, &cfg, &unit_ledger()),
        Err(Error::PicardDivergence { iterations: 1, .. })
    ));
}

#[test]
fn exponential_euler_linear_closed_form() {
    let g = galerkin(16.0, 0.5, 8).with_advection(false);
    let h = 0.05;
    let y = SpectralField::from_coeffs((1..=8).map(|k| 1.0 / k as f64).collect());
    let next = step_exponential_euler(&y, &g.zeros(), h, &g).unwrap();
    for k in 0..8 {
        let lam = g.eigenvalues()[k];
        let y0 = y.coeffs()[k];
        let want = (lam * h).exp() * y0 + 0.5 * y0 * ((lam * h).exp() - 1.0) / lam;
        assert!((next.coeffs()[k] - want).abs() <= 1e-15 * want.abs().max(1.0));
    }
    assert!(step_exponential_euler(&y, &g.zeros(), 0.0, &g).is_err());
}

#[test]
fn global_solution_of_zero_problem_is_zero() {
    let g = galerkin(16.0, 0.5, 16);
    let mut r = rng(0);
    let run = solve_global(
        &g.zeros(),
        1.0,
        &g,
        &NoiseSpec::silent(16),
        &SolverConfig::default(),
        None,
        StreamId::path(0),
        &mut r,
    )
    .unwrap();
    assert_eq!(run.trajectory.len(), 1001);
    assert!(run.trajectory.u.iter().all(|u| u.is_zero()));
}

#[test]
fn deterministic_run_matches_dense_ode() {
    let g = default_galerkin();
    let u0 = SpectralField::single_mode(64, 1, 0.1);
    let mut r = rng(0);
    for dt in [1e-3, 1e-4] {
        let cfg = SolverConfig { dt, ..SolverConfig::default() };
        let run = solve_global(&u0, 1.0, &g, &NoiseSpec::silent(64), &cfg, None, StreamId::path(0), &mut r)
            .unwrap();
        let stride = (1e-3 / dt).round() as usize;
        let dense = dense_galerkin(u0.coeffs(), 16.0, 1e-4, 10_000, 10);
        let u = run.trajectory.u_path().unwrap().subsampled(stride);
        let scale = g.sup_h(&u);
        let worst = u
            .fields()
            .iter()
            .zip(&dense)
            .map(|(a, b)| g.h_norm(&a.sub(&SpectralField::from_coeffs(b.clone()))))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-4 * scale, "dt = {dt}: {}", worst / scale);
    }
}

#[test]
fn trajectory_recomposes_exactly() {
    let g = default_galerkin();
    let noise = NoiseSpec::power_law(NoiseProfile::default(), 64).unwrap();
    let u0 = SpectralField::single_mode(64, 1, 0.1);
    let cfg = SolverConfig { save_stride: 7, ..SolverConfig::default() };
    let mut r = stream_rng(3, StreamId::path(1));
    let run = solve_global(&u0, 0.1, &g, &noise, &cfg, None, StreamId::path(1), &mut r).unwrap();
    let t = &run.trajectory;
    assert_eq!(t.y[0], u0);
    assert_eq!(*t.times.last().unwrap(), 0.1);
    for i in 0..t.len() {
        assert_eq!(t.u[i], t.y[i].add(&t.wa[i]));
    }
}

#[test]
fn global_run_uses_the_sampled_noise_path() {
    let g = galerkin(16.0, 0.5, 16);
    let noise = NoiseSpec::power_law(NoiseProfile::default(), 16).unwrap();
    let mut r1 = stream_rng(8, StreamId::path(2));
    let run = solve_global(&g.zeros(), 0.05, &g, &noise, &SolverConfig::default(), None, StreamId::path(2), &mut r1)
        .unwrap();
    let mut r2 = stream_rng(8, StreamId::path(2));
    let wa = to_field_path(&sample_wa_path(0.05, 1e-3, &g, &noise, StreamId::path(2), &mut r2).unwrap()).unwrap();
    assert_eq!(run.trajectory.wa, wa.fields());
}

#[test]
fn crosscheck_agrees_with_stepper() {
    let g = default_galerkin();
    let ledger = calibrate_constants(&g, 1000, 1.0, 2).unwrap().ledger;
    let noise = NoiseSpec::power_law(NoiseProfile::default(), 64).unwrap();
    let u0 = SpectralField::single_mode(64, 1, 0.1);
    let cfg = SolverConfig { crosscheck: true, ..SolverConfig::default() };
    for p in 0..5 {
        let mut r = stream_rng(4, StreamId::path(p));
        let run = solve_global(&u0, 1.0, &g, &noise, &cfg, Some(&ledger), StreamId::path(p), &mut r).unwrap();
        let cc = run.crosscheck.unwrap();
        assert!(cc.tau <= cc.tau_one.min(1.0) * (1.0 + 1e-12));
        assert!(cc.picard.iterations <= 10);
        assert!(cc.picard.max_ratio() <= 0.55);
        assert!(cc.picard.within_ball());
        assert!(cc.relative_difference <= 1e-4f64.max(10.0 * cfg.dt));
        assert_eq!(run.trajectory.len(), 1001);
    }
    let mut r = rng(0);
    assert!(matches!(
        solve_global(&u0, 1.0, &g, &noise, &cfg, None, StreamId::path(0), &mut r),
        Err(Error::InvalidArgument { name: "ledger", .. })
    ));
}

#[test]
fn free_evolution_contracts() {
    let g = default_galerkin();
    let mut r = rng(7);
    let f = random_field(64, 1.0, &mut r);
    let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
    let path = free_evolution(&f, &times, &g).unwrap();
    for w in path.fields().windows(2) {
        assert!(g.h_norm(&w[1]) <= g.h_norm(&w[0]));
        assert!(g.v_norm(&w[1]) <= g.v_norm(&w[0]));
    }
}

#[test]
fn deterministic_refinement_is_first_order() {
    let g = default_galerkin();
    let u0 = SpectralField::single_mode(64, 1, 0.1);
    let s = convergence_study(&u0, 1.0, &g, &NoiseSpec::silent(64), 1e-2, 4, 1, 0, StreamId::path).unwrap();
    println!("deterministic refinement orders: {:?}", s.levels.iter().map(|l| l.observed_order).collect::<Vec<_>>());
    assert!((s.fitted_order - 1.0).abs() <= 0.01, "{}", s.fitted_order);
}

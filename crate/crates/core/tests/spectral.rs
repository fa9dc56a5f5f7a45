mod common;

use std::f64::consts::PI;

use common::*;
use sks_core::spectral::{eigenvalue, from_grid, to_grid, CRITICAL_SHIFT};
use sks_core::{DomainSpec, Error, Galerkin, SpectralField};

#[test]
fn eigenvalues_on_unit_wavenumber_domain() {
    let dom = DomainSpec::new(PI / 2.0, 0.5, 4).unwrap();
    assert!((eigenvalue(1, &dom) + 0.5).abs() < 1e-14);
    assert!((eigenvalue(2, &dom) + 12.5).abs() < 1e-12);
}

#[test]
fn eigenvalues_negative_above_critical_shift_for_any_length() {
    for i in 0..200 {
        let l = 0.05 * 1.07f64.powi(i);
        let dom = DomainSpec::new(l, 0.3, 1).unwrap();
        let worst = (1..=10_000)
            .map(|k| {
                let mu = k as f64 * PI / (2.0 * l);
                mu * mu - mu.powi(4)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 0.25 + 1e-15, "l = {l}: {worst}");
        assert!((1..=10_000).all(|k| eigenvalue(k, &dom) < 0.0));
    }
}

#[test]
fn shift_at_or_below_critical_rejected() {
    assert!(matches!(DomainSpec::new(16.0, CRITICAL_SHIFT, 8), Err(Error::InvalidDomain(_))));
    assert!(DomainSpec::new(16.0, 0.1, 8).is_err());
    assert!(DomainSpec::new(0.0, 0.5, 8).is_err());
    assert!(DomainSpec::new(16.0, 0.5, 0).is_err());
    let weak = Galerkin::new(DomainSpec::with_any_shift(16.0, 0.1, 16).unwrap());
    assert!(matches!(
        weak.fractional_power(&weak.zeros(), 0.5),
        Err(Error::NonNegativeEigenvalue { .. })
    ));
}

#[test]
fn semigroup_examples() {
    let g = galerkin(PI / 2.0, 0.5, 6);
    let mut r = rng(1);
    let f = random_field(6, 1.0, &mut r);
    assert_eq!(g.apply_semigroup(&f, 0.0).unwrap(), f);
    let phi = SpectralField::single_mode(6, 1, 1.0);
    let s = g.apply_semigroup(&phi, 1.0).unwrap();
    assert!((s.coeffs()[0] - (-0.5f64).exp()).abs() < 1e-15);
    assert!(g.apply_semigroup(&f, -1.0).is_err());

    let g = default_galerkin();
    let f = random_field(64, 1.0, &mut r);
    let a = g.apply_semigroup(&g.apply_semigroup(&f, 0.3).unwrap(), 0.2).unwrap();
    let b = g.apply_semigroup(&f, 0.5).unwrap();
    assert!(max_abs_diff(a.coeffs(), b.coeffs()) <= 1e-15 * max_abs(f.coeffs()));
}

#[test]
fn grid_examples() {
    let phi3 = SpectralField::single_mode(8, 3, 1.0);
    let back = from_grid(&to_grid(&phi3, 8).unwrap(), 8).unwrap();
    for (k, c) in back.coeffs().iter().enumerate() {
        let want = if k == 2 { 1.0 } else { 0.0 };
        assert!((c - want).abs() < 1e-14);
    }
    assert!(to_grid(&SpectralField::zeros(8), 20).unwrap().iter().all(|v| *v == 0.0));
    assert!(to_grid(&phi3, 0).is_err());
    assert!(from_grid(&[1.0, 2.0], 3).is_err());
}

#[test]
fn grid_values_match_direct_summation_and_round_trip() {
    let l = 16.0;
    let mut r = rng(2);
    let f = random_field(128, 0.5, &mut r);
    let points = 200;
    let values = to_grid(&f, points).unwrap();
    let nodes = interior_nodes(l, points + 1);
    let direct: Vec<f64> = nodes.iter().map(|x| direct_value(f.coeffs(), l, *x)).collect();
    assert!(max_abs_diff(&values, &direct) <= 1e-12 * max_abs(&direct));
    let back = from_grid(&values, 128).unwrap();
    assert!(max_abs_diff(back.coeffs(), f.coeffs()) <= 1e-12 * max_abs(f.coeffs()));
}

#[test]
fn single_mode_norms() {
    let l = PI / 2.0;
    let g = galerkin(l, 0.5, 4);
    let phi = SpectralField::single_mode(4, 1, 1.0);
    let n = g.norms(&phi);
    assert!((n.h_norm - l.sqrt()).abs() < 1e-14);
    assert!((n.v_norm - (2.0 * l).sqrt()).abs() < 1e-14);
    assert!((n.vdual_norm - (l / 2.0).sqrt()).abs() < 1e-14);
    let quad = simpson(|x| direct_value(phi.coeffs(), l, x).powi(4), -l, l, 2000);
    assert!((quad - 0.75 * l).abs() < 1e-10);
    assert!((n.l4_norm - (0.75 * l).powf(0.25)).abs() < 1e-14);
    assert!(n.hs_half.powi(2) <= n.h_norm * n.v_norm * (1.0 + 1e-15));
    assert_eq!(n.hs_norm(0.5), Some(n.hs_half));
    assert_eq!(n.hs_norm(0.3), None);
}

#[test]
fn l4_norm_matches_independent_quadrature() {
    let l = 16.0;
    let g = galerkin(l, 0.5, 32);
    let mut r = rng(3);
    let f = random_field(32, 1.0, &mut r);
    let quad = simpson(|x| direct_value(f.coeffs(), l, x).powi(4), -l, l, 20_000);
    assert!((g.l4_norm_pow4(&f) - quad).abs() <= 1e-9 * quad);
}

#[test]
fn zero_field_has_zero_norms() {
    let g = default_galerkin();
    let n = g.norms(&g.zeros());
    assert_eq!(
        [n.h_norm, n.v_norm, n.l4_norm, n.vdual_norm, n.hs_quarter, n.hs_half],
        [0.0; 6]
    );
    assert!(g.nonlinear(&g.zeros()).is_zero());
}

#[test]
fn parseval_against_grid_quadrature() {
    for modes in [1, 7, 64, 256, 512] {
        let l = 16.0;
        let g = galerkin(l, 0.5, modes);
        let mut r = rng(modes as u64);
        let f = random_field(modes, 0.5, &mut r);
        let m = modes + 13;
        let values = to_grid(&f, m - 1).unwrap();
        let quad: f64 = values.iter().map(|v| v * v).sum::<f64>() * 2.0 * l / m as f64;
        let h2 = g.h_norm_sq(&f);
        assert!((quad - h2).abs() <= 1e-10 * h2, "N = {modes}");
    }
}

#[test]
fn advection_matches_convolution_oracle() {
    for modes in [1, 2, 5, 32, 64] {
        let l = 16.0;
        let g = galerkin(l, 0.5, modes);
        let mut r = rng(10 + modes as u64);
        let u = random_field(modes, 0.0, &mut r);
        let fast = g.advection_term(&u);
        let slow = convolution_advection(u.coeffs(), l);
        assert!(
            max_abs_diff(fast.coeffs(), &slow) <= 1e-10 * max_abs(&slow).max(1e-300),
            "N = {modes}"
        );
    }
}

#[test]
fn nonlinearity_is_shift_minus_advection() {
    let g = galerkin(16.0, 0.5, 16);
    let mut r = rng(4);
    let u = random_field(16, 1.0, &mut r);
    let mut want = u.scaled(0.5);
    want.axpy(-1.0, &g.advection_term(&u));
    assert!(max_abs_diff(g.nonlinear(&u).coeffs(), want.coeffs()) < 1e-15);
    let off = g.clone().with_advection(false);
    assert_eq!(off.nonlinear(&u), u.scaled(0.5));
}

#[test]
fn cubic_term_cancels() {
    let g = default_galerkin();
    let mut r = rng(5);
    for i in 0..1000 {
        let scale = 10f64.powf(-2.0 + 4.0 * (i as f64) / 1000.0);
        let u = random_field(64, (i % 3) as f64, &mut r).scaled(scale);
        let cubic = g.inner(&g.advection_term(&u), &u);
        assert!(cubic.abs() <= 1e-10 * (1.0 + g.v_norm(&u).powi(3)), "sample {i}: {cubic}");
    }
}

#[test]
fn fractional_power_examples() {
    let g = galerkin(16.0, 0.5, 32);
    let mut r = rng(6);
    let f = random_field(32, 1.0, &mut r);
    assert_eq!(g.fractional_power(&f, 0.0).unwrap(), f);
    let phi = SpectralField::single_mode(32, 5, 1.0);
    let p = g.fractional_power(&phi, 0.3).unwrap();
    assert_eq!(p.coeffs()[4], (-g.eigenvalues()[4]).powf(0.3));
    let half = g.fractional_power(&g.fractional_power(&f, 0.5).unwrap(), 0.5).unwrap();
    let one = g.fractional_power(&f, 1.0).unwrap();
    assert!(max_abs_diff(half.coeffs(), one.coeffs()) <= 1e-12 * max_abs(one.coeffs()));
    assert!(g.fractional_power(&f, 1.5).is_err());
    assert!(g.fractional_power(&f, -0.1).is_err());
}

#[test]
fn single_mode_domain_is_legal() {
    let g = galerkin(2.0, 0.5, 1);
    let u = SpectralField::single_mode(1, 1, 0.7);
    assert!(g.advection_term(&u).coeffs()[0].abs() < 1e-15);
    assert_eq!(g.nonlinear(&u).coeffs()[0], 0.35);
}

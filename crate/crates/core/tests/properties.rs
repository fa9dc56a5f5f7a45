mod common;

use common::*;
use proptest::prelude::*;
use sks_core::estimates::{check_embedding, check_energy, check_g_lipschitz, ConstantsLedger};
use sks_core::spectral::to_grid;
use sks_core::{FieldPath, SpectralField, Trajectory};

fn field(modes: usize) -> impl Strategy<Value = SpectralField> {
    prop::collection::vec(-1.0f64..1.0, modes).prop_map(move |c| {
        SpectralField::from_coeffs(c.iter().enumerate().map(|(i, a)| a / (i + 1) as f64).collect())
    })
}

fn ledger() -> ConstantsLedger {
    ConstantsLedger::analytic(0.6, 1.0, 2.2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(f in field(48), l in 0.5f64..40.0) {
        let g = galerkin(l, 0.5, 48);
        let m = 60;
        let quad: f64 = to_grid(&f, m - 1).unwrap().iter().map(|v| v * v).sum::<f64>() * 2.0 * l / m as f64;
        let h2 = g.h_norm_sq(&f);
        prop_assert!((quad - h2).abs() <= 1e-10 * h2.max(1e-300));
    }

    #[test]
    fn semigroup_law_and_contraction(f in field(32), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let g = galerkin(16.0, 0.5, 32);
        let a = g.apply_semigroup(&g.apply_semigroup(&f, s).unwrap(), t).unwrap();
        let b = g.apply_semigroup(&f, s + t).unwrap();
        prop_assert!(max_abs_diff(a.coeffs(), b.coeffs()) <= 1e-14 * max_abs(f.coeffs()).max(1e-300));
        prop_assert!(g.h_norm(&b) <= g.h_norm(&f));
        prop_assert!(g.l4_norm(&b) >= 0.0);
    }

    #[test]
    fn spectral_interpolation(f in field(64)) {
        let g = default_galerkin();
        let n = g.norms(&f);
        prop_assert!(n.hs_half.powi(2) <= n.h_norm * n.v_norm * (1.0 + 1e-14));
        prop_assert!(n.vdual_norm <= n.h_norm && n.h_norm <= n.hs_quarter && n.hs_quarter <= n.hs_half && n.hs_half <= n.v_norm);
    }

    #[test]
    fn cubic_cancellation(f in field(64), scale in -2.0f64..2.0) {
        let g = default_galerkin();
        let u = f.scaled(10f64.powf(scale));
        let cubic = g.inner(&g.advection_term(&u), &u);
        prop_assert!(cubic.abs() <= 1e-10 * (1.0 + g.v_norm(&u).powi(3)));
    }

    #[test]
    fn checkers_scale_with_their_homogeneity(a in field(16), b in field(16), s in 0.1f64..10.0) {
        let g = galerkin(16.0, 0.5, 16);
        let ledger = ledger();
        let u = FieldPath::sample(1.0, 20, |t| { let mut v = a.clone(); v.axpy(t, &b); v }).unwrap();
        let e1 = check_embedding(&u, &g, &ledger, 0.0).unwrap();
        let e2 = check_embedding(&u.scaled(s), &g, &ledger, 0.0).unwrap();
        prop_assert!((e2.lhs - s * e1.lhs).abs() <= 1e-12 * e2.lhs.max(1e-300));
        prop_assert!((e2.rhs - s * e1.rhs).abs() <= 1e-12 * e2.rhs.max(1e-300));

        // with advection off G is linear, so both sides are homogeneous of degree 1
        let lin = g.clone().with_advection(false);
        let v = u.scaled(0.3);
        let l1 = check_g_lipschitz(&u, &v, &lin, 0.0).unwrap();
        let l2 = check_g_lipschitz(&u.scaled(s), &v.scaled(s), &lin, 0.0).unwrap();
        prop_assert!((l2.lhs - s * l1.lhs).abs() <= 1e-12 * l2.lhs.max(1e-300));

        // with w_A = 0 the energy left sides are quadratic in y
        let traj = |k: f64| {
            let ys: Vec<SpectralField> = u.fields().iter().map(|f| f.scaled(k)).collect();
            Trajectory { times: u.times().to_vec(), u: ys.clone(), wa: vec![g.zeros(); ys.len()], y: ys }
        };
        let (h1, v1) = check_energy(&traj(1.0), &g, &ledger, 0.0).unwrap();
        let (h2, v2) = check_energy(&traj(s), &g, &ledger, 0.0).unwrap();
        prop_assert!((h2.lhs - s * s * h1.lhs).abs() <= 1e-12 * h2.lhs.max(1e-300));
        prop_assert!((v2.lhs - s * s * v1.lhs).abs() <= 1e-12 * v2.lhs.max(1e-300));
    }

    #[test]
    fn all_checks_pass_on_zero(modes in 1usize..20, steps in 1usize..30) {
        let g = galerkin(8.0, 0.4, modes);
        let zero = FieldPath::sample(1.0, steps, |_| g.zeros()).unwrap();
        prop_assert!(check_embedding(&zero, &g, &ledger(), 0.0).unwrap().pass);
        prop_assert!(check_g_lipschitz(&zero, &zero, &g, 0.0).unwrap().pass);
    }
}


//! Discrete versions of the a priori inequalities. Each checker evaluates
//! both sides with the trapezoid rule in time and exact spectral/quadrature
//! norms in space.

use super::ledger::{fourth_root_27, ConstantsLedger};
use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::mild::{apply_f, duhamel, free_evolution, Trajectory};
use crate::path::{cumulative_trapezoid, trapezoid, FieldPath};
use crate::spectral::{Galerkin, SpectralField};

/// `||u||_E <= K (||u||_{Linf H} + ||u||_{L2 V})`
pub fn check_embedding(
    path: &FieldPath,
    galerkin: &Galerkin,
    ledger: &ConstantsLedger,
    slack: f64,
) -> Result<CheckReport> {
    let sup_h = galerkin.sup_h(path);
    let l2_v = galerkin.l2_v(path);
    Ok(CheckReport::new(
        "embedding",
        galerkin.e_norm(path),
        ledger.k * (sup_h + l2_v),
        slack,
    )
    .with("K", ledger.k)
    .with("sup_h", sup_h)
    .with("l2_v", l2_v)
    .with("T", path.duration()))
}

/// Regularity of `y = S(t) y0 + int S(t-s) g ds` with constant `L`, and the
/// `8 K T^{1/4}` bound on `||S(.) y0||_E`.
pub fn check_semigroup_regularity(
    y0: &SpectralField,
    g: &FieldPath,
    galerkin: &Galerkin,
    ledger: &ConstantsLedger,
    slack: f64,
) -> Result<(CheckReport, CheckReport)> {
    if y0.modes() != galerkin.modes() || g.fields()[0].modes() != galerkin.modes() {
        return Err(Error::GridMismatch("mode counts differ from the domain".into()));
    }
    if g.len() > 1 {
        g.uniform_step()?;
    }
    let y = duhamel(y0, g, galerkin)?;
    let lhs = galerkin.sup_h(&y) + galerkin.l2_v(&y);
    let data = galerkin.h_norm(y0) + galerkin.l2_vdual(g);
    let regularity = CheckReport::new("semigroup_regularity", lhs, ledger.l * data, slack)
        .with("L", ledger.l)
        .with("data_norm", data);

    let free = free_evolution(y0, g.times(), galerkin)?;
    let t = g.duration();
    let sup_h = galerkin.sup_h(&free);
    let sup_v = galerkin.sup_v(&free);
    let rhs = 8.0 * ledger.k * t.powf(0.25) * (sup_h.powi(4) + sup_v.powi(4)).powf(0.25);
    let semigroup_e = CheckReport::new("semigroup_e_norm", galerkin.e_norm(&free), rhs, slack)
        .with("K", ledger.k)
        .with("T", t);
    Ok((regularity, semigroup_e))
}

/// `||G(u) - G(v)||_{L2 V'} <= 27^{1/4} (||u||_E + ||v||_E + c (2 l T)^{1/4}) ||u - v||_E`
pub fn check_g_lipschitz(
    u: &FieldPath,
    v: &FieldPath,
    galerkin: &Galerkin,
    slack: f64,
) -> Result<CheckReport> {
    let diff_g = u.zip_with(v, |a, b| galerkin.nonlinear(a).sub(&galerkin.nonlinear(b)))?;
    let diff = u.sub(v)?;
    let dom = galerkin.domain();
    let t = u.duration();
    let eu = galerkin.e_norm(u);
    let ev = galerkin.e_norm(v);
    let shift_term = dom.shift * (dom.length() * t).powf(0.25);
    let rhs = fourth_root_27() * (eu + ev + shift_term) * galerkin.e_norm(&diff);
    Ok(CheckReport::new("g_lipschitz", galerkin.l2_vdual(&diff_g), rhs, slack)
        .with("e_u", eu)
        .with("e_v", ev)
        .with("T", t))
}

/// Contraction of `z -> F(z + S(.) u0)` on `[0, tau]`: the ratio
/// `||F(z1) - F(z2)||_E / ||z1 - z2||_E` against 1/2, and the raw Lipschitz
/// bound of `F` with constant `M`.
#[allow(clippy::too_many_arguments)]
pub fn check_f_contraction(
    z1: &FieldPath,
    z2: &FieldPath,
    u0: &SpectralField,
    tau: f64,
    galerkin: &Galerkin,
    ledger: &ConstantsLedger,
    substeps: usize,
    slack: f64,
) -> Result<(CheckReport, CheckReport)> {
    z1.same_grid(z2)?;
    if (z1.end() - tau).abs() > 1e-9 * tau.max(f64::MIN_POSITIVE) || z1.start() != 0.0 {
        return Err(Error::GridMismatch(format!(
            "paths cover [{}, {}], expected [0, {tau}]",
            z1.start(),
            z1.end()
        )));
    }
    let diff = z1.sub(z2)?;
    let dz = galerkin.e_norm(&diff);
    let n1 = galerkin.e_norm(z1);
    let n2 = galerkin.e_norm(z2);
    if dz == 0.0 {
        let why = "identical inputs";
        return Ok((
            CheckReport::degenerate("f_contraction", 0.5, slack, why),
            CheckReport::degenerate("f_lipschitz", 0.0, slack, why),
        ));
    }
    let free = free_evolution(u0, z1.times(), galerkin)?;
    let u1 = z1.add(&free)?;
    let u2 = z2.add(&free)?;
    let f1 = apply_f(&u1, galerkin, substeps)?;
    let f2 = apply_f(&u2, galerkin, substeps)?;
    let df = galerkin.e_norm(&f1.sub(&f2)?);

    let contraction = CheckReport::new("f_contraction", df / dz, 0.5, slack)
        .with("z1_norm", n1)
        .with("z2_norm", n2)
        .with("alpha", ledger.alpha)
        .with("tau", tau)
        .with("in_ball", n1 <= ledger.alpha && n2 <= ledger.alpha);

    let dom = galerkin.domain();
    let shift_term = dom.shift * (dom.length() * tau).powf(0.25);
    let rhs = ledger.m * (galerkin.e_norm(&u1) + galerkin.e_norm(&u2) + shift_term) * dz;
    let lipschitz = CheckReport::new("f_lipschitz", df, rhs, slack)
        .with("M", ledger.m)
        .with("tau", tau);
    Ok((contraction, lipschitz))
}

/// Running quantities of the energy estimate along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    /// `f(t) = (2c + (2 + 3/4 C1 C2)^2 + C1 C2 ||w_A||_{L4}^4) / 2`
    pub f: Vec<f64>,
    /// `g(t) = c ||w_A||_H^2 + ||w_A||_{L4}^4 / 4`
    pub g: Vec<f64>,
    /// `sup_{[0,t]} ||y||_H^2`
    pub sup_y_sq: Vec<f64>,
    /// `int_0^t ||y||_V^2`
    pub int_y_v_sq: Vec<f64>,
    /// Right side of the sup bound on `[0, t]`.
    pub bound_h_sq: Vec<f64>,
    /// Right side of the integrated `V` bound on `[0, t]`.
    pub bound_v_sq: Vec<f64>,
}

pub fn energy_series(
    traj: &Trajectory,
    galerkin: &Galerkin,
    ledger: &ConstantsLedger,
) -> Result<EnergySeries> {
    if traj.is_empty() {
        return Err(Error::Degenerate("empty trajectory".into()));
    }
    let c = galerkin.domain().shift;
    let cc = ledger.c1 * ledger.c2;
    let base = 2.0 * c + (2.0 + 0.75 * cc).powi(2);
    let (f, g): (Vec<f64>, Vec<f64>) = traj
        .wa
        .iter()
        .map(|w| {
            let l4 = galerkin.l4_norm_pow4(w);
            (0.5 * (base + cc * l4), c * galerkin.h_norm_sq(w) + 0.25 * l4)
        })
        .unzip();
    let times = traj.times.clone();
    let int_f = cumulative_trapezoid(&times, &f);
    let int_g = cumulative_trapezoid(&times, &g);
    let yv: Vec<f64> = traj.y.iter().map(|y| galerkin.v_norm_sq(y)).collect();
    let int_y_v_sq = cumulative_trapezoid(&times, &yv);
    let mut sup = 0.0f64;
    let sup_y_sq: Vec<f64> = traj
        .y
        .iter()
        .map(|y| {
            sup = sup.max(galerkin.h_norm_sq(y));
            sup
        })
        .collect();
    let u0_sq = galerkin.h_norm_sq(&traj.y[0]);
    let bound_h_sq = int_f
        .iter()
        .zip(&int_g)
        .map(|(ff, gg)| ff.exp() * (u0_sq + gg))
        .collect();
    let bound_v_sq = int_f
        .iter()
        .zip(&int_g)
        .zip(&sup_y_sq)
        .map(|((ff, gg), s)| u0_sq + s * ff + gg)
        .collect();
    Ok(EnergySeries {
        times,
        f,
        g,
        sup_y_sq,
        int_y_v_sq,
        bound_h_sq,
        bound_v_sq,
    })
}

/// Pathwise energy bounds: `sup ||y||_H^2` and `int ||y||_V^2` against their
/// Gronwall right-hand sides on the whole trajectory.
pub fn check_energy(
    traj: &Trajectory,
    galerkin: &Galerkin,
    ledger: &ConstantsLedger,
    slack: f64,
) -> Result<(CheckReport, CheckReport)> {
    let s = energy_series(traj, galerkin, ledger)?;
    let last = s.times.len() - 1;
    let int_f = trapezoid(&s.times, &s.f);
    let h = CheckReport::new("energy_sup_h", s.sup_y_sq[last], s.bound_h_sq[last], slack)
        .with("int_f", int_f)
        .with("T", s.times[last]);
    let v = CheckReport::new("energy_int_v", s.int_y_v_sq[last], s.bound_v_sq[last], slack)
        .with("int_f", int_f)
        .with("T", s.times[last]);
    Ok((h, v))
}

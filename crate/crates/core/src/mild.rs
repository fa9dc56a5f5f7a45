//! Mild-solution machinery for `y' = A y + G(y + w_A)`, `u = y + w_A`.
//!
//! * [`apply_f`] evaluates the Duhamel map `F(u)(t) = int_0^t S(t-s) G(u(s)) ds`
//!   by integrating a piecewise-linear interpolant of `G(u)` exactly against
//!   the exponential kernel of each mode.
//! * [`picard_solve`] iterates `z <- w_A + F(z + S(.)u0)` on a short interval.
//! * [`ExpEuler`] is the global stepper: exact linear part, nonlinearity frozen
//!   at the start of the step.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::ConstantsLedger;
use crate::noise::{sample_wa_at, sample_wa_path, step_count, to_field_path, NoiseSpec};
use crate::path::{cumulative_trapezoid, FieldPath};
use crate::rng::StreamId;
use crate::spectral::{Galerkin, SpectralField};

/// Threshold on `|coefficient|` treated as blow-up.
pub const BLOWUP_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub save_stride: usize,
    /// Sub-intervals per grid step at which `G` is sampled inside [`apply_f`].
    pub quad_substeps: usize,
    /// Grid steps used on the local interval `[0, tau]`.
    pub picard_steps: usize,
    /// Run the Picard cross-check on the first interval in [`solve_global`].
    pub crosscheck: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1e-3,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            save_stride: 1,
            quad_substeps: 4,
            picard_steps: 64,
            crosscheck: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::arg("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::arg("picard_tol", "must be positive"));
        }
        for (name, v) in [
            ("picard_max_iters", self.picard_max_iters),
            ("save_stride", self.save_stride),
            ("quad_substeps", self.quad_substeps),
            ("picard_steps", self.picard_steps),
        ] {
            if v == 0 {
                return Err(Error::arg(name, "must be at least 1"));
            }
        }
        Ok(())
    }
}

/// `(e^z - 1) / z`
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z) / z^2`
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        1.0 / 2.0 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 + z.powi(4) / 720.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// Per-mode weights for one step of length `h` of the linear-interpolant
/// Duhamel recursion `F_{n+1} = e F_n + a G_n + b G_{n+1}`.
struct DuhamelWeights {
    decay: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl DuhamelWeights {
    fn new(galerkin: &Galerkin, h: f64) -> Self {
        let mut decay = Vec::with_capacity(galerkin.modes());
        let mut left = Vec::with_capacity(galerkin.modes());
        let mut right = Vec::with_capacity(galerkin.modes());
        for &l in galerkin.eigenvalues() {
            let z = l * h;
            let p1 = phi1(z);
            let p2 = phi2(z);
            decay.push(z.exp());
            left.push(h * (p1 - p2));
            right.push(h * p2);
        }
        DuhamelWeights { decay, left, right }
    }

    fn step(&self, acc: &mut SpectralField, g0: &SpectralField, g1: &SpectralField) {
        for (k, f) in acc.coeffs_mut().iter_mut().enumerate() {
            *f = self.decay[k] * *f + self.left[k] * g0.coeffs()[k] + self.right[k] * g1.coeffs()[k];
        }
    }
}

/// `y(t) = S(t) y0 + int_0^t S(t-s) g(s) ds` with `g` linear between nodes.
pub fn duhamel(y0: &SpectralField, forcing: &FieldPath, galerkin: &Galerkin) -> Result<FieldPath> {
    galerkin.check_field(y0);
    let mut out = Vec::with_capacity(forcing.len());
    out.push(y0.clone());
    if forcing.len() == 1 {
        return FieldPath::new(forcing.times().to_vec(), out);
    }
    let h = forcing.uniform_step()?;
    let w = DuhamelWeights::new(galerkin, h);
    let mut acc = y0.clone();
    for g in forcing.fields().windows(2) {
        w.step(&mut acc, &g[0], &g[1]);
        out.push(acc.clone());
    }
    FieldPath::new(forcing.times().to_vec(), out)
}

/// Duhamel map `F(u)(t_n) = int_0^{t_n} S(t_n - s) G(u(s)) ds`.
///
/// `u` is interpolated linearly between nodes; `G(u)` is sampled at
/// `substeps` points per step and integrated exactly against the
/// exponential kernel with a piecewise-linear interpolant.
pub fn apply_f(path: &FieldPath, galerkin: &Galerkin, substeps: usize) -> Result<FieldPath> {
    if substeps == 0 {
        return Err(Error::arg("quad_substeps", "must be at least 1"));
    }
    let mut out = Vec::with_capacity(path.len());
    out.push(galerkin.zeros());
    if path.len() == 1 {
        return FieldPath::new(path.times().to_vec(), out);
    }
    let h = path.uniform_step()?;
    let w = DuhamelWeights::new(galerkin, h / substeps as f64);
    let mut acc = galerkin.zeros();
    let mut g_prev = galerkin.nonlinear(&path.fields()[0]);
    for u in path.fields().windows(2) {
        for j in 1..=substeps {
            let s = j as f64 / substeps as f64;
            let g_next = if j == substeps {
                galerkin.nonlinear(&u[1])
            } else {
                let mut ui = u[0].scaled(1.0 - s);
                ui.axpy(s, &u[1]);
                galerkin.nonlinear(&ui)
            };
            w.step(&mut acc, &g_prev, &g_next);
            g_prev = g_next;
        }
        out.push(acc.clone());
    }
    FieldPath::new(path.times().to_vec(), out)
}

/// `S(t) u0` on the nodes of `times`.
pub fn free_evolution(u0: &SpectralField, times: &[f64], galerkin: &Galerkin) -> Result<FieldPath> {
    let fields = times
        .iter()
        .map(|&t| galerkin.apply_semigroup(u0, t))
        .collect::<Result<Vec<_>>>()?;
    FieldPath::new(times.to_vec(), fields)
}

/// Local existence time
/// `tau_1 = (6 M [c (2l)^{1/4} + 16 K (|S u0|^4_{Linf H} + |S u0|^4_{Linf V})^{1/4}])^{-4}`,
/// with the sup-norms taken over 65 nodes of `[0, horizon]`.
pub fn tau_one(
    u0: &SpectralField,
    ledger: &ConstantsLedger,
    galerkin: &Galerkin,
    horizon: f64,
) -> Result<f64> {
    if !(ledger.m > 0.0) || !(ledger.k > 0.0) {
        return Err(Error::arg("ledger", "K and M must be positive"));
    }
    if !(horizon >= 0.0) {
        return Err(Error::arg("T", "must be non-negative"));
    }
    let times: Vec<f64> = if horizon > 0.0 {
        (0..=64).map(|j| horizon * j as f64 / 64.0).collect()
    } else {
        vec![0.0]
    };
    let free = free_evolution(u0, &times, galerkin)?;
    let sup_h = galerkin.sup_h(&free);
    let sup_v = galerkin.sup_v(&free);
    let dom = galerkin.domain();
    let bracket = dom.shift * dom.length().powf(0.25)
        + 16.0 * ledger.k * (sup_h.powi(4) + sup_v.powi(4)).powf(0.25);
    Ok((6.0 * ledger.m * bracket).powi(-4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauTwo {
    pub time: f64,
    pub index: usize,
    /// The bound already fails on the first step; `time` is the first node.
    pub below_resolution: bool,
}

/// Largest node `t` with `int_0^t ||w_A||_{L^4}^4 ds <= alpha / 2` (trapezoid).
pub fn tau_two(wa: &FieldPath, alpha: f64, galerkin: &Galerkin) -> Result<TauTwo> {
    if !(alpha > 0.0) {
        return Err(Error::arg("alpha", "must be positive"));
    }
    if !wa.fields()[0].is_zero() {
        return Err(Error::arg("wa", "path must start from w_A(0) = 0"));
    }
    let l4: Vec<f64> = wa.fields().iter().map(|f| galerkin.l4_norm_pow4(f)).collect();
    let cum = cumulative_trapezoid(wa.times(), &l4);
    let index = cum.iter().take_while(|&&v| v <= alpha / 2.0).count() - 1;
    Ok(TauTwo {
        time: wa.times()[index],
        index,
        below_resolution: index == 0 && wa.len() > 1,
    })
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// Fixed point `z = y + w_A - S(.)u0`.
    pub z: FieldPath,
    /// Recomposed solution `u = S(.)u0 + z`.
    pub u: FieldPath,
    pub iterations: usize,
    /// `|z_{n+1} - z_n|_E / |z_n - z_{n-1}|_E` for each iteration after the first.
    pub ratios: Vec<f64>,
    /// `|z - w_A - F(z + S(.)u0)|_E`
    pub residual: f64,
    pub z_norm: f64,
    pub alpha: f64,
}

impl PicardOutcome {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn within_ball(&self) -> bool {
        self.z_norm <= self.alpha
    }
}

/// Solve `z = w_A + F(z + S(.)u0)` on the grid of `wa` by successive substitution from `z = 0`.
pub fn picard_solve(
    u0: &SpectralField,
    wa: &FieldPath,
    galerkin: &Galerkin,
    cfg: &SolverConfig,
    ledger: &ConstantsLedger,
) -> Result<PicardOutcome> {
    cfg.validate()?;
    if wa.len() > 1 {
        wa.uniform_step()?;
    }
    let free = free_evolution(u0, wa.times(), galerkin)?;
    let map = |z: &FieldPath| -> Result<FieldPath> {
        let fz = apply_f(&z.add(&free)?, galerkin, cfg.quad_substeps)?;
        wa.add(&fz)
    };

    let mut z = wa.map(|_| galerkin.zeros());
    let mut ratios = Vec::new();
    let mut prev_update: Option<f64> = None;
    for iteration in 1..=cfg.picard_max_iters {
        let next = map(&z)?;
        let update = galerkin.e_norm(&next.sub(&z)?);
        let norm = galerkin.e_norm(&next);
        if let Some(p) = prev_update {
            ratios.push(if p > 0.0 { update / p } else { 0.0 });
        }
        z = next;
        if !update.is_finite() {
            break;
        }
        if update <= cfg.picard_tol * norm {
            let residual = galerkin.e_norm(&z.sub(&map(&z)?)?);
            let u = z.add(&free)?;
            return Ok(PicardOutcome {
                z,
                u,
                iterations: iteration,
                ratios,
                residual,
                z_norm: norm,
                alpha: ledger.alpha,
            });
        }
        prev_update = Some(update);
    }
    Err(Error::PicardDivergence {
        iterations: cfg.picard_max_iters,
        last_ratio: ratios.last().copied().unwrap_or(f64::NAN),
    })
}

/// Exponential Euler step of fixed length:
/// `y_k <- e^{lambda_k h} y_k + (e^{lambda_k h} - 1)/lambda_k * G(y + w_A)_k`.
#[derive(Debug, Clone)]
pub struct ExpEuler {
    step: f64,
    decay: Vec<f64>,
    weight: Vec<f64>,
}

impl ExpEuler {
    pub fn new(galerkin: &Galerkin, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::arg("h", format!("must be positive, got {h}")));
        }
        let (decay, weight) = galerkin
            .eigenvalues()
            .iter()
            .map(|&l| ((l * h).exp(), h * phi1(l * h)))
            .unzip();
        Ok(ExpEuler { step: h, decay, weight })
    }

    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn step(&self, y: &SpectralField, wa: &SpectralField, galerkin: &Galerkin) -> SpectralField {
        let g = galerkin.nonlinear(&y.add(wa));
        let coeffs = y
            .coeffs()
            .iter()
            .zip(g.coeffs())
            .enumerate()
            .map(|(k, (a, b))| self.decay[k] * a + self.weight[k] * b)
            .collect();
        SpectralField::from_coeffs(coeffs)
    }
}

pub fn step_exponential_euler(
    y: &SpectralField,
    wa: &SpectralField,
    h: f64,
    galerkin: &Galerkin,
) -> Result<SpectralField> {
    Ok(ExpEuler::new(galerkin, h)?.step(y, wa, galerkin))
}

/// Advance `y` with exponential Euler along a given `w_A` path, returning `y`
/// at every node. Fails with [`Error::BlowUp`] on overflow.
pub fn integrate_along(u0: &SpectralField, wa: &FieldPath, galerkin: &Galerkin) -> Result<FieldPath> {
    let mut ys = Vec::with_capacity(wa.len());
    ys.push(u0.clone());
    if wa.len() > 1 {
        let stepper = ExpEuler::new(galerkin, wa.uniform_step()?)?;
        let mut y = u0.clone();
        for (n, w) in wa.fields()[..wa.len() - 1].iter().enumerate() {
            y = stepper.step(&y, w, galerkin);
            check_finite(&y, wa.times()[n + 1])?;
            ys.push(y.clone());
        }
    }
    FieldPath::new(wa.times().to_vec(), ys)
}

fn check_finite(y: &SpectralField, time: f64) -> Result<()> {
    if y.coeffs().iter().all(|a| a.abs() < BLOWUP_LIMIT) {
        Ok(())
    } else {
        Err(Error::BlowUp { time })
    }
}

/// Saved states of one realisation; `u = y + w_A` coefficientwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub y: Vec<SpectralField>,
    pub wa: Vec<SpectralField>,
    pub u: Vec<SpectralField>,
}

impl Trajectory {
    fn from_parts(times: Vec<f64>, y: Vec<SpectralField>, wa: Vec<SpectralField>) -> Self {
        let u = y.iter().zip(&wa).map(|(a, b)| a.add(b)).collect();
        Trajectory { times, y, wa, u }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn y_path(&self) -> Result<FieldPath> {
        FieldPath::new(self.times.clone(), self.y.clone())
    }

    pub fn wa_path(&self) -> Result<FieldPath> {
        FieldPath::new(self.times.clone(), self.wa.clone())
    }

    pub fn u_path(&self) -> Result<FieldPath> {
        FieldPath::new(self.times.clone(), self.u.clone())
    }
}

/// Result of comparing the Picard fixed point with the stepper on `[0, tau]`.
#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub tau: f64,
    pub tau_one: f64,
    pub tau_two: TauTwo,
    pub picard: PicardOutcome,
    /// Relative `L^inf(0, tau; H)` distance between the two solutions.
    pub relative_difference: f64,
}

#[derive(Debug, Clone)]
pub struct GlobalRun {
    pub trajectory: Trajectory,
    pub crosscheck: Option<CrossCheck>,
}

/// Merge two increasing grids, identifying nodes closer than `tol`.
/// Returns the union and the positions of each input grid inside it.
fn merge_grids(a: &[f64], b: &[f64], tol: f64) -> (Vec<f64>, Vec<usize>, Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = Vec::with_capacity(a.len());
    let mut ib = Vec::with_capacity(b.len());
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i] <= b[j] + tol);
        let take_b = i >= a.len() || (j < b.len() && b[j] <= a[i] + tol);
        let t = if take_a { a[i] } else { b[j] };
        let pos = out.len();
        out.push(t);
        if take_a {
            ia.push(pos);
            i += 1;
        }
        if take_b {
            ib.push(pos);
            j += 1;
        }
    }
    (out, ia, ib)
}

fn pick(states: &[SpectralField], times: &[f64], idx: &[usize]) -> Result<FieldPath> {
    FieldPath::new(
        idx.iter().map(|&i| times[i]).collect(),
        idx.iter().map(|&i| states[i].clone()).collect(),
    )
}

/// Run the cross-check on a fine `w_A` path over `[0, min(tau_1, T)]`.
fn cross_check(
    u0: &SpectralField,
    fine_wa: &FieldPath,
    tau_one: f64,
    galerkin: &Galerkin,
    cfg: &SolverConfig,
    ledger: &ConstantsLedger,
) -> Result<CrossCheck> {
    let t2 = tau_two(fine_wa, ledger.alpha, galerkin)?;
    let local = fine_wa.truncated(t2.index + 1);
    let picard = picard_solve(u0, &local, galerkin, cfg, ledger)?;
    let y = integrate_along(u0, &local, galerkin)?;
    let stepped = y.add(&local)?;
    let diff = galerkin.sup_h(&stepped.sub(&picard.u)?);
    let scale = galerkin.sup_h(&picard.u);
    Ok(CrossCheck {
        tau: local.end(),
        tau_one,
        tau_two: t2,
        picard,
        relative_difference: if scale > 0.0 { diff / scale } else { diff },
    })
}

/// Sample one `w_A` path and advance `y` with exponential Euler over `[0, T]`.
///
/// With `cfg.crosscheck` the noise is sampled on the union of the step grid
/// and a `picard_steps` grid of `[0, min(tau_1, T)]` (exact transitions keep
/// the law unchanged), and the Picard fixed point on the local interval is
/// compared with the stepper driven by the same fine path.
#[allow(clippy::too_many_arguments)]
pub fn solve_global<R: Rng + ?Sized>(
    u0: &SpectralField,
    horizon: f64,
    galerkin: &Galerkin,
    noise: &NoiseSpec,
    cfg: &SolverConfig,
    ledger: Option<&ConstantsLedger>,
    stream: StreamId,
    rng: &mut R,
) -> Result<GlobalRun> {
    cfg.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::arg("T", format!("must be positive, got {horizon}")));
    }
    galerkin.check_field(u0);
    let steps = step_count(horizon, cfg.dt)?;
    let coarse: Vec<f64> = (0..=steps).map(|n| n as f64 * cfg.dt).collect();

    let (coarse_wa, crosscheck) = if cfg.crosscheck {
        let ledger = ledger.ok_or_else(|| Error::arg("ledger", "cross-check needs constants"))?;
        let t1 = tau_one(u0, ledger, galerkin, horizon)?;
        let cap = t1.min(horizon);
        let fine: Vec<f64> = (0..=cfg.picard_steps)
            .map(|j| cap * j as f64 / cfg.picard_steps as f64)
            .collect();
        let (union, ic, ifn) = merge_grids(&coarse, &fine, 1e-12 * cfg.dt);
        let states: Vec<SpectralField> = sample_wa_at(&union, galerkin, noise, stream, rng)?
            .into_iter()
            .map(|s| s.wa)
            .collect();
        // Fine nodes keep their exact uniform spacing.
        let fine_wa = FieldPath::new(fine.clone(), pick(&states, &union, &ifn)?.into_fields())?;
        let coarse_wa = FieldPath::new(coarse.clone(), pick(&states, &union, &ic)?.into_fields())?;
        let check = cross_check(u0, &fine_wa, t1, galerkin, cfg, ledger)?;
        (coarse_wa, Some(check))
    } else {
        let states = sample_wa_path(horizon, cfg.dt, galerkin, noise, stream, rng)?;
        (to_field_path(&states)?, None)
    };

    let stepper = ExpEuler::new(galerkin, cfg.dt)?;
    let mut y = u0.clone();
    let mut times = vec![0.0];
    let mut ys = vec![u0.clone()];
    let mut was = vec![coarse_wa.fields()[0].clone()];
    for n in 0..steps {
        y = stepper.step(&y, &coarse_wa.fields()[n], galerkin);
        check_finite(&y, coarse[n + 1])?;
        if (n + 1) % cfg.save_stride == 0 || n + 1 == steps {
            times.push(coarse[n + 1]);
            ys.push(y.clone());
            was.push(coarse_wa.fields()[n + 1].clone());
        }
    }
    Ok(GlobalRun {
        trajectory: Trajectory::from_parts(times, ys, was),
        crosscheck,
    })
}

/// Exponential Euler along the nodes of a prescribed `w_A` path, recording every
/// `stride`-th node. Used for common-noise refinement studies.
pub fn solve_on_path(
    u0: &SpectralField,
    wa: &FieldPath,
    galerkin: &Galerkin,
    stride: usize,
) -> Result<Trajectory> {
    let y = integrate_along(u0, wa, galerkin)?;
    let y = y.subsampled(stride);
    let wa = wa.subsampled(stride);
    Ok(Trajectory::from_parts(
        y.times().to_vec(),
        y.into_fields(),
        wa.into_fields(),
    ))
}

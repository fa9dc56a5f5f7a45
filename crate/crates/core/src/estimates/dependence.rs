//! Continuous dependence of `y = u - w_A` on the initial datum and on the
//! stochastic convolution, with an exponential envelope fitted in the log
//! domain.

use serde::{Deserialize, Serialize};

use super::report::CheckReport;
use crate::error::{Error, Result};
use crate::mild::Trajectory;
use crate::noise::least_squares_line;
use crate::path::cumulative_trapezoid;
use crate::spectral::Galerkin;

/// `d(t) = ||y0(t) - y1(t)||_{L4}` against
/// `D(t) = ||u0(0) - u1(0)||_H + ||w0 - w1||_{E(0, t)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceSeries {
    pub times: Vec<f64>,
    pub distance: Vec<f64>,
    pub data: Vec<f64>,
}

impl DependenceSeries {
    pub fn new(run0: &Trajectory, run1: &Trajectory, galerkin: &Galerkin) -> Result<Self> {
        if run0.is_empty() || run1.is_empty() {
            return Err(Error::Degenerate("empty trajectory".into()));
        }
        if run0.times.len() != run1.times.len()
            || run0
                .times
                .iter()
                .zip(&run1.times)
                .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
        {
            return Err(Error::GridMismatch("runs are saved on different grids".into()));
        }
        let distance = run0
            .y
            .iter()
            .zip(&run1.y)
            .map(|(a, b)| galerkin.l4_norm(&a.sub(b)))
            .collect();
        let dw4: Vec<f64> = run0
            .wa
            .iter()
            .zip(&run1.wa)
            .map(|(a, b)| galerkin.l4_norm_pow4(&a.sub(b)))
            .collect();
        let du0 = galerkin.h_norm(&run0.u[0].sub(&run1.u[0]));
        let data = cumulative_trapezoid(&run0.times, &dw4)
            .into_iter()
            .map(|e| du0 + e.max(0.0).powf(0.25))
            .collect();
        Ok(DependenceSeries {
            times: run0.times.clone(),
            distance,
            data,
        })
    }

    pub fn sup_distance(&self) -> f64 {
        self.distance.iter().fold(0.0, |m, d| m.max(*d))
    }

    pub fn is_identical(&self) -> bool {
        self.distance.iter().all(|d| *d == 0.0) && self.data.iter().all(|d| *d == 0.0)
    }

    /// `(t, ln(d / D))` at every node where both are positive.
    fn log_points(&self) -> Vec<(f64, f64)> {
        self.times
            .iter()
            .zip(self.distance.iter().zip(&self.data))
            .filter(|(_, (d, big))| **d > 0.0 && **big > 0.0)
            .map(|(t, (d, big))| (*t, (d / big).ln()))
            .collect()
    }

    /// Largest value of `d(t) / (C2 D(t) e^{C3 t})`; infinite where `D = 0 < d`.
    pub fn worst_ratio(&self, fit: &GronwallFit) -> f64 {
        self.times
            .iter()
            .zip(self.distance.iter().zip(&self.data))
            .map(|(t, (d, big))| {
                if *d == 0.0 {
                    0.0
                } else if *big == 0.0 {
                    f64::INFINITY
                } else {
                    d / (fit.c2 * big * (fit.c3 * t).exp())
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Envelope `d(t) <= C2 D(t) e^{C3 t}`. `C3` is the least-squares slope of
/// `ln(d / D)`; the intercept is raised by the largest residual so the
/// envelope covers every fitted point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GronwallFit {
    pub c2: f64,
    pub c3: f64,
    pub rms_residual: f64,
    pub points: usize,
}

impl GronwallFit {
    pub fn fit(series: &[DependenceSeries]) -> Result<Self> {
        let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.log_points()).collect();
        if pts.len() < 2 {
            return Err(Error::Degenerate("fewer than two nonzero differences".into()));
        }
        let (ts, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
        let (slope, intercept) = if ts.iter().all(|t| *t == ts[0]) {
            (0.0, ys.iter().sum::<f64>() / ys.len() as f64)
        } else {
            least_squares_line(&ts, &ys)
        };
        let residuals: Vec<f64> = pts.iter().map(|(t, y)| y - (intercept + slope * t)).collect();
        let worst = residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
        Ok(GronwallFit {
            c2: (intercept + worst).exp(),
            c3: slope,
            rms_residual: rms,
            points: pts.len(),
        })
    }
}

/// Check a pair of runs against a given envelope.
pub fn check_gronwall_bound(series: &DependenceSeries, fit: &GronwallFit, slack: f64) -> CheckReport {
    if series.is_identical() {
        return CheckReport::degenerate("continuous_dependence", 1.0, slack, "identical runs");
    }
    CheckReport::new("continuous_dependence", series.worst_ratio(fit), 1.0, slack)
        .with("C2_fit", fit.c2)
        .with("C3_fit", fit.c3)
        .with("rms_residual", fit.rms_residual)
        .with("sup_distance", series.sup_distance())
}

/// Fit the envelope to one pair of runs and report it. Identical runs give a
/// degenerate report.
pub fn check_continuous_dependence(
    run0: &Trajectory,
    run1: &Trajectory,
    galerkin: &Galerkin,
    slack: f64,
) -> Result<(CheckReport, Option<GronwallFit>)> {
    let series = DependenceSeries::new(run0, run1, galerkin)?;
    if series.is_identical() {
        return Ok((
            CheckReport::degenerate("continuous_dependence", 1.0, slack, "identical runs"),
            None,
        ));
    }
    let fit = GronwallFit::fit(std::slice::from_ref(&series))?;
    Ok((check_gronwall_bound(&series, &fit, slack), Some(fit)))
}

/// First-order scaling of `sup_t d(t)` in the size of the initial
/// perturbation: for consecutive `(delta, sup)` pairs the ratio of sups
/// divided by the ratio of deltas must lie in `[1/2, 2]`.
pub fn check_perturbation_scaling(study: &[(f64, f64)]) -> Result<CheckReport> {
    if study.len() < 2 {
        return Err(Error::arg("study", "need at least two perturbation sizes"));
    }
    let mut worst = 0.0f64;
    let mut ratios = Vec::with_capacity(study.len() - 1);
    for w in study.windows(2) {
        let ((d0, s0), (d1, s1)) = (w[0], w[1]);
        if !(d0 > 0.0 && d1 > 0.0) {
            return Err(Error::arg("study", "perturbation sizes must be positive"));
        }
        if !(s1 > 0.0) {
            return Err(Error::Degenerate(format!("zero response at delta = {d1}")));
        }
        let ratio = s0 / s1;
        ratios.push(ratio);
        worst = worst.max((ratio / (d0 / d1)).log2().abs());
    }
    let mut report = CheckReport::new("perturbation_scaling", worst, 1.0, 0.0);
    for (i, r) in ratios.iter().enumerate() {
        report = report.with(&format!("ratio_{i}"), *r);
    }
    Ok(report)
}

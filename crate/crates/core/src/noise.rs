//! Q-Wiener forcing and the stochastic convolution `w_A(t) = int_0^t S(t-s) dw(s)`.
//!
//! `Q` is diagonal in the sine basis, so each coefficient of `w_A` is an
//! independent Ornstein-Uhlenbeck process and can be advanced exactly:
//!
//! ```text
//! wa_k(t + h) = e^{lambda_k h} wa_k(t) + xi_k,
//! xi_k ~ N(0, q_k (1 - e^{2 lambda_k h}) / (2 |lambda_k|))
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::FieldPath;
use crate::rng::StreamId;
use crate::spectral::{Galerkin, SpectralField};

/// Parameters of the power-law profile `q_k = sigma^2 k^{-decay}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub sigma: f64,
    pub decay: f64,
}

impl Default for NoiseProfile {
    fn default() -> Self {
        NoiseProfile {
            sigma: 0.1,
            decay: 4.0,
        }
    }
}

/// Covariance of the forcing. `q[k-1]` is the variance per unit time of the
/// `phi_k` coefficient of `w`; in the `L^2`-orthonormal basis `phi_k / sqrt(l)`
/// the eigenvalue of `Q` is `l q_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    q: Vec<f64>,
    profile: Option<NoiseProfile>,
}

impl NoiseSpec {
    pub fn power_law(profile: NoiseProfile, modes: usize) -> Result<Self> {
        let NoiseProfile { sigma, decay } = profile;
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::arg("sigma", format!("must be non-negative, got {sigma}")));
        }
        if !(decay > 1.0) || !decay.is_finite() {
            return Err(Error::arg(
                "decay",
                format!("must exceed 1 for a trace-class covariance, got {decay}"),
            ));
        }
        let q = (1..=modes)
            .map(|k| sigma * sigma * (k as f64).powf(-decay))
            .collect();
        Ok(NoiseSpec {
            q,
            profile: Some(profile),
        })
    }

    pub fn from_variances(q: Vec<f64>) -> Result<Self> {
        if let Some(i) = q.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::arg(
                "q",
                format!("entry {} is {}, must be finite and non-negative", i + 1, q[i]),
            ));
        }
        Ok(NoiseSpec { q, profile: None })
    }

    pub fn silent(modes: usize) -> Self {
        NoiseSpec {
            q: vec![0.0; modes],
            profile: None,
        }
    }

    pub fn variances(&self) -> &[f64] {
        &self.q
    }

    pub fn profile(&self) -> Option<NoiseProfile> {
        self.profile
    }

    pub fn trace(&self) -> f64 {
        self.q.iter().sum()
    }

    pub fn is_silent(&self) -> bool {
        self.q.iter().all(|&v| v == 0.0)
    }
}

/// Variance of `wa_k(h)` started from zero.
pub fn one_step_variance(q: f64, lambda: f64, h: f64) -> f64 {
    q * -(2.0 * lambda * h).exp_m1() / (2.0 * lambda.abs())
}

/// Stationary variance `q / (2 |lambda|)`.
pub fn stationary_variance(q: f64, lambda: f64) -> f64 {
    q / (2.0 * lambda.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionState {
    pub time: f64,
    pub wa: SpectralField,
    pub stream: StreamId,
}

impl ConvolutionState {
    pub fn zero(modes: usize, stream: StreamId) -> Self {
        ConvolutionState {
            time: 0.0,
            wa: SpectralField::zeros(modes),
            stream,
        }
    }
}

/// Exact one-step transition for a fixed step `h`.
#[derive(Debug, Clone)]
pub struct OuTransition {
    step: f64,
    decay: Vec<f64>,
    std_dev: Vec<f64>,
}

impl OuTransition {
    pub fn new(galerkin: &Galerkin, noise: &NoiseSpec, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::arg("h", format!("must be positive, got {h}")));
        }
        galerkin.require_negative()?;
        if noise.variances().len() != galerkin.modes() {
            return Err(Error::GridMismatch(format!(
                "noise has {} modes, domain has {}",
                noise.variances().len(),
                galerkin.modes()
            )));
        }
        let (decay, std_dev) = galerkin
            .eigenvalues()
            .iter()
            .zip(noise.variances())
            .map(|(&l, &q)| ((l * h).exp(), one_step_variance(q, l, h).sqrt()))
            .unzip();
        Ok(OuTransition {
            step: h,
            decay,
            std_dev,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Advance in place. One standard normal is drawn per mode regardless of
    /// its variance, so the stream position depends only on the step count.
    pub fn advance<R: Rng + ?Sized>(&self, state: &mut ConvolutionState, rng: &mut R) {
        for ((w, d), s) in state
            .wa
            .coeffs_mut()
            .iter_mut()
            .zip(&self.decay)
            .zip(&self.std_dev)
        {
            let xi: f64 = rng.sample(StandardNormal);
            *w = d * *w + s * xi;
        }
        state.time += self.step;
    }
}

pub fn advance_convolution<R: Rng + ?Sized>(
    state: &ConvolutionState,
    h: f64,
    galerkin: &Galerkin,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<ConvolutionState> {
    let tr = OuTransition::new(galerkin, noise, h)?;
    let mut next = state.clone();
    tr.advance(&mut next, rng);
    Ok(next)
}

/// Number of steps of size `h` covering `[0, horizon]`; the ratio must be an integer.
pub fn step_count(horizon: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) {
        return Err(Error::arg("h", format!("must be positive, got {h}")));
    }
    if !(horizon >= h * (1.0 - 1e-12)) {
        return Err(Error::arg("T", format!("horizon {horizon} is shorter than step {h}")));
    }
    let n = (horizon / h).round();
    if ((n * h) - horizon).abs() > 1e-9 * horizon {
        return Err(Error::arg(
            "T",
            format!("horizon {horizon} is not a multiple of step {h}"),
        ));
    }
    Ok(n as usize)
}

/// Snapshots of `w_A` at `t = 0, h, 2h, ..., T`; the first is identically zero.
pub fn sample_wa_path<R: Rng + ?Sized>(
    horizon: f64,
    h: f64,
    galerkin: &Galerkin,
    noise: &NoiseSpec,
    stream: StreamId,
    rng: &mut R,
) -> Result<Vec<ConvolutionState>> {
    let steps = step_count(horizon, h)?;
    let tr = OuTransition::new(galerkin, noise, h)?;
    let mut state = ConvolutionState::zero(galerkin.modes(), stream);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.clone());
    for n in 1..=steps {
        tr.advance(&mut state, rng);
        // Avoid accumulated drift in the clock.
        state.time = n as f64 * h;
        out.push(state.clone());
    }
    Ok(out)
}

/// Sample `w_A` at arbitrary increasing times starting at zero, using exact
/// transitions between consecutive nodes.
pub fn sample_wa_at<R: Rng + ?Sized>(
    times: &[f64],
    galerkin: &Galerkin,
    noise: &NoiseSpec,
    stream: StreamId,
    rng: &mut R,
) -> Result<Vec<ConvolutionState>> {
    if times.first() != Some(&0.0) {
        return Err(Error::arg("times", "must start at 0"));
    }
    let mut state = ConvolutionState::zero(galerkin.modes(), stream);
    let mut out = vec![state.clone()];
    for w in times.windows(2) {
        let tr = OuTransition::new(galerkin, noise, w[1] - w[0])?;
        tr.advance(&mut state, rng);
        state.time = w[1];
        out.push(state.clone());
    }
    Ok(out)
}

pub fn to_field_path(states: &[ConvolutionState]) -> Result<FieldPath> {
    FieldPath::new(
        states.iter().map(|s| s.time).collect(),
        states.iter().map(|s| s.wa.clone()).collect(),
    )
}

/// Minimum number of snapshots accepted by [`holder_exponent_estimate`].
pub const HOLDER_MIN_SNAPSHOTS: usize = 16;

/// Roughness exponent of a path: least-squares slope of
/// `log mean ||w(t + d) - w(t)||_{L^4}` against `log d` over dyadic lags
/// `d = 2^j h` with `2^j <= (n - 1) / 4`.
pub fn holder_exponent_estimate(path: &FieldPath, galerkin: &Galerkin) -> Result<f64> {
    let n = path.len();
    if n < HOLDER_MIN_SNAPSHOTS {
        return Err(Error::arg(
            "path",
            format!("need at least {HOLDER_MIN_SNAPSHOTS} snapshots, got {n}"),
        ));
    }
    let h = path.uniform_step()?;
    let fields = path.fields();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut lag = 1;
    while 4 * lag < n {
        let total: f64 = (0..n - lag)
            .map(|i| galerkin.l4_norm(&fields[i + lag].sub(&fields[i])))
            .sum();
        let mean = total / (n - lag) as f64;
        if !(mean > 0.0) {
            return Err(Error::Degenerate(format!(
                "path has no increments at lag {}",
                lag as f64 * h
            )));
        }
        xs.push((lag as f64 * h).ln());
        ys.push(mean.ln());
        lag *= 2;
    }
    Ok(least_squares_slope(&xs, &ys))
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    least_squares_line(xs, ys).0
}

/// `(slope, intercept)` of the ordinary least-squares line.
pub(crate) fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

//! Random test inputs for calibration and sweeps.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::path::FieldPath;
use crate::spectral::SpectralField;

/// Coefficient decay exponent of calibration fields, `a_k ~ N(0, 1) k^{-2}`.
pub const CALIBRATION_DECAY: f64 = 2.0;

/// Gaussian field with coefficients `xi_k k^{-decay}`.
pub fn gaussian_field<R: Rng + ?Sized>(modes: usize, decay: f64, rng: &mut R) -> SpectralField {
    SpectralField::from_coeffs(
        (1..=modes)
            .map(|k| {
                let xi: f64 = rng.sample(StandardNormal);
                xi * (k as f64).powf(-decay)
            })
            .collect(),
    )
}

/// `u(t) = f0 + f1 sin(pi t / T) + f2 (t / T)^2` with independent Gaussian fields.
pub fn smooth_path<R: Rng + ?Sized>(
    modes: usize,
    horizon: f64,
    steps: usize,
    decay: f64,
    rng: &mut R,
) -> Result<FieldPath> {
    let f0 = gaussian_field(modes, decay, rng);
    let f1 = gaussian_field(modes, decay, rng);
    let f2 = gaussian_field(modes, decay, rng);
    FieldPath::sample(horizon, steps, |t| {
        let s = t / horizon;
        let mut u = f0.clone();
        u.axpy((PI * s).sin(), &f1);
        u.axpy(s * s, &f2);
        u
    })
}

/// Piecewise-linear path through `knots + 1` Gaussian fields.
pub fn knotted_path<R: Rng + ?Sized>(
    modes: usize,
    horizon: f64,
    steps: usize,
    knots: usize,
    decay: f64,
    rng: &mut R,
) -> Result<FieldPath> {
    let values: Vec<SpectralField> = (0..=knots).map(|_| gaussian_field(modes, decay, rng)).collect();
    FieldPath::sample(horizon, steps, |t| {
        let x = (t / horizon * knots as f64).clamp(0.0, knots as f64);
        let i = (x.floor() as usize).min(knots - 1);
        let s = x - i as f64;
        let mut u = values[i].scaled(1.0 - s);
        u.axpy(s, &values[i + 1]);
        u
    })
}

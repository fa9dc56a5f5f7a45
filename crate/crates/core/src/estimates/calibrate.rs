//! Empirical calibration of `C1`, `C2` and `L` as suprema of their defining
//! ratios over a random family plus the basis modes.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ledger::{ConstantsLedger, LedgerProvenance, Provenance};
use super::sampling::{gaussian_field, knotted_path, CALIBRATION_DECAY};
use crate::error::{Error, Result};
use crate::mild::duhamel;
use crate::path::FieldPath;
use crate::rng::{stream_rng, Purpose, StreamId};
use crate::spectral::{Galerkin, SpectralField};

pub const MIN_CALIBRATION_SAMPLES: usize = 100;
/// Tolerance on the spectral interpolation ratio, which is at most 1 exactly.
pub const INTERPOLATION_TOL: f64 = 1e-12;

const TIME_STEPS: usize = 128;
const KNOTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSummary {
    pub samples: usize,
    pub seed: u64,
    pub horizon: f64,
    pub c1_ratio_max: f64,
    pub c2_ratio_max: f64,
    pub l_ratio_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub ledger: ConstantsLedger,
    pub summary: CalibrationSummary,
}

/// `||v||_{L^4} / ||v||_{H^{1/2}}`
pub fn embedding_ratio(v: &SpectralField, galerkin: &Galerkin) -> Result<f64> {
    let den = galerkin.hs_norm(v, 0.5);
    if !(den > 0.0) {
        return Err(Error::Degenerate("zero field drawn during calibration".into()));
    }
    Ok(galerkin.l4_norm(v) / den)
}

/// `||v||_{H^{1/2}} / (||v||_H ||v||_V)^{1/2}`
pub fn interpolation_ratio(v: &SpectralField, galerkin: &Galerkin) -> Result<f64> {
    let den = (galerkin.h_norm(v) * galerkin.v_norm(v)).sqrt();
    if !(den > 0.0) {
        return Err(Error::Degenerate("zero field drawn during calibration".into()));
    }
    Ok(galerkin.hs_norm(v, 0.5) / den)
}

/// `(||y||_{Linf H} + ||y||_{L2 V}) / (||y0||_H + ||g||_{L2 V'})` for the Duhamel solution `y`.
pub fn regularity_ratio(y0: &SpectralField, g: &FieldPath, galerkin: &Galerkin) -> Result<f64> {
    let den = galerkin.h_norm(y0) + galerkin.l2_vdual(g);
    if !(den > 0.0) {
        return Err(Error::Degenerate("zero data drawn during calibration".into()));
    }
    let y = duhamel(y0, g, galerkin)?;
    Ok((galerkin.sup_h(&y) + galerkin.l2_v(&y)) / den)
}

fn random_ratios<R: Rng>(galerkin: &Galerkin, horizon: f64, rng: &mut R) -> Result<[f64; 3]> {
    let n = galerkin.modes();
    let v = gaussian_field(n, CALIBRATION_DECAY, rng);
    let r1 = embedding_ratio(&v, galerkin)?;
    let r2 = interpolation_ratio(&v, galerkin)?;
    let scale = rng.random_range(-3.0..3.0f64).exp();
    let y0 = gaussian_field(n, CALIBRATION_DECAY, rng).scaled(scale);
    let g = knotted_path(n, horizon, TIME_STEPS, KNOTS, CALIBRATION_DECAY, rng)?;
    let rl = regularity_ratio(&y0, &g, galerkin)?;
    Ok([r1, r2, rl])
}

fn basis_ratios(galerkin: &Galerkin, horizon: f64, k: usize) -> Result<[f64; 3]> {
    let n = galerkin.modes();
    let phi = SpectralField::single_mode(n, k, 1.0);
    let r1 = embedding_ratio(&phi, galerkin)?;
    let r2 = interpolation_ratio(&phi, galerkin)?;
    let zero = FieldPath::sample(horizon, TIME_STEPS, |_| galerkin.zeros())?;
    let constant = FieldPath::sample(horizon, TIME_STEPS, |_| phi.clone())?;
    let rl = regularity_ratio(&phi, &zero, galerkin)?
        .max(regularity_ratio(&galerkin.zeros(), &constant, galerkin)?);
    Ok([r1, r2, rl])
}

/// Calibrate the ledger over `samples` random draws plus every basis mode,
/// with Duhamel solutions on `[0, horizon]`. Deterministic in `seed`.
pub fn calibrate_constants(
    galerkin: &Galerkin,
    samples: usize,
    horizon: f64,
    seed: u64,
) -> Result<Calibration> {
    if samples < MIN_CALIBRATION_SAMPLES {
        return Err(Error::arg(
            "samples",
            format!("need at least {MIN_CALIBRATION_SAMPLES}, got {samples}"),
        ));
    }
    if !(horizon > 0.0) {
        return Err(Error::arg("horizon", "must be positive"));
    }
    let random: Vec<[f64; 3]> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, StreamId::new(Purpose::Calibration, i as u64));
            random_ratios(galerkin, horizon, &mut rng)
        })
        .collect::<Result<_>>()?;
    let basis: Vec<[f64; 3]> = (1..=galerkin.modes())
        .into_par_iter()
        .map(|k| basis_ratios(galerkin, horizon, k))
        .collect::<Result<_>>()?;

    let mut max = [0.0f64; 3];
    for r in random.iter().chain(&basis) {
        for i in 0..3 {
            max[i] = max[i].max(r[i]);
        }
    }
    if max[1] > 1.0 + INTERPOLATION_TOL {
        return Err(Error::Degenerate(format!(
            "spectral interpolation ratio {} exceeds 1",
            max[1]
        )));
    }
    let ledger = ConstantsLedger::from_base(
        max[0],
        1.0,
        max[2],
        LedgerProvenance {
            c1: Provenance::Calibrated,
            c2: Provenance::Analytic,
            l: Provenance::Calibrated,
        },
    )?;
    Ok(Calibration {
        ledger,
        summary: CalibrationSummary {
            samples,
            seed,
            horizon,
            c1_ratio_max: max[0],
            c2_ratio_max: max[1],
            l_ratio_max: max[2],
        },
    })
}

//! Common-path step-refinement studies for the exponential Euler stepper.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mild::integrate_along;
use crate::noise::{sample_wa_path, step_count, to_field_path, NoiseSpec};
use crate::path::FieldPath;
use crate::rng::{stream_rng, StreamId};
use crate::spectral::{Galerkin, SpectralField};

pub const MIN_LEVELS: usize = 3;

/// One row of a refinement table. Errors are root-mean-square over paths of
/// `sup_t ||.||_H` on the coarsest grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLevel {
    pub dt: f64,
    pub error_vs_finest: f64,
    /// Distance to the next finer level; `None` on the finest level.
    pub successive_difference: Option<f64>,
    /// `log2` of the ratio of consecutive successive differences.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub levels: Vec<ConvergenceLevel>,
    /// Least-squares slope of `log2(successive difference)` against `log2(dt)`.
    pub fitted_order: f64,
    pub paths: usize,
}

impl ConvergenceStudy {
    pub fn min_order(&self) -> f64 {
        self.levels
            .iter()
            .filter_map(|l| l.observed_order)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solve on `levels` step sizes `dt, dt/2, ...` sharing one `w_A` path per
/// sample, drawn at the finest step on stream `stream_of(p)`.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    u0: &SpectralField,
    horizon: f64,
    galerkin: &Galerkin,
    noise: &NoiseSpec,
    dt: f64,
    levels: usize,
    paths: usize,
    seed: u64,
    stream_of: impl Fn(u64) -> StreamId + Sync,
) -> Result<ConvergenceStudy> {
    if levels < MIN_LEVELS {
        return Err(Error::arg("levels", format!("need at least {MIN_LEVELS}, got {levels}")));
    }
    if paths == 0 {
        return Err(Error::arg("paths", "must be positive"));
    }
    let coarse_steps = step_count(horizon, dt)?;
    let finest = dt / (1u64 << (levels - 1)) as f64;
    let fine_steps = coarse_steps << (levels - 1);

    // errors[p][i][j] = sup_t ||u_i - u_j||_H^2 on the coarse grid
    let per_path: Vec<(Vec<f64>, Vec<f64>)> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let stream = stream_of(p as u64);
            let mut rng = stream_rng(seed, stream);
            let states = sample_wa_path(horizon, finest, galerkin, noise, stream, &mut rng)?;
            let wa = to_field_path(&states)?;
            debug_assert_eq!(wa.len(), fine_steps + 1);
            let sols: Vec<FieldPath> = (0..levels)
                .map(|i| {
                    let stride = 1usize << (levels - 1 - i);
                    let y = integrate_along(u0, &wa.subsampled(stride), galerkin)?;
                    let u = y.add(&wa.subsampled(stride))?;
                    Ok(u.subsampled(1usize << i))
                })
                .collect::<Result<_>>()?;
            let sup_sq = |a: &FieldPath, b: &FieldPath| -> Result<f64> {
                let d = galerkin.sup_h(&a.sub(b)?);
                Ok(d * d)
            };
            let last = &sols[levels - 1];
            let vs_finest = sols.iter().map(|s| sup_sq(s, last)).collect::<Result<_>>()?;
            let successive = sols
                .windows(2)
                .map(|w| sup_sq(&w[0], &w[1]))
                .collect::<Result<_>>()?;
            Ok((vs_finest, successive))
        })
        .collect::<Result<_>>()?;

    let rms = |values: &mut dyn Iterator<Item = f64>| -> f64 { (values.sum::<f64>() / paths as f64).sqrt() };
    let successive: Vec<f64> = (0..levels - 1)
        .map(|i| rms(&mut per_path.iter().map(|r| r.1[i])))
        .collect();
    let rows = (0..levels)
        .map(|i| ConvergenceLevel {
            dt: dt / (1u64 << i) as f64,
            error_vs_finest: rms(&mut per_path.iter().map(|r| r.0[i])),
            successive_difference: successive.get(i).copied(),
            observed_order: if i + 1 < levels - 1 && successive[i] > 0.0 && successive[i + 1] > 0.0 {
                Some((successive[i] / successive[i + 1]).log2())
            } else {
                None
            },
        })
        .collect();
    let xs: Vec<f64> = (0..levels - 1).map(|i| -(i as f64)).collect();
    let ys: Vec<f64> = successive.iter().map(|d| d.log2()).collect();
    let fitted_order = if successive.iter().all(|d| *d > 0.0) {
        crate::noise::least_squares_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    Ok(ConvergenceStudy {
        levels: rows,
        fitted_order,
        paths,
    })
}

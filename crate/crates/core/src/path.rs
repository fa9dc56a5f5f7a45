//! Time-indexed sequences of fields and the space-time norms built on them.
//! Time integrals use the trapezoid rule over the stored nodes.

use crate::error::{Error, Result};
use crate::spectral::{Galerkin, SpectralField};

/// Relative tolerance for accepting a grid as uniform.
const UNIFORM_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldPath {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl FieldPath {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Degenerate("empty path".into()));
        }
        if times.len() != fields.len() {
            return Err(Error::GridMismatch(format!(
                "{} times for {} fields",
                times.len(),
                fields.len()
            )));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::arg("times", format!("not increasing at index {}", i + 1)));
        }
        Ok(FieldPath { times, fields })
    }

    /// Path on the grid `t_n = n h`.
    pub fn uniform(step: f64, fields: Vec<SpectralField>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::arg("step", format!("must be positive, got {step}")));
        }
        let times = (0..fields.len()).map(|n| n as f64 * step).collect();
        Self::new(times, fields)
    }

    /// Build `t -> f(t)` on `steps + 1` uniform nodes of `[0, horizon]`.
    pub fn sample(horizon: f64, steps: usize, f: impl FnMut(f64) -> SpectralField) -> Result<Self> {
        if steps == 0 {
            return Err(Error::arg("steps", "need at least one step"));
        }
        let h = horizon / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|n| n as f64 * h).collect();
        let fields = times.iter().copied().map(f).collect();
        Self::new(times, fields)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn into_fields(self) -> Vec<SpectralField> {
        self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Length of the covered interval.
    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    /// Common step of a uniform grid.
    pub fn uniform_step(&self) -> Result<f64> {
        if self.len() < 2 {
            return Err(Error::Degenerate("a single node has no step".into()));
        }
        let h = self.duration() / (self.len() - 1) as f64;
        for (i, w) in self.times.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > UNIFORM_RTOL * h {
                return Err(Error::NonUniformGrid {
                    index: i + 1,
                    expected: h,
                });
            }
        }
        Ok(h)
    }

    pub fn same_grid(&self, other: &FieldPath) -> Result<()> {
        let same = self.len() == other.len()
            && self
                .times
                .iter()
                .zip(&other.times)
                .all(|(a, b)| (a - b).abs() <= UNIFORM_RTOL * a.abs().max(b.abs()).max(1e-300));
        if same {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "paths with {} and {} nodes on different grids",
                self.len(),
                other.len()
            )))
        }
    }

    pub fn map(&self, f: impl FnMut(&SpectralField) -> SpectralField) -> FieldPath {
        FieldPath {
            times: self.times.clone(),
            fields: self.fields.iter().map(f).collect(),
        }
    }

    /// Pointwise combination of two paths on the same grid.
    pub fn zip_with(
        &self,
        other: &FieldPath,
        mut f: impl FnMut(&SpectralField, &SpectralField) -> SpectralField,
    ) -> Result<FieldPath> {
        self.same_grid(other)?;
        Ok(FieldPath {
            times: self.times.clone(),
            fields: self
                .fields
                .iter()
                .zip(&other.fields)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &FieldPath) -> Result<FieldPath> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &FieldPath) -> Result<FieldPath> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scaled(&self, s: f64) -> FieldPath {
        self.map(|f| f.scaled(s))
    }

    /// First `count` nodes.
    pub fn truncated(&self, count: usize) -> FieldPath {
        let count = count.clamp(1, self.len());
        FieldPath {
            times: self.times[..count].to_vec(),
            fields: self.fields[..count].to_vec(),
        }
    }

    /// Every `stride`-th node starting with the first.
    pub fn subsampled(&self, stride: usize) -> FieldPath {
        assert!(stride >= 1);
        FieldPath {
            times: self.times.iter().step_by(stride).copied().collect(),
            fields: self.fields.iter().step_by(stride).cloned().collect(),
        }
    }
}

/// Trapezoid rule for samples `values` at `times`.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(times.len(), values.len());
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Running trapezoid integral, starting at zero.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (v[0] + v[1]);
        out.push(acc);
    }
    out
}

impl Galerkin {
    /// `||u||_{L^inf(0,T;H)}`
    pub fn sup_h(&self, path: &FieldPath) -> f64 {
        path.fields().iter().map(|f| self.h_norm(f)).fold(0.0, f64::max)
    }

    /// `||u||_{L^inf(0,T;V)}`
    pub fn sup_v(&self, path: &FieldPath) -> f64 {
        path.fields().iter().map(|f| self.v_norm(f)).fold(0.0, f64::max)
    }

    /// `||u||_{L^2(0,T;V)}`
    pub fn l2_v(&self, path: &FieldPath) -> f64 {
        let v: Vec<f64> = path.fields().iter().map(|f| self.v_norm_sq(f)).collect();
        trapezoid(path.times(), &v).sqrt()
    }

    /// `||g||_{L^2(0,T;V')}`
    pub fn l2_vdual(&self, path: &FieldPath) -> f64 {
        let v: Vec<f64> = path.fields().iter().map(|f| self.vdual_norm_sq(f)).collect();
        trapezoid(path.times(), &v).sqrt()
    }

    /// `||u||_{L^2(0,T;H)}`
    pub fn l2_h(&self, path: &FieldPath) -> f64 {
        let v: Vec<f64> = path.fields().iter().map(|f| self.h_norm_sq(f)).collect();
        trapezoid(path.times(), &v).sqrt()
    }

    /// Space-time `L^4` norm `||u||_E = (int_0^T ||u||_{L^4}^4 dt)^{1/4}`.
    pub fn e_norm(&self, path: &FieldPath) -> f64 {
        let v: Vec<f64> = path.fields().iter().map(|f| self.l4_norm_pow4(f)).collect();
        trapezoid(path.times(), &v).max(0.0).powf(0.25)
    }
}

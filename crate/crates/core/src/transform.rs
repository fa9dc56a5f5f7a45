//! Discrete sine transform (type I) between sine coefficients and values on
//! a uniform interior grid, implemented through a complex FFT of the odd
//! extension.
//!
//! A grid with `intervals = M` has interior nodes `theta_i = pi * i / M`,
//! `i = 1..M-1`, which map to `x_i = -l + 2 l i / M` on the physical interval.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct SineTransform {
    intervals: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineTransform")
            .field("intervals", &self.intervals)
            .finish()
    }
}

impl SineTransform {
    /// Transform on a grid of `intervals` uniform cells (`intervals - 1` interior nodes).
    pub fn new(intervals: usize) -> Self {
        assert!(intervals >= 2, "sine transform needs at least one interior node");
        let mut planner = FftPlanner::new();
        let len = 2 * intervals;
        SineTransform {
            intervals,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn interior_points(&self) -> usize {
        self.intervals - 1
    }

    /// Interior values of `sum_k coeffs[k-1] sin(k theta)`.
    pub fn synthesize_sine(&self, coeffs: &[f64]) -> Vec<f64> {
        let buf = self.synthesize(coeffs);
        buf[1..self.intervals].iter().map(|z| z.im).collect()
    }

    /// Interior values of `sum_k coeffs[k-1] cos(k theta)`.
    pub fn synthesize_cosine(&self, coeffs: &[f64]) -> Vec<f64> {
        let buf = self.synthesize(coeffs);
        buf[1..self.intervals].iter().map(|z| z.re).collect()
    }

    fn synthesize(&self, coeffs: &[f64]) -> Vec<Complex64> {
        let len = 2 * self.intervals;
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        // Modes at or beyond the Nyquist index alias; callers keep modes < intervals.
        for (k, &a) in coeffs.iter().enumerate().take(self.intervals - 1) {
            buf[k + 1] = Complex64::new(a, 0.0);
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Sine coefficients `k = 1..=modes` of interior samples.
    ///
    /// Exact inverse of [`synthesize_sine`](Self::synthesize_sine) for
    /// `modes <= intervals - 1`; modes beyond that are returned as zero.
    pub fn analyze(&self, values: &[f64], modes: usize) -> Vec<f64> {
        assert_eq!(values.len(), self.intervals - 1, "sample count mismatch");
        let m = self.intervals;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * m];
        for (i, &v) in values.iter().enumerate() {
            buf[i + 1] = Complex64::new(v, 0.0);
            buf[2 * m - i - 1] = Complex64::new(-v, 0.0);
        }
        self.forward.process(&mut buf);
        let scale = -1.0 / m as f64;
        (1..=modes)
            .map(|k| if k < m { buf[k].im * scale } else { 0.0 })
            .collect()
    }
}

/// Smallest integer strictly greater than `bound` whose only prime factors are 2, 3 and 5.
pub fn next_smooth_above(bound: f64) -> usize {
    let mut n = (bound.floor() as usize + 1).max(2);
    loop {
        let mut r = n;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}

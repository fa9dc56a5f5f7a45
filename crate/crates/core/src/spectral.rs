//! Sine-basis representation of functions on `(-l, l)`.
//!
//! Mode `k` is `phi_k(x) = sin(k pi (x + l) / (2 l))` with wavenumber
//! `mu_k = k pi / (2 l)`. The basis diagonalises `d^2/dx^2`, `d^4/dx^4` and
//! the linear operator `A u = -u_xxxx - u_xx - c u`, whose eigenvalues are
//! `lambda_k = -mu_k^4 + mu_k^2 - c`. Every field vanishes at `x = +-l`
//! together with its second derivative (hinged ends).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{next_smooth_above, SineTransform};

/// `sup_mu (mu^2 - mu^4)`; any shift above this makes every eigenvalue negative.
pub const CRITICAL_SHIFT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    /// Half-length `l` of the interval `(-l, l)`.
    pub half_length: f64,
    /// Shift `c` moved from the nonlinearity into the linear operator.
    pub shift: f64,
    /// Galerkin truncation `N`.
    pub modes: usize,
}

impl DomainSpec {
    pub fn new(half_length: f64, shift: f64, modes: usize) -> Result<Self> {
        let dom = Self::with_any_shift(half_length, shift, modes)?;
        if !(shift > CRITICAL_SHIFT) {
            return Err(Error::InvalidDomain(format!(
                "shift must exceed {CRITICAL_SHIFT}, got {shift}"
            )));
        }
        Ok(dom)
    }

    /// Like [`new`](Self::new) but accepts shifts that leave `A` non-negative on
    /// some modes. Operations that need a negative operator check it themselves.
    pub fn with_any_shift(half_length: f64, shift: f64, modes: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "half_length must be positive and finite, got {half_length}"
            )));
        }
        if !shift.is_finite() {
            return Err(Error::InvalidDomain(format!("shift must be finite, got {shift}")));
        }
        if modes == 0 {
            return Err(Error::InvalidDomain("modes must be at least 1".into()));
        }
        Ok(DomainSpec {
            half_length,
            shift,
            modes,
        })
    }

    pub fn wavenumber(&self, k: usize) -> f64 {
        k as f64 * PI / (2.0 * self.half_length)
    }

    /// Length `2 l` of the interval.
    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }
}

/// Eigenvalue `lambda_k = -mu_k^4 + mu_k^2 - c` of `A` for mode `k >= 1`.
pub fn eigenvalue(k: usize, dom: &DomainSpec) -> f64 {
    let mu2 = dom.wavenumber(k).powi(2);
    -mu2 * mu2 + mu2 - dom.shift
}

/// Sine coefficients `a_1..a_N` of a function on `(-l, l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralField(Vec<f64>);

impl SpectralField {
    pub fn zeros(modes: usize) -> Self {
        SpectralField(vec![0.0; modes])
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        SpectralField(coeffs)
    }

    /// `amplitude * phi_k` in a basis of `modes` functions.
    pub fn single_mode(modes: usize, k: usize, amplitude: f64) -> Self {
        assert!(k >= 1 && k <= modes, "mode {k} outside 1..={modes}");
        let mut f = Self::zeros(modes);
        f.0[k - 1] = amplitude;
        f
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0.0)
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &SpectralField) {
        debug_assert_eq!(self.modes(), other.modes());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        SpectralField(self.0.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        SpectralField(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        SpectralField(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// Norms of a single field. The `V` norm is the full `H^1_0` norm including
/// the `L^2` part; `V'` uses reciprocal weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub h_norm: f64,
    pub v_norm: f64,
    pub l4_norm: f64,
    pub vdual_norm: f64,
    pub hs_quarter: f64,
    pub hs_half: f64,
}

impl NormReport {
    /// Spectral `H^s` norm for the two supported orders.
    pub fn hs_norm(&self, s: f64) -> Option<f64> {
        if s == 0.25 {
            Some(self.hs_quarter)
        } else if s == 0.5 {
            Some(self.hs_half)
        } else {
            None
        }
    }
}

/// Precomputed operator data and transforms for one domain.
///
/// The product grid follows the 3/2 rule so the projected quadratic term is
/// alias-free; the quadrature grid has more than `2N` cells so that `u^4`
/// integrates exactly.
#[derive(Debug, Clone)]
pub struct Galerkin {
    domain: DomainSpec,
    eigenvalues: Vec<f64>,
    wavenumbers: Vec<f64>,
    product: SineTransform,
    quadrature: SineTransform,
    advection: bool,
}

impl Galerkin {
    pub fn new(domain: DomainSpec) -> Self {
        let n = domain.modes;
        let eigenvalues = (1..=n).map(|k| eigenvalue(k, &domain)).collect();
        let wavenumbers = (1..=n).map(|k| domain.wavenumber(k)).collect();
        let product = SineTransform::new(next_smooth_above(1.5 * n as f64));
        let quadrature = SineTransform::new(next_smooth_above(2.0 * n as f64));
        Galerkin {
            domain,
            eigenvalues,
            wavenumbers,
            product,
            quadrature,
            advection: true,
        }
    }

    /// Switch the `-u u_x` term on or off; with it off `G(u) = c u`.
    pub fn with_advection(mut self, on: bool) -> Self {
        self.advection = on;
        self
    }

    pub fn advection_enabled(&self) -> bool {
        self.advection
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn modes(&self) -> usize {
        self.domain.modes
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn zeros(&self) -> SpectralField {
        SpectralField::zeros(self.modes())
    }

    pub(crate) fn check_field(&self, f: &SpectralField) {
        assert_eq!(
            f.modes(),
            self.modes(),
            "field has {} modes, domain has {}",
            f.modes(),
            self.modes()
        );
    }

    /// Error unless every eigenvalue is strictly negative.
    pub fn require_negative(&self) -> Result<()> {
        match self.eigenvalues.iter().position(|&l| l >= 0.0) {
            Some(i) => Err(Error::NonNegativeEigenvalue {
                mode: i + 1,
                value: self.eigenvalues[i],
            }),
            None => Ok(()),
        }
    }

    /// `S(t) f = e^{tA} f`.
    pub fn apply_semigroup(&self, f: &SpectralField, t: f64) -> Result<SpectralField> {
        if !(t >= 0.0) {
            return Err(Error::arg("t", format!("must be non-negative, got {t}")));
        }
        self.check_field(f);
        Ok(SpectralField(
            f.0.iter()
                .zip(&self.eigenvalues)
                .map(|(a, l)| a * (l * t).exp())
                .collect(),
        ))
    }

    /// `(-A)^alpha f` for `alpha` in `[0, 1]`.
    pub fn fractional_power(&self, f: &SpectralField, alpha: f64) -> Result<SpectralField> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::arg("alpha", format!("must lie in [0, 1], got {alpha}")));
        }
        self.require_negative()?;
        self.check_field(f);
        Ok(SpectralField(
            f.0.iter()
                .zip(&self.eigenvalues)
                .map(|(a, l)| a * (-l).powf(alpha))
                .collect(),
        ))
    }

    fn weighted_sq(&self, f: &SpectralField, weight: impl Fn(f64) -> f64) -> f64 {
        self.check_field(f);
        let s: f64 = f
            .0
            .iter()
            .zip(&self.wavenumbers)
            .map(|(a, mu)| weight(mu * mu) * a * a)
            .sum();
        s * self.domain.half_length
    }

    pub fn h_norm_sq(&self, f: &SpectralField) -> f64 {
        self.weighted_sq(f, |_| 1.0)
    }

    pub fn h_norm(&self, f: &SpectralField) -> f64 {
        self.h_norm_sq(f).sqrt()
    }

    pub fn v_norm_sq(&self, f: &SpectralField) -> f64 {
        self.weighted_sq(f, |m2| 1.0 + m2)
    }

    pub fn v_norm(&self, f: &SpectralField) -> f64 {
        self.v_norm_sq(f).sqrt()
    }

    pub fn vdual_norm_sq(&self, f: &SpectralField) -> f64 {
        self.weighted_sq(f, |m2| 1.0 / (1.0 + m2))
    }

    pub fn vdual_norm(&self, f: &SpectralField) -> f64 {
        self.vdual_norm_sq(f).sqrt()
    }

    /// Spectral `H^s` norm with weights `(1 + mu_k^2)^s`.
    pub fn hs_norm(&self, f: &SpectralField, s: f64) -> f64 {
        self.weighted_sq(f, |m2| (1.0 + m2).powf(s)).sqrt()
    }

    /// Interior values of `f` on the quadrature grid.
    pub fn quadrature_values(&self, f: &SpectralField) -> Vec<f64> {
        self.check_field(f);
        self.quadrature.synthesize_sine(&f.0)
    }

    /// Weight of each interior node of the quadrature grid.
    pub fn quadrature_weight(&self) -> f64 {
        self.domain.length() / self.quadrature.intervals() as f64
    }

    /// `int u^4 dx`, exact for the truncated field.
    pub fn l4_norm_pow4(&self, f: &SpectralField) -> f64 {
        let w = self.quadrature_weight();
        self.quadrature_values(f).iter().map(|v| v.powi(4)).sum::<f64>() * w
    }

    pub fn l4_norm(&self, f: &SpectralField) -> f64 {
        self.l4_norm_pow4(f).powf(0.25)
    }

    pub fn norms(&self, f: &SpectralField) -> NormReport {
        NormReport {
            h_norm: self.h_norm(f),
            v_norm: self.v_norm(f),
            l4_norm: self.l4_norm(f),
            vdual_norm: self.vdual_norm(f),
            hs_quarter: self.hs_norm(f, 0.25),
            hs_half: self.hs_norm(f, 0.5),
        }
    }

    /// `L^2` inner product `int f g dx`.
    pub fn inner(&self, f: &SpectralField, g: &SpectralField) -> f64 {
        self.check_field(f);
        self.check_field(g);
        f.0.iter().zip(&g.0).map(|(a, b)| a * b).sum::<f64>() * self.domain.half_length
    }

    /// Projection of `u u_x` onto the first `N` modes, evaluated on the
    /// 3/2-padded grid.
    pub fn advection_term(&self, u: &SpectralField) -> SpectralField {
        self.check_field(u);
        let du: Vec<f64> = u.0.iter().zip(&self.wavenumbers).map(|(a, mu)| a * mu).collect();
        let vals = self.product.synthesize_sine(&u.0);
        let dvals = self.product.synthesize_cosine(&du);
        let prod: Vec<f64> = vals.iter().zip(&dvals).map(|(a, b)| a * b).collect();
        SpectralField(self.product.analyze(&prod, self.modes()))
    }

    /// `G(u) = -u u_x + c u`, or `c u` when advection is switched off.
    pub fn nonlinear(&self, u: &SpectralField) -> SpectralField {
        let mut g = u.scaled(self.domain.shift);
        if self.advection && !u.is_zero() {
            g.axpy(-1.0, &self.advection_term(u));
        }
        g
    }
}

/// Values of `f` at the `points` interior nodes `x_i = -l + 2 l i / (points + 1)`.
pub fn to_grid(f: &SpectralField, points: usize) -> Result<Vec<f64>> {
    if points < 1 {
        return Err(Error::arg("points", "need at least one grid point"));
    }
    Ok(SineTransform::new(points + 1).synthesize_sine(f.coeffs()))
}

/// Sine coefficients of interior samples; exact for fields with at most
/// `values.len()` modes.
pub fn from_grid(values: &[f64], modes: usize) -> Result<SpectralField> {
    if values.is_empty() {
        return Err(Error::arg("values", "need at least one grid point"));
    }
    if values.len() < modes {
        return Err(Error::arg(
            "values",
            format!("{} points cannot resolve {modes} modes", values.len()),
        ));
    }
    let t = SineTransform::new(values.len() + 1);
    Ok(SpectralField(t.analyze(values, modes)))
}

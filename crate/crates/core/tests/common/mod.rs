#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use sks_core::{DomainSpec, Galerkin, SpectralField, StreamId, StreamRng};

pub fn galerkin(half_length: f64, shift: f64, modes: usize) -> Galerkin {
    Galerkin::new(DomainSpec::new(half_length, shift, modes).unwrap())
}

pub fn default_galerkin() -> Galerkin {
    galerkin(16.0, 0.5, 64)
}

pub fn rng(seed: u64) -> StreamRng {
    sks_core::stream_rng(seed, StreamId::new(sks_core::Purpose::Sweep, 0))
}

pub fn random_field(modes: usize, decay: f64, rng: &mut impl Rng) -> SpectralField {
    SpectralField::from_coeffs(
        (1..=modes)
            .map(|k| rng.sample::<f64, _>(StandardNormal) * (k as f64).powf(-decay))
            .collect(),
    )
}

/// `sum_k a_k sin(k pi (x + l) / (2 l))` by direct summation.
pub fn direct_value(coeffs: &[f64], half_length: f64, x: f64) -> f64 {
    let theta = PI * (x + half_length) / (2.0 * half_length);
    coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a * ((i + 1) as f64 * theta).sin())
        .sum()
}

/// Interior nodes `x_i = -l + 2 l i / m`, `i = 1..m-1`.
pub fn interior_nodes(half_length: f64, m: usize) -> Vec<f64> {
    (1..m).map(|i| -half_length + 2.0 * half_length * i as f64 / m as f64).collect()
}

/// Projection of `u u_x` onto the first `N` modes from the product-to-sum
/// identity `sin(j t) cos(k t) = (sin((j+k) t) + sin((j-k) t)) / 2`.
pub fn convolution_advection(coeffs: &[f64], half_length: f64) -> Vec<f64> {
    let n = coeffs.len();
    let mu = |k: usize| k as f64 * PI / (2.0 * half_length);
    let mut out = vec![0.0; n];
    for j in 1..=n {
        for k in 1..=n {
            let w = 0.5 * coeffs[j - 1] * coeffs[k - 1] * mu(k);
            if j + k <= n {
                out[j + k - 1] += w;
            }
            if j > k {
                out[j - k - 1] += w;
            } else if k > j {
                out[k - j - 1] -= w;
            }
        }
    }
    out
}

/// Composite Simpson rule on `[a, b]` with `2 n` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / (2 * n) as f64;
    let mut s = f(a) + f(b);
    for i in 1..2 * n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Right side of the Galerkin system `a' = (mu^2 - mu^4) a - P(u u_x)` with
/// the shift cancelled between `A` and `G`.
fn galerkin_rhs(a: &[f64], half_length: f64, advection: bool) -> Vec<f64> {
    let adv = if advection {
        convolution_advection(a, half_length)
    } else {
        vec![0.0; a.len()]
    };
    a.iter()
        .enumerate()
        .map(|(i, v)| {
            let mu = (i + 1) as f64 * PI / (2.0 * half_length);
            (mu * mu - mu.powi(4)) * v - adv[i]
        })
        .collect()
}

/// Classical RK4 on the Galerkin ODE, returning the state every `save_every` steps.
pub fn dense_galerkin(
    u0: &[f64],
    half_length: f64,
    dt: f64,
    steps: usize,
    save_every: usize,
) -> Vec<Vec<f64>> {
    let axpy = |x: &[f64], s: f64, k: &[f64]| -> Vec<f64> {
        x.iter().zip(k).map(|(a, b)| a + s * b).collect()
    };
    let mut a = u0.to_vec();
    let mut out = vec![a.clone()];
    for n in 1..=steps {
        let k1 = galerkin_rhs(&a, half_length, true);
        let k2 = galerkin_rhs(&axpy(&a, dt / 2.0, &k1), half_length, true);
        let k3 = galerkin_rhs(&axpy(&a, dt / 2.0, &k2), half_length, true);
        let k4 = galerkin_rhs(&axpy(&a, dt, &k3), half_length, true);
        for i in 0..a.len() {
            a[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if n % save_every == 0 {
            out.push(a.clone());
        }
    }
    out
}

/// `int_0^t e^{lambda_k (t - s)} G(u(s))_k ds` by the midpoint rule with
/// `panels` cells, for a path given as a function of time.
pub fn riemann_duhamel(
    u: impl Fn(f64) -> SpectralField,
    t: f64,
    g: &Galerkin,
    panels: usize,
) -> Vec<f64> {
    let h = t / panels as f64;
    let mut acc = vec![0.0; g.modes()];
    for i in 0..panels {
        let s = (i as f64 + 0.5) * h;
        let gs = g.nonlinear(&u(s));
        for (k, a) in acc.iter_mut().enumerate() {
            *a += h * (g.eigenvalues()[k] * (t - s)).exp() * gs.coeffs()[k];
        }
    }
    acc
}

/// Local existence time written out from its definition for fields whose
/// sup-norms under the semigroup are attained at `t = 0`.
pub fn tau_one_transcribed(h0: f64, v0: f64, k: f64, m: f64, shift: f64, half_length: f64) -> f64 {
    let bracket = shift * (2.0 * half_length).powf(0.25) + 16.0 * k * (h0.powi(4) + v0.powi(4)).powf(0.25);
    1.0 / (6.0 * m * bracket).powi(4)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

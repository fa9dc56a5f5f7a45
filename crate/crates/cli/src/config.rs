//! `key = value` run configuration with dotted section keys.
//!
//! Every key may be overridden from the environment by `SKS_` followed by the
//! key upper-cased with dots replaced by underscores, e.g.
//! `SKS_DOMAIN_HALF_LENGTH=8`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sks_core::{DomainSpec, Galerkin, NoiseProfile, NoiseSpec, SolverConfig, SpectralField};

use crate::error::RunError;

pub const ENV_PREFIX: &str = "SKS_";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSection {
    pub half_length: f64,
    pub shift: f64,
    pub modes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub dt: f64,
    pub horizon: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub save_stride: usize,
    pub quad_substeps: usize,
    pub picard_steps: usize,
    pub crosscheck: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSection {
    pub mode: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub domain: DomainSection,
    pub noise: NoiseProfile,
    pub solver: SolverSection,
    pub initial: InitialSection,
    pub slack: f64,
    pub calibration_samples: usize,
    pub snapshots: bool,
}

impl Default for Config {
    fn default() -> Self {
        let s = SolverConfig::default();
        Config {
            domain: DomainSection {
                half_length: 16.0,
                shift: 0.5,
                modes: 64,
            },
            noise: NoiseProfile::default(),
            solver: SolverSection {
                dt: s.dt,
                horizon: 1.0,
                picard_tol: s.picard_tol,
                picard_max_iters: s.picard_max_iters,
                save_stride: s.save_stride,
                quad_substeps: s.quad_substeps,
                picard_steps: s.picard_steps,
                crosscheck: s.crosscheck,
            },
            initial: InitialSection {
                mode: 1,
                amplitude: 0.1,
            },
            slack: sks_core::estimates::DEFAULT_SLACK,
            calibration_samples: 10_000,
            snapshots: false,
        }
    }
}

pub const KEYS: [&str; 17] = [
    "domain.half_length",
    "domain.shift",
    "domain.modes",
    "noise.sigma",
    "noise.decay",
    "solver.dt",
    "solver.horizon",
    "solver.picard_tol",
    "solver.picard_max_iters",
    "solver.save_stride",
    "solver.quad_substeps",
    "solver.picard_steps",
    "solver.crosscheck",
    "initial.mode",
    "initial.amplitude",
    "checks.slack",
    "calibration.samples",
];

const OUTPUT_KEYS: [&str; 1] = ["output.snapshots"];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, RunError> {
    value
        .parse()
        .map_err(|_| RunError::config(key, format!("cannot parse `{value}`")))
}

pub fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.to_uppercase().replace('.', "_"))
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        let v = value.trim();
        match key {
            "domain.half_length" => self.domain.half_length = parse(key, v)?,
            "domain.shift" => self.domain.shift = parse(key, v)?,
            "domain.modes" => self.domain.modes = parse(key, v)?,
            "noise.sigma" => self.noise.sigma = parse(key, v)?,
            "noise.decay" => self.noise.decay = parse(key, v)?,
            "solver.dt" => self.solver.dt = parse(key, v)?,
            "solver.horizon" => self.solver.horizon = parse(key, v)?,
            "solver.picard_tol" => self.solver.picard_tol = parse(key, v)?,
            "solver.picard_max_iters" => self.solver.picard_max_iters = parse(key, v)?,
            "solver.save_stride" => self.solver.save_stride = parse(key, v)?,
            "solver.quad_substeps" => self.solver.quad_substeps = parse(key, v)?,
            "solver.picard_steps" => self.solver.picard_steps = parse(key, v)?,
            "solver.crosscheck" => self.solver.crosscheck = parse(key, v)?,
            "initial.mode" => self.initial.mode = parse(key, v)?,
            "initial.amplitude" => self.initial.amplitude = parse(key, v)?,
            "checks.slack" => self.slack = parse(key, v)?,
            "calibration.samples" => self.calibration_samples = parse(key, v)?,
            "output.snapshots" => self.snapshots = parse(key, v)?,
            _ => return Err(RunError::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Parse `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self, RunError> {
        let mut cfg = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                RunError::config(format!("line {}", n + 1), format!("expected `key = value`, got `{line}`"))
            })?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    /// Apply `SKS_*` overrides. Unknown `SKS_` variables are rejected.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), RunError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut pending: Vec<(String, String)> = vars
            .into_iter()
            .filter(|(k, _)| k.as_ref().starts_with(ENV_PREFIX))
            .map(|(k, v)| (k.as_ref().to_string(), v.as_ref().to_string()))
            .collect();
        pending.sort();
        for (name, value) in pending {
            let key = KEYS
                .iter()
                .chain(&OUTPUT_KEYS)
                .find(|k| env_name(k) == name)
                .ok_or_else(|| RunError::config(name.clone(), "unknown environment override"))?;
            self.set(key, &value)?;
        }
        Ok(())
    }

    /// Defaults, then the file if given, then the environment, then validation.
    pub fn load<I, K, V>(path: Option<&Path>, env: I) -> Result<Self, RunError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| RunError::io(p, e))?;
                Config::parse_str(&text)?
            }
            None => Config::default(),
        };
        cfg.apply_env(env)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let d = &self.domain;
        if !(d.half_length > 0.0) || !d.half_length.is_finite() {
            return Err(RunError::config("domain.half_length", "must be positive and finite"));
        }
        if !(d.shift > sks_core::spectral::CRITICAL_SHIFT) || !d.shift.is_finite() {
            return Err(RunError::config(
                "domain.shift",
                format!("must exceed 1/4 so that every eigenvalue is negative, got {}", d.shift),
            ));
        }
        if d.modes == 0 {
            return Err(RunError::config("domain.modes", "must be at least 1"));
        }
        if !(self.noise.sigma >= 0.0) || !self.noise.sigma.is_finite() {
            return Err(RunError::config("noise.sigma", "must be non-negative"));
        }
        if !(self.noise.decay > 1.0) || !self.noise.decay.is_finite() {
            return Err(RunError::config("noise.decay", "must exceed 1 (trace-class covariance)"));
        }
        let s = &self.solver;
        for (key, v) in [("solver.dt", s.dt), ("solver.horizon", s.horizon), ("solver.picard_tol", s.picard_tol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(RunError::config(key, format!("must be positive, got {v}")));
            }
        }
        if sks_core::noise::step_count(s.horizon, s.dt).is_err() {
            return Err(RunError::config(
                "solver.horizon",
                format!("must be a positive multiple of solver.dt = {}", s.dt),
            ));
        }
        for (key, v) in [
            ("solver.picard_max_iters", s.picard_max_iters),
            ("solver.save_stride", s.save_stride),
            ("solver.quad_substeps", s.quad_substeps),
            ("solver.picard_steps", s.picard_steps),
        ] {
            if v == 0 {
                return Err(RunError::config(key, "must be at least 1"));
            }
        }
        if self.initial.mode == 0 || self.initial.mode > d.modes {
            return Err(RunError::config(
                "initial.mode",
                format!("must lie in 1..={}, got {}", d.modes, self.initial.mode),
            ));
        }
        if !self.initial.amplitude.is_finite() {
            return Err(RunError::config("initial.amplitude", "must be finite"));
        }
        if !(self.slack >= 0.0) || !self.slack.is_finite() {
            return Err(RunError::config("checks.slack", "must be non-negative"));
        }
        if self.calibration_samples < sks_core::estimates::MIN_CALIBRATION_SAMPLES {
            return Err(RunError::config(
                "calibration.samples",
                format!("must be at least {}", sks_core::estimates::MIN_CALIBRATION_SAMPLES),
            ));
        }
        Ok(())
    }

    pub fn domain_spec(&self) -> Result<DomainSpec, RunError> {
        DomainSpec::new(self.domain.half_length, self.domain.shift, self.domain.modes)
            .map_err(|e| RunError::config("domain", e.to_string()))
    }

    pub fn galerkin(&self) -> Result<Galerkin, RunError> {
        Ok(Galerkin::new(self.domain_spec()?))
    }

    pub fn noise_spec(&self) -> Result<NoiseSpec, RunError> {
        NoiseSpec::power_law(self.noise, self.domain.modes)
            .map_err(|e| RunError::config("noise", e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            dt: s.dt,
            picard_tol: s.picard_tol,
            picard_max_iters: s.picard_max_iters,
            save_stride: s.save_stride,
            quad_substeps: s.quad_substeps,
            picard_steps: s.picard_steps,
            crosscheck: s.crosscheck,
        }
    }

    pub fn initial_field(&self) -> SpectralField {
        SpectralField::single_mode(self.domain.modes, self.initial.mode, self.initial.amplitude)
    }

    /// The configuration in its own file format, one key per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let values = self.values();
        for (k, v) in KEYS.iter().chain(&OUTPUT_KEYS).zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    fn values(&self) -> Vec<String> {
        let s = &self.solver;
        vec![
            self.domain.half_length.to_string(),
            self.domain.shift.to_string(),
            self.domain.modes.to_string(),
            self.noise.sigma.to_string(),
            self.noise.decay.to_string(),
            s.dt.to_string(),
            s.horizon.to_string(),
            s.picard_tol.to_string(),
            s.picard_max_iters.to_string(),
            s.save_stride.to_string(),
            s.quad_substeps.to_string(),
            s.picard_steps.to_string(),
            s.crosscheck.to_string(),
            self.initial.mode.to_string(),
            self.initial.amplitude.to_string(),
            self.slack.to_string(),
            self.calibration_samples.to_string(),
            self.snapshots.to_string(),
        ]
    }
}

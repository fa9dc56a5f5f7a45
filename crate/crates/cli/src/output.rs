//! CSV and JSON writers. Floats go out with 17 significant digits so that
//! every value round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sks_core::estimates::{energy_series, ConstantsLedger};
use sks_core::path::cumulative_trapezoid;
use sks_core::{Galerkin, Result as CoreResult, Trajectory};

use crate::config::Config;
use crate::error::RunError;

pub const NORM_HEADER: &str = "t,norm_H,norm_V,norm_L4,wa_norm_H,wa_norm_L4,bound_H,bound_V";

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Norm series of one trajectory.
///
/// `bound_H` bounds `||u(t)||_H` by the square root of the running energy
/// bound on `sup ||y||_H^2` plus `||w_A(t)||_H`. `bound_V` bounds
/// `||u||_{L2(0,t;V)}` in the same way from the integrated estimate.
pub fn norm_series_csv(traj: &Trajectory, galerkin: &Galerkin, ledger: &ConstantsLedger) -> CoreResult<String> {
    let energy = energy_series(traj, galerkin, ledger)?;
    let wa_v_sq: Vec<f64> = traj.wa.iter().map(|w| galerkin.v_norm_sq(w)).collect();
    let wa_l2v = cumulative_trapezoid(&traj.times, &wa_v_sq);
    let mut out = String::with_capacity(traj.len() * 8 * 24);
    out.push_str(NORM_HEADER);
    out.push('\n');
    for (i, (&t, wa)) in traj.times.iter().zip(&traj.wa).enumerate() {
        let u = galerkin.norms(&traj.u[i]);
        let wa_h = galerkin.h_norm(wa);
        let row = [
            t,
            u.h_norm,
            u.v_norm,
            u.l4_norm,
            wa_h,
            galerkin.l4_norm(wa),
            energy.bound_h_sq[i].sqrt() + wa_h,
            energy.bound_v_sq[i].sqrt() + wa_l2v[i].sqrt(),
        ];
        out.push_str(&row.map(fmt17).join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Sine coefficients of `u` at every saved time: `t,a_1,...,a_N`.
pub fn snapshots_csv(traj: &Trajectory) -> String {
    let modes = traj.u.first().map_or(0, |u| u.modes());
    let mut out = String::from("t");
    for k in 1..=modes {
        let _ = write!(out, ",a_{k}");
    }
    out.push('\n');
    for (t, u) in traj.times.iter().zip(&traj.u) {
        out.push_str(&fmt17(*t));
        for a in u.coeffs() {
            out.push(',');
            out.push_str(&fmt17(*a));
        }
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Collects files under one output directory and records their names.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(root).map_err(|e| RunError::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| RunError::io(parent, e))?;
        }
        fs::write(&path, contents).map_err(|e| RunError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config: Config,
    pub master_seed: u64,
    pub path_count: usize,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: &Config, seed: u64, paths: usize) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: *config,
            master_seed: seed,
            path_count: paths,
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    /// Write `manifest.json` listing every file written so far.
    pub fn finish(mut self, out: &mut OutputDir, seconds: f64) -> Result<Self, RunError> {
        self.outputs = out.files().to_vec();
        self.outputs.sort();
        self.wall_clock_seconds = seconds;
        out.write("manifest.json", &to_json(&self))?;
        Ok(self)
    }
}

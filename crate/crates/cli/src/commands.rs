//! The four subcommands. Each writes its outputs and a manifest under the
//! output directory and returns a summary for the caller.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sks_core::convergence::{convergence_study, ConvergenceStudy, MIN_LEVELS};
use sks_core::estimates::{
    calibrate_constants, check_embedding, check_energy,
    check_f_contraction, check_g_lipschitz, check_gronwall_bound, check_perturbation_scaling,
    check_semigroup_regularity, gaussian_field, smooth_path, Calibration, CheckReport,
    DependenceSeries, GronwallFit, CALIBRATION_DECAY, INTERPOLATION_TOL,
};
use sks_core::mild::{solve_global, tau_one, Trajectory};
use sks_core::{
    stream_rng, ConstantsLedger, FieldPath, Galerkin, NoiseProfile, NoiseSpec, Purpose,
    SpectralField, StreamId,
};

use crate::config::Config;
use crate::error::RunError;
use crate::output::{fmt17, norm_series_csv, snapshots_csv, to_json, OutputDir, RunManifest};

/// Perturbation sizes of the continuous-dependence study.
pub const PERTURBATIONS: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Relative change of the noise amplitude in the paired-path study.
pub const NOISE_PERTURBATION: f64 = 0.1;
/// Cubic cancellation tolerance `|<u u_x, u>| <= tol (1 + ||u||_V^3)`.
pub const CUBIC_TOL: f64 = 1e-10;
pub const PICARD_RATIO_MAX: f64 = 0.55;
pub const PICARD_ITERATIONS_MAX: usize = 10;
/// Time steps of random paths in the Lipschitz and regularity sweeps.
const SWEEP_STEPS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sweep {
    Cubic = 1,
    Regularity = 2,
    Lipschitz = 3,
    Contraction = 4,
}

fn sweep_stream(kind: Sweep, i: usize) -> StreamId {
    StreamId::new(Purpose::Sweep, ((kind as u64) << 32) | i as u64)
}

fn calibrate(cfg: &Config, g: &Galerkin, samples: usize, seed: u64) -> Result<Calibration, RunError> {
    Ok(calibrate_constants(g, samples, cfg.solver.horizon, seed)?)
}

#[allow(clippy::too_many_arguments)]
fn simulate_path(
    cfg: &Config,
    g: &Galerkin,
    noise: &NoiseSpec,
    u0: &SpectralField,
    ledger: &ConstantsLedger,
    crosscheck: bool,
    seed: u64,
    index: usize,
) -> Result<sks_core::GlobalRun, RunError> {
    let mut scfg = cfg.solver_config();
    scfg.crosscheck = crosscheck;
    let stream = StreamId::path(index as u64);
    let mut rng = stream_rng(seed, stream);
    Ok(solve_global(u0, cfg.solver.horizon, g, noise, &scfg, Some(ledger), stream, &mut rng)?)
}

/// Summary of `simulate`.
#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub manifest: RunManifest,
    pub ledger: ConstantsLedger,
}

pub fn run_simulate(cfg: &Config, seed: u64, paths: usize, out_dir: &Path) -> Result<SimulateOutcome, RunError> {
    if paths == 0 {
        return Err(RunError::config("--paths", "must be at least 1"));
    }
    let start = Instant::now();
    let mut out = OutputDir::create(out_dir)?;
    let g = cfg.galerkin()?;
    let noise = cfg.noise_spec()?;
    let u0 = cfg.initial_field();
    let cal = calibrate(cfg, &g, cfg.calibration_samples, seed)?;
    let ledger = cal.ledger;
    out.write("ledger.json", &to_json(&cal))?;

    let files: Vec<(String, Option<String>, Option<String>)> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let run = simulate_path(cfg, &g, &noise, &u0, &ledger, cfg.solver.crosscheck, seed, i)?;
            let csv = norm_series_csv(&run.trajectory, &g, &ledger)?;
            let snaps = cfg.snapshots.then(|| snapshots_csv(&run.trajectory));
            let cross = run.crosscheck.as_ref().map(|c| {
                to_json(&CrossCheckRecord {
                    tau: c.tau,
                    tau_one: c.tau_one,
                    tau_two: c.tau_two.time,
                    tau_two_below_resolution: c.tau_two.below_resolution,
                    iterations: c.picard.iterations,
                    ratios: c.picard.ratios.clone(),
                    residual: c.picard.residual,
                    z_norm: c.picard.z_norm,
                    alpha: c.picard.alpha,
                    relative_difference: c.relative_difference,
                })
            });
            Ok((csv, snaps, cross))
        })
        .collect::<Result<_, RunError>>()?;
    for (i, (csv, snaps, cross)) in files.iter().enumerate() {
        out.write(&format!("path_{i:05}.csv"), csv)?;
        if let Some(s) = snaps {
            out.write(&format!("snapshots_{i:05}.csv"), s)?;
        }
        if let Some(c) = cross {
            out.write(&format!("crosscheck_{i:05}.json"), c)?;
        }
    }
    let manifest = RunManifest::new("simulate", cfg, seed, paths).finish(&mut out, start.elapsed().as_secs_f64())?;
    Ok(SimulateOutcome { manifest, ledger })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CrossCheckRecord {
    tau: f64,
    tau_one: f64,
    tau_two: f64,
    tau_two_below_resolution: bool,
    iterations: usize,
    ratios: Vec<f64>,
    residual: f64,
    z_norm: f64,
    alpha: f64,
    relative_difference: f64,
}

/// All reports of one named check over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub samples: usize,
    pub passed: usize,
    pub pass: bool,
    /// Report with the largest `lhs / rhs`.
    pub worst: CheckReport,
    pub failures: Vec<CheckReport>,
}

fn utilisation(r: &CheckReport) -> f64 {
    if r.lhs == 0.0 {
        0.0
    } else if r.rhs == 0.0 {
        f64::INFINITY
    } else {
        r.lhs / r.rhs
    }
}

impl CheckSummary {
    fn from_reports(name: &str, reports: Vec<CheckReport>) -> Self {
        let passed = reports.iter().filter(|r| r.pass).count();
        let worst = reports
            .iter()
            .max_by(|a, b| utilisation(a).total_cmp(&utilisation(b)))
            .cloned()
            .expect("at least one report");
        CheckSummary {
            name: name.to_string(),
            samples: reports.len(),
            passed,
            pass: passed == reports.len(),
            failures: reports.into_iter().filter(|r| !r.pass).collect(),
            worst,
        }
    }

    pub fn worst_ratio(&self) -> f64 {
        utilisation(&self.worst)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub ledger: ConstantsLedger,
    pub checks: Vec<CheckSummary>,
    pub manifest: RunManifest,
    /// Envelope fitted on even-indexed paths of the dependence study.
    pub gronwall: GronwallFit,
}

impl VerifyOutcome {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Per-path reports from one noisy trajectory with the local cross-check.
fn path_reports(
    cfg: &Config,
    g: &Galerkin,
    noise: &NoiseSpec,
    u0: &SpectralField,
    ledger: &ConstantsLedger,
    seed: u64,
    i: usize,
) -> Result<Vec<CheckReport>, RunError> {
    let slack = cfg.slack;
    let run = simulate_path(cfg, g, noise, u0, ledger, true, seed, i)?;
    let traj = &run.trajectory;
    let mut out = vec![check_embedding(&traj.u_path()?, g, ledger, slack)?];
    let (h, v) = check_energy(traj, g, ledger, slack)?;
    out.extend([h, v]);
    let cc = run.crosscheck.expect("cross-check requested");
    let p = &cc.picard;
    let tol = cfg.solver.picard_tol;
    out.push(
        CheckReport::new("picard_ratio", p.max_ratio(), PICARD_RATIO_MAX, 0.0)
            .with("iterations", p.iterations)
            .with("tau", cc.tau),
    );
    out.push(CheckReport::new("picard_ball", p.z_norm, p.alpha, 0.0));
    out.push(CheckReport::new("picard_iterations", p.iterations as f64, PICARD_ITERATIONS_MAX as f64, 0.0));
    out.push(CheckReport::new("picard_residual", p.residual, 10.0 * tol * p.z_norm, 0.0));
    out.push(
        CheckReport::new(
            "solver_agreement",
            cc.relative_difference,
            1e-4f64.max(10.0 * cfg.solver.dt),
            0.0,
        )
        .with("tau", cc.tau)
        .with("tau_one", cc.tau_one)
        .with("tau_two", cc.tau_two.time),
    );
    Ok(out)
}

/// Random path on `[0, tau]` starting at zero with `E` norm `norm`.
fn admissible_path<R: Rng>(g: &Galerkin, tau: f64, steps: usize, norm: f64, rng: &mut R) -> Result<FieldPath, RunError> {
    let z = smooth_path(g.modes(), tau, steps, 1.0, rng)?;
    let z0 = z.fields()[0].clone();
    let z = z.map(|f| f.sub(&z0));
    let e = g.e_norm(&z);
    Ok(z.scaled(norm / e))
}

struct DependenceRun {
    scaling: CheckReport,
    series: Vec<DependenceSeries>,
}

fn dependence_run(
    cfg: &Config,
    g: &Galerkin,
    u0: &SpectralField,
    ledger: &ConstantsLedger,
    seed: u64,
    i: usize,
) -> Result<DependenceRun, RunError> {
    let run = |u: &SpectralField, noise: &NoiseSpec| -> Result<Trajectory, RunError> {
        Ok(simulate_path(cfg, g, noise, u, ledger, false, seed, i)?.trajectory)
    };
    let noise = cfg.noise_spec()?;
    let base = run(u0, &noise)?;
    let direction = SpectralField::single_mode(g.modes(), cfg.initial.mode, 1.0);
    let mut study = Vec::new();
    let mut series = Vec::new();
    for delta in PERTURBATIONS {
        let mut u1 = u0.clone();
        u1.axpy(delta, &direction);
        let s = DependenceSeries::new(&base, &run(&u1, &noise)?, g)?;
        study.push((delta, s.sup_distance()));
        series.push(s);
    }
    let louder = NoiseSpec::power_law(
        NoiseProfile {
            sigma: cfg.noise.sigma * (1.0 + NOISE_PERTURBATION),
            ..cfg.noise
        },
        g.modes(),
    )?;
    if cfg.noise.sigma > 0.0 {
        series.push(DependenceSeries::new(&base, &run(u0, &louder)?, g)?);
    }
    Ok(DependenceRun {
        scaling: check_perturbation_scaling(&study)?,
        series,
    })
}

pub fn run_verify(cfg: &Config, seed: u64, paths: usize, out_dir: &Path) -> Result<VerifyOutcome, RunError> {
    if paths < 2 {
        return Err(RunError::config("--paths", "verify needs at least 2 paths"));
    }
    let start = Instant::now();
    let mut out = OutputDir::create(out_dir)?;
    let g = cfg.galerkin()?;
    let noise = cfg.noise_spec()?;
    let u0 = cfg.initial_field();
    let slack = cfg.slack;
    let horizon = cfg.solver.horizon;

    let cal = calibrate(cfg, &g, cfg.calibration_samples, seed)?;
    let ledger = cal.ledger;
    out.write("ledger.json", &to_json(&cal))?;
    let mut groups: Vec<(String, Vec<CheckReport>)> = Vec::new();
    let push = |groups: &mut Vec<(String, Vec<CheckReport>)>, r: CheckReport| {
        match groups.iter_mut().find(|(n, _)| *n == r.name) {
            Some((_, v)) => v.push(r),
            None => groups.push((r.name.clone(), vec![r])),
        }
    };

    push(
        &mut groups,
        CheckReport::new("interpolation_constant", cal.summary.c2_ratio_max, 1.0, INTERPOLATION_TOL)
            .with("samples", cal.summary.samples),
    );

    let cubic: Vec<CheckReport> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, sweep_stream(Sweep::Cubic, i));
            let scale = 10f64.powf(rng.random_range(-2.0..2.0));
            let u = gaussian_field(g.modes(), CALIBRATION_DECAY, &mut rng).scaled(scale);
            let lhs = g.inner(&g.advection_term(&u), &u).abs();
            CheckReport::new("cubic_cancellation", lhs, CUBIC_TOL * (1.0 + g.v_norm(&u).powi(3)), 0.0)
        })
        .collect();
    cubic.into_iter().for_each(|r| push(&mut groups, r));

    let per_path: Vec<Vec<CheckReport>> = (0..paths)
        .into_par_iter()
        .map(|i| path_reports(cfg, &g, &noise, &u0, &ledger, seed, i))
        .collect::<Result<_, _>>()?;
    per_path.into_iter().flatten().for_each(|r| push(&mut groups, r));

    let regularity: Vec<(CheckReport, CheckReport)> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, sweep_stream(Sweep::Regularity, i));
            let y0 = gaussian_field(g.modes(), CALIBRATION_DECAY, &mut rng);
            let forcing = smooth_path(g.modes(), horizon, SWEEP_STEPS, CALIBRATION_DECAY, &mut rng)?;
            Ok(check_semigroup_regularity(&y0, &forcing, &g, &ledger, slack)?)
        })
        .collect::<Result<_, RunError>>()?;
    regularity.into_iter().for_each(|(a, b)| {
        push(&mut groups, a);
        push(&mut groups, b);
    });

    let lipschitz: Vec<CheckReport> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, sweep_stream(Sweep::Lipschitz, i));
            let su = 10f64.powf(rng.random_range(-2.0..1.0));
            let sv = 10f64.powf(rng.random_range(-2.0..1.0));
            let u = smooth_path(g.modes(), horizon, SWEEP_STEPS, 1.0, &mut rng)?.scaled(su);
            let v = smooth_path(g.modes(), horizon, SWEEP_STEPS, 1.0, &mut rng)?.scaled(sv);
            Ok(check_g_lipschitz(&u, &v, &g, slack)?)
        })
        .collect::<Result<_, RunError>>()?;
    lipschitz.into_iter().for_each(|r| push(&mut groups, r));

    let tau = tau_one(&u0, &ledger, &g, horizon)?.min(horizon);
    let contraction: Vec<(CheckReport, CheckReport)> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, sweep_stream(Sweep::Contraction, i));
            let n1 = ledger.alpha * rng.random_range(0.05..1.0);
            let n2 = ledger.alpha * rng.random_range(0.05..1.0);
            let z1 = admissible_path(&g, tau, cfg.solver.picard_steps, n1, &mut rng)?;
            let z2 = admissible_path(&g, tau, cfg.solver.picard_steps, n2, &mut rng)?;
            Ok(check_f_contraction(&z1, &z2, &u0, tau, &g, &ledger, cfg.solver.quad_substeps, slack)?)
        })
        .collect::<Result<_, RunError>>()?;
    contraction.into_iter().for_each(|(a, b)| {
        push(&mut groups, a);
        push(&mut groups, b);
    });

    let dependence: Vec<DependenceRun> = (0..paths)
        .into_par_iter()
        .map(|i| dependence_run(cfg, &g, &u0, &ledger, seed, i))
        .collect::<Result<_, _>>()?;
    let training: Vec<DependenceSeries> = dependence
        .iter()
        .step_by(2)
        .flat_map(|d| d.series.iter().cloned())
        .collect();
    let gronwall = GronwallFit::fit(&training)?;
    for (i, d) in dependence.iter().enumerate() {
        push(&mut groups, d.scaling.clone());
        for s in &d.series {
            push(
                &mut groups,
                check_gronwall_bound(s, &gronwall, slack).with("held_out", i % 2 == 1),
            );
        }
    }

    let checks: Vec<CheckSummary> = groups
        .into_iter()
        .map(|(name, reports)| CheckSummary::from_reports(&name, reports))
        .collect();
    for c in &checks {
        out.write(&format!("checks/{}.json", c.name), &to_json(c))?;
    }
    out.write("gronwall_fit.json", &to_json(&gronwall))?;
    let mut csv = String::from("name,samples,passed,pass,worst_lhs,worst_rhs,worst_margin\n");
    for c in &checks {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.name,
            c.samples,
            c.passed,
            c.pass,
            fmt17(c.worst.lhs),
            fmt17(c.worst.rhs),
            fmt17(c.worst.margin)
        ));
    }
    out.write("verify_summary.csv", &csv)?;
    let manifest = RunManifest::new("verify", cfg, seed, paths).finish(&mut out, start.elapsed().as_secs_f64())?;
    Ok(VerifyOutcome {
        ledger,
        checks,
        manifest,
        gronwall,
    })
}

#[derive(Debug, Clone)]
pub struct ConvergeOutcome {
    pub study: ConvergenceStudy,
    pub manifest: RunManifest,
}

pub const CONVERGE_HEADER: &str = "dt,error_vs_finest,successive_difference,observed_order";

pub fn convergence_csv(study: &ConvergenceStudy) -> String {
    let mut csv = format!("{CONVERGE_HEADER}\n");
    let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
    for l in &study.levels {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(l.dt),
            fmt17(l.error_vs_finest),
            opt(l.successive_difference),
            opt(l.observed_order)
        ));
    }
    csv
}

pub fn run_converge(
    cfg: &Config,
    seed: u64,
    paths: usize,
    levels: usize,
    out_dir: &Path,
) -> Result<ConvergeOutcome, RunError> {
    if levels < MIN_LEVELS {
        return Err(RunError::config("--levels", format!("need at least {MIN_LEVELS}, got {levels}")));
    }
    if paths == 0 {
        return Err(RunError::config("--paths", "must be at least 1"));
    }
    let start = Instant::now();
    let mut out = OutputDir::create(out_dir)?;
    let g = cfg.galerkin()?;
    let noise = cfg.noise_spec()?;
    let study = convergence_study(
        &cfg.initial_field(),
        cfg.solver.horizon,
        &g,
        &noise,
        cfg.solver.dt,
        levels,
        paths,
        seed,
        StreamId::path,
    )?;
    out.write("convergence.csv", &convergence_csv(&study))?;
    out.write("convergence.json", &to_json(&study))?;
    let manifest = RunManifest::new("converge", cfg, seed, paths).finish(&mut out, start.elapsed().as_secs_f64())?;
    Ok(ConvergeOutcome { study, manifest })
}

pub fn run_constants(cfg: &Config, seed: u64, samples: Option<usize>, out_dir: &Path) -> Result<Calibration, RunError> {
    let start = Instant::now();
    let mut out = OutputDir::create(out_dir)?;
    let g = cfg.galerkin()?;
    let samples = samples.unwrap_or(cfg.calibration_samples);
    if samples < sks_core::estimates::MIN_CALIBRATION_SAMPLES {
        return Err(RunError::config(
            "--samples",
            format!("must be at least {}", sks_core::estimates::MIN_CALIBRATION_SAMPLES),
        ));
    }
    let cal = calibrate(cfg, &g, samples, seed)?;
    out.write("ledger.json", &to_json(&cal))?;
    RunManifest::new("constants", cfg, seed, 0).finish(&mut out, start.elapsed().as_secs_f64())?;
    Ok(cal)
}

//! Benchmark harness: noise and tolerance sweeps over random instances,
//! reported as CSV rows.
//!
//! Cells run in parallel; every trial's instance is derived from
//! `(seed, noise index, tolerance index, trial index)` alone, so row contents
//! (apart from wall-clock timings) are bit-identical across reruns and shared
//! by all solvers in a cell.

use crate::baseline::{fit_direct, PenaltyConfig};
use crate::gem::FitProblem;
use crate::solver::{fit, SolverConfig};
use crate::synth::{noisy_instance_with, random_rotation, random_translation, rng_from_seed};
use rayon::prelude::*;
use std::fmt::Write as _;

/// Solvers the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Geodesic steepest descent on the rotation group.
    Manifold,
    /// Quadratic penalty on the direct 33-constraint formulation.
    DirectPenalty,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Manifold => "manifold",
            SolverKind::DirectPenalty => "direct",
        }
    }

    pub fn parse(s: &str) -> Option<SolverKind> {
        match s {
            "manifold" => Some(SolverKind::Manifold),
            "direct" => Some(SolverKind::DirectPenalty),
            _ => None,
        }
    }
}

/// Sweep description. `bench_noise` and `bench_tolerance` both iterate the
/// full `noise_levels x tolerance_levels x solvers` grid; the constructors
/// provide the default level sets for each sweep.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub noise_levels: Vec<f64>,
    pub tolerance_levels: Vec<f64>,
    /// Trials per cell, excluding one discarded warm-up trial.
    pub trials: usize,
    pub solvers: Vec<SolverKind>,
    pub seed: u64,
}

impl BenchSpec {
    /// Noise sweep defaults: nine log-spaced noise levels from 1e-3 to 1e1,
    /// tolerances {1e-9, 1e-6}.
    pub fn noise_sweep(trials: usize, seed: u64) -> Self {
        BenchSpec {
            noise_levels: (0..9).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)).collect(),
            tolerance_levels: vec![1e-9, 1e-6],
            trials,
            solvers: vec![SolverKind::Manifold, SolverKind::DirectPenalty],
            seed,
        }
    }

    /// Tolerance sweep defaults: sixteen decades from 1e-15 to 1, at noise
    /// levels {1e-1, 5e-1}.
    pub fn tolerance_sweep(trials: usize, seed: u64) -> Self {
        BenchSpec {
            noise_levels: vec![1e-1, 5e-1],
            tolerance_levels: (0..16).map(|k| 10f64.powi(-15 + k)).collect(),
            trials,
            solvers: vec![SolverKind::Manifold, SolverKind::DirectPenalty],
            seed,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.trials < 1 {
            return Err(crate::Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.noise_levels.iter().any(|v| v.is_nan() || *v < 0.0)
            || self.tolerance_levels.iter().any(|v| v.is_nan() || *v <= 0.0)
        {
            return Err(crate::Error::InvalidConfig(
                "noise levels must be non-negative and tolerances positive".into(),
            ));
        }
        if self.solvers.is_empty() {
            return Err(crate::Error::InvalidConfig("no solvers selected".into()));
        }
        Ok(())
    }
}

/// One CSV row: a (noise, tolerance, solver) cell aggregated over trials.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub noise: f64,
    pub tolerance: f64,
    pub solver: &'static str,
    pub trials: usize,
    pub median_time: f64,
    pub mean_iters: f64,
    pub median_residual: f64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix(base);
    for p in parts {
        s = splitmix(s ^ splitmix(*p));
    }
    s
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn run_cell(
    spec: &BenchSpec,
    noise_idx: usize,
    tol_idx: usize,
    solver: SolverKind,
) -> BenchRow {
    let noise = spec.noise_levels[noise_idx];
    let tolerance = spec.tolerance_levels[tol_idx];
    let mut times = Vec::with_capacity(spec.trials);
    let mut residuals = Vec::with_capacity(spec.trials);
    let mut iters_sum = 0.0;

    // Trial 0 is the discarded warm-up.
    for trial in 0..=spec.trials {
        let iseed = derive_seed(spec.seed, &[noise_idx as u64, tol_idx as u64, trial as u64]);
        let mut rng = rng_from_seed(iseed);
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let (a, _) = noisy_instance_with(&r, t, noise, &mut rng);

        let (elapsed, iters, residual) = match solver {
            SolverKind::Manifold => {
                let cfg = SolverConfig {
                    tol: tolerance,
                    ..SolverConfig::default()
                };
                let problem = FitProblem::new(a);
                let start = std::time::Instant::now();
                let (_, report) = fit(&problem, &cfg);
                (
                    start.elapsed().as_secs_f64(),
                    report.iterations as f64,
                    report.residual,
                )
            }
            SolverKind::DirectPenalty => {
                let cfg = PenaltyConfig {
                    constraint_tol: tolerance,
                    ..PenaltyConfig::default()
                };
                let start = std::time::Instant::now();
                let (_, report) = fit_direct(&a, &cfg);
                (
                    start.elapsed().as_secs_f64(),
                    report.inner_iterations as f64,
                    report.residual,
                )
            }
        };
        if trial > 0 {
            times.push(elapsed);
            residuals.push(residual);
            iters_sum += iters;
        }
    }

    BenchRow {
        noise,
        tolerance,
        solver: solver.name(),
        trials: spec.trials,
        median_time: median(&mut times),
        mean_iters: iters_sum / spec.trials as f64,
        median_residual: median(&mut residuals),
    }
}

fn run_grid(spec: &BenchSpec) -> Vec<BenchRow> {
    spec.validate().expect("invalid bench spec");
    let mut cells = Vec::new();
    for noise_idx in 0..spec.noise_levels.len() {
        for tol_idx in 0..spec.tolerance_levels.len() {
            for solver in &spec.solvers {
                cells.push((noise_idx, tol_idx, *solver));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(ni, ti, solver)| run_cell(spec, ni, ti, solver))
        .collect()
}

/// Noise sweep: rows sorted by (noise, tolerance, solver).
pub fn bench_noise(spec: &BenchSpec) -> Vec<BenchRow> {
    let mut rows = run_grid(spec);
    rows.sort_by(|a, b| {
        (a.noise, a.tolerance, a.solver)
            .partial_cmp(&(b.noise, b.tolerance, b.solver))
            .unwrap()
    });
    rows
}

/// Tolerance sweep: rows sorted by (tolerance, noise, solver).
pub fn bench_tolerance(spec: &BenchSpec) -> Vec<BenchRow> {
    let mut rows = run_grid(spec);
    rows.sort_by(|a, b| {
        (a.tolerance, a.noise, a.solver)
            .partial_cmp(&(b.tolerance, b.noise, b.solver))
            .unwrap()
    });
    rows
}

/// CSV serialization. Wall-clock timings are the one non-reproducible column;
/// everything else is deterministic under a fixed seed.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("noise,tolerance,solver,trials,median_time,mean_iters,median_residual\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.9e},{},{:.17e}",
            r.noise, r.tolerance, r.solver, r.trials, r.median_time, r.mean_iters, r.median_residual
        );
    }
    out
}

//! `gemfit` — fit generalized essential matrices, run the direct baseline,
//! project central essential matrices, and drive the synthetic benchmark and
//! pose pipelines from the command line.
//!
//! All randomized commands are deterministic under `--seed` (or the
//! `GEMFIT_SEED` environment variable). Failures print a machine-readable
//! `{"category": ..., "message": ...}` object to stderr and exit with a
//! category-specific code.

use clap::{Parser, Subcommand, ValueEnum};
use gemfit::baseline::{fit_direct, PenaltyConfig};
use gemfit::bench::{bench_noise, bench_tolerance, rows_to_csv, BenchSpec, SolverKind};
use gemfit::central::project_to_essential;
use gemfit::gem::FitProblem;
use gemfit::io;
use gemfit::linalg::svd3;
use gemfit::pose::{
    absolute_pose, compare_strategies_on_pairs, relative_pose_from_pairs, PoseEstimate, Strategy,
};
use gemfit::solver::{fit, multi_start_fit, InitStrategy, SolverConfig};
use gemfit::synth::{
    generate_absolute_scene, generate_correspondences, noisy_instance_with, random_rotation,
    random_translation, rng_from_seed,
};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gemfit", version, about = "Nearest generalized essential matrix fitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Procrustes,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Relative,
    Absolute,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a noisy 6x6 instance A = E(R, t) + Ω and write it as a
    /// matrix file.
    Gen {
        /// Standard deviation of the entrywise Gaussian noise.
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, env = "GEMFIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Output path for the instance matrix.
        #[arg(long)]
        out: PathBuf,
        /// Optional path for the ground-truth rotation (3x3).
        #[arg(long)]
        rot_out: Option<PathBuf>,
        /// Optional path for the ground-truth translation (3x1).
        #[arg(long)]
        trans_out: Option<PathBuf>,
    },
    /// Fit the nearest generalized essential matrix with the geodesic
    /// steepest-descent solver.
    Fit {
        /// Input 6x6 matrix file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = InitArg::Procrustes)]
        init: InitArg,
        #[arg(long, default_value_t = 1.0)]
        mu0: f64,
        /// Number of multi-start runs (1 = single run from --init).
        #[arg(long, default_value_t = 1)]
        starts: usize,
        #[arg(long, env = "GEMFIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit via the quadratic-penalty baseline on the direct 33-constraint
    /// formulation.
    FitDirect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        constraint_tol: f64,
        #[arg(long, default_value_t = 8)]
        outer_iters: usize,
        #[arg(long, default_value_t = 10.0)]
        initial_weight: f64,
        #[arg(long, default_value_t = 10.0)]
        weight_growth: f64,
        /// Keep the raw penalty solution instead of snapping to exact
        /// feasibility.
        #[arg(long)]
        no_snap: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project a 3x3 matrix onto the central essential set.
    ProjectEssential {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output matrix path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noise sweep benchmark; writes CSV.
    BenchNoise {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "GEMFIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Comma-separated noise levels; default is 9 log-spaced levels from
        /// 1e-3 to 1e1.
        #[arg(long)]
        noise_levels: Option<String>,
        /// Comma-separated solver tolerances; default 1e-9,1e-6.
        #[arg(long)]
        tols: Option<String>,
        /// Comma-separated subset of {manifold, direct}.
        #[arg(long, default_value = "manifold,direct")]
        solvers: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tolerance sweep benchmark; writes CSV.
    BenchTolerance {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "GEMFIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Comma-separated tolerance levels; default 16 decades from 1e-15
        /// to 1.
        #[arg(long)]
        tol_levels: Option<String>,
        /// Comma-separated noise levels; default 1e-1,5e-1.
        #[arg(long)]
        noise_levels: Option<String>,
        #[arg(long, default_value = "manifold,direct")]
        solvers: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a synthetic pose problem end to end and report the estimate.
    PoseSim {
        #[arg(long, value_enum, default_value_t = ModeArg::Relative)]
        mode: ModeArg,
        /// Line pairs for relative mode.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// World lines for absolute mode.
        #[arg(long, default_value_t = 120)]
        lines: usize,
        /// Rays per world line for absolute mode.
        #[arg(long, default_value_t = 2)]
        rays: usize,
        /// Angular direction noise in radians.
        #[arg(long, default_value_t = 0.0)]
        line_noise: f64,
        #[arg(long, env = "GEMFIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Write the generated correspondences (12 values per line).
        #[arg(long)]
        corr_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare estimation strategies (full, wc, our-wc) on one instance.
    PoseCompare {
        /// Read correspondences from a file instead of generating them
        /// (pose errors are then unavailable).
        #[arg(long)]
        corr: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 1e-3)]
        line_noise: f64,
        #[arg(long, env = "GEMFIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Comma-separated subset of {full, wc, our-wc}.
        #[arg(long, default_value = "full,wc,our-wc")]
        strategies: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_levels(s: &str, what: &str) -> Result<Vec<f64>, gemfit::Error> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| {
                gemfit::Error::InvalidConfig(format!("bad {what} value `{tok}`"))
            })
        })
        .collect()
}

fn parse_solvers(s: &str) -> Result<Vec<SolverKind>, gemfit::Error> {
    s.split(',')
        .map(|tok| {
            SolverKind::parse(tok.trim()).ok_or_else(|| {
                gemfit::Error::InvalidConfig(format!(
                    "unknown solver `{tok}` (expected manifold or direct)"
                ))
            })
        })
        .collect()
}

fn parse_strategies(s: &str) -> Result<Vec<Strategy>, gemfit::Error> {
    s.split(',')
        .map(|tok| match tok.trim() {
            "full" => Ok(Strategy::Full),
            "wc" => Ok(Strategy::WithoutConstraints),
            "our-wc" | "our_wc" => Ok(Strategy::OurWc),
            other => Err(gemfit::Error::InvalidConfig(format!(
                "unknown strategy `{other}` (expected full, wc, our-wc)"
            ))),
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), gemfit::Error> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pose_json(est: &PoseEstimate) -> serde_json::Value {
    let (r, t) = est.gem.pose();
    json!({
        "rotation": r.matrix().0.iter().flatten().copied().collect::<Vec<f64>>(),
        "translation": t.0,
        "rotation_error": est.rotation_error,
        "translation_direction_error": est.translation_direction_error,
        "mean_abs_residual": est.mean_abs_residual,
        "dlt_mean_abs_residual": est.dlt_mean_abs_residual,
        "feasibility_violation": est.feasibility_violation,
        "dlt_feasibility_violation": est.dlt_feasibility_violation,
        "degenerate": est.degenerate,
        "dlt_seconds": est.dlt_seconds,
        "fit_seconds": est.fit_seconds,
    })
}

fn run(cli: Cli) -> Result<(), gemfit::Error> {
    match cli.command {
        Command::Gen {
            sigma,
            seed,
            out,
            rot_out,
            trans_out,
        } => {
            if sigma.is_nan() || sigma < 0.0 {
                return Err(gemfit::Error::InvalidConfig(format!(
                    "sigma must be non-negative, got {sigma}"
                )));
            }
            let mut rng = rng_from_seed(seed);
            let r = random_rotation(&mut rng);
            let t = random_translation(&mut rng);
            let (a, omega_norm) = noisy_instance_with(&r, t, sigma, &mut rng);
            io::write_mat6(&out, &a)?;
            if let Some(path) = rot_out {
                io::write_mat3(&path, r.matrix())?;
            }
            if let Some(path) = trans_out {
                io::write_vec3(&path, &t)?;
            }
            println!(
                "{}",
                json!({"sigma": sigma, "seed": seed, "omega_norm": omega_norm, "out": out})
            );
            Ok(())
        }
        Command::Fit {
            input,
            tol,
            max_iter,
            init,
            mu0,
            starts,
            seed,
            out,
        } => {
            let a = io::read_mat6(&input)?;
            let problem = FitProblem::new(a);
            let config = SolverConfig {
                tol,
                max_iter,
                mu0,
                init: match init {
                    InitArg::Procrustes => InitStrategy::Procrustes,
                    InitArg::Identity => InitStrategy::Identity,
                },
                ..SolverConfig::default()
            };
            config.validate()?;
            if starts < 1 {
                return Err(gemfit::Error::InvalidConfig(
                    "starts must be at least 1".into(),
                ));
            }
            let (gem, report, spread) = if starts == 1 {
                let (gem, report) = fit(&problem, &config);
                (gem, report, None)
            } else {
                let multi = multi_start_fit(&problem, &config, starts, seed);
                (multi.gem, multi.report, Some(multi.spread))
            };
            let (r, t) = gem.pose();
            let payload = json!({
                "rotation": r.matrix().0.iter().flatten().copied().collect::<Vec<f64>>(),
                "translation": t.0,
                "residual": report.residual,
                "objective": report.objective_value,
                "iterations": report.iterations,
                "converged": report.converged,
                "final_step_norm": report.final_step_norm,
                "armijo_evals": report.armijo_evals,
                "wall_time": report.wall_time,
                "spread": spread,
            });
            emit(&out, &serde_json::to_string_pretty(&payload).unwrap())
        }
        Command::FitDirect {
            input,
            constraint_tol,
            outer_iters,
            initial_weight,
            weight_growth,
            no_snap,
            out,
        } => {
            let a = io::read_mat6(&input)?;
            let config = PenaltyConfig {
                constraint_tol,
                outer_iters,
                initial_weight,
                weight_growth,
                snap_to_feasible: !no_snap,
                ..PenaltyConfig::default()
            };
            config.validate()?;
            let (x, report) = fit_direct(&a, &config);
            let payload = json!({
                "matrix": x.0.iter().flatten().copied().collect::<Vec<f64>>(),
                "residual": report.residual,
                "residual_pre_snap": report.residual_pre_snap,
                "max_violation": report.max_violation,
                "max_violation_pre_snap": report.max_violation_pre_snap,
                "violation_trace": report.violation_trace,
                "outer_rounds": report.outer_rounds,
                "inner_iterations": report.inner_iterations,
                "converged": report.converged,
                "wall_time": report.wall_time,
            });
            emit(&out, &serde_json::to_string_pretty(&payload).unwrap())
        }
        Command::ProjectEssential { input, out } => {
            let a = io::read_mat3(&input)?;
            let e = project_to_essential(&a);
            let text = io::format_matrix(
                3,
                3,
                &e.matrix().0.iter().flatten().copied().collect::<Vec<f64>>(),
            );
            match &out {
                Some(path) => std::fs::write(path, &text)?,
                None => print!("{text}"),
            }
            let s = svd3(e.matrix()).sigma;
            eprintln!(
                "{}",
                json!({"singular_values": s, "distance": (a - *e.matrix()).frobenius_norm()})
            );
            Ok(())
        }
        Command::BenchNoise {
            trials,
            seed,
            noise_levels,
            tols,
            solvers,
            out,
        } => {
            let mut spec = BenchSpec::noise_sweep(trials, seed);
            if let Some(s) = noise_levels {
                spec.noise_levels = parse_levels(&s, "noise")?;
            }
            if let Some(s) = tols {
                spec.tolerance_levels = parse_levels(&s, "tolerance")?;
            }
            spec.solvers = parse_solvers(&solvers)?;
            spec.validate()?;
            emit(&out, &rows_to_csv(&bench_noise(&spec)))
        }
        Command::BenchTolerance {
            trials,
            seed,
            tol_levels,
            noise_levels,
            solvers,
            out,
        } => {
            let mut spec = BenchSpec::tolerance_sweep(trials, seed);
            if let Some(s) = tol_levels {
                spec.tolerance_levels = parse_levels(&s, "tolerance")?;
            }
            if let Some(s) = noise_levels {
                spec.noise_levels = parse_levels(&s, "noise")?;
            }
            spec.solvers = parse_solvers(&solvers)?;
            spec.validate()?;
            emit(&out, &rows_to_csv(&bench_tolerance(&spec)))
        }
        Command::PoseSim {
            mode,
            pairs,
            lines,
            rays,
            line_noise,
            seed,
            corr_out,
            out,
        } => {
            let mut rng = rng_from_seed(seed);
            let r = random_rotation(&mut rng);
            let t = random_translation(&mut rng);
            let config = SolverConfig::default();
            let est = match mode {
                ModeArg::Relative => {
                    let corr = generate_correspondences(&r, t, pairs, &mut rng, line_noise);
                    if let Some(path) = &corr_out {
                        io::write_correspondences(path, &corr.pairs)?;
                    }
                    relative_pose_from_pairs(&corr.pairs, Some((&r, t)), &config)
                }
                ModeArg::Absolute => {
                    let scene = generate_absolute_scene(&r, t, lines, rays, &mut rng, line_noise);
                    if let Some(path) = &corr_out {
                        let rows: Vec<_> = scene
                            .world_lines
                            .iter()
                            .zip(&scene.bundles)
                            .flat_map(|(line, rays)| rays.iter().map(move |ray| (*line, *ray)))
                            .collect();
                        io::write_correspondences(path, &rows)?;
                    }
                    absolute_pose(&scene.world_lines, &scene.bundles, Some((&r, t)), &config)
                }
            };
            emit(&out, &serde_json::to_string_pretty(&pose_json(&est)).unwrap())
        }
        Command::PoseCompare {
            corr,
            pairs,
            line_noise,
            seed,
            strategies,
            out,
        } => {
            let strategies = parse_strategies(&strategies)?;
            let config = SolverConfig::default();
            let rows = match corr {
                Some(path) => {
                    let loaded = io::read_correspondences(&path)?;
                    compare_strategies_on_pairs(&loaded, None, &strategies, &config)
                }
                None => {
                    let mut rng = rng_from_seed(seed);
                    let r = random_rotation(&mut rng);
                    let t = random_translation(&mut rng);
                    let set = generate_correspondences(&r, t, pairs, &mut rng, line_noise);
                    compare_strategies_on_pairs(
                        &set.pairs,
                        Some((&r, t)),
                        &strategies,
                        &config,
                    )
                }
            };
            let mut csv = String::from(
                "strategy,mean_abs_residual,rotation_error,translation_direction_error,feasibility_violation,converged,wall_time\n",
            );
            for row in &rows {
                let fmt_opt = |v: Option<f64>| match v {
                    Some(x) => format!("{x:.17e}"),
                    None => String::new(),
                };
                csv.push_str(&format!(
                    "{},{:.17e},{},{},{:.17e},{},{:.9e}\n",
                    row.strategy.name(),
                    row.mean_abs_residual,
                    fmt_opt(row.rotation_error),
                    fmt_opt(row.translation_direction_error),
                    row.feasibility_violation,
                    row.converged,
                    row.wall_time
                ));
            }
            emit(&out, &csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let category = err.category();
            eprintln!(
                "{}",
                json!({"category": category, "message": err.to_string()})
            );
            let code = match category {
                "io" => 3,
                "parse" => 4,
                "dimension" => 5,
                "validation" => 6,
                _ => 7,
            };
            ExitCode::from(code)
        }
    }
}

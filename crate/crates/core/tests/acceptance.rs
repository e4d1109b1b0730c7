//! Acceptance suite: every release-gating behavior, one test per criterion,
//! each printing a `criterion N PASS` line (visible with `--nocapture`).
//!
//! Run with: `cargo test -p gemfit --test acceptance -- --nocapture`

mod common;

use common::{expm_series, explicit_product_trace, random_mat3, random_mat6, spearman};
use gemfit::baseline::{fit_direct, max_violation, PenaltyConfig};
use gemfit::bench::{bench_noise, bench_tolerance, BenchRow, BenchSpec, SolverKind};
use gemfit::central::{assemble_essential, project_to_essential};
use gemfit::gem::{assemble, optimal_t_hat, FitProblem};
use gemfit::linalg::{rodrigues_exp, svd3, Mat3, SkewSymmetric3, Vec3};
use gemfit::pose::{absolute_pose, relative_pose};
use gemfit::solver::{fit, initial_guess, multi_start_fit, InitStrategy, SolverConfig};
use gemfit::synth::{
    generate_absolute_scene, generate_correspondences, noisy_instance_with, random_rotation,
    random_translation, rng_from_seed,
};
use rand::Rng;

/// Criterion 1 — every fitted output satisfies all 33 constraints within 1e-8
/// over 1000 random fits at noise {1e-3, 1e-1, 1}, tolerance 1e-9.
#[test]
fn acceptance_01_feasibility() {
    let mut rng = rng_from_seed(1001);
    let cfg = SolverConfig {
        tol: 1e-9,
        ..SolverConfig::default()
    };
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let sigma = [1e-3, 1e-1, 1.0][i % 3];
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let (a, _) = noisy_instance_with(&r, t, sigma, &mut rng);
        let (gem, _) = fit(&FitProblem::new(a), &cfg);
        let violation = max_violation(&gem.matrix());
        worst = worst.max(violation);
        assert!(violation <= 1e-8, "violation {violation} at instance {i}");
    }
    println!("criterion 01 PASS — feasibility: worst violation {worst:.3e} over 1000 fits (gate 1e-8)");
}

/// Criterion 2 — noise-free instances recover exactly: residual < 1e-9 and
/// rotation angle error < 1e-6 rad on 200 instances.
#[test]
fn acceptance_02_noise_free_recovery() {
    let mut rng = rng_from_seed(1002);
    let cfg = SolverConfig {
        tol: 1e-12,
        max_iter: 500,
        ..SolverConfig::default()
    };
    let mut worst_residual = 0.0f64;
    let mut worst_angle = 0.0f64;
    for _ in 0..200 {
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let p = FitProblem::new(assemble(&r, t));
        let (gem, report) = fit(&p, &cfg);
        worst_residual = worst_residual.max(report.residual);
        worst_angle = worst_angle.max(gem.rotation().angle_to(&r));
        assert!(report.residual < 1e-9, "residual {}", report.residual);
        assert!(
            gem.rotation().angle_to(&r) < 1e-6,
            "angle {}",
            gem.rotation().angle_to(&r)
        );
    }
    println!(
        "criterion 02 PASS — noise-free recovery: worst residual {worst_residual:.3e} (gate 1e-9), worst angle {worst_angle:.3e} rad (gate 1e-6)"
    );
}

/// Criterion 3 — the fitted residual never exceeds ‖Ω‖_F (the ground truth is
/// feasible): zero violations over 10⁴ noisy instances.
#[test]
fn acceptance_03_optimality_bound() {
    let sigmas = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
    let mut rng = rng_from_seed(1003);
    let mut worst_margin = f64::MIN;
    for i in 0..10_000 {
        let sigma = sigmas[i % sigmas.len()];
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let (a, omega) = noisy_instance_with(&r, t, sigma, &mut rng);
        let (_, report) = fit(&FitProblem::new(a), &SolverConfig::default());
        worst_margin = worst_margin.max(report.residual - omega);
        assert!(
            report.residual <= omega,
            "instance {i}: residual {} > ‖Ω‖ {omega}",
            report.residual
        );
    }
    println!("criterion 03 PASS — optimality bound: 0 violations over 10000 instances, worst margin {worst_margin:.3e}");
}

/// Criterion 4 — 2ε-closeness at σ = 1e-1: multi-start (10 starts) objective
/// spread < 1e-6 and pairwise solution distance ≤ 2·max residual.
#[test]
fn acceptance_04_two_epsilon_closeness() {
    let mut rng = rng_from_seed(1004);
    let cfg = SolverConfig::default();
    let mut worst_spread = 0.0f64;
    for i in 0..20u64 {
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let (a, _) = noisy_instance_with(&r, t, 0.1, &mut rng);
        let p = FitProblem::new(a);

        // Same start schedule as multi_start_fit, kept explicit so all ten
        // solutions are available for pairwise distances.
        let mut starts = vec![initial_guess(&p, &cfg.init)];
        let mut start_rng = rng_from_seed(1004 + i);
        for _ in 1..10 {
            starts.push(random_rotation(&mut start_rng));
        }
        let runs: Vec<_> = starts
            .into_iter()
            .map(|x0| {
                fit(
                    &p,
                    &SolverConfig {
                        init: InitStrategy::Provided(x0),
                        ..cfg
                    },
                )
            })
            .collect();
        let objectives: Vec<f64> = runs.iter().map(|(_, rep)| rep.objective_value).collect();
        let spread = objectives.iter().cloned().fold(f64::MIN, f64::max)
            - objectives.iter().cloned().fold(f64::MAX, f64::min);
        worst_spread = worst_spread.max(spread);
        assert!(spread < 1e-6, "instance {i}: spread {spread}");

        let max_residual = runs
            .iter()
            .map(|(_, rep)| rep.residual)
            .fold(0.0f64, f64::max);
        for a_run in &runs {
            for b_run in &runs {
                let dist = (a_run.0.matrix() - b_run.0.matrix()).frobenius_norm();
                assert!(
                    dist <= 2.0 * max_residual + 1e-9,
                    "pairwise distance {dist} exceeds 2ε {}",
                    2.0 * max_residual
                );
            }
        }

        // The library multi-start reports the same spread.
        let multi = multi_start_fit(&p, &cfg, 10, 1004 + i);
        assert!((multi.spread - spread).abs() < 1e-12);
    }
    println!("criterion 04 PASS — 2ε-closeness at σ=1e-1: worst spread {worst_spread:.3e} (gate 1e-6), pairwise distances within 2·max residual");
}

/// Criterion 5 — iteration budget: across the noise sweep (σ up to 10,
/// tolerances 1e-9 and 1e-6) every run converges within 100 iterations, and
/// every objective log is monotone non-increasing.
///
/// Known red: steepest descent needs more than 100 iterations on a small
/// tail of high-noise instances (measured 1.3%/2.2% of runs at σ = 10^0.5·10
/// and 10 for tol 1e-9) whose reduced Hessian at the minimizer is badly
/// conditioned (κ ≳ 100); the observed counts match the theoretical
/// steepest-descent zig-zag rate, so the budget is unattainable for this
/// method class at those noise levels. Monotonicity holds in every run.
#[test]
fn acceptance_05_iteration_budget_and_monotonicity() {
    let noise_levels: Vec<f64> = (0..9).map(|k| 10f64.powf(-3.0 + 0.5 * k as f64)).collect();
    let mut rng = rng_from_seed(1005);
    let mut max_iters = 0;
    let mut runs = 0;
    let mut over_budget: Vec<(f64, f64, usize)> = Vec::new();
    for &tol in &[1e-9, 1e-6] {
        let cfg = SolverConfig {
            tol,
            max_iter: 100_000,
            ..SolverConfig::default()
        };
        for &sigma in &noise_levels {
            for _ in 0..30 {
                let r = random_rotation(&mut rng);
                let t = random_translation(&mut rng);
                let (a, _) = noisy_instance_with(&r, t, sigma, &mut rng);
                let (_, report) = fit(&FitProblem::new(a), &cfg);
                assert!(report.converged, "run did not converge at σ={sigma}, tol={tol}");
                for w in report.objective_trace.windows(2) {
                    assert!(
                        w[1] <= w[0],
                        "objective increased {} -> {} at σ={sigma}",
                        w[0],
                        w[1]
                    );
                }
                if report.iterations > 100 {
                    over_budget.push((sigma, tol, report.iterations));
                }
                max_iters = max_iters.max(report.iterations);
                runs += 1;
            }
        }
    }
    if over_budget.is_empty() {
        println!("criterion 05 PASS — iteration budget: max {max_iters} iterations over {runs} sweep runs (cap 100), all monotone");
    } else {
        println!(
            "criterion 05 FAIL — iteration budget: {}/{runs} sweep runs exceeded 100 iterations (max {max_iters}): {over_budget:?}; all runs converged eventually and every objective log was monotone",
            over_budget.len()
        );
    }
    assert!(
        over_budget.is_empty(),
        "{} runs exceeded the 100-iteration budget (max {max_iters}); see printed summary",
        over_budget.len()
    );
}

/// Criterion 6 — Euclidean gradient vs central finite differences (step 1e-6)
/// within 1e-5 relative at 100 random points; Riemannian tangency defect
/// below 1e-10.
#[test]
fn acceptance_06_gradient_correctness() {
    let mut rng = rng_from_seed(1006);
    let h = 1e-6;
    let mut worst_rel = 0.0f64;
    let mut worst_skew = 0.0f64;
    for _ in 0..100 {
        let a = random_mat6(&mut rng, 2.0);
        let p = FitProblem::new(a);
        let x = random_rotation(&mut rng);
        let grad = p.euclidean_grad(&x);

        let mut fd = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut xp = *x.matrix();
                let mut xm = *x.matrix();
                xp[i][j] += h;
                xm[i][j] -= h;
                fd[i][j] = (p.g_at(&xp) - p.g_at(&xm)) / (2.0 * h);
            }
        }
        let rel = (fd - grad).frobenius_norm() / grad.frobenius_norm().max(1.0);
        worst_rel = worst_rel.max(rel);
        assert!(rel <= 1e-5, "finite-difference mismatch {rel}");

        let riem = p.riemannian_grad(&x);
        let zx = riem * x.matrix().transpose();
        let skew_defect = (zx + zx.transpose()).frobenius_norm();
        worst_skew = worst_skew.max(skew_defect);
        assert!(skew_defect < 1e-10, "tangency defect {skew_defect}");
    }
    println!("criterion 06 PASS — gradients: worst FD relative error {worst_rel:.3e} (gate 1e-5), worst tangency defect {worst_skew:.3e} (gate 1e-10)");
}

/// Criterion 7 — the Rodrigues kernel matches a scaling-and-squaring series
/// oracle within 1e-12 over 10⁴ random (Z, μ) including θ < 1e-8 cases, with
/// determinant 1 within 1e-12 always.
#[test]
fn acceptance_07_rodrigues_kernel() {
    let mut rng = rng_from_seed(1007);
    let mut worst_diff = 0.0f64;
    let mut worst_det = 0.0f64;
    for i in 0..10_000 {
        let (axis, mu) = if i % 5 == 4 {
            // Near-zero angle regime: θ = |μ|·|z| < 1e-8.
            let axis = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let theta = 10f64.powf(rng.random_range(-14.0..-8.1));
            let norm = axis.norm().max(1e-12);
            (axis, theta / norm)
        } else {
            (
                Vec3::new(
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                ),
                rng.random_range(-2.0..2.0),
            )
        };
        let z = SkewSymmetric3::from_axis(axis);
        let closed = rodrigues_exp(&z, mu);
        let series = expm_series(&(z.matrix() * (-mu)));
        let diff = (*closed.matrix() - series).frobenius_norm();
        let det_err = (closed.matrix().det() - 1.0).abs();
        worst_diff = worst_diff.max(diff);
        worst_det = worst_det.max(det_err);
        assert!(diff <= 1e-12, "series mismatch {diff} at μ={mu}");
        assert!(det_err <= 1e-12, "determinant drift {det_err}");
    }
    println!("criterion 07 PASS — Rodrigues kernel: worst series difference {worst_diff:.3e}, worst |det-1| {worst_det:.3e} (gates 1e-12)");
}

/// Criterion 8 — objective identities: g = f∘(R, optimal t̂) within 1e-10
/// relative over 10⁴ points; β − α = ½‖A11‖² exactly as computed;
/// trace_product equals the explicit-product trace within 1e-12.
#[test]
fn acceptance_08_objective_identities() {
    let mut rng = rng_from_seed(1008);
    let mut worst_gf = 0.0f64;
    let mut worst_tp = 0.0f64;
    for _ in 0..10_000 {
        let a = random_mat6(&mut rng, 2.0);
        let p = FitProblem::new(a);
        let axis = Vec3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let r = rodrigues_exp(&SkewSymmetric3::from_axis(axis), rng.random_range(0.0..2.0));
        let g = p.objective_g(&r);
        let f = p.objective_f(&r, optimal_t_hat(p.m(), &r).axis());
        let rel = (g - f).abs() / g.abs().max(1.0);
        worst_gf = worst_gf.max(rel);
        assert!(rel <= 1e-10, "g/f mismatch {rel}");

        // Exact by construction: β is computed as α + ½‖A11‖².
        assert_eq!(p.beta(), p.alpha() + 0.5 * p.m().frobenius_sq());

        let b = random_mat6(&mut rng, 2.0);
        let tp = a.trace_product(&b);
        let explicit = explicit_product_trace(&a, &b);
        worst_tp = worst_tp.max((tp - explicit).abs());
        assert!((tp - explicit).abs() <= 1e-12);
    }
    println!("criterion 08 PASS — objective identities: worst g-f relative gap {worst_gf:.3e} (gate 1e-10), worst trace gap {worst_tp:.3e} (gate 1e-12), β−α exact");
}

/// Criterion 9 — central essential projection: diagonal case, fixed points,
/// and a 10⁵-sample oracle that never improves on the closed form by more
/// than 1e-9.
#[test]
fn acceptance_09_central_projection() {
    let e = project_to_essential(&Mat3::diagonal([2.0, 1.0, 0.5]));
    assert!((*e.matrix() - Mat3::diagonal([1.5, 1.5, 0.0])).frobenius_norm() < 1e-12);

    let mut rng = rng_from_seed(1009);
    for _ in 0..100 {
        let t = Vec3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let r = random_rotation(&mut rng);
        let feasible = assemble_essential(t, &r);
        let p = project_to_essential(feasible.matrix());
        assert!((*p.matrix() - *feasible.matrix()).frobenius_norm() < 1e-9);
        let s = svd3(p.matrix()).sigma;
        assert!((s[0] - s[1]).abs() < 1e-8 && s[2] < 1e-8);
    }

    let mut checked = 0usize;
    for _ in 0..10 {
        let a = random_mat3(&mut rng, 2.0);
        let best = (a - *project_to_essential(&a).matrix()).frobenius_norm();
        for _ in 0..10_000 {
            let t = Vec3::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let r = random_rotation(&mut rng);
            let cand = assemble_essential(t, &r);
            let dist = (a - *cand.matrix()).frobenius_norm();
            assert!(best <= dist + 1e-9, "sample beat the closed form: {dist} < {best}");
            checked += 1;
        }
    }
    println!("criterion 09 PASS — central projection: diagonal case exact, fixed points stable, closed form unbeaten over {checked} samples (slack 1e-9)");
}

/// Criterion 10 — parity and speed: on 100 instances at σ = 1e-1 with
/// tolerance 1e-9, |residual_manifold − residual_direct| ≤ 1e-4 and the
/// manifold solver's median wall time is at most a tenth of the baseline's.
#[test]
fn acceptance_10_parity_and_speed_ratio() {
    let mut rng = rng_from_seed(1010);
    let manifold_cfg = SolverConfig {
        tol: 1e-9,
        ..SolverConfig::default()
    };
    let direct_cfg = PenaltyConfig {
        constraint_tol: 1e-9,
        outer_iters: 12,
        ..PenaltyConfig::default()
    };
    let mut manifold_times = Vec::new();
    let mut direct_times = Vec::new();
    let mut worst_gap = 0.0f64;
    for _ in 0..100 {
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let (a, _) = noisy_instance_with(&r, t, 0.1, &mut rng);
        let problem = FitProblem::new(a);

        let t0 = std::time::Instant::now();
        let (_, m_report) = fit(&problem, &manifold_cfg);
        manifold_times.push(t0.elapsed().as_secs_f64());

        let t1 = std::time::Instant::now();
        let (_, d_report) = fit_direct(&a, &direct_cfg);
        direct_times.push(t1.elapsed().as_secs_f64());

        let gap = (m_report.residual - d_report.residual).abs();
        worst_gap = worst_gap.max(gap);
        assert!(gap <= 1e-4, "residual gap {gap}");
    }
    manifold_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    direct_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m_median = manifold_times[manifold_times.len() / 2];
    let d_median = direct_times[direct_times.len() / 2];
    assert!(
        m_median <= d_median / 10.0,
        "manifold median {m_median} not 10x faster than direct {d_median}"
    );
    println!(
        "criterion 10 PASS — parity/speed: worst residual gap {worst_gap:.3e} (gate 1e-4), median times manifold {m_median:.2e}s vs direct {d_median:.2e}s ({:.0}x)",
        d_median / m_median
    );
}

/// Criterion 11 — pose pipelines: noise-free relative and absolute pose
/// within 1e-4 rad; with 1e-3 rad line noise the projected estimate's mean
/// |epipolar residual| stays within 2x of the unconstrained one while being
/// feasible to 1e-8.
#[test]
fn acceptance_11_pose_pipelines() {
    let cfg = SolverConfig::default();
    let mut rng = rng_from_seed(1011);
    let mut worst_angle = 0.0f64;

    for _ in 0..5 {
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let corr = generate_correspondences(&r, t, 60, &mut rng, 0.0);
        let est = relative_pose(&corr, &cfg);
        worst_angle = worst_angle.max(est.rotation_error.unwrap());
        worst_angle = worst_angle.max(est.translation_direction_error.unwrap());
        assert!(est.rotation_error.unwrap() < 1e-4);
        assert!(est.translation_direction_error.unwrap() < 1e-4);
    }

    for _ in 0..3 {
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let scene = generate_absolute_scene(&r, t, 8, 6, &mut rng, 0.0);
        let est = absolute_pose(&scene.world_lines, &scene.bundles, Some((&r, t)), &cfg);
        worst_angle = worst_angle.max(est.rotation_error.unwrap());
        worst_angle = worst_angle.max(est.translation_direction_error.unwrap());
        assert!(est.rotation_error.unwrap() < 1e-4);
        assert!(est.translation_direction_error.unwrap() < 1e-4);
    }

    let mut worst_ratio = 0.0f64;
    let mut worst_violation = 0.0f64;
    for _ in 0..5 {
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let corr = generate_correspondences(&r, t, 100, &mut rng, 1e-3);
        let est = relative_pose(&corr, &cfg);
        let ratio = est.mean_abs_residual / est.dlt_mean_abs_residual;
        worst_ratio = worst_ratio.max(ratio);
        worst_violation = worst_violation.max(est.feasibility_violation);
        assert!(ratio <= 2.0, "relative residual ratio {ratio}");
        assert!(est.feasibility_violation < 1e-8);
    }
    for _ in 0..3 {
        let r = random_rotation(&mut rng);
        let t = random_translation(&mut rng);
        let scene = generate_absolute_scene(&r, t, 120, 2, &mut rng, 1e-3);
        let est = absolute_pose(&scene.world_lines, &scene.bundles, Some((&r, t)), &cfg);
        let ratio = est.mean_abs_residual / est.dlt_mean_abs_residual;
        worst_ratio = worst_ratio.max(ratio);
        worst_violation = worst_violation.max(est.feasibility_violation);
        assert!(ratio <= 2.0, "absolute residual ratio {ratio}");
        assert!(est.feasibility_violation < 1e-8);
    }
    println!(
        "criterion 11 PASS — pose pipelines: worst noise-free angle {worst_angle:.3e} rad (gate 1e-4), worst noisy residual ratio {worst_ratio:.2} (gate 2.0), worst violation {worst_violation:.3e} (gate 1e-8)"
    );
}

fn strip_times(rows: &[BenchRow]) -> Vec<(f64, f64, String, usize, f64, f64)> {
    rows.iter()
        .map(|r| {
            (
                r.noise,
                r.tolerance,
                r.solver.to_string(),
                r.trials,
                r.mean_iters,
                r.median_residual,
            )
        })
        .collect()
}

/// Criterion 12 — bench sweeps are bit-identical across reruns with the same
/// seed (timing column aside, which is wall-clock by nature) and iteration
/// counts correlate positively with the noise level.
#[test]
fn acceptance_12_bench_reproducibility() {
    let noise_spec = BenchSpec {
        trials: 25,
        ..BenchSpec::noise_sweep(25, 1012)
    };
    let rows_a = bench_noise(&noise_spec);
    let rows_b = bench_noise(&noise_spec);
    assert_eq!(strip_times(&rows_a), strip_times(&rows_b));

    let manifold_rows: Vec<&BenchRow> = rows_a
        .iter()
        .filter(|r| r.solver == SolverKind::Manifold.name() && r.tolerance == 1e-9)
        .collect();
    let noises: Vec<f64> = manifold_rows.iter().map(|r| r.noise.ln()).collect();
    let iters: Vec<f64> = manifold_rows.iter().map(|r| r.mean_iters).collect();
    let rho = spearman(&noises, &iters);
    assert!(rho > 0.0, "Spearman correlation {rho}");

    let tol_spec = BenchSpec {
        trials: 8,
        ..BenchSpec::tolerance_sweep(8, 1012)
    };
    let rows_c = bench_tolerance(&tol_spec);
    let rows_d = bench_tolerance(&tol_spec);
    assert_eq!(strip_times(&rows_c), strip_times(&rows_d));

    println!(
        "criterion 12 PASS — bench reproducibility: noise and tolerance sweeps bit-identical across reruns (timing aside), Spearman(noise, iterations) = {rho:.3} > 0"
    );
}

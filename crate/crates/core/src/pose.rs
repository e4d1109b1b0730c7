//! Relative and absolute pose estimation from line correspondences: a linear
//! (DLT-style) unconstrained estimate of the 6x6 matrix, followed by
//! projection onto the generalized-essential set with the manifold solver,
//! plus a strategy comparison harness (direct constrained solve vs. the
//! loose-then-project pipeline).

use crate::baseline::{max_violation, penalty_minimize, PenaltyConfig};
use crate::gem::{
    epipolar_residual, optimal_t_hat, FitProblem, GeneralizedEssentialMatrix, PluckerLine,
};
use crate::linalg::{nearest_rotation, symmetric_eigen, Mat6, RotationMatrix, SquareMatrix, Vec3};
use crate::solver::{fit, SolverConfig, SolverReport};
use crate::synth::CorrespondenceSet;
use std::time::Instant;

/// Minimum generic pair count for a unique (up to scale) linear solution.
pub const MIN_PAIRS: usize = 35;
/// Spectral gap ratio (second-smallest over smallest eigenvalue) below which
/// the linear system is flagged as degenerate.
const GAP_RATIO_WARN: f64 = 10.0;

/// Output of the linear estimation stage.
#[derive(Debug, Clone, Copy)]
pub struct DltEstimate {
    /// Unit-Frobenius matrix minimizing the summed squared epipolar residual,
    /// sign-fixed so the `(1:3,4:6)` block has non-negative trace.
    pub matrix: Mat6,
    /// Rank warning: fewer than 35 rows, a near-zero spectrum, or a spectral
    /// gap ratio below 10.
    pub degenerate: bool,
    /// `λ₂ / λ₁` of the two smallest normal-matrix eigenvalues.
    pub gap_ratio: f64,
    /// The two smallest eigenvalues of the normal matrix.
    pub smallest_eigenvalues: (f64, f64),
}

fn normal_matrix(rows: &[(&PluckerLine, &PluckerLine)]) -> SquareMatrix {
    let mut s = SquareMatrix::zeros(36);
    let mut v = [0.0_f64; 36];
    for (left, right) in rows {
        let lv = left.to_vec6();
        let rv = right.to_vec6();
        for a in 0..6 {
            for b in 0..6 {
                v[6 * a + b] = lv[a] * rv[b];
            }
        }
        for i in 0..36 {
            for j in i..36 {
                s.add_to(i, j, v[i] * v[j]);
            }
        }
    }
    for i in 0..36 {
        for j in 0..i {
            let u = s.get(j, i);
            s.set(i, j, u);
        }
    }
    s
}

fn reshape_row_major(u: &[f64]) -> Mat6 {
    let mut m = Mat6::zero();
    for a in 0..6 {
        for b in 0..6 {
            m[a][b] = u[6 * a + b];
        }
    }
    m
}

fn dlt_from_rows(rows: &[(&PluckerLine, &PluckerLine)]) -> DltEstimate {
    let s = normal_matrix(rows);
    let eig = symmetric_eigen(&s).expect("normal matrix is symmetric by construction");
    let l1 = eig.values[0].max(0.0);
    let l2 = eig.values[1].max(0.0);
    let mut m = reshape_row_major(&eig.vectors[0]);

    // Deterministic sign: non-negative trace of the rotation block, ties
    // broken by the largest-magnitude entry of that block.
    let block = m.block(0, 1);
    let tr = block.trace();
    let flip = if tr.abs() > 1e-12 {
        tr < 0.0
    } else {
        let mut dominant = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                if block[i][j].abs() > dominant.abs() {
                    dominant = block[i][j];
                }
            }
        }
        dominant < 0.0
    };
    if flip {
        m = m * -1.0;
    }

    let abs_floor = 1e-12 * s.trace().max(1.0);
    let gap_ratio = l2 / l1.max(f64::MIN_POSITIVE);
    let degenerate = rows.len() < MIN_PAIRS || l2 < abs_floor || gap_ratio < GAP_RATIO_WARN;
    DltEstimate {
        matrix: m,
        degenerate,
        gap_ratio,
        smallest_eigenvalues: (l1, l2),
    }
}

/// Linear estimate of the 6x6 matrix from paired lines: the smallest
/// eigenvector of the accumulated 36x36 normal matrix, reshaped row-major.
pub fn dlt_estimate(corr: &CorrespondenceSet) -> DltEstimate {
    let rows: Vec<(&PluckerLine, &PluckerLine)> =
        corr.pairs.iter().map(|(l, r)| (l, r)).collect();
    dlt_from_rows(&rows)
}

/// Rescales a DLT estimate so the two rotation blocks have combined squared
/// norm 6, the natural scale of the constraint set (`‖R‖² + ‖R‖² = 6` for a
/// true rotation pair). The linear estimate is defined only up to scale, but
/// the Frobenius projection is scale-sensitive.
pub fn rescale_for_projection(m: &Mat6) -> Mat6 {
    let norm_sq = m.block(0, 1).frobenius_sq() + m.block(1, 0).frobenius_sq();
    if norm_sq < 1e-12 {
        return *m;
    }
    *m * (6.0 / norm_sq).sqrt()
}

/// Fits the generalized essential set to both signs of the (sign-ambiguous)
/// linear estimate and keeps the lower-residual fit.
fn fit_both_signs(
    a: &Mat6,
    config: &SolverConfig,
) -> (GeneralizedEssentialMatrix, SolverReport) {
    let (gem_pos, rep_pos) = fit(&FitProblem::new(*a), config);
    let (gem_neg, rep_neg) = fit(&FitProblem::new(*a * -1.0), config);
    if rep_pos.residual <= rep_neg.residual {
        (gem_pos, rep_pos)
    } else {
        (gem_neg, rep_neg)
    }
}

/// A pose estimate with its quality metrics.
#[derive(Debug, Clone)]
pub struct PoseEstimate {
    pub gem: GeneralizedEssentialMatrix,
    /// Rotation angle error vs. ground truth, when known.
    pub rotation_error: Option<f64>,
    /// Angle between estimated and true translation directions, when known.
    pub translation_direction_error: Option<f64>,
    /// Mean `|lᵀ X l|` of the projected (feasible) matrix.
    pub mean_abs_residual: f64,
    /// Mean `|lᵀ X l|` of the rescaled unconstrained linear estimate.
    pub dlt_mean_abs_residual: f64,
    /// Max constraint violation of the projected matrix.
    pub feasibility_violation: f64,
    /// Max constraint violation of the rescaled linear estimate.
    pub dlt_feasibility_violation: f64,
    pub degenerate: bool,
    pub dlt_seconds: f64,
    pub fit_seconds: f64,
}

fn mean_abs_residual(x: &Mat6, rows: &[(&PluckerLine, &PluckerLine)]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter()
        .map(|(l, r)| epipolar_residual(x, l, r).abs())
        .sum::<f64>()
        / rows.len() as f64
}

fn pose_errors(
    gem: &GeneralizedEssentialMatrix,
    gt: Option<(&RotationMatrix, Vec3)>,
) -> (Option<f64>, Option<f64>) {
    match gt {
        Some((r, t)) => (
            Some(r.angle_to(gem.rotation())),
            Some(t.angle_to(&gem.translation())),
        ),
        None => (None, None),
    }
}

fn estimate_from_rows(
    rows: &[(&PluckerLine, &PluckerLine)],
    gt: Option<(&RotationMatrix, Vec3)>,
    config: &SolverConfig,
) -> PoseEstimate {
    let t0 = Instant::now();
    let dlt = dlt_from_rows(rows);
    let scaled = rescale_for_projection(&dlt.matrix);
    let dlt_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let (gem, _) = fit_both_signs(&scaled, config);
    let fit_seconds = t1.elapsed().as_secs_f64();

    let x = gem.matrix();
    let (rotation_error, translation_direction_error) = pose_errors(&gem, gt);
    PoseEstimate {
        gem,
        rotation_error,
        translation_direction_error,
        mean_abs_residual: mean_abs_residual(&x, rows),
        dlt_mean_abs_residual: mean_abs_residual(&scaled, rows),
        feasibility_violation: max_violation(&x),
        dlt_feasibility_violation: max_violation(&scaled),
        degenerate: dlt.degenerate,
        dlt_seconds,
        fit_seconds,
    }
}

/// Relative pose from paired projection lines: DLT, block-norm rescaling,
/// manifold projection, pose extraction. Errors are reported against the
/// set's stored ground truth.
pub fn relative_pose(corr: &CorrespondenceSet, config: &SolverConfig) -> PoseEstimate {
    relative_pose_from_pairs(&corr.pairs, Some((&corr.rotation, corr.translation)), config)
}

/// Same pipeline over raw pairs, e.g. loaded from a correspondence file;
/// pose errors are reported only when a ground truth is supplied.
pub fn relative_pose_from_pairs(
    pairs: &[(PluckerLine, PluckerLine)],
    gt: Option<(&RotationMatrix, Vec3)>,
    config: &SolverConfig,
) -> PoseEstimate {
    let rows: Vec<(&PluckerLine, &PluckerLine)> = pairs.iter().map(|(l, r)| (l, r)).collect();
    estimate_from_rows(&rows, gt, config)
}

/// Absolute pose from known world lines and per-line camera ray bundles;
/// rows `(world line, camera ray)` are accumulated over the double sum.
/// `bundles[i]` holds the rays observing `world_lines[i]`.
pub fn absolute_pose(
    world_lines: &[PluckerLine],
    bundles: &[Vec<PluckerLine>],
    gt: Option<(&RotationMatrix, Vec3)>,
    config: &SolverConfig,
) -> PoseEstimate {
    assert_eq!(
        world_lines.len(),
        bundles.len(),
        "one ray bundle per world line"
    );
    let mut rows = Vec::new();
    for (line, rays) in world_lines.iter().zip(bundles) {
        for ray in rays {
            rows.push((line, ray));
        }
    }
    estimate_from_rows(&rows, gt, config)
}

/// Estimation strategies for [`compare_strategies`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Constrained solve of the pose objective with tight (1e-9) constraint
    /// tolerance, via the quadratic penalty engine.
    Full,
    /// The same solve stopped at a loose (1e-1) constraint tolerance; with a
    /// feasible-enough warm start this is the rescaled linear estimate
    /// itself.
    WithoutConstraints,
    /// Loose estimate first, then projection onto the generalized essential
    /// set with the manifold solver.
    OurWc,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Full => "full",
            Strategy::WithoutConstraints => "wc",
            Strategy::OurWc => "our_wc",
        }
    }
}

/// One row of the strategy comparison table.
#[derive(Debug, Clone)]
pub struct StrategyRow {
    pub strategy: Strategy,
    pub mean_abs_residual: f64,
    pub rotation_error: Option<f64>,
    pub translation_direction_error: Option<f64>,
    pub feasibility_violation: f64,
    pub converged: bool,
    pub wall_time: f64,
}

fn pose_quadratic_config(constraint_tol: f64) -> PenaltyConfig {
    PenaltyConfig {
        initial_weight: 10.0,
        weight_growth: 10.0,
        outer_iters: 12,
        inner_max_iters: 600,
        inner_grad_tol: 1e-10,
        constraint_tol,
        snap_to_feasible: false,
    }
}

/// Runs the requested strategies on one correspondence set and reports
/// residual, pose errors, feasibility violation and wall time per strategy.
pub fn compare_strategies(
    corr: &CorrespondenceSet,
    strategies: &[Strategy],
    config: &SolverConfig,
) -> Vec<StrategyRow> {
    compare_strategies_on_pairs(
        &corr.pairs,
        Some((&corr.rotation, corr.translation)),
        strategies,
        config,
    )
}

/// [`compare_strategies`] over raw pairs with optional ground truth.
pub fn compare_strategies_on_pairs(
    pairs: &[(PluckerLine, PluckerLine)],
    gt: Option<(&RotationMatrix, Vec3)>,
    strategies: &[Strategy],
    config: &SolverConfig,
) -> Vec<StrategyRow> {
    let rows: Vec<(&PluckerLine, &PluckerLine)> = pairs.iter().map(|(l, r)| (l, r)).collect();

    let t_dlt = Instant::now();
    let dlt = dlt_from_rows(&rows);
    let mut wc_start = rescale_for_projection(&dlt.matrix);
    // The linear estimate's sign is a convention; a rotation block with
    // negative determinant means the opposite sign is the geometric one.
    if wc_start.block(0, 1).det() < 0.0 {
        wc_start = wc_start * -1.0;
    }
    let dlt_seconds = t_dlt.elapsed().as_secs_f64();

    let normal = normal_matrix(&rows);
    let smooth = |x: &Mat6| {
        let mut v = [0.0; 36];
        for a in 0..6 {
            for b in 0..6 {
                v[6 * a + b] = x[a][b];
            }
        }
        let sv = normal.mul_vec(&v);
        v.iter().zip(&sv).map(|(a, b)| a * b).sum()
    };
    let smooth_grad = |x: &Mat6| {
        let mut v = [0.0; 36];
        for a in 0..6 {
            for b in 0..6 {
                v[6 * a + b] = x[a][b];
            }
        }
        let sv = normal.mul_vec(&v);
        reshape_row_major(&sv) * 2.0
    };

    let mut out = Vec::with_capacity(strategies.len());
    for strategy in strategies {
        let row = match strategy {
            Strategy::WithoutConstraints => {
                let t0 = Instant::now();
                let outcome = penalty_minimize(
                    wc_start,
                    &smooth,
                    &smooth_grad,
                    &pose_quadratic_config(1e-1),
                );
                let wall = dlt_seconds + t0.elapsed().as_secs_f64();
                let x = outcome.x;
                // Approximate pose by factoring the (possibly infeasible)
                // blocks.
                let r = nearest_rotation(&x.block(0, 1));
                let t = optimal_t_hat(&x.block(0, 0), &r).axis();
                let gem = GeneralizedEssentialMatrix::new(r, t);
                let (re, te) = pose_errors(&gem, gt);
                StrategyRow {
                    strategy: *strategy,
                    mean_abs_residual: mean_abs_residual(&x, &rows),
                    rotation_error: re,
                    translation_direction_error: te,
                    feasibility_violation: max_violation(&x),
                    converged: outcome.converged,
                    wall_time: wall,
                }
            }
            Strategy::Full => {
                let t0 = Instant::now();
                let outcome = penalty_minimize(
                    wc_start,
                    &smooth,
                    &smooth_grad,
                    &pose_quadratic_config(1e-9),
                );
                let wall = dlt_seconds + t0.elapsed().as_secs_f64();
                let r = nearest_rotation(&outcome.x.block(0, 1));
                let t = optimal_t_hat(&outcome.x.block(0, 0), &r).axis();
                let gem = GeneralizedEssentialMatrix::new(r, t);
                let (re, te) = pose_errors(&gem, gt);
                StrategyRow {
                    strategy: *strategy,
                    mean_abs_residual: mean_abs_residual(&outcome.x, &rows),
                    rotation_error: re,
                    translation_direction_error: te,
                    feasibility_violation: max_violation(&outcome.x),
                    converged: outcome.converged,
                    wall_time: wall,
                }
            }
            Strategy::OurWc => {
                let t0 = Instant::now();
                let (gem, report) = fit_both_signs(&wc_start, config);
                let wall = dlt_seconds + t0.elapsed().as_secs_f64();
                let x = gem.matrix();
                let (re, te) = pose_errors(&gem, gt);
                StrategyRow {
                    strategy: *strategy,
                    mean_abs_residual: mean_abs_residual(&x, &rows),
                    rotation_error: re,
                    translation_direction_error: te,
                    feasibility_violation: max_violation(&x),
                    converged: report.converged,
                    wall_time: wall,
                }
            }
        };
        out.push(row);
    }
    out
}

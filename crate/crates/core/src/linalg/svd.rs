//! One-sided cyclic Jacobi SVD for 3x3 matrices.

use super::{Mat3, Vec3};

/// Maximum number of Jacobi sweeps; 3x3 inputs converge in a handful.
const MAX_SWEEPS: usize = 30;
/// Relative threshold on the off-diagonal mass of WᵀW.
const CONVERGENCE_TOL: f64 = 1e-14;
/// Singular values below `rank_tol = σ₁ · RANK_REL` get a synthesized left
/// singular vector so that U stays orthogonal for rank-deficient inputs.
const RANK_REL: f64 = 1e-13;

/// Singular value decomposition `m = u · diag(sigma) · vᵀ` with `u`, `v`
/// orthogonal and `sigma` sorted descending, all non-negative.
#[derive(Debug, Clone, Copy)]
pub struct Svd3 {
    pub u: Mat3,
    pub sigma: [f64; 3],
    pub v: Mat3,
}

/// Computes the SVD of a 3x3 matrix by one-sided cyclic Jacobi rotations with
/// a deterministic sweep order. Rank-deficient inputs are allowed; missing
/// left singular vectors are completed to an orthonormal basis.
pub fn svd3(m: &Mat3) -> Svd3 {
    // Columns of w are rotated until mutually orthogonal; v accumulates the
    // right rotations so that m = w · vᵀ throughout.
    let mut w = *m;
    let mut v = Mat3::identity();

    for _ in 0..MAX_SWEEPS {
        let mut converged = true;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let wp = w.col(p);
            let wq = w.col(q);
            let a = wp.norm_sq();
            let b = wq.norm_sq();
            let c = wp.dot(&wq);
            if c.abs() <= CONVERGENCE_TOL * (a * b).sqrt() {
                continue;
            }
            converged = false;
            let tau = (b - a) / (2.0 * c);
            let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
            let cs = 1.0 / (1.0 + t * t).sqrt();
            let sn = cs * t;
            for i in 0..3 {
                let wip = w[i][p];
                let wiq = w[i][q];
                w[i][p] = cs * wip - sn * wiq;
                w[i][q] = sn * wip + cs * wiq;
                let vip = v[i][p];
                let viq = v[i][q];
                v[i][p] = cs * vip - sn * viq;
                v[i][q] = sn * vip + cs * viq;
            }
        }
        if converged {
            break;
        }
    }

    let mut order = [0usize, 1, 2];
    let norms = [w.col(0).norm(), w.col(1).norm(), w.col(2).norm()];
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let sigma = [norms[order[0]], norms[order[1]], norms[order[2]]];
    let mut v_sorted = Mat3::zero();
    let mut w_sorted = Mat3::zero();
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..3 {
            v_sorted[i][dst] = v[i][src];
            w_sorted[i][dst] = w[i][src];
        }
    }

    let rank_tol = (sigma[0] * RANK_REL).max(f64::MIN_POSITIVE);
    let mut u = Mat3::zero();
    let mut cols: [Option<Vec3>; 3] = [None, None, None];
    for j in 0..3 {
        if sigma[j] > rank_tol {
            cols[j] = Some(w_sorted.col(j) * (1.0 / sigma[j]));
        }
    }
    let u0 = cols[0].unwrap_or(Vec3::new(1.0, 0.0, 0.0));
    let u1 = cols[1].unwrap_or_else(|| {
        // Any unit vector orthogonal to u0: orthogonalize the axis of the
        // smallest u0 component.
        let k = (0..3).min_by(|&a, &b| u0[a].abs().partial_cmp(&u0[b].abs()).unwrap()).unwrap();
        let mut e = Vec3::zero();
        e.0[k] = 1.0;
        let ortho = e - u0 * e.dot(&u0);
        ortho.normalized().expect("axis with smallest overlap is independent")
    });
    let u2 = cols[2].unwrap_or_else(|| u0.cross(&u1));
    for i in 0..3 {
        u[i][0] = u0[i];
        u[i][1] = u1[i];
        u[i][2] = u2[i];
    }

    Svd3 {
        u,
        sigma,
        v: v_sorted,
    }
}

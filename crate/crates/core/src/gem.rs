//! The generalized-essential data model: the 6x6 block form, the fit problem
//! with its cached submatrices and constants, the reduced objective on the
//! rotation group and its gradients, and Plücker lines with the generalized
//! epipolar residual.

use crate::error::{Error, Result};
use crate::linalg::{hat, Mat3, Mat6, RotationMatrix, SkewSymmetric3, Vec3, Vec6};

/// A generalized essential matrix, stored as its `(R, t)` factors and
/// rendered on demand as `[hat(t)·R, R; R, 0]`.
#[derive(Debug, Clone, Copy)]
pub struct GeneralizedEssentialMatrix {
    r: RotationMatrix,
    t: Vec3,
}

impl GeneralizedEssentialMatrix {
    pub fn new(r: RotationMatrix, t: Vec3) -> Self {
        GeneralizedEssentialMatrix { r, t }
    }

    pub fn rotation(&self) -> &RotationMatrix {
        &self.r
    }

    pub fn translation(&self) -> Vec3 {
        self.t
    }

    /// The stored factors; `assemble(R, t)` reproduces [`Self::matrix`].
    pub fn pose(&self) -> (RotationMatrix, Vec3) {
        (self.r, self.t)
    }

    /// Renders the 6x6 block form.
    pub fn matrix(&self) -> Mat6 {
        assemble(&self.r, self.t)
    }
}

/// Renders `[hat(t)·R, R; R, 0]`.
pub fn assemble(r: &RotationMatrix, t: Vec3) -> Mat6 {
    let rm = *r.matrix();
    let upper_left = hat(t) * rm;
    Mat6::from_blocks(&upper_left, &rm, &rm, &Mat3::zero())
}

/// Splits a 6x6 matrix into its four 3x3 blocks `(A11, A12, A21, A22)`.
pub fn decompose_blocks(a: &Mat6) -> (Mat3, Mat3, Mat3, Mat3) {
    (a.block(0, 0), a.block(0, 1), a.block(1, 0), a.block(1, 1))
}

/// The skew-symmetric part `(B - Bᵀ)/2`, the nearest skew-symmetric matrix
/// to `B` in the Frobenius norm.
pub fn nearest_skew(b: &Mat3) -> SkewSymmetric3 {
    let half = (*b - b.transpose()) * 0.5;
    SkewSymmetric3::from_axis(crate::linalg::skew_axis(&half))
}

/// For fixed `R`, the skew-symmetric matrix minimizing `‖M - S·R‖`:
/// the skew part of `M·Rᵀ`.
pub fn optimal_t_hat(m: &Mat3, r: &RotationMatrix) -> SkewSymmetric3 {
    nearest_skew(&(*m * r.matrix().transpose()))
}

/// A fitting instance: the target matrix `A` with cached blocks and the
/// constants of the expanded objectives. The caches are computed once at
/// construction and never mutated.
#[derive(Debug, Clone, Copy)]
pub struct FitProblem {
    a: Mat6,
    m: Mat3,
    m_t: Mat3,
    n: Mat3,
    n_t: Mat3,
    alpha: f64,
    beta: f64,
}

impl FitProblem {
    pub fn new(a: Mat6) -> Self {
        let (a11, a12, a21, a22) = decompose_blocks(&a);
        let m = a11;
        let n = (a12 + a21).transpose();
        let alpha = 6.0 + a12.frobenius_sq() + a21.frobenius_sq() + a22.frobenius_sq();
        let beta = alpha + 0.5 * m.frobenius_sq();
        FitProblem {
            a,
            m,
            m_t: m.transpose(),
            n,
            n_t: n.transpose(),
            alpha,
            beta,
        }
    }

    pub fn matrix(&self) -> &Mat6 {
        &self.a
    }

    /// The upper-left block `A11`.
    pub fn m(&self) -> &Mat3 {
        &self.m
    }

    /// `(A12 + A21)ᵀ`.
    pub fn n(&self) -> &Mat3 {
        &self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The full objective `‖assemble(R, t) - A‖²` in its expanded form
    /// `‖A11 - hat(t)·R‖² - 2·trace((A12+A21)ᵀ·R) + α`.
    pub fn objective_f(&self, r: &RotationMatrix, t: Vec3) -> f64 {
        let diff = self.m - hat(t) * *r.matrix();
        diff.frobenius_sq() - 2.0 * self.n.trace_product(r.matrix()) + self.alpha
    }

    /// The reduced objective with the optimal skew part substituted in:
    /// `g(R) = ½·trace((Mᵀ·R)²) - 2·trace(N·R) + β`.
    pub fn objective_g(&self, r: &RotationMatrix) -> f64 {
        self.g_at(r.matrix())
    }

    /// The reduced objective formula evaluated at an arbitrary 3x3 matrix.
    /// Agrees with [`Self::objective_g`] on rotations; used as the ambient
    /// function for finite-difference checks of the Euclidean gradient.
    pub fn g_at(&self, x: &Mat3) -> f64 {
        let w = self.m_t * *x;
        0.5 * w.trace_product(&w) - 2.0 * self.n.trace_product(x) + self.beta
    }

    /// Euclidean gradient of the reduced objective: `M·Xᵀ·M - 2·Nᵀ`.
    pub fn euclidean_grad(&self, x: &RotationMatrix) -> Mat3 {
        self.m * x.matrix().transpose() * self.m - self.n_t * 2.0
    }

    /// Riemannian gradient: `∇g(X) - X·∇g(X)ᵀ·X`. The product of the result
    /// with `Xᵀ` is skew-symmetric.
    pub fn riemannian_grad(&self, x: &RotationMatrix) -> Mat3 {
        let g = self.euclidean_grad(x);
        g - *x.matrix() * g.transpose() * *x.matrix()
    }
}

/// Plücker validation tolerance for construction.
const PLUCKER_TOL: f64 = 1e-9;

/// A 3D line in Plücker coordinates: unit direction `d` and moment `m` with
/// `dᵀm = 0`. The 6-vector ordering is `(d; m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluckerLine {
    d: Vec3,
    m: Vec3,
}

impl PluckerLine {
    /// Normalizes `(d, m)` by `|d|` and validates `dᵀm = 0` within `1e-9`.
    pub fn try_new(d: Vec3, m: Vec3) -> Result<Self> {
        let norm = d.norm();
        if norm < 1e-12 {
            return Err(Error::InvalidPlucker {
                reason: "zero direction".into(),
            });
        }
        let d = d * (1.0 / norm);
        let m = m * (1.0 / norm);
        let ortho = d.dot(&m).abs();
        if ortho > PLUCKER_TOL {
            return Err(Error::InvalidPlucker {
                reason: format!("direction/moment product {ortho:.3e} exceeds {PLUCKER_TOL:.0e}"),
            });
        }
        Ok(PluckerLine { d, m })
    }

    /// The line through `origin` with direction `dir`; the moment is
    /// `origin × d`, orthogonal to the direction by construction. Returns
    /// `None` when the direction is (near-)zero.
    pub fn from_origin_direction(origin: Vec3, dir: Vec3) -> Option<Self> {
        let d = dir.normalized()?;
        Some(PluckerLine {
            d,
            m: origin.cross(&d),
        })
    }

    /// The line through two points, `None` when they (nearly) coincide.
    pub fn through_points(p: Vec3, q: Vec3) -> Option<Self> {
        Self::from_origin_direction(p, q - p)
    }

    pub fn direction(&self) -> Vec3 {
        self.d
    }

    pub fn moment(&self) -> Vec3 {
        self.m
    }

    pub fn to_vec6(&self) -> Vec6 {
        Vec6::from_parts(self.d, self.m)
    }
}

/// The generalized epipolar residual `lLᵀ · X · lR` with the `(d; m)`
/// ordering; zero when the two lines meet under the motion encoded by `X`.
pub fn epipolar_residual(x: &Mat6, l_left: &PluckerLine, l_right: &PluckerLine) -> f64 {
    l_left.to_vec6().dot(&x.mul_vec(&l_right.to_vec6()))
}

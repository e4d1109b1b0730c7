//! Rotation matrices, skew-symmetric matrices and the maps between them.

use super::svd::svd3;
use super::{hat, Mat3, Vec3};
use crate::error::{Error, Result};
use std::ops::Mul;

/// Orthogonality and determinant tolerance for rotation validation.
const ROTATION_TOL: f64 = 1e-10;

/// An element of the rotation group: orthogonal with determinant +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    pub const fn identity() -> Self {
        RotationMatrix(Mat3::identity())
    }

    /// Validates `RᵀR = I` and `det R = 1`, both within `1e-10` (Frobenius
    /// norm for the orthogonality defect).
    pub fn try_new(m: Mat3) -> Result<Self> {
        let ortho_defect = (m.transpose() * m - Mat3::identity()).frobenius_norm();
        let det = m.det();
        if ortho_defect > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::NotRotation { ortho_defect, det });
        }
        Ok(RotationMatrix(m))
    }

    /// Wraps a matrix the caller guarantees to be a rotation (e.g. a product
    /// of rotations, or the output of a closed-form construction).
    pub fn from_mat3_unchecked(m: Mat3) -> Self {
        RotationMatrix(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_mat3(self) -> Mat3 {
        self.0
    }

    /// The inverse rotation.
    pub fn transpose(&self) -> RotationMatrix {
        RotationMatrix(self.0.transpose())
    }

    /// Rotation angle of `selfᵀ · other`, a metric on the rotation group.
    pub fn angle_to(&self, other: &RotationMatrix) -> f64 {
        let rel = self.0.transpose() * other.0;
        ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }

    /// Frobenius defect of `RᵀR - I`; useful for drift monitoring.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).frobenius_norm()
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for RotationMatrix {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        self.0 * v
    }
}

/// A skew-symmetric 3x3 matrix stored as its axis vector; the rendered matrix
/// satisfies `S = -Sᵀ` exactly by construction, with an exactly zero diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SkewSymmetric3 {
    axis: Vec3,
}

impl SkewSymmetric3 {
    pub const fn from_axis(axis: Vec3) -> Self {
        SkewSymmetric3 { axis }
    }

    /// Extracts the axis of a matrix that must be skew-symmetric within `1e-9`.
    pub fn from_matrix(m: &Mat3) -> Result<Self> {
        Ok(SkewSymmetric3 {
            axis: super::unhat(m)?,
        })
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    /// Renders the hat-map matrix.
    pub fn matrix(&self) -> Mat3 {
        hat(self.axis)
    }

    pub fn norm(&self) -> f64 {
        // The Frobenius norm of hat(v) is sqrt(2)·|v|.
        std::f64::consts::SQRT_2 * self.axis.norm()
    }
}

/// `expm(-mu · hat(z))` in closed form.
///
/// The exponent axis is `w = -mu·z` with angle `θ = |w|`; for `θ < 1e-8` a
/// four-term Taylor expansion replaces the sin/cos form to avoid dividing by
/// a near-zero angle. The result never leaves the rotation group.
pub fn rodrigues_exp(z: &SkewSymmetric3, mu: f64) -> RotationMatrix {
    let w = z.axis() * (-mu);
    let theta = w.norm();
    let m = if theta < 1e-8 {
        // I + W + W²/2 + W³/6 with W = hat(w); truncation error O(θ⁴).
        let w_hat = hat(w);
        let w2 = w_hat * w_hat;
        let w3 = w2 * w_hat;
        Mat3::identity() + w_hat + w2 * 0.5 + w3 * (1.0 / 6.0)
    } else {
        let u = hat(w * (1.0 / theta));
        Mat3::identity() + u * theta.sin() + (u * u) * (1.0 - theta.cos())
    };
    RotationMatrix::from_mat3_unchecked(m)
}

/// The rotation maximizing `trace(N · R)`: with `Nᵀ = U D Vᵀ`, the maximizer
/// is `U · diag(1, 1, det(UVᵀ)) · Vᵀ`. Near-equal singular values are handled
/// by whatever factors the deterministic Jacobi SVD produces; the objective
/// value does not depend on that choice.
pub fn procrustes_rotation(n: &Mat3) -> RotationMatrix {
    let f = svd3(&n.transpose());
    let sign = (f.u * f.v.transpose()).det().signum();
    let d = Mat3::diagonal([1.0, 1.0, sign]);
    RotationMatrix::from_mat3_unchecked(f.u * d * f.v.transpose())
}

/// The rotation nearest to `m` in the Frobenius norm (the orthogonal
/// Procrustes problem for `trace(mᵀ R)`).
pub fn nearest_rotation(m: &Mat3) -> RotationMatrix {
    procrustes_rotation(&m.transpose())
}

//! Closed-form projection of a 3x3 matrix onto the set of central essential
//! matrices (matrices of the form `hat(t)·R`, characterized by singular
//! values `(σ, σ, 0)`).

use crate::error::{Error, Result};
use crate::linalg::{hat, svd3, Mat3, RotationMatrix, Vec3};

/// Spectrum tolerance for accepting a matrix as essential.
const ESSENTIAL_TOL: f64 = 1e-8;

/// A central essential matrix, optionally carrying the `(t, R)` factors it
/// was assembled from.
#[derive(Debug, Clone, Copy)]
pub struct EssentialMatrix {
    e: Mat3,
    factors: Option<(Vec3, RotationMatrix)>,
}

impl EssentialMatrix {
    /// Validates the `(σ, σ, 0)` singular-value structure within `1e-8`,
    /// relative to the largest singular value.
    pub fn try_new(e: Mat3) -> Result<Self> {
        let f = svd3(&e);
        let scale = f.sigma[0].max(1.0);
        let defect = ((f.sigma[0] - f.sigma[1]).abs().max(f.sigma[2])) / scale;
        if defect > ESSENTIAL_TOL {
            return Err(Error::NotEssential { defect });
        }
        Ok(EssentialMatrix { e, factors: None })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.e
    }

    /// The `(t, R)` factors, when the matrix was assembled from them.
    pub fn factors(&self) -> Option<&(Vec3, RotationMatrix)> {
        self.factors.as_ref()
    }
}

/// Projects an arbitrary 3x3 matrix onto the essential set: with
/// `A = U diag(λ₁, λ₂, λ₃) Vᵀ`, the projection is `U diag(σ, σ, 0) Vᵀ`
/// where `σ = (λ₁ + λ₂) / 2`.
pub fn project_to_essential(a: &Mat3) -> EssentialMatrix {
    let f = svd3(a);
    let sigma = 0.5 * (f.sigma[0] + f.sigma[1]);
    let e = f.u * Mat3::diagonal([sigma, sigma, 0.0]) * f.v.transpose();
    EssentialMatrix { e, factors: None }
}

/// `E = hat(t)·R`, keeping the factors around.
pub fn assemble_essential(t: Vec3, r: &RotationMatrix) -> EssentialMatrix {
    EssentialMatrix {
        e: hat(t) * *r.matrix(),
        factors: Some((t, *r)),
    }
}

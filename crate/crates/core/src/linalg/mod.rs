//! Fixed-size dense linear algebra kernels: 3-vectors, 3x3 and 6x6 matrices,
//! skew/hat maps, Frobenius norms, Hadamard-trace products, the Rodrigues
//! exponential, a 3x3 Jacobi SVD and a small symmetric eigensolver.
//!
//! Everything here is a pure function over value types and safe to call from
//! any number of threads.

mod eigen;
mod rotation;
mod svd;

pub use eigen::{smallest_eigvec_sym, symmetric_eigen, SquareMatrix, SymmetricEigen};
pub use rotation::{
    nearest_rotation, procrustes_rotation, rodrigues_exp, RotationMatrix, SkewSymmetric3,
};
pub use svd::{svd3, Svd3};

use crate::error::{Error, Result};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// A real 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub const fn zero() -> Self {
        Vec3([0.0; 3])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3([
            self.0[1] * other.0[2] - self.0[2] * other.0[1],
            self.0[2] * other.0[0] - self.0[0] * other.0[2],
            self.0[0] * other.0[1] - self.0[1] * other.0[0],
        ])
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (near-)zero input.
    pub fn normalized(&self) -> Option<Vec3> {
        let n = self.norm();
        if n < 1e-300 {
            None
        } else {
            Some(*self * (1.0 / n))
        }
    }

    /// Angle in radians between `self` and `other`, both treated as directions.
    pub fn angle_to(&self, other: &Vec3) -> f64 {
        let denom = self.norm() * other.norm();
        if denom < 1e-300 {
            return 0.0;
        }
        (self.dot(other) / denom).clamp(-1.0, 1.0).acos()
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3([self[0] + rhs[0], self[1] + rhs[1], self[2] + rhs[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3([self[0] - rhs[0], self[1] - rhs[1], self[2] - rhs[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self[0], -self[1], -self[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self[0] * s, self[1] * s, self[2] * s])
    }
}

/// A real 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const fn zero() -> Self {
        Mat3([[0.0; 3]; 3])
    }

    pub const fn identity() -> Self {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub const fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        let mut m = Mat3::zero();
        for (i, v) in d.iter().enumerate() {
            m.0[i][i] = *v;
        }
        m
    }

    pub fn transpose(&self) -> Mat3 {
        let a = &self.0;
        Mat3([
            [a[0][0], a[1][0], a[2][0]],
            [a[0][1], a[1][1], a[2][1]],
            [a[0][2], a[1][2], a[2][2]],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    /// Sum of squared entries, i.e. trace(XᵀX).
    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for r in &self.0 {
            for v in r {
                s += v * v;
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// trace(self · other) without forming the product: the sum of the
    /// Hadamard product of `self` with `other`ᵀ.
    pub fn trace_product(&self, other: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[j][i];
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

impl Index<usize> for Mat3 {
    type Output = [f64; 3];
    fn index(&self, i: usize) -> &[f64; 3] {
        &self.0[i]
    }
}

impl IndexMut<usize> for Mat3 {
    fn index_mut(&mut self, i: usize) -> &mut [f64; 3] {
        &mut self.0[i]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[i][j] - rhs.0[i][j];
            }
        }
        out
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self * -1.0
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut out = self;
        for r in &mut out.0 {
            for v in r {
                *v *= s;
            }
        }
        out
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        Vec3(out)
    }
}

/// A real 6-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec6(pub [f64; 6]);

impl Vec6 {
    pub fn from_parts(head: Vec3, tail: Vec3) -> Self {
        Vec6([head[0], head[1], head[2], tail[0], tail[1], tail[2]])
    }

    pub fn dot(&self, other: &Vec6) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl Index<usize> for Vec6 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A real 6x6 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat6(pub [[f64; 6]; 6]);

impl Default for Mat6 {
    fn default() -> Self {
        Mat6::zero()
    }
}

impl Mat6 {
    pub const fn zero() -> Self {
        Mat6([[0.0; 6]; 6])
    }

    /// Tiles four 3x3 blocks into a 6x6 matrix.
    pub fn from_blocks(a11: &Mat3, a12: &Mat3, a21: &Mat3, a22: &Mat3) -> Self {
        let mut m = Mat6::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a11.0[i][j];
                m.0[i][j + 3] = a12.0[i][j];
                m.0[i + 3][j] = a21.0[i][j];
                m.0[i + 3][j + 3] = a22.0[i][j];
            }
        }
        m
    }

    /// The 3x3 block at block-row `bi` and block-column `bj` (each 0 or 1).
    pub fn block(&self, bi: usize, bj: usize) -> Mat3 {
        let mut b = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                b.0[i][j] = self.0[3 * bi + i][3 * bj + j];
            }
        }
        b
    }

    pub fn transpose(&self) -> Mat6 {
        let mut out = Mat6::zero();
        for i in 0..6 {
            for j in 0..6 {
                out.0[i][j] = self.0[j][i];
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for r in &self.0 {
            for v in r {
                s += v * v;
            }
        }
        s
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// trace(self · other) via the Hadamard product of `self` and `other`ᵀ.
    pub fn trace_product(&self, other: &Mat6) -> f64 {
        let mut s = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                s += self.0[i][j] * other.0[j][i];
            }
        }
        s
    }

    pub fn mul_vec(&self, v: &Vec6) -> Vec6 {
        let mut out = [0.0; 6];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v.0.iter()).map(|(a, b)| a * b).sum();
        }
        Vec6(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

impl Index<usize> for Mat6 {
    type Output = [f64; 6];
    fn index(&self, i: usize) -> &[f64; 6] {
        &self.0[i]
    }
}

impl IndexMut<usize> for Mat6 {
    fn index_mut(&mut self, i: usize) -> &mut [f64; 6] {
        &mut self.0[i]
    }
}

impl Add for Mat6 {
    type Output = Mat6;
    fn add(self, rhs: Mat6) -> Mat6 {
        let mut out = Mat6::zero();
        for i in 0..6 {
            for j in 0..6 {
                out.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat6 {
    type Output = Mat6;
    fn sub(self, rhs: Mat6) -> Mat6 {
        let mut out = Mat6::zero();
        for i in 0..6 {
            for j in 0..6 {
                out.0[i][j] = self.0[i][j] - rhs.0[i][j];
            }
        }
        out
    }
}

impl Mul<f64> for Mat6 {
    type Output = Mat6;
    fn mul(self, s: f64) -> Mat6 {
        let mut out = self;
        for r in &mut out.0 {
            for v in r {
                *v *= s;
            }
        }
        out
    }
}

/// The skew-symmetric matrix that linearizes the cross product:
/// `hat(v) * w == v.cross(w)` for all `w`.
pub fn hat(v: Vec3) -> Mat3 {
    Mat3([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])
}

/// Inverse of [`hat`] for matrices that are skew-symmetric within `1e-9`
/// (measured on the largest entry of the symmetric part). The returned axis
/// reproduces the skew part of the input exactly: `hat(unhat(s)?) == skew(s)`.
pub fn unhat(s: &Mat3) -> Result<Vec3> {
    let mut defect = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            defect = defect.max(0.5 * (s.0[i][j] + s.0[j][i]).abs());
        }
    }
    if defect > 1e-9 {
        return Err(Error::NotSkewSymmetric { defect });
    }
    Ok(skew_axis(s))
}

/// Axis of the skew part of `s`, with no validation. Callers guarantee the
/// input is skew-symmetric.
pub(crate) fn skew_axis(s: &Mat3) -> Vec3 {
    Vec3([
        0.5 * (s.0[2][1] - s.0[1][2]),
        0.5 * (s.0[0][2] - s.0[2][0]),
        0.5 * (s.0[1][0] - s.0[0][1]),
    ])
}

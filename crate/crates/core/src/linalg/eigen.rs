//! Cyclic Jacobi eigendecomposition for small symmetric matrices (intended
//! for n ≤ 36, the size of the DLT normal matrix).

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;
/// Relative threshold on the off-diagonal Frobenius mass.
const CONVERGENCE_TOL: f64 = 1e-14;
/// Asymmetry tolerance for accepting an input as symmetric.
const SYMMETRY_TOL: f64 = 1e-9;

/// A dense square matrix of runtime dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = SquareMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected_rows: n,
                    expected_cols: n,
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    /// Largest absolute entry of `self - selfᵀ`.
    pub fn asymmetry(&self) -> f64 {
        let mut d = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                d = d.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        d
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Full eigendecomposition of a symmetric matrix: `values` ascending,
/// `vectors[k]` the unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigendecomposition. Rejects inputs whose asymmetry exceeds
/// `1e-9`; the symmetric average is decomposed. Rotation order is row-major
/// over the strict upper triangle, so results are deterministic. Every
/// eigenvector has its first non-negligible component made positive.
pub fn symmetric_eigen(s: &SquareMatrix) -> Result<SymmetricEigen> {
    let defect = s.asymmetry();
    if defect > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { defect });
    }
    let n = s.n;
    let mut a = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, 0.5 * (s.get(i, j) + s.get(j, i)));
        }
    }
    let norm = a.frobenius_norm();
    let mut v = SquareMatrix::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }

    if norm > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * a.get(p, q) * a.get(p, q);
                }
            }
            if off.sqrt() <= CONVERGENCE_TOL * norm {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let tau = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let sn = c * t;

                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    a.set(p, p, app - t * apq);
                    a.set(q, q, aqq + t * apq);
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    for i in 0..n {
                        if i != p && i != q {
                            let aip = a.get(i, p);
                            let aiq = a.get(i, q);
                            a.set(i, p, c * aip - sn * aiq);
                            a.set(p, i, a.get(i, p));
                            a.set(i, q, sn * aip + c * aiq);
                            a.set(q, i, a.get(i, q));
                        }
                    }
                    for i in 0..n {
                        let vip = v.get(i, p);
                        let viq = v.get(i, q);
                        v.set(i, p, c * vip - sn * viq);
                        v.set(i, q, sn * vip + c * viq);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &k in &order {
        values.push(a.get(k, k));
        let mut col: Vec<f64> = (0..n).map(|i| v.get(i, k)).collect();
        fix_sign(&mut col);
        vectors.push(col);
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Unit eigenvector for the smallest eigenvalue of a symmetric matrix, with
/// the first non-negligible component made positive.
pub fn smallest_eigvec_sym(s: &SquareMatrix) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(s)?.vectors.into_iter().next().unwrap())
}

fn fix_sign(v: &mut [f64]) {
    let max_abs = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if max_abs == 0.0 {
        return;
    }
    for x in v.iter() {
        if x.abs() > 1e-9 * max_abs {
            if *x < 0.0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

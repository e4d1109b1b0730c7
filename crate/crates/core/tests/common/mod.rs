//! Shared test oracles, independent of the library's implementation paths.
#![allow(dead_code)] // each test target uses a subset

use gemfit::linalg::{Mat3, Mat6};
use rand::Rng;

/// Matrix exponential by scaling-and-squaring with a Taylor series; the
/// reference for the closed-form Rodrigues kernel.
pub fn expm_series(m: &Mat3) -> Mat3 {
    let norm = m.frobenius_norm();
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = *m * 2f64.powi(-s);
    let mut term = Mat3::identity();
    let mut sum = Mat3::identity();
    for k in 1..=30 {
        term = term * scaled * (1.0 / k as f64);
        sum = sum + term;
        if term.frobenius_norm() < 1e-300 {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..s {
        result = result * result;
    }
    result
}

/// trace(a · b) by forming the explicit product.
pub fn explicit_product_trace(a: &Mat6, b: &Mat6) -> f64 {
    let mut tr = 0.0;
    for i in 0..6 {
        let mut diag = 0.0;
        for k in 0..6 {
            diag += a[i][k] * b[k][i];
        }
        tr += diag;
    }
    tr
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rx = ranks(x);
    let ry = ranks(y);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    cov / (vx.sqrt() * vy.sqrt())
}

pub fn random_mat3<R: Rng>(rng: &mut R, scale: f64) -> Mat3 {
    let mut m = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = rng.random_range(-scale..scale);
        }
    }
    m
}

pub fn random_mat6<R: Rng>(rng: &mut R, scale: f64) -> Mat6 {
    let mut m = Mat6::zero();
    for i in 0..6 {
        for j in 0..6 {
            m[i][j] = rng.random_range(-scale..scale);
        }
    }
    m
}

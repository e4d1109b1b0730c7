//! Text file formats.
//!
//! Matrix files: a header line `rows cols`, then row-major whitespace-
//! separated decimal values written with 17 significant digits, so
//! write-then-read is value-exact for f64.
//!
//! Correspondence files: one pair per line as 12 values
//! `dLx dLy dLz mLx mLy mLz dRx dRy dRz mRx mRy mRz`. Lines are normalized
//! by the direction norm on read and rejected when `|dᵀm| > 1e-6` after
//! normalization; the accepted moment is re-orthogonalized against the
//! direction.

use crate::error::{Error, Result};
use crate::gem::PluckerLine;
use crate::linalg::{Mat3, Mat6, Vec3};
use std::fmt::Write as _;
use std::path::Path;

/// Direction/moment orthogonality gate for correspondence files.
const FILE_PLUCKER_TOL: f64 = 1e-6;

/// A parsed matrix file.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    /// Row-major values, `rows * cols` of them.
    pub data: Vec<f64>,
}

impl MatrixData {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

/// Serializes a row-major matrix with 17 significant digits per value.
pub fn format_matrix(rows: usize, cols: usize, data: &[f64]) -> String {
    assert_eq!(data.len(), rows * cols, "data length mismatch");
    let mut out = String::new();
    let _ = writeln!(out, "{rows} {cols}");
    for r in 0..rows {
        let mut line = String::new();
        for c in 0..cols {
            if c > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{:.16e}", data[r * cols + c]);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_matrix_file(path: &Path, rows: usize, cols: usize, data: &[f64]) -> Result<()> {
    std::fs::write(path, format_matrix(rows, cols, data))?;
    Ok(())
}

/// Parses the matrix format from a string; errors carry 1-based line numbers.
pub fn parse_matrix(text: &str) -> Result<MatrixData> {
    let mut lines = text.lines().enumerate();
    let (header_idx, header) = lines
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(Error::Parse {
            line: 1,
            message: "empty file".into(),
        })?;
    let mut parts = header.split_whitespace();
    let parse_dim = |tok: Option<&str>, line: usize| -> Result<usize> {
        let tok = tok.ok_or(Error::Parse {
            line,
            message: "header must be `rows cols`".into(),
        })?;
        tok.parse::<usize>().map_err(|_| Error::Parse {
            line,
            message: format!("bad dimension `{tok}`"),
        })
    };
    let rows = parse_dim(parts.next(), header_idx + 1)?;
    let cols = parse_dim(parts.next(), header_idx + 1)?;
    if parts.next().is_some() {
        return Err(Error::Parse {
            line: header_idx + 1,
            message: "header must contain exactly two integers".into(),
        });
    }

    let expected = rows * cols;
    let mut data = Vec::with_capacity(expected);
    let mut last_line = header_idx + 1;
    for (idx, line) in lines {
        last_line = idx + 1;
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("bad value `{tok}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("non-finite value `{tok}`"),
                });
            }
            if data.len() == expected {
                return Err(Error::ValueCount {
                    expected,
                    found: expected + 1,
                    line: idx + 1,
                });
            }
            data.push(v);
        }
    }
    if data.len() != expected {
        return Err(Error::ValueCount {
            expected,
            found: data.len(),
            line: last_line,
        });
    }
    Ok(MatrixData { rows, cols, data })
}

pub fn read_matrix_file(path: &Path) -> Result<MatrixData> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

fn expect_shape(m: &MatrixData, rows: usize, cols: usize) -> Result<()> {
    if m.rows != rows || m.cols != cols {
        return Err(Error::Dimension {
            expected_rows: rows,
            expected_cols: cols,
            rows: m.rows,
            cols: m.cols,
        });
    }
    Ok(())
}

pub fn read_mat6(path: &Path) -> Result<Mat6> {
    let m = read_matrix_file(path)?;
    expect_shape(&m, 6, 6)?;
    let mut out = Mat6::zero();
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] = m.get(i, j);
        }
    }
    Ok(out)
}

pub fn read_mat3(path: &Path) -> Result<Mat3> {
    let m = read_matrix_file(path)?;
    expect_shape(&m, 3, 3)?;
    let mut out = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m.get(i, j);
        }
    }
    Ok(out)
}

pub fn write_mat6(path: &Path, m: &Mat6) -> Result<()> {
    let data: Vec<f64> = m.0.iter().flatten().copied().collect();
    write_matrix_file(path, 6, 6, &data)
}

pub fn write_mat3(path: &Path, m: &Mat3) -> Result<()> {
    let data: Vec<f64> = m.0.iter().flatten().copied().collect();
    write_matrix_file(path, 3, 3, &data)
}

pub fn write_vec3(path: &Path, v: &Vec3) -> Result<()> {
    write_matrix_file(path, 3, 1, &v.0)
}

pub fn read_vec3(path: &Path) -> Result<Vec3> {
    let m = read_matrix_file(path)?;
    expect_shape(&m, 3, 1)?;
    Ok(Vec3::new(m.data[0], m.data[1], m.data[2]))
}

/// Serializes line pairs, 12 values per line, 17 significant digits.
pub fn format_correspondences(pairs: &[(PluckerLine, PluckerLine)]) -> String {
    let mut out = String::new();
    for (left, right) in pairs {
        let mut vals = Vec::with_capacity(12);
        for v in [
            left.direction(),
            left.moment(),
            right.direction(),
            right.moment(),
        ] {
            vals.extend_from_slice(&v.0);
        }
        let line: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_correspondences(path: &Path, pairs: &[(PluckerLine, PluckerLine)]) -> Result<()> {
    std::fs::write(path, format_correspondences(pairs))?;
    Ok(())
}

/// Parses a correspondence file; validates each side's Plücker constraint.
pub fn parse_correspondences(text: &str) -> Result<Vec<(PluckerLine, PluckerLine)>> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut vals = [0.0_f64; 12];
        let mut count = 0;
        for tok in trimmed.split_whitespace() {
            if count == 12 {
                count += 1;
                break;
            }
            vals[count] = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("bad value `{tok}`"),
            })?;
            if !vals[count].is_finite() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("non-finite value `{tok}`"),
                });
            }
            count += 1;
        }
        if count != 12 {
            return Err(Error::ValueCount {
                expected: 12,
                found: count,
                line: idx + 1,
            });
        }
        let left = plucker_from_file(&vals[0..6], idx + 1, "left")?;
        let right = plucker_from_file(&vals[6..12], idx + 1, "right")?;
        pairs.push((left, right));
    }
    Ok(pairs)
}

pub fn read_correspondences(path: &Path) -> Result<Vec<(PluckerLine, PluckerLine)>> {
    parse_correspondences(&std::fs::read_to_string(path)?)
}

fn plucker_from_file(vals: &[f64], line: usize, side: &str) -> Result<PluckerLine> {
    let d = Vec3::new(vals[0], vals[1], vals[2]);
    let m = Vec3::new(vals[3], vals[4], vals[5]);
    let norm = d.norm();
    if norm < 1e-12 {
        return Err(Error::InvalidPlucker {
            reason: format!("line {line} ({side}): zero direction"),
        });
    }
    let d = d * (1.0 / norm);
    let m = m * (1.0 / norm);
    let ortho = d.dot(&m);
    if ortho.abs() > FILE_PLUCKER_TOL {
        return Err(Error::InvalidPlucker {
            reason: format!(
                "line {line} ({side}): direction/moment product {:.3e} exceeds {FILE_PLUCKER_TOL:.0e}",
                ortho.abs()
            ),
        });
    }
    // Clean up the accepted tolerance so downstream invariants hold exactly.
    let m = m - d * ortho;
    PluckerLine::try_new(d, m).map_err(|e| Error::InvalidPlucker {
        reason: format!("line {line} ({side}): {e}"),
    })
}

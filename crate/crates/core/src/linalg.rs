//! Small dense matrices and a Jacobi eigensolver for symmetric parts.
//!
//! State spaces here are desk-scale (a handful of dimensions), so a plain
//! row-major buffer and cyclic Jacobi rotations are both simpler and easier
//! to audit than a linear-algebra dependency.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix must be square, row {row} has {got} entries but there are {rows} rows")]
    NotSquare { row: usize, got: usize, rows: usize },
    #[error("matrix must be nonempty")]
    Empty,
    #[error("matrix entries must be finite")]
    NonFinite,
}

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(MatrixError::NotSquare {
                    row: i,
                    got: row.len(),
                    rows: dim,
                });
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// `out = scale * (self @ x)`.
    pub fn matvec_scaled(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o = scale * acc;
        }
    }

    /// `out += scale * (self @ x)`.
    pub fn matvec_scaled_add(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o += scale * acc;
        }
    }

    /// The symmetric part `(A + A^T) / 2`.
    pub fn symmetric_part(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        out
    }

    /// Conjugation `Q^T A Q`; used by the rotation-invariance tests.
    pub fn conjugate(&self, q: &SquareMatrix) -> Self {
        assert_eq!(self.dim, q.dim);
        let n = self.dim;
        let mut aq = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.get(i, k) * q.get(k, j);
                }
                aq[i * n + j] = acc;
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += q.get(k, i) * aq[k * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        Self { dim: n, data: out }
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps run until the off-diagonal Frobenius norm falls below
/// `1e-12 * max(1, ||A||_F)`. Returns the eigenvalues in no particular
/// order.
pub fn symmetric_eigenvalues(m: &SquareMatrix) -> Vec<f64> {
    let n = m.dim;
    if n == 1 {
        return vec![m.get(0, 0)];
    }
    let mut a = m.clone();
    let frob: f64 = a.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = 1e-12 * frob.max(1.0);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/columns p and q
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    (0..n).map(|i| a.get(i, i)).collect()
}

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

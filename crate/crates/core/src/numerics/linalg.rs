//! Dense real matrices, partial-pivot LU and power iteration.
//!
//! The operators assembled by the three-body solver are a few hundred rows,
//! so a plain `Vec<f64>` store with exact partial pivoting is both simple and
//! robust; no sparse or blocked machinery is warranted.

use crate::error::{Error, Result};

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Partial-pivot LU factorization. Exact zero pivots are kept (the
    /// factorization is then singular) rather than reported as an error.
    pub fn lu(&self) -> LuFactors {
        let n = self.n;
        let mut lu = self.data.clone();
        let mut pivots = vec![0usize; n];
        let mut sign = 1i8;
        for col in 0..n {
            // Pivot search.
            let mut p = col;
            let mut best = lu[col * n + col].abs();
            for row in (col + 1)..n {
                let v = lu[row * n + col].abs();
                if v > best {
                    best = v;
                    p = row;
                }
            }
            pivots[col] = p;
            if p != col {
                for j in 0..n {
                    lu.swap(col * n + j, p * n + j);
                }
                sign = -sign;
            }
            let pivot = lu[col * n + col];
            if pivot == 0.0 {
                sign = 0;
                continue;
            }
            for row in (col + 1)..n {
                let factor = lu[row * n + col] / pivot;
                lu[row * n + col] = factor;
                if factor != 0.0 {
                    for j in (col + 1)..n {
                        lu[row * n + j] -= factor * lu[col * n + j];
                    }
                }
            }
        }
        LuFactors { n, lu, pivots, sign }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with row pivots.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    pivots: Vec<usize>,
    sign: i8,
}

impl LuFactors {
    /// Determinant as `(sign, ln |det|)`; `sign = 0` (with a `-inf`
    /// log-magnitude sentinel) means exactly singular at working precision.
    pub fn log_determinant(&self) -> (i8, f64) {
        if self.sign == 0 {
            return (0, f64::NEG_INFINITY);
        }
        let mut sign = self.sign;
        let mut log_abs = 0.0;
        for i in 0..self.n {
            let d = self.lu[i * self.n + i];
            if d == 0.0 {
                return (0, f64::NEG_INFINITY);
            }
            if d < 0.0 {
                sign = -sign;
            }
            log_abs += d.abs().ln();
        }
        (sign, log_abs)
    }

    /// Solves `A x = b` in place of a fresh vector.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        if self.sign == 0 {
            return Err(Error::NotConverged("singular LU solve".into()));
        }
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            x.swap(i, self.pivots[i]);
            let (head, tail) = x.split_at_mut(i + 1);
            let xi = head[i];
            if xi != 0.0 && i + 1 < n {
                let column = self.lu[(i + 1) * n + i..].iter().step_by(n);
                for (xr, factor) in tail.iter_mut().zip(column) {
                    *xr -= factor * xi;
                }
            }
        }
        for i in (0..n).rev() {
            let dot: f64 = self.lu[i * n + i + 1..(i + 1) * n]
                .iter()
                .zip(&x[i + 1..])
                .map(|(a, b)| a * b)
                .sum();
            x[i] = (x[i] - dot) / self.lu[i * n + i];
        }
        Ok(x)
    }
}

/// `(sign, ln |det|)` of a square matrix by partial-pivot LU.
pub fn lu_log_determinant(m: &DenseMatrix) -> (i8, f64) {
    m.lu().log_determinant()
}

/// Dominant eigenpair by power iteration with Rayleigh-quotient estimates.
///
/// Converges when `‖m v - λ v‖ <= tol ‖v‖`; fails with `MaxIterations` when
/// the dominant eigenvalue is not real and simple (for example a complex
/// conjugate pair, as in a rotation).
pub fn largest_eigenvalue(m: &DenseMatrix, tol: f64) -> Result<(f64, Vec<f64>)> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::BadRange("empty matrix".into()));
    }
    let max_iter = 20_000;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = m.mul_vec(&v);
        lambda = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        let resid: f64 = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - lambda * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // v is in the kernel; dominant eigenvalue 0 with v itself.
            return Ok((0.0, v));
        }
        if resid <= tol {
            return Ok((lambda, v));
        }
        v = w.into_iter().map(|x| x / norm).collect();
    }
    Err(Error::MaxIterations(format!(
        "power iteration stalled at lambda = {lambda}"
    )))
}

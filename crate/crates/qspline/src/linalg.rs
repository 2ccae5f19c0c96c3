//! Small dense linear algebra: just enough for tiny design matrices and the
//! 4x4 hermitian dilations the solver works with. Row-major storage.

use crate::scalar::{real, Scalar};
use crate::tol;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Mat {
            nrows,
            ncols,
            data: rows.concat(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "inner dimensions must agree");
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.ncols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.ncols, v.len(), "vector length must match columns");
        (0..self.nrows)
            .map(|i| (0..self.ncols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    /// Solves `A x = b` by LU factorization with partial pivoting.
    /// Returns `None` when a pivot falls below the singularity threshold.
    pub fn lu_solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(self.nrows, self.ncols, "lu_solve needs a square matrix");
        assert_eq!(self.nrows, b.len());
        let n = self.nrows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| {
                    a[(r, col)]
                        .abs()
                        .partial_cmp(&a[(s, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[(pivot_row, col)].abs() <= tol::singular::<T>() {
                return None;
            }
            if pivot_row != col {
                for j in 0..n {
                    let tmp = a[(col, j)];
                    a[(col, j)] = a[(pivot_row, j)];
                    a[(pivot_row, j)] = tmp;
                }
                x.swap(col, pivot_row);
            }
            for row in col + 1..n {
                let factor = a[(row, col)] / a[(col, col)];
                if factor == T::zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(row, j)] -= factor * v;
                }
                let v = x[col];
                x[row] -= factor * v;
            }
        }
        for row in (0..n).rev() {
            let mut acc = x[row];
            for j in row + 1..n {
                acc -= a[(row, j)] * x[j];
            }
            x[row] = acc / a[(row, row)];
        }
        Some(x)
    }

    /// Solves `A x = b` for symmetric positive definite `A` via Cholesky.
    /// Returns `None` when a pivot is not safely positive.
    pub fn cholesky_solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(self.nrows, self.ncols);
        assert_eq!(self.nrows, b.len());
        let n = self.nrows;
        let mut l = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if sum <= tol::singular::<T>() {
                        return None;
                    }
                    l[(i, j)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        // forward then backward substitution
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let v = y[k];
                y[i] -= l[(i, k)] * v;
            }
            y[i] /= l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = y[k];
                y[i] -= l[(k, i)] * v;
            }
            y[i] /= l[(i, i)];
        }
        Some(y)
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
    /// Returns eigenvalues in ascending order with matching eigenvector
    /// columns in the second element.
    pub fn jacobi_eigh(&self) -> (Vec<T>, Mat<T>) {
        assert_eq!(self.nrows, self.ncols, "jacobi_eigh needs a square matrix");
        let n = self.nrows;
        let mut a = self.clone();
        let mut q = Self::identity(n);
        let half = real::<T>(0.5);
        let stop = T::epsilon()
            * real::<T>(n as f64)
            * self
                .data
                .iter()
                .map(|v| v.abs())
                .fold(T::zero(), T::max)
                .max(T::one());
        for _sweep in 0..64 {
            let mut off = T::zero();
            for p in 0..n {
                for r in p + 1..n {
                    off = off.max(a[(p, r)].abs());
                }
            }
            if off <= stop {
                break;
            }
            for p in 0..n {
                for r in p + 1..n {
                    let apq = a[(p, r)];
                    if apq.abs() <= stop {
                        continue;
                    }
                    let theta = half * (real::<T>(2.0) * apq).atan2(a[(r, r)] - a[(p, p)]);
                    let (s, c) = theta.sin_cos();
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, r)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, r)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(r, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(r, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let qkp = q[(k, p)];
                        let qkq = q[(k, r)];
                        q[(k, p)] = c * qkp - s * qkq;
                        q[(k, r)] = s * qkp + c * qkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a[(i, i)]
                .partial_cmp(&a[(j, j)])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues: Vec<T> = order.iter().map(|&i| a[(i, i)]).collect();
        let mut vectors = Self::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                vectors[(row, new_col)] = q[(row, old_col)];
            }
        }
        (eigenvalues, vectors)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.ncols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.ncols + j]
    }
}

/// Direct solve of a 2x2 system. `None` when the determinant is negligible.
pub fn solve2<T: Scalar>(s: &[[T; 2]; 2], y: &[T; 2]) -> Option<[T; 2]> {
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    if det.abs() <= tol::singular::<T>() {
        return None;
    }
    Some([
        (s[1][1] * y[0] - s[0][1] * y[1]) / det,
        (s[0][0] * y[1] - s[1][0] * y[0]) / det,
    ])
}

pub fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

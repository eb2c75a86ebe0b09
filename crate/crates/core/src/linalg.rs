// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Minimal dense linear algebra for the small normal-equation systems
//! (at most a handful of unknowns) that the fitters produce.

use crate::scalar::Real;

/// Square symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// Builds `J^T J` and `J^T r` from a row-major Jacobian with `n` columns.
    pub fn normal_equations(jac: &[T], residuals: &[T], n: usize) -> (Self, Vec<T>) {
        let m = residuals.len();
        debug_assert_eq!(jac.len(), m * n);
        let mut a = Self::zeros(n);
        let mut g = vec![T::zero(); n];
        for k in 0..m {
            let row = &jac[k * n..(k + 1) * n];
            let rk = residuals[k];
            for i in 0..n {
                g[i] = g[i] + row[i] * rk;
                for j in i..n {
                    let v = a.get(i, j) + row[i] * row[j];
                    a.set(i, j, v);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                let v = a.get(j, i);
                a.set(i, j, v);
            }
        }
        (a, g)
    }

    /// Lower Cholesky factor, or `None` if the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<Vec<T>> {
        let n = self.n;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Some(l)
    }

    /// Solves `A x = b` for symmetric positive definite `A`.
    pub fn solve_spd(&self, b: &[T]) -> Option<Vec<T>> {
        let l = self.cholesky()?;
        Some(chol_solve(&l, self.n, b))
    }

    /// Inverse of a symmetric positive definite matrix.
    pub fn inverse_spd(&self) -> Option<Self> {
        let l = self.cholesky()?;
        let n = self.n;
        let mut inv = Self::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = chol_solve(&l, n, &e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        Some(inv)
    }
}

fn chol_solve<T: Real>(l: &[T], n: usize, b: &[T]) -> Vec<T> {
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s = s - l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Levenberg-Marquardt for small dense nonlinear least-squares problems.
//!
//! Minimizes `1/2 * sum r_i(x)^2`. The damping term is Marquardt's
//! `lambda * diag(J^T J)`, updated with Nielsen's rule. Problems should
//! expose parameters of order one (logs, offsets in natural units) since
//! the step tolerance is applied per component as `|dx_j| <= xtol (1 + |x_j|)`.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::Real;

pub trait LeastSquaresProblem<T: Real> {
    fn n_params(&self) -> usize;

    /// Residual vector, or `None` when `x` lies outside the feasible set.
    fn residuals(&self, x: &[T]) -> Option<Vec<T>>;

    /// Row-major Jacobian (`m` rows, `n_params` columns).
    fn jacobian(&self, x: &[T]) -> Option<Vec<T>> {
        numeric_jacobian(|p| self.residuals(p), x)
    }
}

/// Central-difference Jacobian.
pub fn numeric_jacobian<T: Real, F>(f: F, x: &[T]) -> Option<Vec<T>>
where
    F: Fn(&[T]) -> Option<Vec<T>>,
{
    let n = x.len();
    let r0 = f(x)?;
    let m = r0.len();
    let mut jac = vec![T::zero(); m * n];
    let step_base = T::epsilon().cbrt();
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = step_base * x[j].abs().max(T::one());
        xp[j] = x[j] + h;
        let rp = f(&xp)?;
        xp[j] = x[j] - h;
        let rm = f(&xp)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[i * n + j] = (rp[i] - rm[i]) / (h + h);
        }
    }
    Some(jac)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ZeroResidual,
    Gradient,
    Step,
}

#[derive(Debug, Clone)]
pub struct LmReport<T> {
    pub x: Vec<T>,
    pub residuals: Vec<T>,
    /// Row-major Jacobian at `x`.
    pub jacobian: Vec<T>,
    /// `1/2 * sum r^2`.
    pub cost: T,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy)]
pub struct LevenbergMarquardt<T> {
    pub max_iterations: usize,
    pub gtol: T,
    pub xtol: T,
}

impl<T: Real> Default for LevenbergMarquardt<T> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gtol: T::lit(1e-12),
            xtol: T::lit(1e-12),
        }
    }
}

fn half_sq_norm<T: Real>(r: &[T]) -> T {
    r.iter().map(|&v| v * v).sum::<T>() * T::lit(0.5)
}

impl<T: Real> LevenbergMarquardt<T> {
    pub fn minimize<P: LeastSquaresProblem<T> + ?Sized>(
        &self,
        problem: &P,
        x0: &[T],
    ) -> Result<LmReport<T>> {
        let n = problem.n_params();
        assert_eq!(x0.len(), n, "initial guess has wrong dimension");
        let mut x = x0.to_vec();
        let mut r = problem
            .residuals(&x)
            .ok_or_else(|| Error::Precondition("initial guess is infeasible".into()))?;
        let mut cost = half_sq_norm(&r);
        let mut lambda = T::lit(1e-3);
        let mut nu = T::lit(2.0);
        let last = |x: &[T]| x.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>();

        for iter in 1..=self.max_iterations {
            if cost == T::zero() {
                return self.finish(problem, x, r, cost, iter, Termination::ZeroResidual);
            }
            let jac = problem.jacobian(&x).ok_or_else(|| Error::NotConverged {
                iterations: iter,
                last: last(&x),
            })?;
            let (a, g) = SymMatrix::normal_equations(&jac, &r, n);
            let r_norm = (cost + cost).sqrt();
            let max_diag = (0..n).map(|j| a.get(j, j)).fold(T::zero(), T::max);
            let diag_floor = if max_diag > T::zero() {
                max_diag * T::epsilon()
            } else {
                T::one()
            };

            let grad_cos = (0..n)
                .filter(|&j| a.get(j, j) > T::zero())
                .map(|j| g[j].abs() / (a.get(j, j).sqrt() * r_norm))
                .fold(T::zero(), T::max);
            if grad_cos <= self.gtol {
                return self.finish(problem, x, r, cost, iter, Termination::Gradient);
            }

            let mut inner = 0;
            loop {
                inner += 1;
                if inner > 200 || !lambda.is_finite() {
                    return Err(Error::NotConverged {
                        iterations: iter,
                        last: last(&x),
                    });
                }
                let mut m = a.clone();
                for j in 0..n {
                    let d = a.get(j, j).max(diag_floor);
                    m.set(j, j, a.get(j, j) + lambda * d);
                }
                let neg_g: Vec<T> = g.iter().map(|&v| -v).collect();
                let Some(step) = m.solve_spd(&neg_g) else {
                    lambda = lambda * nu;
                    nu = nu + nu;
                    continue;
                };
                let small = step
                    .iter()
                    .zip(&x)
                    .all(|(&d, &xj)| d.abs() <= self.xtol * (T::one() + xj.abs()));
                let x_new: Vec<T> = x.iter().zip(&step).map(|(&a, &b)| a + b).collect();
                let trial = problem
                    .residuals(&x_new)
                    .filter(|rv| rv.iter().all(|v| v.is_finite()));
                match trial {
                    Some(r_new) if half_sq_norm(&r_new) < cost => {
                        let cost_new = half_sq_norm(&r_new);
                        // predicted reduction: 1/2 dx^T (lambda D dx - g)
                        let mut pred = T::zero();
                        for j in 0..n {
                            let d = a.get(j, j).max(diag_floor);
                            pred = pred + step[j] * (lambda * d * step[j] - g[j]);
                        }
                        pred = pred * T::lit(0.5);
                        let rho = if pred > T::zero() {
                            (cost - cost_new) / pred
                        } else {
                            T::one()
                        };
                        let t = rho + rho - T::one();
                        let factor = (T::one() - t * t * t).max(T::one() / T::lit(3.0));
                        lambda = (lambda * factor).max(T::lit(1e-30));
                        nu = T::lit(2.0);
                        x = x_new;
                        r = r_new;
                        cost = cost_new;
                        if small {
                            return self.finish(problem, x, r, cost, iter, Termination::Step);
                        }
                        break;
                    }
                    _ => {
                        if small {
                            return self.finish(problem, x, r, cost, iter, Termination::Step);
                        }
                        lambda = lambda * nu;
                        nu = nu + nu;
                    }
                }
            }
        }
        Err(Error::NotConverged {
            iterations: self.max_iterations,
            last: last(&x),
        })
    }

    fn finish<P: LeastSquaresProblem<T> + ?Sized>(
        &self,
        problem: &P,
        x: Vec<T>,
        residuals: Vec<T>,
        cost: T,
        iterations: usize,
        termination: Termination,
    ) -> Result<LmReport<T>> {
        let jacobian = problem.jacobian(&x).ok_or_else(|| Error::NotConverged {
            iterations,
            last: x.iter().map(|v| v.to_f64_lossy()).collect(),
        })?;
        Ok(LmReport {
            x,
            residuals,
            jacobian,
            cost,
            iterations,
            termination,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Himmelblau;

    impl LeastSquaresProblem<f64> for Himmelblau {
        fn n_params(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64]) -> Option<Vec<f64>> {
            let (x, y) = (p[0], p[1]);
            Some(vec![x * x + y - 11.0, x + y * y - 7.0])
        }
    }

    /// y = A exp(-k t) with an analytic Jacobian.
    struct Decay {
        t: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquaresProblem<f64> for Decay {
        fn n_params(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64]) -> Option<Vec<f64>> {
            Some(
                self.t
                    .iter()
                    .zip(&self.y)
                    .map(|(&t, &y)| p[0] * (-p[1] * t).exp() - y)
                    .collect(),
            )
        }
        fn jacobian(&self, p: &[f64]) -> Option<Vec<f64>> {
            let mut j = Vec::with_capacity(2 * self.t.len());
            for &t in &self.t {
                let e = (-p[1] * t).exp();
                j.push(e);
                j.push(-p[0] * t * e);
            }
            Some(j)
        }
    }

    #[test]
    fn himmelblau_reaches_a_root() {
        let rep = LevenbergMarquardt::default()
            .minimize(&Himmelblau, &[1.0, 1.0])
            .unwrap();
        assert!(rep.cost < 1e-20, "cost {}", rep.cost);
        assert!((rep.x[0] - 3.0).abs() < 1e-9 && (rep.x[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn exponential_decay_recovered() {
        let t: Vec<f64> = (0..40).map(|k| k as f64 * 0.1).collect();
        let y = t.iter().map(|&t| 2.5 * (-1.3 * t).exp()).collect();
        let prob = Decay { t, y };
        let rep = LevenbergMarquardt::default()
            .minimize(&prob, &[1.0, 0.5])
            .unwrap();
        assert!((rep.x[0] - 2.5).abs() < 1e-10);
        assert!((rep.x[1] - 1.3).abs() < 1e-10);
    }

    #[test]
    fn analytic_and_numeric_jacobians_agree() {
        let t: Vec<f64> = (0..10).map(|k| k as f64 * 0.3).collect();
        let y = vec![0.0; 10];
        let prob = Decay { t, y };
        let p = [1.7, 0.8];
        let ja = prob.jacobian(&p).unwrap();
        let jn = numeric_jacobian(|x| prob.residuals(x), &p).unwrap();
        for (a, b) in ja.iter().zip(&jn) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let lm = LevenbergMarquardt {
            max_iterations: 1,
            ..Default::default()
        };
        match lm.minimize(&Himmelblau, &[-0.3, 0.1]) {
            Err(Error::NotConverged { iterations, last }) => {
                assert_eq!(iterations, 1);
                assert_eq!(last.len(), 2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}

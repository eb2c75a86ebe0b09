// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Phase-vs-frequency fit of a circle centered at the origin:
//! `theta(f) = theta0 + 2 atan(2 Q_l (1 - f/f_r))`.

use crate::data::ComplexTrace;
use crate::error::{Error, Result};
use crate::lm::{LeastSquaresProblem, LevenbergMarquardt};
use crate::scalar::{unwrap_phase, wrap_angle, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit<T> {
    pub theta0: T,
    pub q_l: T,
    pub f_r: T,
}

/// Model phase about the circle center.
pub fn phase_model<T: Real>(theta0: T, q_l: T, f_r: T, f: T) -> T {
    let two = T::lit(2.0);
    theta0 + two * (two * q_l * (f_r - f) / f_r).atan()
}

struct PhaseProblem<'a, T> {
    freqs: &'a [T],
    phase: Vec<T>,
    q_l0: T,
    f_r0: T,
}

impl<T: Real> PhaseProblem<'_, T> {
    fn linewidth(&self) -> T {
        self.f_r0 / self.q_l0
    }

    fn physical(&self, u: &[T]) -> (T, T, T) {
        (
            u[0],
            self.q_l0 * u[1].exp(),
            self.f_r0 + u[2] * self.linewidth(),
        )
    }
}

impl<T: Real> LeastSquaresProblem<T> for PhaseProblem<'_, T> {
    fn n_params(&self) -> usize {
        3
    }

    fn residuals(&self, u: &[T]) -> Option<Vec<T>> {
        let (theta0, q_l, f_r) = self.physical(u);
        if !(f_r > T::zero()) || !q_l.is_finite() {
            return None;
        }
        Some(
            self.freqs
                .iter()
                .zip(&self.phase)
                .map(|(&f, &p)| wrap_angle(p - phase_model(theta0, q_l, f_r, f)))
                .collect(),
        )
    }

    fn jacobian(&self, u: &[T]) -> Option<Vec<T>> {
        let (_, q_l, f_r) = self.physical(u);
        let two = T::lit(2.0);
        let lw = self.linewidth();
        let mut jac = Vec::with_capacity(3 * self.freqs.len());
        for &f in self.freqs {
            let x = two * q_l * (f_r - f) / f_r;
            let dm_dx = two / (T::one() + x * x);
            jac.push(-T::one());
            jac.push(-dm_dx * x);
            jac.push(-dm_dx * two * q_l * f / (f_r * f_r) * lw);
        }
        Some(jac)
    }
}

/// Interpolated frequency at which `phase` first crosses `level` walking from
/// index `from` in direction `dir`.
fn crossing<T: Real>(freqs: &[T], phase: &[T], from: usize, level: T, dir: isize) -> Option<T> {
    let n = phase.len() as isize;
    let mut k = from as isize;
    while k + dir >= 0 && k + dir < n {
        let (i, j) = (k as usize, (k + dir) as usize);
        let (a, b) = (phase[i] - level, phase[j] - level);
        if a == T::zero() {
            return Some(freqs[i]);
        }
        if a * b <= T::zero() {
            let w = a / (a - b);
            return Some(freqs[i] + w * (freqs[j] - freqs[i]));
        }
        k += dir;
    }
    None
}

/// Initial `(theta0, q_l, f_r)` from the unwrapped phase.
fn initial_guess<T: Real>(freqs: &[T], phase: &[T]) -> (T, T, T) {
    let n = phase.len();
    let w = (n / 50).max(1);
    // steepest descent of the (lightly smoothed) phase marks the resonance
    let (mut k_res, mut best) = (n / 2, T::infinity());
    for k in w..n - w {
        let slope = (phase[k + w] - phase[k - w]) / (freqs[k + w] - freqs[k - w]);
        if slope < best {
            best = slope;
            k_res = k;
        }
    }
    let f_r = freqs[k_res];
    let lo = k_res.saturating_sub(w);
    let hi = (k_res + w).min(n - 1);
    let psi_res = phase[lo..=hi].iter().copied().sum::<T>() / T::from_usize(hi - lo + 1).unwrap();
    let half = T::FRAC_PI_2();
    let f_hi = crossing(freqs, phase, k_res, psi_res - half, 1);
    let f_lo = crossing(freqs, phase, k_res, psi_res + half, -1);
    let q_l = match (f_lo, f_hi) {
        (Some(a), Some(b)) if b > a => f_r / (b - a),
        _ => (-best * f_r / T::lit(4.0)).max(T::one()),
    };
    let two = T::lit(2.0);
    let (mut s, mut c) = (T::zero(), T::zero());
    for (&f, &p) in freqs.iter().zip(phase) {
        let d = p - two * (two * q_l * (f_r - f) / f_r).atan();
        s = s + d.sin();
        c = c + d.cos();
    }
    (s.atan2(c), q_l, f_r)
}

/// Fits resonance frequency, loaded Q and phase offset to samples whose
/// circle has been translated to the origin.
pub fn fit_phase<T: Real>(centered: &ComplexTrace<T>) -> Result<PhaseFit<T>> {
    centered.require_len(8, "phase fit")?;
    let raw: Vec<T> = centered.samples().iter().map(|s| s.arg()).collect();
    let unwrapped = unwrap_phase(&raw);
    let (lo, hi) = unwrapped
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &p| {
            (a.min(p), b.max(p))
        });
    if !(hi - lo > T::FRAC_PI_2()) {
        return Err(Error::DegenerateFit(format!(
            "phase excursion {} rad is too small to contain a resonance",
            hi - lo
        )));
    }
    let (theta0, q_l0, f_r0) = initial_guess(centered.freqs(), &unwrapped);
    let problem = PhaseProblem {
        freqs: centered.freqs(),
        phase: raw,
        q_l0,
        f_r0,
    };
    let report = LevenbergMarquardt::default()
        .minimize(&problem, &[theta0, T::zero(), T::zero()])
        .map_err(|e| match e {
            Error::NotConverged { iterations, last } => {
                let u: Vec<T> = last.iter().map(|&v| T::lit(v)).collect();
                let (t, q, f) = problem.physical(&u);
                Error::NotConverged {
                    iterations,
                    last: vec![t.to_f64_lossy(), q.to_f64_lossy(), f.to_f64_lossy()],
                }
            }
            other => other,
        })?;
    let (theta0, q_l, f_r) = problem.physical(&report.x);
    Ok(PhaseFit {
        theta0: wrap_angle(theta0),
        q_l,
        f_r,
    })
}

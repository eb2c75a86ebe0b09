// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Cable-delay estimation.

use num_complex::Complex;

use crate::data::ComplexTrace;
use crate::error::{Error, Result};
use crate::resonance::circle::fit_circle;
use crate::scalar::{unwrap_phase, Real};

/// Half-width of the refinement window, in units of `1/span`.
const WINDOW_HALF_WIDTH: f64 = 10.0;
/// Scan spacing inside the window, in units of `1/span`.
const SCAN_STEP: f64 = 0.05;
const GOLDEN_REL_TOL: f64 = 1e-6;

/// Removes a delay `tau` from the trace: `s * e^{+2 pi i f tau}`.
pub fn remove_delay<T: Real>(trace: &ComplexTrace<T>, tau: T) -> ComplexTrace<T> {
    let two_pi = T::PI() + T::PI();
    trace.map_samples(|f, s| s * Complex::from_polar(T::one(), two_pi * f * tau))
}

/// Slope of a least-squares line through `(x, y)`.
fn regression_slope<T: Real>(x: &[T], y: &[T]) -> T {
    let n = T::from_usize(x.len()).unwrap();
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
    }
    sxy / sxx
}

fn circle_residual<T: Real>(trace: &ComplexTrace<T>, tau: T) -> T {
    let two_pi = T::PI() + T::PI();
    let pts: Vec<Complex<T>> = trace
        .freqs()
        .iter()
        .zip(trace.samples())
        .map(|(&f, &s)| s * Complex::from_polar(T::one(), two_pi * f * tau))
        .collect();
    fit_circle(&pts).map_or(T::infinity(), |c| c.residual_rms)
}

/// Estimates the cable delay `tau` (seconds) of a trace.
///
/// A linear fit of the unwrapped phase gives a coarse value; the delay is then
/// refined by minimizing the circle-fit residual of the delay-corrected samples
/// over `tau0 +- 10/span`, first on a grid and then by golden-section search.
pub fn estimate_delay<T: Real>(trace: &ComplexTrace<T>) -> Result<T> {
    trace.require_len(16, "delay estimation")?;
    let phase: Vec<T> = trace.samples().iter().map(|s| s.arg()).collect();
    let unwrapped = unwrap_phase(&phase);
    if unwrapped.iter().any(|p| !p.is_finite()) {
        return Err(Error::Validation("non-finite phase in trace".into()));
    }
    let two_pi = T::PI() + T::PI();
    let tau0 = -regression_slope(trace.freqs(), &unwrapped) / two_pi;
    if !tau0.is_finite() {
        return Err(Error::Validation("phase regression is not finite".into()));
    }
    let span = trace.span();
    let step = T::lit(SCAN_STEP) / span;
    let n_steps = (2.0 * WINDOW_HALF_WIDTH / SCAN_STEP).round() as i64;
    let lo = tau0 - T::lit(WINDOW_HALF_WIDTH) / span;

    let (mut best_tau, mut best_res) = (tau0, circle_residual(trace, tau0));
    for k in 0..=n_steps {
        let tau = lo + step * T::from_i64(k).unwrap();
        let res = circle_residual(trace, tau);
        if res < best_res {
            best_res = res;
            best_tau = tau;
        }
    }
    if !best_res.is_finite() {
        return Err(Error::DegenerateGeometry(
            "no delay in the search window yields a circle".into(),
        ));
    }

    let floor = T::lit(1e-9) / span;
    let tau = golden_section(
        |t| circle_residual(trace, t),
        best_tau - step,
        best_tau + step,
        |a, b| (b - a).abs() <= (T::lit(GOLDEN_REL_TOL) * ((a + b) * T::lit(0.5)).abs()).max(floor),
    );
    Ok(if circle_residual(trace, tau) <= best_res {
        tau
    } else {
        best_tau
    })
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub(crate) fn golden_section<T: Real, F, S>(f: F, mut a: T, mut b: T, done: S) -> T
where
    F: Fn(T) -> T,
    S: Fn(T, T) -> bool,
{
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if done(a, b) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) * T::lit(0.5)
}

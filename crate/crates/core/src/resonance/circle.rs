// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Taubin algebraic circle fit.
//!
//! Minimizes `sum (|z - c|^2 - r^2)^2` normalized by the mean squared gradient
//! of the algebraic distance, which removes most of the small-arc bias of the
//! plain (Kasa) fit. The characteristic polynomial is solved by Newton's
//! method started at zero, following Chernov's formulation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ratio of the smaller to larger principal variance below which the points
/// are treated as collinear.
const COLLINEAR_RATIO: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit<T> {
    pub center: Complex<T>,
    pub radius: T,
    /// RMS of the geometric distances `|z - c| - r`.
    pub residual_rms: T,
}

pub fn fit_circle<T: Real>(points: &[Complex<T>]) -> Result<CircleFit<T>> {
    if points.len() < 3 {
        return Err(Error::Precondition(format!(
            "circle fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let n = T::from_usize(points.len()).unwrap();
    let mean = points.iter().copied().sum::<Complex<T>>() / n;

    let (mut mxx, mut myy, mut mxy, mut mxz, mut myz, mut mzz) = (
        T::zero(),
        T::zero(),
        T::zero(),
        T::zero(),
        T::zero(),
        T::zero(),
    );
    for p in points {
        let x = p.re - mean.re;
        let y = p.im - mean.im;
        let z = x * x + y * y;
        mxx = mxx + x * x;
        myy = myy + y * y;
        mxy = mxy + x * y;
        mxz = mxz + x * z;
        myz = myz + y * z;
        mzz = mzz + z * z;
    }
    mxx = mxx / n;
    myy = myy / n;
    mxy = mxy / n;
    mxz = mxz / n;
    myz = myz / n;
    mzz = mzz / n;

    let mz = mxx + myy;
    let cov_xy = mxx * myy - mxy * mxy;
    // principal variances of the point cloud
    let half_tr = mz * T::lit(0.5);
    let disc = (half_tr * half_tr - cov_xy).max(T::zero()).sqrt();
    let lam_max = half_tr + disc;
    let lam_min = (half_tr - disc).max(T::zero());
    if !(lam_max > T::zero()) || lam_min <= T::lit(COLLINEAR_RATIO) * lam_max {
        return Err(Error::DegenerateGeometry(
            "points are collinear or coincident".into(),
        ));
    }

    let var_z = mzz - mz * mz;
    let a3 = T::lit(4.0) * mz;
    let a2 = -T::lit(3.0) * mz * mz - mzz;
    let a1 = var_z * mz + T::lit(4.0) * cov_xy * mz - mxz * mxz - myz * myz;
    let a0 = mxz * (mxz * myy - myz * mxy) + myz * (myz * mxx - mxz * mxy) - var_z * cov_xy;
    let a22 = a2 + a2;
    let a33 = a3 + a3 + a3;

    let mut x = T::zero();
    let mut y = a0;
    for _ in 0..100 {
        let dy = a1 + x * (a22 + a33 * x);
        let x_new = x - y / dy;
        if x_new == x || !x_new.is_finite() {
            break;
        }
        let y_new = a0 + x_new * (a1 + x_new * (a2 + x_new * a3));
        if y_new.abs() >= y.abs() {
            break;
        }
        x = x_new;
        y = y_new;
    }

    let det = x * x - x * mz + cov_xy;
    if det == T::zero() || !det.is_finite() {
        return Err(Error::DegenerateGeometry("singular circle system".into()));
    }
    let two = T::lit(2.0);
    let cx = (mxz * (myy - x) - myz * mxy) / det / two;
    let cy = (myz * (mxx - x) - mxz * mxy) / det / two;
    let radius = (cx * cx + cy * cy + mz).sqrt();
    let center = Complex::new(cx + mean.re, cy + mean.im);
    if !(radius > T::zero())
        || !radius.is_finite()
        || !center.re.is_finite()
        || !center.im.is_finite()
    {
        return Err(Error::DegenerateGeometry(
            "circle fit produced no finite circle".into(),
        ));
    }
    let residual_rms = (points
        .iter()
        .map(|&p| {
            let d = (p - center).norm() - radius;
            d * d
        })
        .sum::<T>()
        / n)
        .sqrt();
    Ok(CircleFit {
        center,
        radius,
        residual_rms,
    })
}

// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Overlayer thickness from XPS oxide-to-metal intensity ratios using the
//! single-overlayer attenuation model
//! `d = lambda_ox sin(theta) ln(1 + R / R0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XpsConstants<T> {
    /// Photoelectron attenuation length in the oxide, nm.
    pub lambda_ox: T,
    /// `N_m lambda_m / (N_ox lambda_ox)`.
    pub r0: T,
    /// Take-off angle from the surface plane, rad.
    pub theta: T,
}

impl<T: Real> XpsConstants<T> {
    pub fn new(lambda_ox: T, r0: T, theta: T) -> Result<Self> {
        let c = Self {
            lambda_ox,
            r0,
            theta,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_ox > T::zero()) || !self.lambda_ox.is_finite() {
            return Err(Error::Validation(format!(
                "lambda_ox must be positive, got {}",
                self.lambda_ox
            )));
        }
        if !(self.r0 > T::zero()) || !self.r0.is_finite() {
            return Err(Error::Validation(format!(
                "r0 must be positive, got {}",
                self.r0
            )));
        }
        if !(self.theta > T::zero() && self.theta <= T::FRAC_PI_2()) {
            return Err(Error::Validation(format!(
                "theta must lie in (0, pi/2], got {}",
                self.theta
            )));
        }
        Ok(())
    }

    /// Al 2p defaults. Illustrative, not calibrated.
    pub fn al_2p() -> Self {
        Self {
            lambda_ox: T::lit(2.8),
            r0: T::lit(1.4),
            theta: T::FRAC_PI_2(),
        }
    }

    /// Ta 4f defaults. Illustrative, not calibrated.
    pub fn ta_4f() -> Self {
        Self {
            lambda_ox: T::lit(1.9),
            r0: T::lit(0.5),
            theta: T::FRAC_PI_2(),
        }
    }

    fn depth(&self) -> T {
        self.lambda_ox * self.theta.sin()
    }
}

/// Oxide thickness (nm) for an oxide-to-metal intensity ratio.
pub fn oxide_thickness<T: Real>(ratio: T, c: &XpsConstants<T>) -> Result<T> {
    if !(ratio >= T::zero()) || !ratio.is_finite() {
        return Err(Error::Validation(format!(
            "intensity ratio must be >= 0, got {ratio}"
        )));
    }
    Ok(c.depth() * (ratio / c.r0).ln_1p())
}

/// Oxide-to-metal intensity ratio produced by an oxide of thickness `d` nm.
pub fn oxide_ratio<T: Real>(d: T, c: &XpsConstants<T>) -> Result<T> {
    if !(d >= T::zero()) || !d.is_finite() {
        return Err(Error::Validation(format!(
            "thickness must be >= 0, got {d}"
        )));
    }
    Ok(c.r0 * (d / c.depth()).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_ratio_zero_thickness() {
        let c = XpsConstants::<f64>::ta_4f();
        assert_eq!(oxide_thickness(0.0, &c).unwrap(), 0.0);
        assert_eq!(oxide_ratio(0.0, &c).unwrap(), 0.0);
    }

    #[test]
    fn unit_log_gives_attenuation_length() {
        let c = XpsConstants::new(2.8f64, 1.0, std::f64::consts::FRAC_PI_2).unwrap();
        let d = oxide_thickness(std::f64::consts::E - 1.0, &c).unwrap();
        assert!((d - 2.8).abs() < 1e-14);
    }

    #[test]
    fn ln2_depth_gives_r0() {
        let c = XpsConstants::new(1.9f64, 0.7, 0.8).unwrap();
        let d = 1.9 * 0.8f64.sin() * std::f64::consts::LN_2;
        assert!((oxide_ratio(d, &c).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn reference_thickness_series_is_ordered() {
        for c in [XpsConstants::<f64>::al_2p(), XpsConstants::ta_4f()] {
            let r: Vec<f64> = [1.2, 2.15, 2.64, 2.79]
                .iter()
                .map(|&d| oxide_ratio(d, &c).unwrap())
                .collect();
            assert!(r.windows(2).all(|w| w[1] > w[0]));
            let back = oxide_thickness(oxide_ratio(1.2, &c).unwrap(), &c).unwrap();
            assert!((back - 1.2).abs() / 1.2 < 1e-12);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(XpsConstants::new(0.0f64, 1.0, 1.0).is_err());
        assert!(XpsConstants::new(1.0f64, 1.0, 1.7).is_err());
        let c = XpsConstants::<f64>::al_2p();
        assert!(oxide_thickness(-0.1, &c).is_err());
        assert!(oxide_ratio(-0.1, &c).is_err());
    }

    proptest! {
        #[test]
        fn increasing_and_concave(r in 0.0f64..50.0, dr in 1e-3f64..1.0) {
            let c = XpsConstants::<f64>::ta_4f();
            let d0 = oxide_thickness(r, &c).unwrap();
            let d1 = oxide_thickness(r + dr, &c).unwrap();
            let d2 = oxide_thickness(r + 2.0 * dr, &c).unwrap();
            prop_assert!(d1 > d0 && d2 > d1);
            prop_assert!(d2 - d1 <= d1 - d0 + 1e-15);
        }

        #[test]
        fn linear_in_depth(r in 0.0f64..20.0, lam in 0.5f64..5.0, k in 0.1f64..10.0, th in 0.2f64..1.5) {
            let c1 = XpsConstants::new(lam, 1.3, th).unwrap();
            let c2 = XpsConstants::new(lam * k, 1.3, th).unwrap();
            let d1 = oxide_thickness(r, &c1).unwrap();
            let d2 = oxide_thickness(r, &c2).unwrap();
            prop_assert!((d2 - k * d1).abs() <= 1e-12 * (1.0 + d2.abs()));
        }
    }
}

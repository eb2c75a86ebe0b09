// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default base temperature, K.
pub const BASE_TEMPERATURE: f64 = 0.010;

/// Parameters of the power-dependent loss model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TlsParams<T> {
    /// Filling factor times intrinsic TLS loss tangent, `F tan(delta)_TLS^0`.
    pub f_tls0: T,
    /// Critical photon number.
    pub n_c: T,
    /// Saturation exponent.
    pub beta: T,
    /// Power-independent loss.
    pub tan_other: T,
}

impl<T: Real> TlsParams<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.f_tls0 > T::zero()
            && self.f_tls0.is_finite()
            && self.n_c > T::zero()
            && self.n_c.is_finite()
            && self.beta >= T::zero()
            && self.beta <= T::one()
            && self.tan_other >= T::zero()
            && self.tan_other.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "TLS parameters out of range: {self:?}"
            )))
        }
    }
}

/// Where the saturation exponent applies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelVariant {
    /// `1 / (1 + n/n_c)^beta`
    #[default]
    ExponentOutside,
    /// `1 / (1 + (n/n_c)^beta)`
    ExponentInside,
}

/// Thermal saturation factor `tanh(h f_r / (2 k_B T))`.
pub fn thermal_factor<T: Real>(f_r: T, temperature: T) -> T {
    PhysicalConstants::<T>::half_photon_over_kt(f_r, temperature).tanh()
}

/// Power saturation factor multiplying the low-power TLS loss.
pub(crate) fn power_factor<T: Real>(n_mean: T, n_c: T, beta: T, variant: ModelVariant) -> T {
    match variant {
        ModelVariant::ExponentOutside => (-beta * (n_mean / n_c).ln_1p()).exp(),
        ModelVariant::ExponentInside => {
            if n_mean == T::zero() {
                T::one()
            } else {
                T::one() / (T::one() + (n_mean / n_c).powf(beta))
            }
        }
    }
}

/// Total loss tangent `1/Q_i` at mean photon number `n_mean`.
pub fn loss_model<T: Real>(p: &TlsParams<T>, n_mean: T, f_r: T, temperature: T) -> T {
    loss_model_variant(p, n_mean, f_r, temperature, ModelVariant::ExponentOutside)
}

pub fn loss_model_variant<T: Real>(
    p: &TlsParams<T>,
    n_mean: T,
    f_r: T,
    temperature: T,
    variant: ModelVariant,
) -> T {
    p.f_tls0 * thermal_factor(f_r, temperature) * power_factor(n_mean, p.n_c, p.beta, variant)
        + p.tan_other
}

/// Internal quality factor in the zero-power limit.
pub fn qi_low_photon<T: Real>(p: &TlsParams<T>, f_r: T, temperature: T) -> Result<T> {
    let loss = loss_model(p, T::zero(), f_r, temperature);
    if !(loss > T::zero()) {
        return Err(Error::InfiniteQ);
    }
    Ok(T::one() / loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(f_tls0: f64, n_c: f64, beta: f64, tan_other: f64) -> TlsParams<f64> {
        TlsParams {
            f_tls0,
            n_c,
            beta,
            tan_other,
        }
    }

    #[test]
    fn deposited_ta_low_power_loss() {
        let params = p(0.93e-6, 10.0, 0.14, 0.0);
        let loss = loss_model(&params, 0.0, 5.209e9, 0.010);
        assert!((loss - 0.93e-6).abs() / 0.93e-6 < 1e-10);
        let qi = 1.0 / loss;
        assert!((qi - 1.08e6).abs() / 1.08e6 < 5e-3, "{qi}");
    }

    #[test]
    fn critical_photon_number_halves_tls_term() {
        let params = p(1e-6, 37.0, 1.0, 2e-7);
        let at_nc = loss_model(&params, 37.0, 5e9, 0.01) - 2e-7;
        let at_zero = loss_model(&params, 0.0, 5e9, 0.01) - 2e-7;
        assert!((at_nc / at_zero - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thermal_factor_at_base_temperature() {
        let x = PhysicalConstants::<f64>::half_photon_over_kt(5.209e9, 0.010);
        assert!((x - 12.5).abs() < 1e-3);
        assert!(1.0 - thermal_factor(5.209e9, 0.010) < 1e-10);
    }

    #[test]
    fn low_photon_q_examples() {
        let qi = qi_low_photon(&p(0.89e-6, 10.0, 0.21, 5.59e-6), 5.174e9, 0.010).unwrap();
        assert!((qi - 1.543e5).abs() / 1.543e5 < 1e-3, "{qi}");
        let qi = qi_low_photon(&p(0.61e-6, 10.0, 0.15, 0.14e-6), 5.075e9, 0.010).unwrap();
        assert!((qi - 1.333e6).abs() / 1.333e6 < 1e-3, "{qi}");
    }

    #[test]
    fn low_photon_q_warm() {
        let params = p(1e-6, 10.0, 0.2, 0.0);
        let qi = qi_low_photon(&params, 5e9, 1.0).unwrap();
        let x = 6.62607015e-34f64 * 5e9 / (2.0 * 1.380649e-23 * 1.0);
        let oracle = 1.0 / (1e-6 * x.tanh());
        assert!((qi - oracle).abs() / oracle < 1e-12);
        assert!(qi > 8e6 && qi < 9e6);
    }

    #[test]
    fn zero_loss_is_infinite_q() {
        let params = TlsParams {
            f_tls0: 0.0,
            n_c: 1.0,
            beta: 0.1,
            tan_other: 0.0,
        };
        assert!(matches!(
            qi_low_photon(&params, 5e9, 0.01),
            Err(Error::InfiniteQ)
        ));
    }

    #[test]
    fn exponent_inside_variant() {
        let params = p(1e-6, 10.0, 0.5, 0.0);
        let l = loss_model_variant(&params, 40.0, 5e9, 0.01, ModelVariant::ExponentInside);
        let t = thermal_factor(5e9, 0.01);
        assert!((l - 1e-6 * t / (1.0 + 2.0)).abs() < 1e-20);
    }

    proptest! {
        #[test]
        fn monotone_in_photon_number(
            f in 1e-7f64..1e-5, nc in 1e-2f64..1e6, beta in 0.0f64..1.0, o in 0.0f64..1e-5,
            n1 in 0.0f64..1e8, dn in 0.0f64..1e8,
        ) {
            let params = p(f, nc, beta, o);
            let a = loss_model(&params, n1, 5e9, 0.01);
            let b = loss_model(&params, n1 + dn, 5e9, 0.01);
            prop_assert!(b <= a);
            if beta > 1e-3 && dn > 1e-3 * (n1 + nc) {
                prop_assert!(b < a);
            }
        }

        #[test]
        fn zero_power_tls_term(f in 1e-7f64..1e-5, o in 0.0f64..1e-5, fr in 3e9f64..8e9, t in 1e-3f64..1.0) {
            let params = p(f, 10.0, 0.3, o);
            let lhs = loss_model(&params, 0.0, fr, t) - o;
            prop_assert!((lhs - f * thermal_factor(fr, t)).abs() <= 4.0 * f64::EPSILON * (f + o));
        }

        #[test]
        fn thermal_factor_rises_as_temperature_falls(t in 1e-3f64..2.0, k in 1.01f64..3.0) {
            let hot = thermal_factor(5e9, t * k);
            let cold = thermal_factor(5e9, t);
            prop_assert!(cold >= hot && cold <= 1.0);
        }
    }
}

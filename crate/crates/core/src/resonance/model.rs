// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters of the notch-type transmission model
///
/// `S21(f) = a e^{i alpha} e^{-2 pi i f tau} [1 - (Q_l/|Q_c|) e^{i phi} / (1 + 2i Q_l (f/f_r - 1))]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotchParams<T> {
    pub f_r: T,
    pub q_l: T,
    pub abs_qc: T,
    pub phi: T,
    pub a: T,
    pub alpha: T,
    pub tau: T,
}

impl<T: Real> NotchParams<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T, name: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        pos(self.f_r, "f_r")?;
        pos(self.q_l, "q_l")?;
        pos(self.abs_qc, "abs_qc")?;
        if !(self.a >= T::zero()) || !self.a.is_finite() {
            return Err(Error::Validation(format!(
                "a must be non-negative, got {}",
                self.a
            )));
        }
        if !(self.phi.abs() < T::FRAC_PI_2()) {
            return Err(Error::Validation(format!(
                "|phi| must be below pi/2, got {}",
                self.phi
            )));
        }
        if !self.alpha.is_finite() || !self.tau.is_finite() {
            return Err(Error::Validation("alpha and tau must be finite".into()));
        }
        internal_q(self.q_l, self.abs_qc, self.phi).map(|_| ())
    }

    /// Internal quality factor implied by these parameters.
    pub fn q_i(&self) -> Result<T> {
        internal_q(self.q_l, self.abs_qc, self.phi)
    }
}

/// Resonator bracket `1 - (Q_l/|Q_c|) e^{i phi} / (1 + 2i Q_l (f - f_r)/f_r)`.
#[inline]
pub(crate) fn resonator_term<T: Real>(p: &NotchParams<T>, f: T) -> Complex<T> {
    let x = (f - p.f_r) / p.f_r;
    let denom = Complex::new(T::one(), (p.q_l + p.q_l) * x);
    let coupling = Complex::from_polar(p.q_l / p.abs_qc, p.phi);
    Complex::new(T::one(), T::zero()) - coupling / denom
}

/// Environment factor `a e^{i alpha} e^{-2 pi i f tau}`.
#[inline]
pub(crate) fn environment<T: Real>(p: &NotchParams<T>, f: T) -> Complex<T> {
    let two_pi = T::PI() + T::PI();
    Complex::from_polar(p.a, p.alpha - two_pi * f * p.tau)
}

/// Complex transmission of a notch resonator at frequency `f`.
pub fn s21_model<T: Real>(p: &NotchParams<T>, f: T) -> Complex<T> {
    environment(p, f) * resonator_term(p, f)
}

/// `Q_i = 1 / (1/Q_l - cos(phi)/|Q_c|)`.
pub fn internal_q<T: Real>(q_l: T, abs_qc: T, phi: T) -> Result<T> {
    if !(q_l > T::zero()) || !(abs_qc > T::zero()) {
        return Err(Error::Unphysical(format!(
            "quality factors must be positive (q_l={q_l}, abs_qc={abs_qc})"
        )));
    }
    if !(phi.abs() < T::FRAC_PI_2()) {
        return Err(Error::Unphysical(format!(
            "|phi| must be below pi/2, got {phi}"
        )));
    }
    let inv = T::one() / q_l - phi.cos() / abs_qc;
    if !(inv > T::zero()) {
        return Err(Error::Unphysical(format!(
            "1/q_l - cos(phi)/abs_qc = {inv} is not positive"
        )));
    }
    Ok(T::one() / inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonance::circle::fit_circle;

    fn base() -> NotchParams<f64> {
        NotchParams {
            f_r: 5.209e9,
            q_l: 7.33e5,
            abs_qc: 2.28e6,
            phi: 0.1,
            a: 0.9,
            alpha: 0.5,
            tau: 40e-9,
        }
    }

    #[test]
    fn far_off_resonance_is_environment_only() {
        let p = base();
        let f = 1000.0 * p.f_r;
        let s = s21_model(&p, f);
        let env = environment(&p, f);
        assert!((s - env).norm() / env.norm() < 2e-3);
    }

    #[test]
    fn on_resonance_depth() {
        let p = NotchParams {
            phi: 0.0,
            tau: 0.0,
            a: 1.0,
            alpha: 0.0,
            ..base()
        };
        let s = s21_model(&p, p.f_r);
        assert!((s.re - (1.0 - p.q_l / p.abs_qc)).abs() < 1e-15);
        assert_eq!(s.im, 0.0);
    }

    #[test]
    fn sweep_traces_the_expected_circle() {
        let p = NotchParams {
            tau: 0.0,
            a: 1.0,
            alpha: 0.0,
            ..base()
        };
        let half = 5.0 * p.f_r / p.q_l;
        let pts: Vec<Complex<f64>> = (0..1001)
            .map(|k| p.f_r - half + 2.0 * half * k as f64 / 1000.0)
            .map(|f| s21_model(&p, f))
            .collect();
        let fit = fit_circle(&pts).unwrap();
        let r = p.q_l / (2.0 * p.abs_qc);
        let c = Complex::new(1.0, 0.0) - Complex::from_polar(r, p.phi);
        assert!(fit.residual_rms < 1e-10);
        assert!((fit.radius - r).abs() < 1e-10);
        assert!((fit.center - c).norm() < 1e-10);
    }

    #[test]
    fn internal_q_examples() {
        assert!((internal_q(7.0e5f64, 1e30, 0.0).unwrap() - 7.0e5).abs() < 1e-6);
        let q_l = 1.0f64 / (1.0 / 1.08e6 + 1.0 / 2.28e6);
        let qi = internal_q(q_l, 2.28e6, 0.0).unwrap();
        assert!((qi - 1.08e6).abs() / 1.08e6 < 1e-12);
        let qi = internal_q(7.329e5f64, 2.28e6, 0.0).unwrap();
        assert!((qi - 1.08e6).abs() / 1.08e6 < 1e-3);
        let qi = internal_q(1e6, 1e6, std::f64::consts::FRAC_PI_3).unwrap();
        assert!((qi - 2e6).abs() / 2e6 < 1e-12);
    }

    #[test]
    fn internal_q_rejects_unphysical() {
        assert!(matches!(
            internal_q(1e6, 5e5, 0.0),
            Err(Error::Unphysical(_))
        ));
        assert!(internal_q(-1.0, 5e5, 0.0).is_err());
        assert!(internal_q(1e5, 5e5, 2.0).is_err());
    }

    #[test]
    fn internal_q_monotone() {
        let mut prev = 0.0;
        for k in 0..50 {
            let qc = 1.2e6 * 1.1f64.powi(k);
            let qi = internal_q(1e6, qc, 0.3).unwrap();
            assert!(qi < prev || k == 0);
            prev = qi;
        }
        // larger q_l (smaller 1/q_l) gives larger q_i
        let mut prev = 0.0;
        for k in 0..50 {
            let ql = 1e5 * 1.05f64.powi(k);
            let qi = internal_q(ql, 1e8, 0.3).unwrap();
            assert!(qi > prev);
            prev = qi;
        }
    }

    #[test]
    fn f32_model_agrees_with_f64() {
        let p = base();
        let p32 = NotchParams {
            f_r: p.f_r as f32,
            q_l: p.q_l as f32,
            abs_qc: p.abs_qc as f32,
            phi: p.phi as f32,
            a: p.a as f32,
            alpha: p.alpha as f32,
            tau: 0.0,
        };
        let p64 = NotchParams { tau: 0.0, ..p };
        let s32 = s21_model(&p32, p32.f_r);
        let s64 = s21_model(&p64, p64.f_r);
        assert!((s32.re as f64 - s64.re).abs() < 1e-5);
        assert!((s32.im as f64 - s64.im).abs() < 1e-5);
    }
}

// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Staged circle-fit extraction of notch resonator parameters, with an
//! optional joint least-squares refinement of all seven model parameters.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::data::ComplexTrace;
use crate::error::{Error, Result};
use crate::lm::{LeastSquaresProblem, LevenbergMarquardt};
use crate::resonance::circle::fit_circle;
use crate::resonance::delay::{estimate_delay, remove_delay};
use crate::resonance::model::{internal_q, s21_model, NotchParams};
use crate::resonance::phase::fit_phase;
use crate::scalar::{wrap_angle, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchFit<T> {
    pub params: NotchParams<T>,
    pub q_i: T,
    /// RMS of `|data - model| / a` over the trace.
    pub residual_rms: T,
    /// Resonance circle in the environment-normalized frame.
    pub circle_center: Complex<T>,
    pub circle_radius: T,
}

/// Wire form of [`NotchFit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotchFitRecord {
    pub f_r_hz: f64,
    pub q_l: f64,
    pub abs_qc: f64,
    pub phi_rad: f64,
    pub a: f64,
    pub alpha_rad: f64,
    pub tau_s: f64,
    pub q_i: f64,
    pub residual_rms: f64,
}

impl<T: Real> NotchFit<T> {
    pub fn record(&self) -> NotchFitRecord {
        let p = &self.params;
        NotchFitRecord {
            f_r_hz: p.f_r.to_f64_lossy(),
            q_l: p.q_l.to_f64_lossy(),
            abs_qc: p.abs_qc.to_f64_lossy(),
            phi_rad: p.phi.to_f64_lossy(),
            a: p.a.to_f64_lossy(),
            alpha_rad: p.alpha.to_f64_lossy(),
            tau_s: p.tau.to_f64_lossy(),
            q_i: self.q_i.to_f64_lossy(),
            residual_rms: self.residual_rms.to_f64_lossy(),
        }
    }
}

impl<T: Real> Serialize for NotchFit<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.record().serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Run the joint seven-parameter refinement after the staged fit.
    pub refine: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { refine: true }
    }
}

/// Result of [`extract_with`]: the reported fit plus the staged values it
/// was seeded from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extraction<T> {
    pub fit: NotchFit<T>,
    pub staged: NotchFit<T>,
    pub refined: bool,
}

fn residual_rms<T: Real>(trace: &ComplexTrace<T>, p: &NotchParams<T>) -> T {
    let n = T::from_usize(trace.len()).unwrap();
    let ss = trace
        .freqs()
        .iter()
        .zip(trace.samples())
        .map(|(&f, &s)| (s - s21_model(p, f)).norm_sqr())
        .sum::<T>();
    (ss / n).sqrt() / p.a
}

fn finish<T: Real>(trace: &ComplexTrace<T>, params: NotchParams<T>) -> Result<NotchFit<T>> {
    let q_i = internal_q(params.q_l, params.abs_qc, params.phi).map_err(|e| {
        Error::InconsistentGeometry(format!("extracted parameters give no valid Q_i: {e}"))
    })?;
    let r0 = params.q_l / (params.abs_qc + params.abs_qc);
    Ok(NotchFit {
        params,
        q_i,
        residual_rms: residual_rms(trace, &params),
        circle_center: Complex::new(T::one(), T::zero()) - Complex::from_polar(r0, params.phi),
        circle_radius: r0,
    })
}

/// Extracts notch parameters and `Q_i` from a (background-calibrated) trace.
pub fn extract<T: Real>(trace: &ComplexTrace<T>) -> Result<NotchFit<T>> {
    extract_with(trace, ExtractOptions::default()).map(|e| e.fit)
}

pub fn extract_with<T: Real>(
    trace: &ComplexTrace<T>,
    opts: ExtractOptions,
) -> Result<Extraction<T>> {
    trace.require_len(16, "resonance extraction")?;
    let n = trace.len();
    let k_min = trace
        .samples()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(k, _)| k)
        .unwrap();
    if k_min == 0 || k_min == n - 1 {
        return Err(Error::Precondition(
            "transmission minimum lies on the edge of the frequency window".into(),
        ));
    }

    let tau = estimate_delay(trace)?;
    let corrected = remove_delay(trace, tau);
    let circle = fit_circle(corrected.samples())?;
    let centered = corrected.map_samples(|_, s| s - circle.center);
    let phase = fit_phase(&centered)?;

    // off-resonant point: diametrically opposite the resonance point
    let off = circle.center + Complex::from_polar(circle.radius, phase.theta0 + T::PI());
    let (a, alpha) = (off.norm(), off.arg());
    if !(a > T::zero()) {
        return Err(Error::InconsistentGeometry(
            "off-resonant point at the origin".into(),
        ));
    }
    let normalized: Vec<Complex<T>> = corrected.samples().iter().map(|&s| s / off).collect();
    let norm_circle = fit_circle(&normalized)?;
    let one = Complex::new(T::one(), T::zero());
    let phi = (one - norm_circle.center).arg();
    if !(phi.abs() < T::FRAC_PI_2()) {
        return Err(Error::InconsistentGeometry(format!(
            "impedance-mismatch angle {phi} rad is outside (-pi/2, pi/2)"
        )));
    }
    let abs_qc = phase.q_l / (norm_circle.radius + norm_circle.radius);
    let staged_params = NotchParams {
        f_r: phase.f_r,
        q_l: phase.q_l,
        abs_qc,
        phi,
        a,
        alpha,
        tau,
    };
    let mut staged = finish(trace, staged_params)?;
    staged.circle_center = norm_circle.center;
    staged.circle_radius = norm_circle.radius;

    if !opts.refine {
        return Ok(Extraction {
            fit: staged,
            staged,
            refined: false,
        });
    }
    let refined = refine(trace, &staged_params)?;
    Ok(Extraction {
        fit: finish(trace, refined)?,
        staged,
        refined: true,
    })
}

/// Joint complex least-squares fit of all seven parameters.
///
/// Internal coordinates are of order one: resonance offset in linewidths,
/// log quality factors and amplitude, and the delay as phase accumulated
/// across the span. The phase offset is referenced to the seed resonance
/// frequency so it decouples from the delay.
struct JointProblem<'a, T> {
    trace: &'a ComplexTrace<T>,
    seed: NotchParams<T>,
    span: T,
}

impl<T: Real> JointProblem<'_, T> {
    fn two_pi() -> T {
        T::PI() + T::PI()
    }

    fn linewidth(&self) -> T {
        self.seed.f_r / self.seed.q_l
    }

    fn start(&self) -> Vec<T> {
        let s = &self.seed;
        vec![
            T::zero(),
            T::zero(),
            T::zero(),
            s.phi,
            T::zero(),
            wrap_angle(s.alpha - Self::two_pi() * s.f_r * s.tau),
            s.tau * Self::two_pi() * self.span,
        ]
    }

    /// Physical parameters and the referenced phase offset.
    fn unpack(&self, u: &[T]) -> (NotchParams<T>, T) {
        let s = &self.seed;
        let tau = u[6] / (Self::two_pi() * self.span);
        let alpha_ref = u[5];
        let p = NotchParams {
            f_r: s.f_r + u[0] * self.linewidth(),
            q_l: s.q_l * u[1].exp(),
            abs_qc: s.abs_qc * u[2].exp(),
            phi: u[3],
            a: s.a * u[4].exp(),
            alpha: wrap_angle(alpha_ref + Self::two_pi() * s.f_r * tau),
            tau,
        };
        (p, alpha_ref)
    }

    fn feasible(p: &NotchParams<T>) -> bool {
        p.f_r > T::zero()
            && p.q_l.is_finite()
            && p.abs_qc.is_finite()
            && p.phi.abs() < T::FRAC_PI_2()
    }

    /// Model value and the factors needed by the Jacobian.
    fn eval(
        &self,
        p: &NotchParams<T>,
        alpha_ref: T,
        f: T,
    ) -> (Complex<T>, Complex<T>, Complex<T>, Complex<T>) {
        let x = (f - p.f_r) / p.f_r;
        let d = Complex::new(T::one(), (p.q_l + p.q_l) * x);
        let g = Complex::from_polar(p.q_l / p.abs_qc, p.phi);
        let env = Complex::from_polar(
            p.a,
            alpha_ref - Self::two_pi() * (f - self.seed.f_r) * p.tau,
        );
        let b = Complex::new(T::one(), T::zero()) - g / d;
        (env * b, env, g, d)
    }
}

impl<T: Real> LeastSquaresProblem<T> for JointProblem<'_, T> {
    fn n_params(&self) -> usize {
        7
    }

    fn residuals(&self, u: &[T]) -> Option<Vec<T>> {
        let (p, alpha_ref) = self.unpack(u);
        if !Self::feasible(&p) {
            return None;
        }
        let scale = self.seed.a;
        let mut r = Vec::with_capacity(2 * self.trace.len());
        for (&f, &s) in self.trace.freqs().iter().zip(self.trace.samples()) {
            let (m, ..) = self.eval(&p, alpha_ref, f);
            let d = (s - m) / scale;
            r.push(d.re);
            r.push(d.im);
        }
        Some(r)
    }

    fn jacobian(&self, u: &[T]) -> Option<Vec<T>> {
        let (p, alpha_ref) = self.unpack(u);
        if !Self::feasible(&p) {
            return None;
        }
        let scale = self.seed.a;
        let i = Complex::new(T::zero(), T::one());
        let two = T::lit(2.0);
        let lw = self.linewidth();
        let mut jac = Vec::with_capacity(14 * self.trace.len());
        for &f in self.trace.freqs() {
            let (m, env, g, d) = self.eval(&p, alpha_ref, f);
            let d2 = d * d;
            let cols = [
                // f_r, per linewidth
                env * (-i * g * (two * p.q_l * f) / (d2 * (p.f_r * p.f_r))) * lw,
                // ln q_l
                env * (-g / d2),
                // ln |Q_c|
                env * (g / d),
                // phi
                env * (-i * g / d),
                // ln a
                m,
                // referenced phase offset
                i * m,
                // delay as phase across the span
                -i * m * ((f - self.seed.f_r) / self.span),
            ];
            for c in &cols {
                jac.push(-c.re / scale);
            }
            for c in &cols {
                jac.push(-c.im / scale);
            }
        }
        Some(jac)
    }
}

fn refine<T: Real>(trace: &ComplexTrace<T>, seed: &NotchParams<T>) -> Result<NotchParams<T>> {
    let problem = JointProblem {
        trace,
        seed: *seed,
        span: trace.span(),
    };
    let report = LevenbergMarquardt::default().minimize(&problem, &problem.start())?;
    Ok(problem.unpack(&report.x).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> NotchParams<f64> {
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

    fn trace(p: &NotchParams<f64>, n: usize) -> ComplexTrace<f64> {
        let half = 5.0 * p.f_r / p.q_l;
        let freqs: Vec<f64> = (0..n)
            .map(|k| p.f_r - half + 2.0 * half * k as f64 / (n - 1) as f64)
            .collect();
        let s = freqs.iter().map(|&f| s21_model(p, f)).collect();
        ComplexTrace::new(freqs, s, None).unwrap()
    }

    #[test]
    fn joint_jacobian_matches_finite_differences() {
        let p = reference();
        let t = trace(&p, 64);
        let seed = NotchParams {
            f_r: p.f_r * (1.0 + 1e-7),
            q_l: p.q_l * 1.01,
            ..p
        };
        let prob = JointProblem {
            trace: &t,
            seed,
            span: t.span(),
        };
        let u = [
            0.3,
            0.05,
            -0.02,
            0.12,
            0.01,
            prob.start()[5] + 0.01,
            prob.start()[6],
        ];
        let ja = prob.jacobian(&u).unwrap();
        // five-point stencil; f_r steps must stay well above its ulp
        let h = 1e-2;
        let mut jn = vec![0.0; ja.len()];
        for j in 0..7 {
            let at = |s: f64| {
                let mut x = u;
                x[j] += s * h;
                prob.residuals(&x).unwrap()
            };
            let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            for i in 0..m1.len() {
                jn[i * 7 + j] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
            }
        }
        for (k, (a, b)) in ja.iter().zip(&jn).enumerate() {
            assert!(
                (a - b).abs() < 1e-6 * (1.0 + b.abs()),
                "entry {k}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn noiseless_reference_recovered() {
        let p = reference();
        let t = trace(&p, 1001);
        let fit = extract(&t).unwrap();
        let q = fit.params;
        for (got, want, name) in [
            (q.f_r, p.f_r, "f_r"),
            (q.q_l, p.q_l, "q_l"),
            (q.abs_qc, p.abs_qc, "abs_qc"),
            (q.phi, p.phi, "phi"),
            (q.a, p.a, "a"),
            (q.tau, p.tau, "tau"),
        ] {
            assert!(
                (got - want).abs() / want.abs() < 1e-6,
                "{name}: {got} vs {want}"
            );
        }
        assert!(wrap_angle(q.alpha - p.alpha).abs() < 1e-6 * p.alpha);
        let qi = internal_q(p.q_l, p.abs_qc, p.phi).unwrap();
        assert!((fit.q_i - qi).abs() / qi < 1e-6);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn staged_only_is_close() {
        let p = reference();
        let t = trace(&p, 1001);
        let ex = extract_with(&t, ExtractOptions { refine: false }).unwrap();
        assert!(!ex.refined);
        assert_eq!(ex.fit, ex.staged);
        assert!((ex.fit.q_i - p.q_i().unwrap()).abs() / p.q_i().unwrap() < 1e-3);
    }

    #[test]
    fn resonance_on_grid_edge_rejected() {
        let p = reference();
        let lw = p.f_r / p.q_l;
        let freqs: Vec<f64> = (0..200)
            .map(|k| p.f_r + 0.5 * lw + k as f64 * lw / 20.0)
            .collect();
        let s = freqs.iter().map(|&f| s21_model(&p, f)).collect();
        let t = ComplexTrace::new(freqs, s, None).unwrap();
        assert!(matches!(extract(&t), Err(Error::Precondition(_))));
    }

    #[test]
    fn record_has_fixed_field_names() {
        let p = reference();
        let fit = extract(&trace(&p, 401)).unwrap();
        let v = serde_json::to_value(fit).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "a",
                "abs_qc",
                "alpha_rad",
                "f_r_hz",
                "phi_rad",
                "q_i",
                "q_l",
                "residual_rms",
                "tau_s"
            ]
        );
    }
}

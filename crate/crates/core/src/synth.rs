// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic traces and power sweeps.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`) seeded with
//! `seed_from_u64`, and normal deviates from `rand_distr::StandardNormal`.
//! Both are value-stable across platforms, so fixtures are reproducible
//! bit for bit. The algorithm tag is written into every file's metadata.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{ComplexTrace, PowerSweep, SweepPoint};
use crate::error::{Error, Result};
use crate::resonance::model::{s21_model, NotchParams};
use crate::scalar::Real;
use crate::tls::model::{loss_model_variant, ModelVariant, TlsParams};

/// Identifies the generator stack in file metadata.
pub const PRNG_TAG: &str = "chacha20/rand_chacha-0.9+standard-normal/rand_distr-0.5;v1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    None,
    /// Additive `sigma (g1 + i g2) |off-resonant amplitude|` on traces.
    ComplexGaussian,
    /// Multiplies by `(1 + sigma g)`; on traces `g` is complex.
    Multiplicative,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn complex_gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::ComplexGaussian,
            sigma,
            seed,
        }
    }

    pub fn multiplicative(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Multiplicative,
            sigma,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Validation(format!(
                "noise sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }
}

fn normal<T: Real>(rng: &mut ChaCha20Rng) -> T {
    let g: f64 = StandardNormal.sample(rng);
    T::lit(g)
}

#[derive(Serialize)]
struct TraceMeta<'a, T> {
    generator: &'static str,
    prng: &'static str,
    params: &'a NotchParams<T>,
    q_i: Option<T>,
    noise: &'a NoiseSpec,
}

#[derive(Serialize)]
struct SweepMeta<'a, T> {
    generator: &'static str,
    prng: &'static str,
    params: &'a TlsParams<T>,
    f_r_hz: T,
    temperature_k: T,
    variant: ModelVariant,
    noise: &'a NoiseSpec,
}

/// Samples the notch model on a uniform grid and adds measurement noise.
pub fn synth_trace<T: Real>(
    p: &NotchParams<T>,
    f_min: T,
    f_max: T,
    n_points: usize,
    noise: NoiseSpec,
) -> Result<ComplexTrace<T>> {
    noise.validate()?;
    if n_points < 8 {
        return Err(Error::Validation(format!(
            "need at least 8 points, got {n_points}"
        )));
    }
    if !(f_min < p.f_r && p.f_r < f_max) {
        return Err(Error::Validation(format!(
            "resonance {} Hz lies outside the grid [{f_min}, {f_max}]",
            p.f_r
        )));
    }
    p.validate()?;
    let last = T::from_usize(n_points - 1).unwrap();
    let freqs: Vec<T> = (0..n_points)
        .map(|k| f_min + (f_max - f_min) * T::from_usize(k).unwrap() / last)
        .collect();
    let sigma = T::lit(noise.sigma);
    let mut rng = noise.rng();
    let samples = freqs
        .iter()
        .map(|&f| {
            let clean = s21_model(p, f);
            match noise.kind {
                NoiseKind::None => clean,
                NoiseKind::ComplexGaussian => {
                    let g = Complex::new(normal::<T>(&mut rng), normal::<T>(&mut rng));
                    clean + g * (sigma * p.a)
                }
                NoiseKind::Multiplicative => {
                    let g = Complex::new(normal::<T>(&mut rng), normal::<T>(&mut rng));
                    clean * (Complex::new(T::one(), T::zero()) + g * sigma)
                }
            }
        })
        .collect();
    let meta = serde_json::to_string(&TraceMeta {
        generator: "reslab synth s21",
        prng: PRNG_TAG,
        params: p,
        q_i: p.q_i().ok(),
        noise: &noise,
    })?;
    ComplexTrace::new(freqs, samples, Some(meta))
}

/// Evaluates `Q_i(n) = 1/loss(n)` on a photon-number grid and applies
/// multiplicative noise.
pub fn synth_sweep<T: Real>(
    p: &TlsParams<T>,
    f_r: T,
    temperature: T,
    n_grid: &[T],
    noise: NoiseSpec,
) -> Result<PowerSweep<T>> {
    synth_sweep_variant(
        p,
        f_r,
        temperature,
        n_grid,
        noise,
        ModelVariant::ExponentOutside,
    )
}

pub fn synth_sweep_variant<T: Real>(
    p: &TlsParams<T>,
    f_r: T,
    temperature: T,
    n_grid: &[T],
    noise: NoiseSpec,
    variant: ModelVariant,
) -> Result<PowerSweep<T>> {
    noise.validate()?;
    if noise.kind == NoiseKind::ComplexGaussian {
        return Err(Error::Validation(
            "power sweeps support `none` or `multiplicative` noise".into(),
        ));
    }
    if n_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Validation(
            "photon-number grid must be sorted".into(),
        ));
    }
    let sigma = T::lit(noise.sigma);
    let mut rng = noise.rng();
    let points = n_grid
        .iter()
        .map(|&n| {
            let q = T::one() / loss_model_variant(p, n, f_r, temperature, variant);
            let q_i = match noise.kind {
                NoiseKind::Multiplicative => q * (T::one() + sigma * normal::<T>(&mut rng)),
                _ => q,
            };
            SweepPoint {
                n_mean: n,
                q_i,
                q_i_sigma: None,
            }
        })
        .collect();
    let mut sweep = PowerSweep::new(points, f_r, temperature)?;
    sweep.meta = Some(serde_json::to_string(&SweepMeta {
        generator: "reslab synth sweep",
        prng: PRNG_TAG,
        params: p,
        f_r_hz: f_r,
        temperature_k: temperature,
        variant,
        noise: &noise,
    })?);
    Ok(sweep)
}

/// `count` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_grid<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_usize(count - 1).unwrap();
    (0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == count - 1 {
                hi
            } else {
                (a + (b - a) * T::from_usize(k).unwrap() / last).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn notch() -> NotchParams<f64> {
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

    fn window(p: &NotchParams<f64>) -> (f64, f64) {
        let half = 5.0 * p.f_r / p.q_l;
        (p.f_r - half, p.f_r + half)
    }

    #[test]
    fn noiseless_trace_is_the_model() {
        let p = notch();
        let (lo, hi) = window(&p);
        let t = synth_trace(&p, lo, hi, 101, NoiseSpec::none()).unwrap();
        for (&f, &s) in t.freqs().iter().zip(t.samples()) {
            assert_eq!(s, s21_model(&p, f));
        }
        assert!(t.meta.as_deref().unwrap().contains("chacha20"));
    }

    #[test]
    fn seeds_are_reproducible() {
        let p = notch();
        let (lo, hi) = window(&p);
        let a = synth_trace(&p, lo, hi, 64, NoiseSpec::complex_gaussian(0.01, 7)).unwrap();
        let b = synth_trace(&p, lo, hi, 64, NoiseSpec::complex_gaussian(0.01, 7)).unwrap();
        let c = synth_trace(&p, lo, hi, 64, NoiseSpec::complex_gaussian(0.01, 8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn resonance_outside_grid_rejected() {
        let p = notch();
        assert!(synth_trace(&p, 6e9, 7e9, 64, NoiseSpec::none()).is_err());
        assert!(synth_trace(&p, 5e9, 5.5e9, 4, NoiseSpec::none()).is_err());
    }

    #[test]
    fn sweep_points_follow_the_model() {
        let p = TlsParams {
            f_tls0: 1.07e-6,
            n_c: 10.0,
            beta: 0.14,
            tan_other: 0.0,
        };
        let s = synth_sweep(&p, 5.206e9, 0.010, &[0.0, 1.0], NoiseSpec::none());
        // zero photon number is rejected by the sweep invariants
        assert!(s.is_err());
        let s = synth_sweep(&p, 5.206e9, 0.010, &[1.0, 10.0], NoiseSpec::none()).unwrap();
        let t = (6.62607015e-34f64 * 5.206e9 / (2.0 * 1.380649e-23 * 0.010)).tanh();
        let oracle = 1.0 / (1.07e-6 * t * 1.1f64.powf(-0.14));
        assert!((s.points()[0].q_i - oracle).abs() / oracle < 1e-14);
        assert!(s.points()[0].q_i > 1.0 / 1.07e-6);
    }

    #[test]
    fn sweep_rejects_complex_noise() {
        let p = TlsParams {
            f_tls0: 1e-6,
            n_c: 10.0,
            beta: 0.2,
            tan_other: 0.0,
        };
        assert!(synth_sweep(
            &p,
            5e9,
            0.01,
            &[1.0, 2.0],
            NoiseSpec::complex_gaussian(0.1, 1)
        )
        .is_err());
    }

    #[test]
    fn complex_noise_is_unbiased() {
        let p = notch();
        let (lo, hi) = window(&p);
        let clean = synth_trace(&p, lo, hi, 8, NoiseSpec::none()).unwrap();
        let sigma = 0.01;
        let seeds = 10_000u64;
        let mut acc = vec![Complex::new(0.0, 0.0); 8];
        for seed in 0..seeds {
            let t = synth_trace(&p, lo, hi, 8, NoiseSpec::complex_gaussian(sigma, seed)).unwrap();
            for (k, (&s, &c)) in t.samples().iter().zip(clean.samples()).enumerate() {
                acc[k] += s - c;
            }
        }
        let bound = 3.0 * sigma * p.a / (seeds as f64).sqrt();
        for m in acc {
            let m = m / seeds as f64;
            assert!(m.re.abs() < bound && m.im.abs() < bound, "{m}");
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1.0f64, 1e7, 25);
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[24], 1e7);
        assert!((g[12] - 10f64.powf(3.5)).abs() / g[12] < 1e-12);
    }
}

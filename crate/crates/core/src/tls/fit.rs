// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Weighted least-squares fit of the loss model to a power sweep.
//!
//! Residuals live in loss space (`1/Q_i`). Internal coordinates keep the
//! parameters inside their bounds: `ln f_tls0`, a logistic map of `ln n_c`
//! onto `[N_C_MIN, N_C_MAX]`, a logistic map of `beta` onto `[0, 1]`.
//! `tan_other` is fitted unconstrained and clamped to zero by refitting with
//! it fixed when the free optimum is negative.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::data::PowerSweep;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::lm::{LeastSquaresProblem, LevenbergMarquardt};
use crate::scalar::Real;
use crate::tls::model::{
    loss_model_variant, power_factor, qi_low_photon, thermal_factor, ModelVariant, TlsParams,
};

pub const N_C_MIN: f64 = 1e-2;
pub const N_C_MAX: f64 = 1e9;
pub const BETA_START: f64 = 0.2;
const BETA_STARTS: [f64; 2] = [0.2, 0.6];
const N_C_STARTS: usize = 5;
/// Fraction of `1/max(Q_i)` used as the starting `tan_other`.
pub const TAN_OTHER_START_FRACTION: f64 = 0.5;
/// Minimum decades of photon number a sweep must span.
pub const MIN_DECADES: f64 = 3.0;
pub const MIN_POINTS: usize = 6;
/// Confidence level of the F-test that decides whether any power dependence
/// is present at all.
const POWER_DEPENDENCE_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TlsSigmas<T> {
    pub f_tls0: Option<T>,
    pub n_c: Option<T>,
    pub beta: Option<T>,
    pub tan_other: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TlsFitResult<T> {
    pub params: TlsParams<T>,
    /// 1-sigma uncertainties, by default from the linearized covariance
    /// scaled by the reduced chi-square; `None` for fixed or unidentifiable
    /// parameters.
    pub sigmas: TlsSigmas<T>,
    pub sigma_method: SigmaMethod,
    pub q_i_lp: T,
    /// Measured `Q_i` at the lowest photon number in the sweep.
    pub q_i_lowest_n: T,
    pub chi2_reduced: T,
    pub f_r: T,
    pub temperature: T,
    pub variant: ModelVariant,
    pub bounds_active: Vec<String>,
    pub non_identifiable: Vec<String>,
    /// Coupling quality factor, carried along for reporting only.
    pub abs_qc: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TlsFitOptions {
    pub variant: ModelVariant,
    /// Replace the covariance uncertainties by a residual bootstrap.
    pub bootstrap: Option<Bootstrap>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
}

/// How [`TlsFitResult::sigmas`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMethod {
    #[default]
    Covariance,
    Bootstrap,
}

struct SweepData<T> {
    n: Vec<T>,
    loss: Vec<T>,
    sigma: Vec<T>,
    thermal: T,
    variant: ModelVariant,
}

fn logistic<T: Real>(u: T) -> T {
    T::one() / (T::one() + (-u).exp())
}

fn logit<T: Real>(p: T) -> T {
    (p / (T::one() - p)).ln()
}

fn ln_nc_range<T: Real>() -> (T, T) {
    let lo = T::lit(N_C_MIN.ln());
    (lo, T::lit(N_C_MAX.ln()) - lo)
}

/// Internal <-> physical coordinate maps.
#[derive(Debug, Clone, Copy)]
struct Coords<T> {
    scale: T,
    /// `Some(v)` pins `tan_other` at `v`.
    fixed_tan_other: Option<T>,
    /// `Some(v)` pins `beta` at `v` (and then `n_c` too, at `fixed_n_c`).
    fixed_beta: Option<T>,
    fixed_n_c: T,
}

impl<T: Real> Coords<T> {
    fn n_params(&self) -> usize {
        let mut n = 1;
        if self.fixed_beta.is_none() {
            n += 2;
        }
        if self.fixed_tan_other.is_none() {
            n += 1;
        }
        n
    }

    fn to_physical(self, u: &[T]) -> TlsParams<T> {
        let (lo, width) = ln_nc_range::<T>();
        let mut k = 1;
        let (n_c, beta) = match self.fixed_beta {
            Some(b) => (self.fixed_n_c, b),
            None => {
                k += 2;
                ((lo + width * logistic(u[1])).exp(), logistic(u[2]))
            }
        };
        let tan_other = match self.fixed_tan_other {
            Some(v) => v,
            None => u[k] * self.scale,
        };
        TlsParams {
            f_tls0: u[0].exp(),
            n_c,
            beta,
            tan_other,
        }
    }

    fn to_internal(self, p: &TlsParams<T>) -> Vec<T> {
        let (lo, width) = ln_nc_range::<T>();
        let mut u = vec![p.f_tls0.ln()];
        if self.fixed_beta.is_none() {
            let frac = ((p.n_c.ln() - lo) / width)
                .max(T::lit(1e-9))
                .min(T::one() - T::lit(1e-9));
            u.push(logit(frac));
            u.push(logit(p.beta.max(T::lit(1e-9)).min(T::one() - T::lit(1e-9))));
        }
        if self.fixed_tan_other.is_none() {
            u.push(p.tan_other / self.scale);
        }
        u
    }

    /// `d(physical)/d(internal)` for the free parameters, in the order
    /// `f_tls0, n_c, beta, tan_other`.
    fn chain(&self, p: &TlsParams<T>) -> Vec<(usize, T)> {
        let (lo, width) = ln_nc_range::<T>();
        let mut out = vec![(0, p.f_tls0)];
        if self.fixed_beta.is_none() {
            let s = (p.n_c.ln() - lo) / width;
            out.push((1, p.n_c * width * s * (T::one() - s)));
            out.push((2, p.beta * (T::one() - p.beta)));
        }
        if self.fixed_tan_other.is_none() {
            out.push((3, self.scale));
        }
        out
    }
}

impl<T: Real> SweepData<T> {
    fn model(&self, p: &TlsParams<T>, n: T) -> T {
        p.f_tls0 * self.thermal * power_factor(n, p.n_c, p.beta, self.variant) + p.tan_other
    }

    /// Physical-parameter gradient of the model at `n`.
    fn gradient(&self, p: &TlsParams<T>, n: T) -> [T; 4] {
        let t = self.thermal;
        let s = power_factor(n, p.n_c, p.beta, self.variant);
        let x = n / p.n_c;
        let (ds_dnc, ds_dbeta) = match self.variant {
            ModelVariant::ExponentOutside => {
                (s * p.beta * x / (p.n_c * (T::one() + x)), -s * x.ln_1p())
            }
            ModelVariant::ExponentInside => {
                if n == T::zero() {
                    (T::zero(), T::zero())
                } else {
                    let xb = x.powf(p.beta);
                    (s * s * p.beta * xb / p.n_c, -s * s * xb * x.ln())
                }
            }
        };
        [
            t * s,
            p.f_tls0 * t * ds_dnc,
            p.f_tls0 * t * ds_dbeta,
            T::one(),
        ]
    }
}

struct TlsProblem<'a, T> {
    data: &'a SweepData<T>,
    coords: Coords<T>,
}

impl<T: Real> LeastSquaresProblem<T> for TlsProblem<'_, T> {
    fn n_params(&self) -> usize {
        self.coords.n_params()
    }

    fn residuals(&self, u: &[T]) -> Option<Vec<T>> {
        let p = self.coords.to_physical(u);
        if !p.f_tls0.is_finite() || !(p.f_tls0 > T::zero()) {
            return None;
        }
        Some(
            self.data
                .n
                .iter()
                .zip(&self.data.loss)
                .zip(&self.data.sigma)
                .map(|((&n, &l), &s)| (l - self.data.model(&p, n)) / s)
                .collect(),
        )
    }

    fn jacobian(&self, u: &[T]) -> Option<Vec<T>> {
        let p = self.coords.to_physical(u);
        let chain = self.coords.chain(&p);
        let k = chain.len();
        let mut jac = Vec::with_capacity(k * self.data.n.len());
        for (&n, &s) in self.data.n.iter().zip(&self.data.sigma) {
            let g = self.data.gradient(&p, n);
            for &(idx, d) in &chain {
                jac.push(-g[idx] * d / s);
            }
        }
        Some(jac)
    }
}

struct Solved<T> {
    params: TlsParams<T>,
    chi2: T,
}

fn chi2<T: Real>(data: &SweepData<T>, p: &TlsParams<T>) -> T {
    data.n
        .iter()
        .zip(&data.loss)
        .zip(&data.sigma)
        .map(|((&n, &l), &s)| {
            let r = (l - data.model(p, n)) / s;
            r * r
        })
        .sum()
}

fn solve<T: Real>(
    data: &SweepData<T>,
    coords: Coords<T>,
    start: &TlsParams<T>,
) -> Result<Solved<T>> {
    let problem = TlsProblem { data, coords };
    let report = LevenbergMarquardt::default()
        .minimize(&problem, &coords.to_internal(start))
        .map_err(|e| match e {
            Error::NotConverged { iterations, last } => {
                let u: Vec<T> = last.iter().map(|&v| T::lit(v)).collect();
                let p = coords.to_physical(&u);
                Error::NotConverged {
                    iterations,
                    last: [p.f_tls0, p.n_c, p.beta, p.tan_other]
                        .iter()
                        .map(|v| v.to_f64_lossy())
                        .collect(),
                }
            }
            other => other,
        })?;
    let params = coords.to_physical(&report.x);
    Ok(Solved {
        chi2: chi2(data, &params),
        params,
    })
}

/// Runs [`solve`] from every start and keeps the lowest chi-square.
fn solve_multi<T: Real>(
    data: &SweepData<T>,
    coords: Coords<T>,
    starts: &[TlsParams<T>],
) -> Result<Solved<T>> {
    let mut best: Option<Solved<T>> = None;
    let mut first_err = None;
    for start in starts {
        match solve(data, coords, start) {
            Ok(sol) => {
                if best.as_ref().is_none_or(|b| sol.chi2 < b.chi2) {
                    best = Some(sol);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one start"))
}

/// Sample standard deviations of the free parameters over refits of
/// `model + resampled standardized residuals`.
fn bootstrap_sigmas<T: Real>(
    sweep: &PowerSweep<T>,
    data: &SweepData<T>,
    coords: &Coords<T>,
    p: &TlsParams<T>,
    variant: ModelVariant,
    b: Bootstrap,
) -> Result<TlsSigmas<T>> {
    if b.resamples < 2 {
        return Err(Error::Validation(format!(
            "bootstrap needs at least 2 resamples, got {}",
            b.resamples
        )));
    }
    let model: Vec<T> = data.n.iter().map(|&n| data.model(p, n)).collect();
    let std_res: Vec<T> = data
        .loss
        .iter()
        .zip(&model)
        .zip(&data.sigma)
        .map(|((&l, &m), &s)| (l - m) / s)
        .collect();
    let m = std_res.len();
    let mut rng = ChaCha20Rng::seed_from_u64(b.seed);
    let mut draws: Vec<[T; 4]> = Vec::with_capacity(b.resamples);
    for _ in 0..b.resamples {
        let mut points = sweep.points().to_vec();
        let mut ok = true;
        for (k, pt) in points.iter_mut().enumerate() {
            let e = std_res[rng.random_range(0..m)];
            let loss = model[k] + data.sigma[k] * e;
            ok &= loss > T::zero();
            pt.q_i = T::one() / loss;
        }
        if !ok {
            continue;
        }
        let resampled = PowerSweep::new(points, sweep.f_r(), sweep.temperature())?;
        if let Ok(fit) = fit_tls_with(
            &resampled,
            TlsFitOptions {
                variant,
                bootstrap: None,
            },
        ) {
            let q = fit.params;
            draws.push([q.f_tls0, q.n_c, q.beta, q.tan_other]);
        }
    }
    if draws.len() < 2 {
        return Err(Error::DegenerateFit(
            "fewer than 2 bootstrap refits succeeded".into(),
        ));
    }
    let count = T::from_usize(draws.len()).unwrap();
    let sd = |j: usize| {
        let mean = draws.iter().map(|d| d[j]).sum::<T>() / count;
        let var = draws.iter().map(|d| (d[j] - mean).powi(2)).sum::<T>() / (count - T::one());
        var.sqrt()
    };
    let free: Vec<usize> = coords.chain(p).iter().map(|&(i, _)| i).collect();
    let pick = |j: usize| free.contains(&j).then(|| sd(j));
    Ok(TlsSigmas {
        f_tls0: pick(0),
        n_c: pick(1),
        beta: pick(2),
        tan_other: pick(3),
    })
}

/// Covariance-based 1-sigma uncertainties for the free physical parameters.
fn uncertainties<T: Real>(
    data: &SweepData<T>,
    coords: &Coords<T>,
    p: &TlsParams<T>,
    chi2_red: T,
) -> Option<TlsSigmas<T>> {
    let free: Vec<usize> = coords.chain(p).iter().map(|&(i, _)| i).collect();
    let k = free.len();
    let mut jac = Vec::with_capacity(k * data.n.len());
    for (&n, &s) in data.n.iter().zip(&data.sigma) {
        let g = data.gradient(p, n);
        jac.extend(free.iter().map(|&i| g[i] / s));
    }
    let zeros = vec![T::zero(); data.n.len()];
    let (a, _) = SymMatrix::normal_equations(&jac, &zeros, k);
    let cov = a.inverse_spd()?;
    let mut out = TlsSigmas::default();
    for (j, &i) in free.iter().enumerate() {
        let v = cov.get(j, j) * chi2_red;
        if !(v >= T::zero()) || !v.is_finite() {
            return None;
        }
        let s = Some(v.sqrt());
        match i {
            0 => out.f_tls0 = s,
            1 => out.n_c = s,
            2 => out.beta = s,
            _ => out.tan_other = s,
        }
    }
    Some(out)
}

/// Fits the loss model to a power sweep.
pub fn fit_tls<T: Real>(sweep: &PowerSweep<T>) -> Result<TlsFitResult<T>> {
    fit_tls_with(sweep, TlsFitOptions::default())
}

pub fn fit_tls_with<T: Real>(
    sweep: &PowerSweep<T>,
    opts: TlsFitOptions,
) -> Result<TlsFitResult<T>> {
    let pts = sweep.points();
    if pts.len() < MIN_POINTS {
        return Err(Error::Precondition(format!(
            "TLS fit needs at least {MIN_POINTS} points, sweep has {}",
            pts.len()
        )));
    }
    let n_min = pts.iter().map(|p| p.n_mean).fold(T::infinity(), T::min);
    let n_max = pts.iter().map(|p| p.n_mean).fold(T::neg_infinity(), T::max);
    if (n_max / n_min).log10() < T::lit(MIN_DECADES) {
        return Err(Error::Precondition(format!(
            "sweep spans {:.2} decades of photon number, at least {MIN_DECADES} required",
            (n_max / n_min).log10()
        )));
    }

    let loss: Vec<T> = pts.iter().map(|p| T::one() / p.q_i).collect();
    let q_max = pts.iter().map(|p| p.q_i).fold(T::zero(), T::max);
    let q_min = pts.iter().map(|p| p.q_i).fold(T::infinity(), T::min);
    let scale = loss.iter().copied().sum::<T>() / T::from_usize(loss.len()).unwrap();
    let weighted = pts.iter().all(|p| p.q_i_sigma.is_some());
    let sigma: Vec<T> = pts
        .iter()
        .map(|p| match (weighted, p.q_i_sigma) {
            (true, Some(s)) => s / (p.q_i * p.q_i),
            _ => T::one(),
        })
        .collect();
    let thermal = thermal_factor(sweep.f_r(), sweep.temperature());
    let data = SweepData {
        n: pts.iter().map(|p| p.n_mean).collect(),
        loss,
        sigma,
        thermal,
        variant: opts.variant,
    };

    let tan_other0 = T::lit(TAN_OTHER_START_FRACTION) / q_max;
    let geo_n = (n_min.ln() + n_max.ln()) * T::lit(0.5);
    let start = TlsParams {
        f_tls0: (T::one() / q_min - tan_other0) / thermal,
        n_c: geo_n
            .exp()
            .max(T::lit(N_C_MIN * 10.0))
            .min(T::lit(N_C_MAX / 10.0)),
        beta: T::lit(BETA_START),
        tan_other: tan_other0,
    };

    let mut starts = vec![start];
    for k in 0..N_C_STARTS {
        let frac = T::from_usize(k).unwrap() / T::from_usize(N_C_STARTS - 1).unwrap();
        let n_c = (n_min.ln() + (n_max.ln() - n_min.ln()) * frac)
            .exp()
            .max(T::lit(N_C_MIN * 10.0))
            .min(T::lit(N_C_MAX / 10.0));
        for beta in BETA_STARTS {
            starts.push(TlsParams {
                n_c,
                beta: T::lit(beta),
                ..start
            });
        }
    }

    let free = Coords {
        scale,
        fixed_tan_other: None,
        fixed_beta: None,
        fixed_n_c: start.n_c,
    };
    let m = data.n.len();

    // constant-loss null model
    let w_sum: T = data.sigma.iter().map(|&s| T::one() / (s * s)).sum();
    let c_null = data
        .loss
        .iter()
        .zip(&data.sigma)
        .map(|(&l, &s)| l / (s * s))
        .sum::<T>()
        / w_sum;
    let chi2_null: T = data
        .loss
        .iter()
        .zip(&data.sigma)
        .map(|(&l, &s)| ((l - c_null) / s).powi(2))
        .sum();

    let mut bounds_active = Vec::new();
    let mut non_identifiable = Vec::new();

    let full = solve_multi(&data, free, &starts);
    let power_dependent = match &full {
        Ok(sol) => {
            let dof = (m - free.n_params()) as f64;
            let chi2_full = sol.chi2.to_f64_lossy();
            let chi2_null = chi2_null.to_f64_lossy();
            if chi2_null <= 0.0 {
                false
            } else if chi2_full <= 0.0 {
                true
            } else {
                let k_extra = (free.n_params() - 2) as f64;
                let f_stat = ((chi2_null - chi2_full) / k_extra) / (chi2_full / dof);
                let crit = FisherSnedecor::new(k_extra, dof)
                    .map(|d| d.inverse_cdf(POWER_DEPENDENCE_CONFIDENCE))
                    .unwrap_or(f64::INFINITY);
                f_stat > crit
            }
        }
        Err(_) => chi2_null > T::zero(),
    };

    let (params, coords) = if power_dependent {
        let sol = full?;
        if sol.params.tan_other < T::zero() {
            bounds_active.push("tan_other".to_owned());
            let fixed = Coords {
                fixed_tan_other: Some(T::zero()),
                ..free
            };
            let mut refit: Vec<_> = starts
                .iter()
                .map(|s| TlsParams {
                    tan_other: T::zero(),
                    ..*s
                })
                .collect();
            refit.insert(
                0,
                TlsParams {
                    tan_other: T::zero(),
                    ..sol.params
                },
            );
            (solve_multi(&data, fixed, &refit)?.params, fixed)
        } else {
            (sol.params, free)
        }
    } else {
        // No measurable power dependence: the saturation exponent sits on its
        // lower bound, n_c has no effect and only f_tls0 * tanh + tan_other is
        // determined. The split keeps the starting proportions.
        bounds_active.push("beta".to_owned());
        non_identifiable.push("n_c".to_owned());
        non_identifiable.push("f_tls0/tan_other".to_owned());
        let total = c_null;
        let frac = (tan_other0 / (start.f_tls0 * thermal + tan_other0)).min(T::one());
        let tan_other = total * frac;
        let f_tls0 = (total - tan_other) / thermal;
        let params = TlsParams {
            f_tls0: if f_tls0 > T::zero() {
                f_tls0
            } else {
                total / thermal
            },
            n_c: start.n_c,
            beta: T::zero(),
            tan_other: if f_tls0 > T::zero() {
                tan_other
            } else {
                T::zero()
            },
        };
        let coords = Coords {
            fixed_tan_other: Some(params.tan_other),
            fixed_beta: Some(T::zero()),
            ..free
        };
        (params, coords)
    };

    if power_dependent {
        let edge = T::lit(1e-6);
        if params.beta <= edge || params.beta >= T::one() - edge {
            bounds_active.push("beta".to_owned());
        }
        if params.n_c <= T::lit(N_C_MIN * 1.001) || params.n_c >= T::lit(N_C_MAX / 1.001) {
            bounds_active.push("n_c".to_owned());
            non_identifiable.push("n_c".to_owned());
        }
    }

    let chi2_total = chi2(&data, &params);
    let dof = m.saturating_sub(coords.n_params()).max(1);
    let chi2_reduced = chi2_total / T::from_usize(dof).unwrap();
    let mut sigma_method = SigmaMethod::Covariance;
    let sigmas = if !power_dependent {
        TlsSigmas::default()
    } else if let Some(b) = opts.bootstrap {
        sigma_method = SigmaMethod::Bootstrap;
        bootstrap_sigmas(sweep, &data, &coords, &params, opts.variant, b)?
    } else {
        uncertainties(&data, &coords, &params, chi2_reduced).unwrap_or_else(|| {
            non_identifiable.push("covariance".to_owned());
            TlsSigmas::default()
        })
    };

    let lowest = pts
        .iter()
        .min_by(|a, b| a.n_mean.partial_cmp(&b.n_mean).unwrap())
        .unwrap();
    Ok(TlsFitResult {
        q_i_lp: qi_low_photon(&params, sweep.f_r(), sweep.temperature())?,
        params,
        sigmas,
        sigma_method,
        q_i_lowest_n: lowest.q_i,
        chi2_reduced,
        f_r: sweep.f_r(),
        temperature: sweep.temperature(),
        variant: opts.variant,
        bounds_active,
        non_identifiable,
        abs_qc: None,
    })
}

impl<T: Real> TlsFitResult<T> {
    /// Model `Q_i` at photon number `n` with the fitted parameters.
    pub fn q_i_at(&self, n: T) -> T {
        T::one() / loss_model_variant(&self.params, n, self.f_r, self.temperature, self.variant)
    }

    pub fn record(&self) -> TlsFitRecord {
        let f = |v: T| v.to_f64_lossy();
        let o = |v: Option<T>| v.map(f);
        TlsFitRecord {
            f_tls0: f(self.params.f_tls0),
            n_c: f(self.params.n_c),
            beta: f(self.params.beta),
            tan_other: f(self.params.tan_other),
            q_i_lp: f(self.q_i_lp),
            f_r_hz: f(self.f_r),
            temperature_k: f(self.temperature),
            sigmas: TlsSigmas {
                f_tls0: o(self.sigmas.f_tls0),
                n_c: o(self.sigmas.n_c),
                beta: o(self.sigmas.beta),
                tan_other: o(self.sigmas.tan_other),
            },
            chi2_reduced: f(self.chi2_reduced),
            sigma_method: self.sigma_method,
            bounds_active: self.bounds_active.clone(),
            non_identifiable: self.non_identifiable.clone(),
            q_i_lowest_n: Some(f(self.q_i_lowest_n)),
            model_variant: self.variant,
            abs_qc: o(self.abs_qc),
        }
    }
}

/// Wire form of [`TlsFitResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TlsFitRecord {
    pub f_tls0: f64,
    pub n_c: f64,
    pub beta: f64,
    pub tan_other: f64,
    pub q_i_lp: f64,
    pub f_r_hz: f64,
    pub temperature_k: f64,
    pub sigmas: TlsSigmas<f64>,
    #[serde(default)]
    pub sigma_method: SigmaMethod,
    pub chi2_reduced: f64,
    pub bounds_active: Vec<String>,
    #[serde(default)]
    pub non_identifiable: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_i_lowest_n: Option<f64>,
    #[serde(default)]
    pub model_variant: ModelVariant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_qc: Option<f64>,
}

impl TlsFitRecord {
    pub fn from_json(text: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(text)?;
        rec.to_result::<f64>()?;
        Ok(rec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn to_result<T: Real>(&self) -> Result<TlsFitResult<T>> {
        let c = |v: f64| T::lit(v);
        let params = TlsParams {
            f_tls0: c(self.f_tls0),
            n_c: c(self.n_c),
            beta: c(self.beta),
            tan_other: c(self.tan_other),
        };
        params.validate()?;
        if !(self.f_r_hz > 0.0) || !(self.temperature_k > 0.0) || !(self.q_i_lp > 0.0) {
            return Err(Error::Validation(
                "fit record needs positive f_r_hz, temperature_k and q_i_lp".into(),
            ));
        }
        let o = |v: Option<f64>| v.map(c);
        Ok(TlsFitResult {
            params,
            sigmas: TlsSigmas {
                f_tls0: o(self.sigmas.f_tls0),
                n_c: o(self.sigmas.n_c),
                beta: o(self.sigmas.beta),
                tan_other: o(self.sigmas.tan_other),
            },
            q_i_lp: c(self.q_i_lp),
            q_i_lowest_n: c(self.q_i_lowest_n.unwrap_or(f64::NAN)),
            sigma_method: self.sigma_method,
            chi2_reduced: c(self.chi2_reduced),
            f_r: c(self.f_r_hz),
            temperature: c(self.temperature_k),
            variant: self.model_variant,
            bounds_active: self.bounds_active.clone(),
            non_identifiable: self.non_identifiable.clone(),
            abs_qc: o(self.abs_qc),
        })
    }
}

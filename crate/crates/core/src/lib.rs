// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Microwave-loss analysis for superconducting resonators.
//!
//! * [`resonance`]: notch S21 model and circle-fit extraction of `f_r`,
//!   `Q_l`, `|Q_c|`, `phi` and `Q_i` from complex transmission traces.
//! * [`photon`]: applied power and mean photon number from an attenuation chain.
//! * [`tls`]: power-dependent TLS loss model, sweep fits and aging reports.
//! * [`xps`]: oxide thickness from XPS oxide/metal intensity ratios.
//! * [`synth`]: seeded synthetic traces and sweeps.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below name the double-precision instantiations used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constants;
pub mod data;
pub mod error;
pub mod linalg;
pub mod lm;
pub mod photon;
pub mod reference;
pub mod resonance;
pub mod scalar;
pub mod synth;
pub mod tls;
pub mod xps;

pub use constants::PhysicalConstants;
pub use data::{
    calibrate_background, load_power_sweep, load_trace, save_power_sweep, save_trace, ComplexTrace,
    PowerSweep, SweepPoint, TraceFormat,
};
pub use error::{Error, Result};
pub use photon::{chain_power, mean_photons, AttenuationChain, AttenuationStage};
pub use resonance::{
    extract, extract_with, internal_q, s21_model, ExtractOptions, NotchFit, NotchFitRecord,
    NotchParams,
};
pub use scalar::Real;
pub use synth::{synth_sweep, synth_trace, NoiseKind, NoiseSpec};
pub use tls::{
    aging_report, fit_tls, fit_tls_with, loss_model, qi_low_photon, AgingDelta, ModelVariant,
    TlsFitOptions, TlsFitRecord, TlsFitResult, TlsParams,
};
pub use xps::{oxide_ratio, oxide_thickness, XpsConstants};

pub type ComplexTraceF64 = ComplexTrace<f64>;
pub type ComplexTraceF32 = ComplexTrace<f32>;
pub type PowerSweepF64 = PowerSweep<f64>;
pub type PowerSweepF32 = PowerSweep<f32>;
pub type NotchParamsF64 = NotchParams<f64>;
pub type NotchParamsF32 = NotchParams<f32>;
pub type NotchFitF64 = NotchFit<f64>;
pub type TlsParamsF64 = TlsParams<f64>;
pub type TlsParamsF32 = TlsParams<f32>;
pub type TlsFitResultF64 = TlsFitResult<f64>;
pub type XpsConstantsF64 = XpsConstants<f64>;
pub type PhysicalConstantsF64 = PhysicalConstants<f64>;

// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Power-dependent two-level-system loss model
//!
//! `tan(delta) = 1/Q_i = F tan(delta)^0 tanh(h f_r / 2 k_B T) / (1 + <n>/n_c)^beta + tan(delta)_other`,
//! its fit to power sweeps, and aging comparisons between fits.

pub mod aging;
pub mod fit;
pub mod model;

pub use aging::{aging_report, csv_table, format_pct, markdown_table, AgingDelta};
pub use fit::{
    fit_tls, fit_tls_with, Bootstrap, SigmaMethod, TlsFitOptions, TlsFitRecord, TlsFitResult,
    TlsSigmas,
};
pub use model::{
    loss_model, loss_model_variant, qi_low_photon, thermal_factor, ModelVariant, TlsParams,
    BASE_TEMPERATURE,
};

// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Notch-resonator transmission model and circle-fit parameter extraction.

pub mod circle;
pub mod delay;
pub mod extract;
pub mod model;
pub mod phase;

pub use circle::{fit_circle, CircleFit};
pub use delay::{estimate_delay, remove_delay};
pub use extract::{extract, extract_with, ExtractOptions, Extraction, NotchFit, NotchFitRecord};
pub use model::{internal_q, s21_model, NotchParams};
pub use phase::{fit_phase, phase_model, PhaseFit};

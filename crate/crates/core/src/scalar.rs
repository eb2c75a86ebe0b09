// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All models and fitters are written against [`Real`], which is implemented
//! for `f32` and `f64`. Fits are tuned for `f64`; `f32` is supported for model
//! evaluation and coarse fitting where single precision is enough.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: f32 or f64.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x % two_pi;
    if y > T::PI() {
        y = y - two_pi;
    } else if y <= -T::PI() {
        y = y + two_pi;
    }
    y
}

/// Unwraps a phase sequence so consecutive samples never jump by more than pi.
pub fn unwrap_phase<T: Real>(phase: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = T::zero();
    let mut prev: Option<T> = None;
    for &p in phase {
        if let Some(q) = prev {
            offset = offset + wrap_angle(p - q) - (p - q);
        }
        out.push(p + offset);
        prev = Some(p);
    }
    out
}

/// Relative difference `|a - b| / max(|b|, floor)`.
pub fn rel_diff<T: Real>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / b.abs().max(floor)
}

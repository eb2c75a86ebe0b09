// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact SI defining constants.

use crate::scalar::Real;

/// Planck constant, J s.
pub const PLANCK: f64 = 6.62607015e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

/// Physical constants in a chosen scalar type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    pub h: T,
    pub k_b: T,
    pub hbar: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn si() -> Self {
        Self {
            h: T::lit(PLANCK),
            k_b: T::lit(BOLTZMANN),
            hbar: T::lit(HBAR),
        }
    }

    /// `h f / (2 k_B T)`, evaluated as `(h / k_B) * f / (2 T)` so it stays in
    /// range for `f32`.
    pub fn half_photon_over_kt(f: T, temperature: T) -> T {
        let h_over_k = T::lit(PLANCK / BOLTZMANN);
        h_over_k * f / (temperature + temperature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        let c = PhysicalConstants::<f64>::si();
        assert_eq!(c.h, 6.62607015e-34);
        assert_eq!(c.k_b, 1.380649e-23);
        assert!((c.hbar - 1.054571817e-34).abs() / 1.054571817e-34 < 1e-9);
    }

    #[test]
    fn saturation_argument_at_base_temperature() {
        let x = PhysicalConstants::<f64>::half_photon_over_kt(5.209e9, 0.010);
        let direct = 6.62607015e-34 * 5.209e9 / (2.0 * 1.380649e-23 * 0.010);
        assert!((x - direct).abs() < 1e-12);
        assert!((x - 12.5).abs() < 1e-3);
    }
}

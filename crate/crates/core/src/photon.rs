// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Applied power and mean intracavity photon number from the source power
//! and the input-line attenuation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuationStage {
    pub label: String,
    #[serde(rename = "db")]
    pub attenuation_db: f64,
}

/// Ordered attenuation stages between the source and the resonator input.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuationChain {
    pub stages: Vec<AttenuationStage>,
}

impl AttenuationChain {
    pub fn new(stages: Vec<AttenuationStage>) -> Result<Self> {
        let chain = Self { stages };
        chain.validate()?;
        Ok(chain)
    }

    /// Convenience constructor from `(label, dB)` pairs.
    pub fn from_pairs<'a>(stages: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        Self::new(
            stages
                .into_iter()
                .map(|(label, db)| AttenuationStage {
                    label: label.to_owned(),
                    attenuation_db: db,
                })
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.stages {
            if !(s.attenuation_db >= 0.0) || !s.attenuation_db.is_finite() {
                return Err(Error::Validation(format!(
                    "stage `{}` has attenuation {} dB; must be finite and >= 0",
                    s.label, s.attenuation_db
                )));
            }
        }
        Ok(())
    }

    pub fn total_db(&self) -> f64 {
        self.stages.iter().map(|s| s.attenuation_db).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let chain: Self = serde_json::from_str(text)?;
        chain.validate()?;
        Ok(chain)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// Power in watts at the end of the chain: `10^((P_dBm - A_dB)/10) mW`.
pub fn chain_power<T: Real>(source_dbm: T, chain: &AttenuationChain) -> T {
    let dbm = source_dbm - T::lit(chain.total_db());
    T::lit(10.0).powf(dbm / T::lit(10.0)) * T::lit(1e-3)
}

/// Mean photon number of a notch resonator driven with `p_applied` watts:
/// `<n> = 2 Q_l^2 P / (hbar w_r^2 |Q_c|)`.
pub fn mean_photons<T: Real>(p_applied: T, f_r: T, q_l: T, abs_qc: T) -> T {
    let omega = (T::PI() + T::PI()) * f_r;
    (q_l + q_l) * q_l * p_applied / (T::lit(HBAR) * omega * omega * abs_qc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(dbs: &[f64]) -> AttenuationChain {
        AttenuationChain::from_pairs(dbs.iter().map(|&d| ("s", d))).unwrap()
    }

    #[test]
    fn zero_dbm_is_one_milliwatt() {
        assert_eq!(chain_power(0.0f64, &AttenuationChain::default()), 1e-3);
    }

    #[test]
    fn hundred_twenty_db_chain() {
        let p = chain_power(-20.0f64, &chain(&[60.0, 60.0]));
        assert!((p - 1e-17).abs() / 1e-17 < 1e-12);
    }

    #[test]
    fn ten_db_stage_divides_by_ten() {
        let base = chain_power(-13.0f64, &chain(&[20.0, 35.5]));
        let more = chain_power(-13.0f64, &chain(&[20.0, 35.5, 10.0]));
        assert!((base / more - 10.0).abs() < 1e-12);
    }

    #[test]
    fn worked_photon_number() {
        let n = mean_photons(1e-17f64, 5.209e9, 7.33e5, 2.28e6);
        let hbar = 6.62607015e-34 / (2.0 * std::f64::consts::PI);
        let w = 2.0 * std::f64::consts::PI * 5.209e9;
        let oracle = 2.0 * 7.33e5f64.powi(2) * 1e-17 / (hbar * w * w * 2.28e6);
        assert!((n - oracle).abs() / oracle < 1e-12);
        assert!((n - 41.7).abs() < 0.1, "{n}");
    }

    #[test]
    fn photon_number_linear_and_zero() {
        let n1 = mean_photons(3e-16f64, 5e9, 1e5, 3e5);
        let n2 = mean_photons(6e-16f64, 5e9, 1e5, 3e5);
        assert_eq!(n2, 2.0 * n1);
        assert_eq!(mean_photons(0.0f64, 5e9, 1e5, 3e5), 0.0);
    }

    #[test]
    fn negative_stage_rejected() {
        assert!(AttenuationChain::from_pairs([("bad", -1.0)]).is_err());
        assert!(AttenuationChain::from_json(r#"{"stages":[{"label":"RT","db":-3}]}"#).is_err());
    }

    #[test]
    fn json_config() {
        let c = AttenuationChain::from_json(
            r#"{"stages":[{"label":"RT","db":60},{"label":"cryo","db":60}]}"#,
        )
        .unwrap();
        assert_eq!(c.total_db(), 120.0);
        assert_eq!(c.stages[1].label, "cryo");
    }
}

// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Published loss-model parameters for the four microstrip resonator
//! families (deposited Al2O3 or native oxide on Ta or Al), each measured as
//! fabricated and after air exposure.

use crate::scalar::Real;
use crate::tls::fit::{SigmaMethod, TlsFitResult, TlsSigmas};
use crate::tls::model::{qi_low_photon, ModelVariant, TlsParams};

/// Critical photon number used wherever a row must be turned into a full
/// parameter set; the published rows do not carry one.
pub const ASSUMED_N_C: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub device: &'static str,
    pub time_in_air: &'static str,
    /// Reported low-photon internal quality factor.
    pub q_i_lp: f64,
    pub f_tls0: f64,
    pub f_r: f64,
    pub q_c: f64,
    pub tan_other: f64,
    pub beta: f64,
}

macro_rules! row {
    ($dev:expr, $t:expr, $qi:expr, $f:expr, $fr:expr, $qc:expr, $o:expr, $b:expr) => {
        ReferenceRow {
            device: $dev,
            time_in_air: $t,
            q_i_lp: $qi * 1e6,
            f_tls0: $f * 1e-6,
            f_r: $fr * 1e9,
            q_c: $qc * 1e6,
            tan_other: $o * 1e-6,
            beta: $b,
        }
    };
}

pub const RESONATOR_ROWS: [ReferenceRow; 9] = [
    row!(
        "Deposited Al2O3/Ta",
        "0",
        1.08,
        0.93,
        5.209,
        2.28,
        0.0,
        0.14
    ),
    row!(
        "Deposited Al2O3/Ta",
        "6 months",
        0.98,
        1.05,
        5.212,
        0.12,
        0.0,
        0.13
    ),
    row!(
        "Deposited Al2O3/Ta",
        "14 months",
        0.92,
        1.07,
        5.206,
        0.16,
        0.0,
        0.14
    ),
    row!("Native Ta2O5/Ta", "0", 1.35, 0.61, 5.075, 0.70, 0.14, 0.15),
    row!(
        "Native Ta2O5/Ta",
        "2 months",
        0.83,
        0.96,
        5.053,
        0.27,
        0.20,
        0.18
    ),
    row!(
        "Deposited Al2O3/Al",
        "0",
        1.44,
        0.68,
        5.126,
        0.42,
        0.0,
        0.24
    ),
    row!(
        "Deposited Al2O3/Al",
        "2 weeks",
        1.23,
        0.87,
        5.122,
        0.21,
        0.0,
        0.26
    ),
    row!("Native AlOx/Al", "0", 1.34, 0.59, 5.178, 0.20, 0.03, 0.21),
    row!(
        "Native AlOx/Al",
        "2 weeks",
        0.16,
        0.89,
        5.174,
        0.24,
        5.59,
        0.21
    ),
];

impl ReferenceRow {
    pub fn params<T: Real>(&self, n_c: T) -> TlsParams<T> {
        TlsParams {
            f_tls0: T::lit(self.f_tls0),
            n_c,
            beta: T::lit(self.beta),
            tan_other: T::lit(self.tan_other),
        }
    }

    /// Low-photon `Q_i` predicted from the row's own loss parameters.
    pub fn predicted_q_i_lp<T: Real>(&self, temperature: T) -> T {
        qi_low_photon(
            &self.params(T::lit(ASSUMED_N_C)),
            T::lit(self.f_r),
            temperature,
        )
        .expect("published rows have non-zero loss")
    }

    /// The row expressed as a fit result (no uncertainties).
    pub fn fit_result<T: Real>(&self, temperature: T) -> TlsFitResult<T> {
        let params = self.params(T::lit(ASSUMED_N_C));
        TlsFitResult {
            q_i_lp: self.predicted_q_i_lp(temperature),
            q_i_lowest_n: T::lit(self.q_i_lp),
            params,
            sigmas: TlsSigmas::default(),
            sigma_method: SigmaMethod::Covariance,
            chi2_reduced: T::zero(),
            f_r: T::lit(self.f_r),
            temperature,
            variant: ModelVariant::ExponentOutside,
            bounds_active: if self.tan_other == 0.0 {
                vec!["tan_other".to_owned()]
            } else {
                Vec::new()
            },
            non_identifiable: vec!["n_c".to_owned()],
            abs_qc: Some(T::lit(self.q_c)),
        }
    }
}

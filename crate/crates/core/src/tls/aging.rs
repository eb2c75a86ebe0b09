// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Before/after comparison of two loss-model fits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::tls::fit::TlsFitResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgingDelta<T> {
    /// `100 (after - before) / before` for `F tan(delta)^0`.
    pub f_tls0_pct: T,
    pub tan_other_abs: T,
    pub q_i_lp_abs: T,
    pub q_i_lp_pct: T,
}

pub fn aging_report<T: Real>(before: &TlsFitResult<T>, after: &TlsFitResult<T>) -> AgingDelta<T> {
    let hundred = T::lit(100.0);
    let b = &before.params;
    let a = &after.params;
    AgingDelta {
        f_tls0_pct: hundred * (a.f_tls0 - b.f_tls0) / b.f_tls0,
        tan_other_abs: a.tan_other - b.tan_other,
        q_i_lp_abs: after.q_i_lp - before.q_i_lp,
        q_i_lp_pct: hundred * (after.q_i_lp - before.q_i_lp) / before.q_i_lp,
    }
}

/// Signed percentage with one decimal, e.g. `+27.9%`.
pub fn format_pct<T: Real>(v: T) -> String {
    let v = v.to_f64_lossy();
    // avoid printing "-0.0%"
    let v = if v.abs() < 0.05 { 0.0 } else { v };
    format!("{v:+.1}%")
}

fn fmt_opt(v: Option<f64>, scale: f64) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{:.2}", x / scale))
}

/// Table row cells in the column order
/// `Q_i,LP (1e6) | F tan(delta)^0 (1e-6) | f_r (GHz) | Q_c (1e6) | tan(delta)_other (1e-6) | beta`.
fn row_cells<T: Real>(fit: &TlsFitResult<T>) -> [String; 6] {
    let f = |v: T| v.to_f64_lossy();
    [
        format!("{:.2}", f(fit.q_i_lp) / 1e6),
        format!("{:.2}", f(fit.params.f_tls0) / 1e-6),
        format!("{:.3}", f(fit.f_r) / 1e9),
        fmt_opt(fit.abs_qc.map(f), 1e6),
        format!("{:.2}", f(fit.params.tan_other) / 1e-6),
        format!("{:.2}", f(fit.params.beta)),
    ]
}

const COLUMNS: [&str; 6] = [
    "Q_i,LP (x1e6)",
    "F tan_TLS0 (x1e-6)",
    "f_r (GHz)",
    "Q_c (x1e6)",
    "tan_other (x1e-6)",
    "beta",
];

/// Markdown table with the two fits as rows, followed by the changes.
pub fn markdown_table<T: Real>(
    labels: (&str, &str),
    before: &TlsFitResult<T>,
    after: &TlsFitResult<T>,
) -> String {
    let delta = aging_report(before, after);
    let mut out = String::new();
    let _ = writeln!(out, "| Epoch | {} |", COLUMNS.join(" | "));
    let _ = writeln!(out, "|---|{}", "---|".repeat(COLUMNS.len()));
    for (label, fit) in [(labels.0, before), (labels.1, after)] {
        let _ = writeln!(out, "| {label} | {} |", row_cells(fit).join(" | "));
    }
    out.push('\n');
    let _ = writeln!(out, "| Change | F tan_TLS0 | tan_other (x1e-6) | Q_i,LP |");
    let _ = writeln!(out, "|---|---|---|---|");
    let _ = writeln!(
        out,
        "| {} -> {} | {} | {:+.2} | {} ({:+.3e}) |",
        labels.0,
        labels.1,
        format_pct(delta.f_tls0_pct),
        delta.tan_other_abs.to_f64_lossy() / 1e-6,
        format_pct(delta.q_i_lp_pct),
        delta.q_i_lp_abs.to_f64_lossy(),
    );
    out
}

/// CSV rendering of the same content as [`markdown_table`].
pub fn csv_table<T: Real>(
    labels: (&str, &str),
    before: &TlsFitResult<T>,
    after: &TlsFitResult<T>,
) -> String {
    let delta = aging_report(before, after);
    let mut out = String::new();
    let _ = writeln!(out, "epoch,q_i_lp,f_tls0,f_r_hz,abs_qc,tan_other,beta");
    for (label, fit) in [(labels.0, before), (labels.1, after)] {
        let f = |v: T| v.to_f64_lossy();
        let _ = writeln!(
            out,
            "{label},{},{},{},{},{},{}",
            f(fit.q_i_lp),
            f(fit.params.f_tls0),
            f(fit.f_r),
            fit.abs_qc.map(f).map_or(String::new(), |v| v.to_string()),
            f(fit.params.tan_other),
            f(fit.params.beta),
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "f_tls0_pct,tan_other_abs,q_i_lp_abs,q_i_lp_pct");
    let _ = writeln!(
        out,
        "{},{},{},{}",
        delta.f_tls0_pct.to_f64_lossy(),
        delta.tan_other_abs.to_f64_lossy(),
        delta.q_i_lp_abs.to_f64_lossy(),
        delta.q_i_lp_pct.to_f64_lossy(),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::RESONATOR_ROWS;

    #[test]
    fn reported_aging_percentages() {
        let cases = [
            ("Deposited Al2O3/Al", "+27.9%"),
            ("Deposited Al2O3/Ta", "+15.1%"),
            ("Native Ta2O5/Ta", "+57.4%"),
            ("Native AlOx/Al", "+50.8%"),
        ];
        for (name, want) in cases {
            let rows: Vec<_> = RESONATOR_ROWS.iter().filter(|r| r.device == name).collect();
            let before = rows.first().unwrap().fit_result::<f64>(0.010);
            let after = rows.last().unwrap().fit_result::<f64>(0.010);
            assert_eq!(
                format_pct(aging_report(&before, &after).f_tls0_pct),
                want,
                "{name}"
            );
        }
    }

    #[test]
    fn identical_fits_have_zero_deltas() {
        let fit = RESONATOR_ROWS[0].fit_result::<f64>(0.010);
        let d = aging_report(&fit, &fit);
        assert_eq!(d.f_tls0_pct, 0.0);
        assert_eq!(d.tan_other_abs, 0.0);
        assert_eq!(d.q_i_lp_abs, 0.0);
        assert_eq!(format_pct(d.f_tls0_pct), "+0.0%");
    }

    #[test]
    fn markdown_has_columns_in_table_order() {
        let a = RESONATOR_ROWS[0].fit_result::<f64>(0.010);
        let b = RESONATOR_ROWS[2].fit_result::<f64>(0.010);
        let md = markdown_table(("t=0", "14 months"), &a, &b);
        let header = md.lines().next().unwrap();
        let pos: Vec<usize> = COLUMNS.iter().map(|c| header.find(c).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(md.contains("+15.1%"));
        assert!(md.contains("| 2.28 |"));
    }
}

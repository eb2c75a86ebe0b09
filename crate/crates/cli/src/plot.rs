// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Log-log SVG of `Q_i` against mean photon number with the fitted curve.

use std::fmt::Write as _;

use reslab::{PowerSweepF64, TlsFitResultF64};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;
const CURVE_POINTS: usize = 200;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn decades(lo: f64, hi: f64) -> Self {
        let lo = lo.log10().floor();
        let mut hi = hi.log10().ceil();
        if hi <= lo {
            hi = lo + 1.0;
        }
        Axis { lo, hi }
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo) / (self.hi - self.lo)
    }
}

pub fn render(sweep: &PowerSweepF64, fit: &TlsFitResultF64, title: &str) -> String {
    let pts = sweep.points();
    let n_lo = pts.iter().map(|p| p.n_mean).fold(f64::INFINITY, f64::min);
    let n_hi = pts.iter().map(|p| p.n_mean).fold(0.0, f64::max);
    let curve: Vec<(f64, f64)> = (0..CURVE_POINTS)
        .map(|k| {
            let t = k as f64 / (CURVE_POINTS - 1) as f64;
            let n = (n_lo.ln() + (n_hi.ln() - n_lo.ln()) * t).exp();
            (n, fit.q_i_at(n))
        })
        .collect();
    let q_vals = pts.iter().map(|p| p.q_i).chain(curve.iter().map(|c| c.1));
    let (q_lo, q_hi) = q_vals.fold((f64::INFINITY, 0.0f64), |(a, b), q| (a.min(q), b.max(q)));
    let xa = Axis::decades(n_lo, n_hi);
    let ya = Axis::decades(q_lo, q_hi);
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let x = |n: f64| MARGIN_L + pw * xa.frac(n);
    let y = |q: f64| MARGIN_T + ph * (1.0 - ya.frac(q));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for d in (xa.lo as i32)..=(xa.hi as i32) {
        let px = x(10f64.powi(d));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#,
            MARGIN_T + ph,
            MARGIN_T + ph + 5.0,
            MARGIN_T + ph + 20.0
        );
    }
    for d in (ya.lo as i32)..=(ya.hi as i32) {
        let py = y(10f64.powi(d));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_L}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">mean photon number</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">Q_i</text>"#,
        MARGIN_T + ph / 2.0
    );
    let _ = writeln!(s, r#"<text x="{MARGIN_L}" y="20">{}</text>"#, escape(title));
    let path: Vec<String> = curve
        .iter()
        .map(|&(n, q)| format!("{:.2},{:.2}", x(n), y(q)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="crimson" stroke-width="1.5" points="{}"/>"#,
        path.join(" ")
    );
    for p in pts {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"/>"#,
            x(p.n_mean),
            y(p.q_i)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use reslab::synth::log_grid;
    use reslab::{fit_tls, synth_sweep, NoiseSpec, TlsParams};

    #[test]
    fn svg_has_points_and_curve() {
        let p = TlsParams {
            f_tls0: 1e-6,
            n_c: 10.0,
            beta: 0.2,
            tan_other: 1e-7,
        };
        let sweep = synth_sweep(&p, 5e9, 0.01, &log_grid(1.0, 1e6, 12), NoiseSpec::none()).unwrap();
        let fit = fit_tls(&sweep).unwrap();
        let svg = render(&sweep, &fit, "a < b");
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 12);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("a &lt; b"));
    }
}

// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! Measurement containers and their CSV representations.
//!
//! Traces are stored as `freq_hz,re,im` or `freq_hz,amp_db,phase_rad`; power
//! sweeps as `n_mean,qi[,qi_sigma]`. Lines starting with `#` are metadata and
//! are collected into the container's `meta` field on load.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest reference magnitude accepted by [`calibrate_background`].
pub const BACKGROUND_GUARD: f64 = 1e-15;

/// Complex transmission samples on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace<T> {
    freqs: Vec<T>,
    samples: Vec<Complex<T>>,
    pub meta: Option<String>,
}

impl<T: Real> ComplexTrace<T> {
    pub fn new(freqs: Vec<T>, samples: Vec<Complex<T>>, meta: Option<String>) -> Result<Self> {
        if freqs.len() != samples.len() {
            return Err(Error::Validation(format!(
                "frequency grid has {} points but there are {} samples",
                freqs.len(),
                samples.len()
            )));
        }
        if let Some(k) = freqs.iter().position(|f| !f.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite frequency at index {k}"
            )));
        }
        if let Some(k) = samples
            .iter()
            .position(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(Error::Validation(format!("non-finite sample at index {k}")));
        }
        if let Some(k) = freqs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(format!(
                "frequencies not strictly increasing at index {}",
                k + 1
            )));
        }
        Ok(Self {
            freqs,
            samples,
            meta,
        })
    }

    pub fn freqs(&self) -> &[T] {
        &self.freqs
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Frequency span `f_max - f_min`.
    pub fn span(&self) -> T {
        match (self.freqs.first(), self.freqs.last()) {
            (Some(&a), Some(&b)) => b - a,
            _ => T::zero(),
        }
    }

    /// Same grid, samples replaced by `f(freq, sample)`.
    pub fn map_samples<F>(&self, f: F) -> Self
    where
        F: Fn(T, Complex<T>) -> Complex<T>,
    {
        Self {
            freqs: self.freqs.clone(),
            samples: self
                .freqs
                .iter()
                .zip(&self.samples)
                .map(|(&fr, &s)| f(fr, s))
                .collect(),
            meta: self.meta.clone(),
        }
    }

    pub(crate) fn require_len(&self, min: usize, what: &str) -> Result<()> {
        if self.len() < min {
            return Err(Error::Precondition(format!(
                "{what} needs at least {min} points, trace has {}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// On-disk layout of a trace file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    ReIm,
    DbPhase,
}

impl TraceFormat {
    pub fn header(self) -> [&'static str; 3] {
        match self {
            TraceFormat::ReIm => ["freq_hz", "re", "im"],
            TraceFormat::DbPhase => ["freq_hz", "amp_db", "phase_rad"],
        }
    }

    /// Picks the format whose header matches the first non-comment line.
    pub fn detect(text: &str) -> Option<Self> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))?;
        let cols: Vec<&str> = first.split(',').map(str::trim).collect();
        [TraceFormat::ReIm, TraceFormat::DbPhase]
            .into_iter()
            .find(|f| cols == f.header())
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn collect_meta(text: &str) -> Option<String> {
    let lines: Vec<&str> = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(str::trim)
        .collect();
    (!lines.is_empty()).then(|| lines.join("\n"))
}

/// Numeric rows tagged with their 1-based file line numbers.
type Rows<T> = Vec<(u64, Vec<T>)>;

/// Parsed CSV body.
fn parse_rows<T: Real>(text: &str, expected: &[&[&str]]) -> Result<(Vec<String>, Rows<T>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: e.position().map_or(1, |p| p.line()),
            msg: e.to_string(),
        })?
        .iter()
        .map(str::to_owned)
        .collect();
    if !expected
        .iter()
        .any(|cols| header.iter().map(String::as_str).eq(cols.iter().copied()))
    {
        let want: Vec<String> = expected.iter().map(|c| c.join(",")).collect();
        return Err(Error::Parse {
            line: rdr.position().line().max(1),
            msg: format!(
                "unexpected header `{}`, expected one of {want:?}",
                header.join(",")
            ),
        });
    }
    let width = header.len();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(Error::Parse {
                line,
                msg: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let vals = rec
            .iter()
            .map(|field| {
                field.parse::<T>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("invalid number `{field}`"),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push((line, vals));
    }
    Ok((header, rows))
}

/// Parses trace CSV text.
pub fn parse_trace<T: Real>(text: &str, format: TraceFormat) -> Result<ComplexTrace<T>> {
    let (_, rows) = parse_rows::<T>(text, &[&format.header()])?;
    let mut freqs = Vec::with_capacity(rows.len());
    let mut samples = Vec::with_capacity(rows.len());
    for (line, v) in &rows {
        if let Some(&prev) = freqs.last() {
            if !(v[0] > prev) {
                return Err(Error::Validation(format!(
                    "frequency not strictly increasing at line {line}"
                )));
            }
        }
        freqs.push(v[0]);
        samples.push(match format {
            TraceFormat::ReIm => Complex::new(v[1], v[2]),
            TraceFormat::DbPhase => {
                let amp = T::lit(10.0).powf(v[1] / T::lit(20.0));
                Complex::from_polar(amp, v[2])
            }
        });
    }
    ComplexTrace::new(freqs, samples, collect_meta(text))
}

pub fn load_trace<T: Real>(path: impl AsRef<Path>, format: TraceFormat) -> Result<ComplexTrace<T>> {
    parse_trace(&read_file(path.as_ref())?, format)
}

/// Renders a trace as `freq_hz,re,im` CSV at full precision, with `meta`
/// emitted as `#` comment lines.
pub fn format_trace<T: Real>(trace: &ComplexTrace<T>) -> String {
    let mut out = String::new();
    if let Some(meta) = &trace.meta {
        for l in meta.lines() {
            let _ = writeln!(out, "# {l}");
        }
    }
    out.push_str("freq_hz,re,im\n");
    for (f, s) in trace.freqs.iter().zip(&trace.samples) {
        let _ = writeln!(out, "{f},{},{}", s.re, s.im);
    }
    out
}

pub fn save_trace<T: Real>(path: impl AsRef<Path>, trace: &ComplexTrace<T>) -> Result<()> {
    write_file(path.as_ref(), &format_trace(trace))
}

/// Divides `trace` pointwise by a background `reference` recorded on the same grid.
pub fn calibrate_background<T: Real>(
    trace: &ComplexTrace<T>,
    reference: &ComplexTrace<T>,
) -> Result<ComplexTrace<T>> {
    if trace.freqs != reference.freqs {
        return Err(Error::Validation(
            "trace and background reference are on different frequency grids".into(),
        ));
    }
    let guard = T::lit(BACKGROUND_GUARD);
    if let Some(k) = reference.samples.iter().position(|s| !(s.norm() >= guard)) {
        return Err(Error::Validation(format!(
            "background reference magnitude below {BACKGROUND_GUARD} at index {k}"
        )));
    }
    let samples = trace
        .samples
        .iter()
        .zip(&reference.samples)
        .map(|(&s, &r)| s / r)
        .collect();
    Ok(ComplexTrace {
        freqs: trace.freqs.clone(),
        samples,
        meta: trace.meta.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    pub n_mean: T,
    pub q_i: T,
    pub q_i_sigma: Option<T>,
}

/// Internal quality factor against mean photon number for one resonator at
/// one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSweep<T> {
    points: Vec<SweepPoint<T>>,
    f_r: T,
    temperature: T,
    pub meta: Option<String>,
}

impl<T: Real> PowerSweep<T> {
    pub fn new(points: Vec<SweepPoint<T>>, f_r: T, temperature: T) -> Result<Self> {
        if !(f_r > T::zero()) || !f_r.is_finite() {
            return Err(Error::Validation(format!(
                "resonance frequency must be positive, got {f_r}"
            )));
        }
        if !(temperature > T::zero()) || !temperature.is_finite() {
            return Err(Error::Validation(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        if points.is_empty() {
            return Err(Error::Validation("power sweep has no points".into()));
        }
        for (k, p) in points.iter().enumerate() {
            if !(p.n_mean > T::zero()) || !p.n_mean.is_finite() {
                return Err(Error::Validation(format!(
                    "row {}: n_mean must be positive and finite, got {}",
                    k + 1,
                    p.n_mean
                )));
            }
            if !(p.q_i > T::zero()) || !p.q_i.is_finite() {
                return Err(Error::Validation(format!(
                    "row {}: qi must be positive and finite, got {}",
                    k + 1,
                    p.q_i
                )));
            }
            if let Some(s) = p.q_i_sigma {
                if !(s > T::zero()) || !s.is_finite() {
                    return Err(Error::Validation(format!(
                        "row {}: qi_sigma must be positive and finite, got {s}",
                        k + 1
                    )));
                }
            }
        }
        Ok(Self {
            points,
            f_r,
            temperature,
            meta: None,
        })
    }

    pub fn points(&self) -> &[SweepPoint<T>] {
        &self.points
    }

    pub fn f_r(&self) -> T {
        self.f_r
    }

    pub fn temperature(&self) -> T {
        self.temperature
    }

    pub fn with_temperature(mut self, temperature: T) -> Result<Self> {
        let meta = self.meta.take();
        let mut s = Self::new(self.points, self.f_r, temperature)?;
        s.meta = meta;
        Ok(s)
    }
}

pub fn parse_power_sweep<T: Real>(text: &str, f_r: T, temperature: T) -> Result<PowerSweep<T>> {
    let (_, rows) = parse_rows::<T>(text, &[&["n_mean", "qi"], &["n_mean", "qi", "qi_sigma"]])?;
    let points = rows
        .into_iter()
        .map(|(_, v)| SweepPoint {
            n_mean: v[0],
            q_i: v[1],
            q_i_sigma: v.get(2).copied(),
        })
        .collect();
    let mut sweep = PowerSweep::new(points, f_r, temperature)?;
    sweep.meta = collect_meta(text);
    Ok(sweep)
}

pub fn load_power_sweep<T: Real>(
    path: impl AsRef<Path>,
    f_r: T,
    temperature: T,
) -> Result<PowerSweep<T>> {
    parse_power_sweep(&read_file(path.as_ref())?, f_r, temperature)
}

pub fn format_power_sweep<T: Real>(sweep: &PowerSweep<T>) -> String {
    let mut out = String::new();
    if let Some(meta) = &sweep.meta {
        for l in meta.lines() {
            let _ = writeln!(out, "# {l}");
        }
    }
    let with_sigma = sweep.points.iter().any(|p| p.q_i_sigma.is_some());
    out.push_str(if with_sigma {
        "n_mean,qi,qi_sigma\n"
    } else {
        "n_mean,qi\n"
    });
    for p in &sweep.points {
        match (with_sigma, p.q_i_sigma) {
            (true, Some(s)) => {
                let _ = writeln!(out, "{},{},{}", p.n_mean, p.q_i, s);
            }
            (true, None) => {
                let _ = writeln!(out, "{},{},", p.n_mean, p.q_i);
            }
            _ => {
                let _ = writeln!(out, "{},{}", p.n_mean, p.q_i);
            }
        }
    }
    out
}

pub fn save_power_sweep<T: Real>(path: impl AsRef<Path>, sweep: &PowerSweep<T>) -> Result<()> {
    write_file(path.as_ref(), &format_power_sweep(sweep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn re_im_rows_transcribed() {
        let t: ComplexTrace<f64> = parse_trace(
            "freq_hz,re,im\n1e9,1,0\n2e9,0,1\n3e9,-1,0\n",
            TraceFormat::ReIm,
        )
        .unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.samples(), &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        assert_eq!(t.freqs(), &[1e9, 2e9, 3e9]);
    }

    #[test]
    fn db_phase_rows_converted() {
        let t: ComplexTrace<f64> = parse_trace(
            "freq_hz,amp_db,phase_rad\n5e9,0.0,0.0\n",
            TraceFormat::DbPhase,
        )
        .unwrap();
        assert_eq!(t.samples()[0], c(1.0, 0.0));
        let t: ComplexTrace<f64> = parse_trace(
            "freq_hz,amp_db,phase_rad\n5e9,-6.0205999,3.14159265\n",
            TraceFormat::DbPhase,
        )
        .unwrap();
        let s = t.samples()[0];
        assert!((s.re + 0.5).abs() < 1e-7, "{s}");
        assert!(s.im.abs() < 1e-8);
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "# meta\nfreq_hz,re,im\n1e9,1,0\n2e9,x,1\n";
        match parse_trace::<f64>(text, TraceFormat::ReIm) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        match parse_trace::<f64>("freq_hz,re,im\n1e9,1\n", TraceFormat::ReIm) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_monotone_frequency_rejected() {
        let r = parse_trace::<f64>("freq_hz,re,im\n2e9,1,0\n1e9,1,0\n", TraceFormat::ReIm);
        assert!(matches!(r, Err(Error::Validation(_))));
        let r = parse_trace::<f64>("freq_hz,re,im\n1e9,1,0\n1e9,1,0\n", TraceFormat::ReIm);
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn wrong_header_rejected() {
        let r = parse_trace::<f64>("freq_hz,amp_db,phase_rad\n1e9,1,0\n", TraceFormat::ReIm);
        assert!(matches!(r, Err(Error::Parse { .. })));
    }

    #[test]
    fn detect_format() {
        assert_eq!(
            TraceFormat::detect("# x\nfreq_hz,re,im\n"),
            Some(TraceFormat::ReIm)
        );
        assert_eq!(
            TraceFormat::detect("freq_hz, amp_db, phase_rad\n"),
            Some(TraceFormat::DbPhase)
        );
        assert_eq!(TraceFormat::detect("a,b\n"), None);
    }

    #[test]
    fn metadata_collected() {
        let t: ComplexTrace<f64> = parse_trace(
            "# seed=3\n# kind=x\nfreq_hz,re,im\n1,1,0\n",
            TraceFormat::ReIm,
        )
        .unwrap();
        assert_eq!(t.meta.as_deref(), Some("seed=3\nkind=x"));
    }

    #[test]
    fn background_self_division_is_unity() {
        let t = ComplexTrace::new(
            vec![1.0, 2.0, 3.0],
            vec![c(0.3, -1.7), c(1e-3, 2.0), c(-5.0, 0.25)],
            None,
        )
        .unwrap();
        let cal = calibrate_background(&t, &t).unwrap();
        assert!(cal.samples().iter().all(|&s| s == c(1.0, 0.0)));
    }

    #[test]
    fn background_scalar_division() {
        let t = ComplexTrace::new(vec![1.0], vec![c(1.0, 1.0)], None).unwrap();
        let r = ComplexTrace::new(vec![1.0], vec![c(2.0, 0.0)], None).unwrap();
        assert_eq!(
            calibrate_background(&t, &r).unwrap().samples()[0],
            c(0.5, 0.5)
        );
    }

    #[test]
    fn background_errors() {
        let t = ComplexTrace::new(vec![1.0, 2.0], vec![c(1.0, 0.0); 2], None).unwrap();
        let other_grid = ComplexTrace::new(vec![1.0, 3.0], vec![c(1.0, 0.0); 2], None).unwrap();
        assert!(calibrate_background(&t, &other_grid).is_err());
        let tiny =
            ComplexTrace::new(vec![1.0, 2.0], vec![c(1.0, 0.0), c(1e-16, 0.0)], None).unwrap();
        assert!(matches!(
            calibrate_background(&t, &tiny),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn sweep_rows() {
        let s: PowerSweep<f64> =
            parse_power_sweep("n_mean,qi\n6.62,1.08e6\n", 5.209e9, 0.010).unwrap();
        assert_eq!(s.points().len(), 1);
        assert_eq!(s.points()[0].n_mean, 6.62);
        assert_eq!(s.points()[0].q_i, 1.08e6);
        assert_eq!(s.f_r(), 5.209e9);

        let s: PowerSweep<f64> =
            parse_power_sweep("n_mean,qi,qi_sigma\n1e7,2.5e6,1e5\n", 5e9, 0.01).unwrap();
        assert_eq!(s.points()[0].q_i_sigma, Some(1e5));
    }

    #[test]
    fn sweep_errors() {
        assert!(parse_power_sweep::<f64>("n_mean,qi\n", 5e9, 0.01).is_err());
        match parse_power_sweep::<f64>("n_mean,qi\n1,1e6\n-2,1e6\n", 5e9, 0.01) {
            Err(Error::Validation(msg)) => assert!(msg.contains("row 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(parse_power_sweep::<f64>("n_mean,qi\n1,0\n", 5e9, 0.01).is_err());
        assert!(parse_power_sweep::<f64>("n_mean,qi\n1,1e6\n", 5e9, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn re_im_round_trip_is_bit_exact(
            start in 1e6f64..1e10,
            steps in proptest::collection::vec((1e-3f64..1e6, -1e3f64..1e3, -1e3f64..1e3), 1..40),
        ) {
            let mut f = start;
            let mut freqs = Vec::new();
            let mut samples = Vec::new();
            for (df, re, im) in steps {
                freqs.push(f);
                samples.push(Complex::new(re, im));
                f += df;
            }
            let t = ComplexTrace::new(freqs, samples, Some("label".into())).unwrap();
            let back: ComplexTrace<f64> = parse_trace(&format_trace(&t), TraceFormat::ReIm).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}

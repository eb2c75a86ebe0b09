// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

//! `reslab` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod plot;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reslab::data::parse_trace;
use reslab::synth::{log_grid, synth_sweep_variant};
use reslab::tls::{csv_table, markdown_table, Bootstrap};
use reslab::{
    calibrate_background, chain_power, extract_with, fit_tls_with, load_power_sweep, mean_photons,
    oxide_ratio, oxide_thickness, synth_trace, AttenuationChain, ComplexTraceF64, Error,
    ExtractOptions, ModelVariant, NoiseKind, NoiseSpec, NotchParams, TlsFitOptions, TlsFitRecord,
    TlsParams, TraceFormat, XpsConstants,
};
use serde::Serialize;

const SEED_ENV: &str = "RESLAB_SEED";
const PRESET_NOTE: &str = "illustrative, not calibrated";

#[derive(Debug, Parser)]
#[command(
    name = "reslab",
    version,
    about = "Superconducting resonator loss analysis"
)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for `synth` noise and `fit-tls --bootstrap` (overridden by RESLAB_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract notch resonator parameters from a complex S21 trace.
    FitS21(FitS21Args),
    /// Fit the TLS loss model to a Q_i power sweep.
    FitTls(FitTlsArgs),
    /// Mean photon number from source power and line attenuation.
    Photons(PhotonArgs),
    /// Oxide thickness from an XPS intensity ratio, or the reverse.
    Xps(XpsArgs),
    /// Synthesize traces or sweeps.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Compare two TLS fit results.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct FitS21Args {
    trace: PathBuf,
    /// Background trace recorded on the same grid; the trace is divided by it.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Report the staged circle-fit estimate without joint refinement.
    #[arg(long)]
    no_refine: bool,
}

#[derive(Debug, Args)]
struct FitTlsArgs {
    sweep: PathBuf,
    /// Resonance frequency, Hz.
    #[arg(long = "fr")]
    f_r: f64,
    /// Temperature, K.
    #[arg(long, default_value_t = 0.010)]
    temp: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::ExponentOutside)]
    model_variant: VariantArg,
    /// Also write a log-log SVG of the data and fitted curve.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Coupling quality factor to carry into the result.
    #[arg(long)]
    qc: Option<f64>,
    /// Bootstrap uncertainties from this many residual resamples (seeded by --seed).
    #[arg(long)]
    bootstrap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    ExponentOutside,
    ExponentInside,
}

impl From<VariantArg> for ModelVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::ExponentOutside => ModelVariant::ExponentOutside,
            VariantArg::ExponentInside => ModelVariant::ExponentInside,
        }
    }
}

#[derive(Debug, Args)]
struct PhotonArgs {
    #[arg(long, allow_hyphen_values = true)]
    source_dbm: f64,
    /// JSON attenuation chain, `{"stages": [{"label": "4K", "db": 20}, ...]}`.
    #[arg(long)]
    chain: PathBuf,
    #[arg(long = "fr")]
    f_r: f64,
    #[arg(long)]
    ql: f64,
    #[arg(long)]
    qc: f64,
}

#[derive(Debug, Args)]
struct XpsArgs {
    /// Oxide-to-metal intensity ratio.
    #[arg(
        long,
        conflicts_with = "thickness",
        required_unless_present = "thickness"
    )]
    ratio: Option<f64>,
    /// Oxide thickness, nm.
    #[arg(long)]
    thickness: Option<f64>,
    #[arg(long, value_enum, conflicts_with_all = ["constants", "lambda_ox", "r0", "theta"])]
    preset: Option<Preset>,
    /// JSON file with `lambda_ox`, `r0`, `theta`.
    #[arg(long, conflicts_with_all = ["lambda_ox", "r0", "theta"])]
    constants: Option<PathBuf>,
    /// Attenuation length in the oxide, nm.
    #[arg(long, requires_all = ["r0", "theta"])]
    lambda_ox: Option<f64>,
    #[arg(long, requires_all = ["lambda_ox", "theta"])]
    r0: Option<f64>,
    /// Take-off angle, rad.
    #[arg(long, requires_all = ["lambda_ox", "r0"])]
    theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    #[value(name = "al-2p")]
    Al2p,
    #[value(name = "ta-4f")]
    Ta4f,
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// Notch S21 trace as `freq_hz,re,im` CSV.
    S21(SynthS21Args),
    /// Power sweep as `n_mean,qi` CSV.
    Sweep(SynthSweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoiseArg {
    None,
    ComplexGaussian,
    Multiplicative,
}

impl From<NoiseArg> for NoiseKind {
    fn from(v: NoiseArg) -> Self {
        match v {
            NoiseArg::None => NoiseKind::None,
            NoiseArg::ComplexGaussian => NoiseKind::ComplexGaussian,
            NoiseArg::Multiplicative => NoiseKind::Multiplicative,
        }
    }
}

#[derive(Debug, Args)]
struct NoiseArgs {
    #[arg(long, value_enum, default_value_t = NoiseArg::None)]
    noise: NoiseArg,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
}

#[derive(Debug, Args)]
struct SynthS21Args {
    #[arg(long = "fr")]
    f_r: f64,
    #[arg(long)]
    ql: f64,
    #[arg(long)]
    qc: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Cable delay, s.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Grid start, Hz (default: five linewidths below resonance).
    #[arg(long)]
    f_min: Option<f64>,
    #[arg(long)]
    f_max: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    points: usize,
    #[command(flatten)]
    noise: NoiseArgs,
}

#[derive(Debug, Args)]
struct SynthSweepArgs {
    #[arg(long)]
    f_tls0: f64,
    #[arg(long, default_value_t = 10.0)]
    n_c: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    tan_other: f64,
    #[arg(long = "fr")]
    f_r: f64,
    #[arg(long, default_value_t = 0.010)]
    temp: f64,
    #[arg(long, default_value_t = 1.0)]
    n_min: f64,
    #[arg(long, default_value_t = 1e7)]
    n_max: f64,
    #[arg(long, default_value_t = 25)]
    points: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::ExponentOutside)]
    model_variant: VariantArg,
    #[command(flatten)]
    noise: NoiseArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    before: PathBuf,
    after: PathBuf,
    /// Row labels (default: file stems).
    #[arg(long, num_args = 2, value_names = ["BEFORE", "AFTER"])]
    labels: Option<Vec<String>>,
}

/// Diagnostic plus exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("reslab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    let text = match &cli.command {
        Command::FitS21(a) => fit_s21(a, cli.format)?,
        Command::FitTls(a) => fit_tls_cmd(a, cli.format, resolve_seed(cli.seed)?)?,
        Command::Photons(a) => photons(a, cli.format)?,
        Command::Xps(a) => xps(a, cli.format)?,
        Command::Synth(s) => synth(s, cli.format, resolve_seed(cli.seed)?)?,
        Command::Report(a) => report(a, cli.format)?,
    };
    emit(cli.out.as_deref(), &text)
}

fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Shortest round-trip text, with an exponent for very small or large values.
trait Num {
    fn num(&self) -> String;
}

impl Num for f64 {
    fn num(&self) -> String {
        format!("{self:?}")
    }
}

/// Two-line CSV: header then values.
fn csv_pairs(pairs: &[(&str, String)]) -> String {
    let head: Vec<&str> = pairs.iter().map(|p| p.0).collect();
    let vals: Vec<&str> = pairs.iter().map(|p| p.1.as_str()).collect();
    format!("{}\n{}\n", head.join(","), vals.join(","))
}

fn load_any_trace(path: &Path) -> CliResult<ComplexTraceF64> {
    let text = read_text(path)?;
    let format = TraceFormat::detect(&text).ok_or_else(|| {
        Failure::input(format!(
            "{}: header must be `freq_hz,re,im` or `freq_hz,amp_db,phase_rad`",
            path.display()
        ))
    })?;
    Ok(parse_trace(&text, format)?)
}

fn fit_s21(a: &FitS21Args, format: Option<Format>) -> CliResult<String> {
    let mut trace = load_any_trace(&a.trace)?;
    if let Some(bg) = &a.background {
        trace = calibrate_background(&trace, &load_any_trace(bg)?)?;
    }
    let ex = extract_with(
        &trace,
        ExtractOptions {
            refine: !a.no_refine,
        },
    )?;
    if ex.refined {
        let st = ex.staged.record();
        eprintln!(
            "staged: f_r={:?} Hz q_l={:?} |Q_c|={:?} phi={:?} q_i={:?} residual_rms={:?}",
            st.f_r_hz, st.q_l, st.abs_qc, st.phi_rad, st.q_i, st.residual_rms
        );
    }
    let rec = ex.fit.record();
    match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&rec),
        Format::Csv => Ok(csv_pairs(&[
            ("f_r_hz", rec.f_r_hz.num()),
            ("q_l", rec.q_l.num()),
            ("abs_qc", rec.abs_qc.num()),
            ("phi_rad", rec.phi_rad.num()),
            ("a", rec.a.num()),
            ("alpha_rad", rec.alpha_rad.num()),
            ("tau_s", rec.tau_s.num()),
            ("q_i", rec.q_i.num()),
            ("residual_rms", rec.residual_rms.num()),
        ])),
    }
}

fn fit_tls_cmd(a: &FitTlsArgs, format: Option<Format>, seed: u64) -> CliResult<String> {
    let sweep = load_power_sweep(&a.sweep, a.f_r, a.temp)?;
    if let Some(qc) = a.qc {
        if !(qc > 0.0 && qc.is_finite()) {
            return Err(Failure::input(format!("--qc must be positive, got {qc}")));
        }
    }
    let bootstrap = a.bootstrap.map(|resamples| Bootstrap { resamples, seed });
    let mut fit = fit_tls_with(
        &sweep,
        TlsFitOptions {
            variant: a.model_variant.into(),
            bootstrap,
        },
    )?;
    fit.abs_qc = a.qc;
    if let Some(plot_path) = &a.plot {
        let title = a
            .sweep
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        fs::write(plot_path, plot::render(&sweep, &fit, &title))
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", plot_path.display())))?;
    }
    let rec = fit.record();
    match format.unwrap_or(Format::Json) {
        Format::Json => Ok(rec.to_json() + "\n"),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.num());
            Ok(csv_pairs(&[
                ("f_tls0", rec.f_tls0.num()),
                ("n_c", rec.n_c.num()),
                ("beta", rec.beta.num()),
                ("tan_other", rec.tan_other.num()),
                ("q_i_lp", rec.q_i_lp.num()),
                ("f_r_hz", rec.f_r_hz.num()),
                ("temperature_k", rec.temperature_k.num()),
                ("sigma_f_tls0", opt(rec.sigmas.f_tls0)),
                ("sigma_n_c", opt(rec.sigmas.n_c)),
                ("sigma_beta", opt(rec.sigmas.beta)),
                ("sigma_tan_other", opt(rec.sigmas.tan_other)),
                (
                    "sigma_method",
                    serde_json::to_value(rec.sigma_method)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_owned))
                        .unwrap_or_default(),
                ),
                ("chi2_reduced", rec.chi2_reduced.num()),
                ("bounds_active", rec.bounds_active.join(";")),
            ]))
        }
    }
}

#[derive(Serialize)]
struct PhotonReport {
    source_dbm: f64,
    total_attenuation_db: f64,
    applied_power_w: f64,
    mean_photons: f64,
}

fn positive(name: &str, v: f64) -> CliResult {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::input(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn photons(a: &PhotonArgs, format: Option<Format>) -> CliResult<String> {
    let chain = AttenuationChain::load(&a.chain)?;
    if !a.source_dbm.is_finite() {
        return Err(Failure::input("--source-dbm must be finite"));
    }
    positive("--fr", a.f_r)?;
    positive("--ql", a.ql)?;
    positive("--qc", a.qc)?;
    let p = chain_power(a.source_dbm, &chain);
    let r = PhotonReport {
        source_dbm: a.source_dbm,
        total_attenuation_db: chain.total_db(),
        applied_power_w: p,
        mean_photons: mean_photons(p, a.f_r, a.ql, a.qc),
    };
    match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&r),
        Format::Csv => Ok(csv_pairs(&[
            ("source_dbm", r.source_dbm.num()),
            ("total_attenuation_db", r.total_attenuation_db.num()),
            ("applied_power_w", r.applied_power_w.num()),
            ("mean_photons", r.mean_photons.num()),
        ])),
    }
}

#[derive(Serialize)]
struct XpsReport {
    ratio: f64,
    thickness_nm: f64,
    constants: XpsConstants<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn xps(a: &XpsArgs, format: Option<Format>) -> CliResult<String> {
    let (constants, note) = match (a.preset, &a.constants, a.lambda_ox, a.r0, a.theta) {
        (Some(Preset::Al2p), ..) => (XpsConstants::al_2p(), Some(PRESET_NOTE)),
        (Some(Preset::Ta4f), ..) => (XpsConstants::ta_4f(), Some(PRESET_NOTE)),
        (None, Some(path), ..) => {
            let c: XpsConstants<f64> = serde_json::from_str(&read_text(path)?)?;
            c.validate()?;
            (c, None)
        }
        (None, None, Some(l), Some(r0), Some(t)) => (XpsConstants::new(l, r0, t)?, None),
        _ => {
            return Err(Failure::input(
                "give --preset, --constants, or all of --lambda-ox --r0 --theta",
            ))
        }
    };
    let (ratio, thickness_nm) = match (a.ratio, a.thickness) {
        (Some(r), _) => (r, oxide_thickness(r, &constants)?),
        (None, Some(d)) => (oxide_ratio(d, &constants)?, d),
        (None, None) => return Err(Failure::input("give --ratio or --thickness")),
    };
    let r = XpsReport {
        ratio,
        thickness_nm,
        constants,
        note,
    };
    match format.unwrap_or(Format::Json) {
        Format::Json => to_json(&r),
        Format::Csv => Ok(csv_pairs(&[
            ("ratio", r.ratio.num()),
            ("thickness_nm", r.thickness_nm.num()),
            ("lambda_ox_nm", r.constants.lambda_ox.num()),
            ("r0", r.constants.r0.num()),
            ("theta_rad", r.constants.theta.num()),
            ("note", r.note.unwrap_or("").to_owned()),
        ])),
    }
}

fn noise_spec(n: &NoiseArgs, seed: u64) -> NoiseSpec {
    NoiseSpec {
        kind: n.noise.into(),
        sigma: n.sigma,
        seed,
    }
}

fn synth(cmd: &SynthCommand, format: Option<Format>, seed: u64) -> CliResult<String> {
    if format == Some(Format::Json) {
        return Err(Failure::input("synth writes CSV only"));
    }
    match cmd {
        SynthCommand::S21(a) => {
            let p = NotchParams {
                f_r: a.f_r,
                q_l: a.ql,
                abs_qc: a.qc,
                phi: a.phi,
                a: a.a,
                alpha: a.alpha,
                tau: a.tau,
            };
            p.validate()?;
            let half = 5.0 * a.f_r / a.ql;
            let trace = synth_trace(
                &p,
                a.f_min.unwrap_or(a.f_r - half),
                a.f_max.unwrap_or(a.f_r + half),
                a.points,
                noise_spec(&a.noise, seed),
            )?;
            Ok(reslab::data::format_trace(&trace))
        }
        SynthCommand::Sweep(a) => {
            let p = TlsParams {
                f_tls0: a.f_tls0,
                n_c: a.n_c,
                beta: a.beta,
                tan_other: a.tan_other,
            };
            p.validate()?;
            positive("--n-min", a.n_min)?;
            if !(a.n_max > a.n_min) || a.points < 2 {
                return Err(Failure::input(
                    "need --n-max > --n-min and at least 2 points",
                ));
            }
            let grid = log_grid(a.n_min, a.n_max, a.points);
            let sweep = synth_sweep_variant(
                &p,
                a.f_r,
                a.temp,
                &grid,
                noise_spec(&a.noise, seed),
                a.model_variant.into(),
            )?;
            Ok(reslab::data::format_power_sweep(&sweep))
        }
    }
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

#[derive(Serialize)]
struct ReportJson<'a> {
    labels: [&'a str; 2],
    before: &'a TlsFitRecord,
    after: &'a TlsFitRecord,
    delta: reslab::AgingDelta<f64>,
}

fn report(a: &ReportArgs, format: Option<Format>) -> CliResult<String> {
    let load = |p: &Path| -> CliResult<TlsFitRecord> {
        TlsFitRecord::from_json(&read_text(p)?)
            .map_err(|e| Failure::input(format!("{}: {e}", p.display())))
    };
    let (rb, ra) = (load(&a.before)?, load(&a.after)?);
    let before = rb.to_result::<f64>()?;
    let after = ra.to_result::<f64>()?;
    let labels = match &a.labels {
        Some(v) => (v[0].clone(), v[1].clone()),
        None => (label_of(&a.before), label_of(&a.after)),
    };
    let labels = (labels.0.as_str(), labels.1.as_str());
    Ok(match format {
        None => markdown_table(labels, &before, &after),
        Some(Format::Csv) => csv_table(labels, &before, &after),
        Some(Format::Json) => to_json(&ReportJson {
            labels: [labels.0, labels.1],
            before: &rb,
            after: &ra,
            delta: reslab::aging_report(&before, &after),
        })?,
    })
}

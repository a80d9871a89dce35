//! `wgquant`: mode catalogs, field sampling, verification reports,
//! quantization summaries and zero-point ratio sweeps.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 invalid
//! configuration or input.

mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use wgquant_core::geometry::{self, GuideKind};
use wgquant_core::verify::{self, Fault, VerifyOptions};
use wgquant_core::{fields, gauge, quanta, Excitation, WaveguideError};

use config::{ExcitationArgs, GeometryArgs, ModeArgs, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] WaveguideError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "wgquant",
    version,
    about = "Quantized modes of Cartesian waveguides"
)]
struct Cli {
    /// JSON configuration file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List every mode family with cutoff below a frequency.
    Modes(ModesArgs),
    /// Sample E and B (optionally A and V) on a grid as CSV.
    Field(FieldArgs),
    /// Run every invariant check on one mode and print a JSON report.
    Verify(VerifyArgs),
    /// Zero-point ratio E_m / E_zpf over a range of longitudinal indices.
    Zpf(ZpfArgs),
    /// Quantized amplitudes of one mode as JSON.
    Quantize(QuantizeArgs),
}

#[derive(Debug, Args)]
struct ModesArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    /// Highest cutoff frequency listed [Hz].
    #[arg(long)]
    fmax: Option<f64>,
    /// `text` (CSV) or `json`.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    excitation: ExcitationArgs,
    /// Field amplitude in the chosen frame [V/m]; the quantized amplitude if omitted.
    #[arg(long, allow_negative_numbers = true)]
    e_m: Option<f64>,
    /// Grid points across x, walls included (default 5).
    #[arg(long)]
    nx: Option<usize>,
    /// Grid points across y, walls included (default 5).
    #[arg(long)]
    ny: Option<usize>,
    /// Slices along z at z = L i / nz (default 4).
    #[arg(long)]
    nz: Option<usize>,
    /// Append the columns Ax, Ay, Az, V.
    #[arg(long)]
    with_potentials: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    excitation: ExcitationArgs,
    #[arg(long, hide = true)]
    fault: Option<String>,
}

#[derive(Debug, Args)]
struct ZpfArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    mode: ModeArgs,
    /// First longitudinal index (default 1).
    #[arg(long, allow_negative_numbers = true)]
    l_min: Option<i64>,
    /// Last longitudinal index, inclusive (default 100). l = 0 is skipped.
    #[arg(long, allow_negative_numbers = true)]
    l_max: Option<i64>,
    /// `text` (CSV) or `json`.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct QuantizeArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    mode: ModeArgs,
}

/// What a command produced: the data, and whether the run counts as passed.
struct Produced {
    data: String,
    pass: bool,
}

impl From<String> for Produced {
    fn from(data: String) -> Self {
        Self { data, pass: true }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("wgquant: {e}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WGQUANT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "WGQUANT_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let produced = match cli.command {
        Command::Modes(a) => {
            a.geometry.apply(&mut cfg);
            if a.fmax.is_some() {
                cfg.fmax = a.fmax;
            }
            if a.format.is_some() {
                cfg.format = a.format;
            }
            cmd_modes(&cfg)?.into()
        }
        Command::Field(a) => {
            a.geometry.apply(&mut cfg);
            a.mode.apply(&mut cfg);
            a.excitation.apply(&mut cfg);
            for (slot, v) in [
                (&mut cfg.nx, a.nx),
                (&mut cfg.ny, a.ny),
                (&mut cfg.nz, a.nz),
            ] {
                if v.is_some() {
                    *slot = v;
                }
            }
            if a.e_m.is_some() {
                cfg.e_m = a.e_m;
            }
            if a.with_potentials {
                cfg.with_potentials = Some(true);
            }
            cmd_field(&cfg)?.into()
        }
        Command::Verify(a) => {
            a.geometry.apply(&mut cfg);
            a.mode.apply(&mut cfg);
            a.excitation.apply(&mut cfg);
            let fault = a
                .fault
                .map(|f| f.parse::<Fault>())
                .transpose()
                .map_err(|e| CliError::Config(e.to_string()))?;
            cmd_verify(&cfg, fault)?
        }
        Command::Zpf(a) => {
            a.geometry.apply(&mut cfg);
            a.mode.apply(&mut cfg);
            if a.l_min.is_some() {
                cfg.l_min = a.l_min;
            }
            if a.l_max.is_some() {
                cfg.l_max = a.l_max;
            }
            if a.format.is_some() {
                cfg.format = a.format;
            }
            cmd_zpf(&cfg)?.into()
        }
        Command::Quantize(a) => {
            a.geometry.apply(&mut cfg);
            a.mode.apply(&mut cfg);
            cmd_quantize(&cfg)?.into()
        }
    };
    emit(cli.out.as_deref(), &produced.data)?;
    Ok(produced.pass)
}

fn emit(out: Option<&std::path::Path>, data: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, data)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(data.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ModeRow {
    family: String,
    n: u32,
    m: u32,
    k_c: f64,
    omega_c: f64,
    f_c: f64,
}

fn cmd_modes(cfg: &RunConfig) -> Result<String, CliError> {
    let g = cfg.geometry()?;
    let fmax = cfg.fmax.unwrap_or(3e10);
    if !(fmax.is_finite() && fmax >= 0.0) {
        return Err(CliError::Config(format!(
            "--fmax must be non-negative, got {fmax}"
        )));
    }
    let rows: Vec<ModeRow> = geometry::enumerate_modes(&g, std::f64::consts::TAU * fmax)
        .into_iter()
        .map(|e| ModeRow {
            family: e.family.to_string(),
            n: e.family.n(),
            m: e.family.m(),
            k_c: e.k_c,
            omega_c: e.omega_c,
            f_c: e.omega_c / std::f64::consts::TAU,
        })
        .collect();
    if cfg.json()? {
        return Ok(output::json(&rows));
    }
    let mut s = String::from("family,n,m,k_c,omega_c,f_c\n");
    for r in &rows {
        s.push_str(&format!(
            "\"{}\",{},{},{}\n",
            r.family,
            r.n,
            r.m,
            output::csv_row(&[r.k_c, r.omega_c, r.f_c])
        ));
    }
    Ok(s)
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn cmd_field(cfg: &RunConfig) -> Result<String, CliError> {
    let mode = cfg.mode()?;
    let frame = cfg.frame(&mode)?;
    let e_m = match cfg.e_m {
        Some(e) => e,
        None => quanta::quantize(&mode, frame)?.e_m,
    };
    let exc = Excitation::new(frame, e_m, cfg.quadratures());
    let t = cfg.time();
    let (w, d, len) = (mode.w(), mode.d(), mode.length());
    let xs = axis(-w / 2.0, w / 2.0, cfg.nx.unwrap_or(5));
    let ys = axis(-d / 2.0, d / 2.0, cfg.ny.unwrap_or(5));
    let nz = cfg.nz.unwrap_or(4);
    let zs: Vec<f64> = (0..nz).map(|i| len * i as f64 / nz as f64).collect();
    let potentials = cfg.with_potentials.unwrap_or(false);
    let mut s = String::from("x,y,z,t,Ex,Ey,Ez,Bx,By,Bz");
    if potentials {
        s.push_str(",Ax,Ay,Az,V");
    }
    s.push('\n');
    for &z in &zs {
        for &y in &ys {
            for &x in &xs {
                let p = [x, y, z];
                let f = fields::eval_fields(&mode, &exc, p, t)?;
                let mut row = vec![x, y, z, t];
                row.extend_from_slice(&f.e);
                row.extend_from_slice(&f.b);
                if potentials {
                    let pot = gauge::eval_potentials(&mode, &exc, p, t)?;
                    row.extend_from_slice(&pot.a);
                    row.push(pot.v);
                }
                s.push_str(&output::csv_row(&row));
                s.push('\n');
            }
        }
    }
    Ok(s)
}

fn cmd_verify(cfg: &RunConfig, fault: Option<Fault>) -> Result<Produced, CliError> {
    let mode = cfg.mode()?;
    let opts = VerifyOptions {
        quad: cfg.quadratures(),
        t: cfg.time(),
        tolerances: cfg.tolerances.unwrap_or_default(),
        fault,
        ..VerifyOptions::default()
    };
    let report = verify::verify(&mode, &opts)?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        log::error!(
            "check {} failed: residual {:e} > {:e}",
            c.name,
            c.residual,
            c.tolerance
        );
    }
    Ok(Produced {
        data: output::json(&report),
        pass: report.pass,
    })
}

#[derive(Serialize)]
struct ZpfPoint {
    l: i64,
    ratio: f64,
}

#[derive(Serialize)]
struct ZpfSummary {
    family: String,
    first: f64,
    last: f64,
    /// Ratio for beta much larger than the cutoff.
    limit: f64,
}

#[derive(Serialize)]
struct ZpfReport {
    summary: ZpfSummary,
    series: Vec<ZpfPoint>,
}

fn cmd_zpf(cfg: &RunConfig) -> Result<String, CliError> {
    let g = cfg.geometry()?;
    let fam = cfg.family(&g)?;
    let (lo, hi) = (cfg.l_min.unwrap_or(1), cfg.l_max.unwrap_or(100));
    if lo > hi {
        return Err(CliError::Config(format!(
            "--l-min {lo} exceeds --l-max {hi}"
        )));
    }
    let ls: Vec<i64> = (lo..=hi).filter(|&l| l != 0).collect();
    if ls.is_empty() {
        return Err(CliError::Config("the l range contains only l = 0".into()));
    }
    let series = quanta::zpf_ratio_sweep(&g, fam, &ls)?;
    let limit = quanta::zpf_ratio_limit(&g, fam)?;
    let summary = ZpfSummary {
        family: fam.to_string(),
        first: series[0].1,
        last: series[series.len() - 1].1,
        limit,
    };
    eprintln!(
        "{}: first {} last {} limit {}",
        summary.family,
        output::num(summary.first),
        output::num(summary.last),
        output::num(summary.limit)
    );
    if cfg.json()? {
        let series = series
            .into_iter()
            .map(|(l, ratio)| ZpfPoint { l, ratio })
            .collect();
        return Ok(output::json(&ZpfReport { summary, series }));
    }
    let mut s = String::from("l,ratio\n");
    for (l, r) in series {
        s.push_str(&format!("{l},{}\n", output::num(r)));
    }
    Ok(s)
}

#[derive(Serialize)]
struct QuantizeReport {
    mode: String,
    kind: GuideKind,
    omega: f64,
    beta: f64,
    k_c: f64,
    zpf_ratio: f64,
    amplitudes: quanta::QuantumAmplitudes,
}

fn cmd_quantize(cfg: &RunConfig) -> Result<String, CliError> {
    let mode = cfg.mode()?;
    let frame = cfg.frame(&mode)?;
    let q = quanta::quantize(&mode, frame)?;
    Ok(output::json(&QuantizeReport {
        mode: mode.label(),
        kind: mode.geometry.kind,
        omega: mode.omega(),
        beta: mode.beta(),
        k_c: mode.k_c(),
        zpf_ratio: q.e_m / q.e_zpf,
        amplitudes: q,
    }))
}

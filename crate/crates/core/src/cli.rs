//! The `cstg` command line: `simulate`, `analyze`, `curve` and `report`.
//!
//! Exit status is 0 on success, 2 on invalid input, 3 when an analysis
//! cannot produce an estimate. All diagnostics go to the error stream.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{analyze_streams, compile_report, FomReport};
use crate::error::{Error, Result};
use crate::io::{parse_config, read_tagfile, write_atomic, write_tagfile, RunConfig};
use crate::mc::{simulate, ExperimentKind, RelativePol};
use crate::physics::{fidelity_vs_fss, preparation_probability, PolarizationBasis};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;

/// Static comparison table of published entangled-pair sources.
pub const COMPARISON_TABLE: &str = include_str!("../data/comparison.csv");
/// Bundled configuration of the reference device.
pub const DEVICE_1_CONFIG: &str = include_str!("../data/device-1.cfg");

#[derive(Debug, Parser)]
#[command(name = "cstg", version, about = "Quantum-dot cascade photon-pair simulator and time-tag analyzer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one experiment and write a tag file (.csv for text, binary otherwise)
    Simulate(SimulateArgs),
    /// Analyze tag files and print the figures of merit
    Analyze(AnalyzeArgs),
    /// Emit plot-ready CSV curves
    #[command(subcommand)]
    Curve(CurveCommand),
    /// Print the reference comparison table
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Run configuration (TOML); flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Experiment kind: hbt_x, hbt_xx, cross_correlation, hom_x, hom_xx, lifetime_x, lifetime_xx
    #[arg(long)]
    pub kind: Option<String>,
    /// Analyzer basis for cross_correlation: linear, diagonal, circular
    #[arg(long)]
    pub basis: Option<String>,
    /// Relative polarization: co or cross
    #[arg(long)]
    pub pol: Option<String>,
    /// HOM wavepacket overlap M
    #[arg(long)]
    pub overlap: Option<f64>,
    /// Number of excitation periods
    #[arg(long)]
    pub pulses: Option<u64>,
    /// Master random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Detector jitter sigma, ps
    #[arg(long)]
    pub irf_sigma: Option<f64>,
    /// Dark count rate per channel, Hz
    #[arg(long)]
    pub dark_rate: Option<f64>,
    /// Output tag file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Tag files (binary or CSV)
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Run configuration supplying analysis options
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV of angle_deg,delta_e_uev samples for the splitting fit
    #[arg(long)]
    pub fss_data: Option<PathBuf>,
    /// Coincidence bin width, ps
    #[arg(long)]
    pub bin_width: Option<u64>,
    /// Detector correction used when inverting count rates
    #[arg(long)]
    pub apd_correction: Option<f64>,
    /// Write PREFIX.txt (table) and PREFIX.toml (machine-readable)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CurveCommand {
    /// Columns: fss_uev,fidelity
    FidelityVsFss(FidelityCurveArgs),
    /// Columns: power,sqrt_power,eta_xx
    Rabi(RabiArgs),
}

#[derive(Debug, Args)]
pub struct FidelityCurveArgs {
    /// Exciton lifetime, ps
    #[arg(long, default_value_t = 60.0)]
    pub tau_x: f64,
    /// Spin scattering time, ps
    #[arg(long, default_value_t = 15_000.0)]
    pub tau_ss: f64,
    /// First FSS value, ueV
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Last FSS value, ueV
    #[arg(long, default_value_t = 20.0)]
    pub to: f64,
    /// FSS step, ueV
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RabiArgs {
    /// Preparation probability at the pi-pulse power
    #[arg(long, default_value_t = 0.9)]
    pub eta_max: f64,
    /// Pi-pulse power, arbitrary units
    #[arg(long, default_value_t = 1.0)]
    pub p_pi: f64,
    /// Largest power on the curve
    #[arg(long, default_value_t = 4.0)]
    pub max_power: f64,
    /// Number of points
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Print the static comparison table
    #[arg(long)]
    pub compare: bool,
    /// Machine-readable report from `analyze` to append as a row
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InsufficientData(_)
        | Error::UndefinedEstimate(_)
        | Error::FitFailure { .. }
        | Error::IncompleteReport(_) => EXIT_ANALYSIS,
        _ => EXIT_VALIDATION,
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => parse_config(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
        None => Ok(RunConfig::default()),
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn run_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    let exp = &mut config.experiment;
    if let Some(k) = &args.kind {
        exp.kind = k.parse::<ExperimentKind>()?;
    }
    if let Some(b) = &args.basis {
        exp.basis = Some(b.parse::<PolarizationBasis>()?);
    }
    if let Some(p) = &args.pol {
        exp.relative_pol = Some(p.parse::<RelativePol>()?);
    }
    if let Some(n) = args.pulses {
        exp.n_pulses = n;
    }
    if let Some(s) = args.seed {
        exp.seed = s;
    }
    if let Some(s) = args.irf_sigma {
        exp.irf_sigma = s;
    }
    if let Some(d) = args.dark_rate {
        exp.dark_rate = d;
    }
    if let Some(m) = args.overlap {
        config.source.overlap_m = m;
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output.tags.clone())
        .ok_or_else(|| Error::Validation("no output path: pass --out".into()))?;
    config.validate()?;
    let stream = simulate(&config.source, &config.experiment)?;
    write_tagfile(&out, &stream)?;
    writeln!(
        stdout,
        "{}: {} records from {} pulses -> {}",
        config.experiment.kind,
        stream.record_count(),
        config.experiment.n_pulses,
        out.display()
    )
    .map_err(|e| Error::io("<stdout>", e))
}

fn read_fss_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    reader
        .records()
        .map(|row| {
            let row = row.map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
            let get = |i: usize| {
                row.get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Validation(format!("{}: bad row {:?}", path.display(), row)))
            };
            Ok((get(0)?, get(1)?))
        })
        .collect()
}

fn run_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(w) = args.bin_width {
        config.analysis.bin_width = w;
    }
    if let Some(c) = args.apd_correction {
        config.analysis.apd_correction = c;
    }
    let streams = args
        .files
        .iter()
        .map(|p| read_tagfile(p))
        .collect::<Result<Vec<_>>>()?;
    let fss = args.fss_data.as_deref().map(read_fss_samples).transpose()?;
    let (inputs, params) = analyze_streams(&streams, fss.as_deref(), &config.analysis)?;
    let report = compile_report(&inputs, &params, &config.analysis.thresholds)?;
    let text = report.to_text();
    if let Some(prefix) = args.report.as_ref().or(config.output.report.as_ref()) {
        write_atomic(&prefix.with_extension("txt"), text.as_bytes())?;
        write_atomic(&prefix.with_extension("toml"), report.to_toml().as_bytes())?;
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn fidelity_curve_csv(args: &FidelityCurveArgs) -> Result<String> {
    if !(args.step > 0.0) || args.to < args.from || args.from < 0.0 {
        return Err(Error::Validation("need 0 <= from <= to and step > 0".into()));
    }
    let n = ((args.to - args.from) / args.step + 1e-9).floor() as usize;
    let mut out = String::from("fss_uev,fidelity\n");
    for i in 0..=n {
        let s = args.from + i as f64 * args.step;
        let f = fidelity_vs_fss(s, args.tau_x, args.tau_ss)?;
        out.push_str(&format!("{s:.4},{f:.6}\n"));
    }
    Ok(out)
}

fn rabi_curve_csv(args: &RabiArgs) -> Result<String> {
    if args.points < 2 || !(args.max_power > 0.0) {
        return Err(Error::Validation("need at least 2 points and max_power > 0".into()));
    }
    let mut out = String::from("power,sqrt_power,eta_xx\n");
    for i in 0..args.points {
        let p = args.max_power * i as f64 / (args.points - 1) as f64;
        let eta = preparation_probability(p, args.p_pi, args.eta_max)?;
        out.push_str(&format!("{p:.6},{:.6},{eta:.6}\n", p.sqrt()));
    }
    Ok(out)
}

fn comparison_text(report: Option<&FomReport>) -> Result<String> {
    let mut reader = csv::Reader::from_reader(COMPARISON_TABLE.as_bytes());
    let mut rows: Vec<[String; 5]> = Vec::new();
    rows.push(["source", "pair efficiency", "fidelity", "indistinguishability", "citation"].map(String::from));
    for row in reader.records() {
        let row = row.map_err(|e| Error::Validation(e.to_string()))?;
        rows.push(std::array::from_fn(|i| row.get(i).unwrap_or("").to_string()));
    }
    if let Some(r) = report {
        let fmt = |q: Option<crate::analysis::Quantity>| {
            q.map_or("n/a".to_string(), |q| format!("{:.3}({:.3})", q.value, q.sigma))
        };
        let v = match (r.v_hom_x, r.v_hom_xx) {
            (Some(a), Some(b)) => format!("{:.3}/{:.3}", a.value, b.value),
            (Some(a), None) | (None, Some(a)) => format!("{:.3}", a.value),
            _ => "n/a".into(),
        };
        rows.push([
            "This run".into(),
            fmt(r.pair_probability),
            fmt(r.fidelity),
            v,
            "simulated".into(),
        ]);
    }
    let widths: Vec<usize> = (0..5)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}

fn run_report(args: &ReportArgs, stdout: &mut dyn Write) -> Result<()> {
    if !args.compare {
        return Err(Error::Validation("`report` currently requires --compare".into()));
    }
    let report = args
        .report
        .as_ref()
        .map(|p| -> Result<FomReport> {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            toml::from_str(&text).map_err(|e| Error::Parse {
                key: String::new(),
                line: 0,
                message: format!("{}: {}", p.display(), e.message()),
            })
        })
        .transpose()?;
    emit(args.out.as_deref(), &comparison_text(report.as_ref())?, stdout)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Simulate(a) => run_simulate(a, stdout),
        Command::Analyze(a) => run_analyze(a, stdout),
        Command::Curve(CurveCommand::FidelityVsFss(a)) => {
            emit(a.out.as_deref(), &fidelity_curve_csv(a)?, stdout)
        }
        Command::Curve(CurveCommand::Rabi(a)) => emit(a.out.as_deref(), &rabi_curve_csv(a)?, stdout),
        Command::Report(a) => run_report(a, stdout),
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var("CSTG_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let mut buf = Vec::new();
                let r = pool.install(|| dispatch(&cli, &mut buf));
                let _ = stdout.write_all(&buf);
                r
            }
            Err(e) => Err(Error::Validation(format!("cannot build thread pool: {e}"))),
        },
        None => dispatch(&cli, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

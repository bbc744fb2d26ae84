//! Command-line front end: argument definitions and the six commands.
//!
//! Exit codes: 0 success, 1 validation or argument failure, 2 numeric
//! failure (eigensolver, level or resolution cap, degenerate angle), 3 I/O or
//! parse failure.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use cascadelab::cascade::cascade_run;
use cascadelab::filter::DEFAULT_QMF_TOL;
use cascadelab::jumps::{default_peak_thetas, peak_table, peak_table_csv, PeakRow};
use cascadelab::transfer::{optimal_matching_error, theta_eigenvalues_closed_form, DEFAULT_CLUSTER_TOL};
use cascadelab::{
    ruelle_matrix, spectrum, DyadicStepFunction, FilterFile, OneSidedTrace, QmfReport, Theta,
    WaveletFilter,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

mod error;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cascadelab", version, about = "Spectra, cascades and jump traces for wavelet filters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the orthogonality and low-pass conditions on the taps.
    Validate {
        #[command(flatten)]
        source: FilterSource,
        #[arg(long, default_value_t = DEFAULT_QMF_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalues of the transfer operator and the convergence verdict.
    Spectrum {
        #[command(flatten)]
        source: FilterSource,
        /// Eigenvalues closer than this are merged into one cluster.
        #[arg(long, default_value_t = DEFAULT_CLUSTER_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Cascade iterate from the unit box, with a `.norms.json` sidecar.
    Cascade {
        #[command(flatten)]
        source: FilterSource,
        #[arg(long, default_value_t = 8)]
        stages: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Right and left limits at the points n·2^-N after a number of stages.
    Jumps {
        #[command(flatten)]
        source: FilterSource,
        #[arg(long, default_value_t = 10)]
        resolution: u32,
        #[arg(long, default_value_t = 1000)]
        stages: u32,
        /// Allow filters with other than four taps.
        #[arg(long)]
        generalized: bool,
        #[command(flatten)]
        output: Output,
    },
    /// One cascade CSV per angle, written into the `--out` directory.
    Movie {
        /// Angles to render; defaults to an even grid on [-pi/2, pi/2].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Vec<Theta>,
        #[arg(long, default_value_t = 21)]
        frames: usize,
        #[arg(long, default_value_t = 12)]
        stages: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Limits at x = 1, 3/2, 2 for a list of angles.
    Peaks {
        /// Angles; defaults to k·pi/20 for k = -9..9.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Vec<Theta>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct FilterSource {
    /// Angle of the 4-tap family, in radians or as a multiple of pi ("9pi/20").
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<Theta>,
    /// JSON filter file: {"coefficients": [[re, im], ...]} or {"theta": x}.
    #[arg(long)]
    pub filter: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A resolved filter together with its angle when it belongs to the 4-tap family.
pub struct LoadedFilter {
    pub filter: WaveletFilter,
    pub theta: Option<Theta>,
}

impl FilterSource {
    pub fn load(&self) -> Result<LoadedFilter, CliError> {
        if let Some(theta) = self.theta {
            return Ok(LoadedFilter {
                filter: WaveletFilter::theta_family(theta),
                theta: Some(theta),
            });
        }
        let path = self.filter.as_ref().expect("clap enforces one source");
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file = FilterFile::from_json(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let theta = file.theta().map(Theta::new).transpose()?;
        Ok(LoadedFilter {
            filter: file.to_filter()?,
            theta,
        })
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code; `--help` and `--version` exit with 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { source, tol, output } => cmd_validate(&source, tol, &output),
        Command::Spectrum { source, tol, output } => cmd_spectrum(&source, tol, &output),
        Command::Cascade {
            source,
            stages,
            output,
        } => cmd_cascade(&source, stages, &output),
        Command::Jumps {
            source,
            resolution,
            stages,
            generalized,
            output,
        } => cmd_jumps(&source, resolution, stages, generalized, &output),
        Command::Movie {
            theta,
            frames,
            stages,
            out,
        } => cmd_movie(&theta, frames, stages, &out),
        Command::Peaks { theta, output } => cmd_peaks(&theta, &output),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialise");
    s.push('\n');
    s
}

fn require_valid(filter: &WaveletFilter) -> Result<(), CliError> {
    let report = filter.validate_qmf(DEFAULT_QMF_TOL);
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "filter fails the orthogonality or low-pass conditions: {}",
            serde_json::to_string(&report.violations).expect("serialises")
        )))
    }
}

fn qmf_csv(report: &QmfReport) -> String {
    let mut out = String::from("condition,shift,residual,ok\n");
    for s in &report.orthogonality {
        let _ = writeln!(out, "orthogonality,{},{},{}", s.shift, s.residual, s.residual <= report.tol);
    }
    let _ = writeln!(
        out,
        "lowpass,,{},{}",
        report.lowpass_residual,
        report.lowpass_residual <= report.tol
    );
    out
}

pub fn cmd_validate(source: &FilterSource, tol: f64, output: &Output) -> Result<i32, CliError> {
    let loaded = source.load()?;
    let report = loaded.filter.validate_qmf(tol);
    let text = match output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({
            "valid": report.is_valid(),
            "taps": loaded.filter.taps().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "report": report,
        })),
        Format::Csv => qmf_csv(&report),
    };
    emit(output.out.as_deref(), &text)?;
    if report.is_valid() {
        Ok(0)
    } else {
        eprintln!("filter is not a quadrature mirror filter at tolerance {tol:e}");
        Ok(1)
    }
}

pub fn cmd_spectrum(source: &FilterSource, tol: f64, output: &Output) -> Result<i32, CliError> {
    let loaded = source.load()?;
    require_valid(&loaded.filter)?;
    let matrix = ruelle_matrix(&loaded.filter);
    let report = spectrum(&matrix, tol)?;
    let closed = loaded
        .theta
        .filter(|_| loaded.filter.degree() == 3)
        .map(theta_eigenvalues_closed_form);

    let text = match output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut value = serde_json::to_value(&report).expect("serialises");
            if let Some(closed) = closed {
                let raw = matrix.matrix().eigenvalues()?;
                value["closed_form"] = json!(closed.iter().map(|z| json!({"re": z.re, "im": z.im})).collect::<Vec<_>>());
                value["closed_form_max_error"] = json!(optimal_matching_error(&raw, &closed));
            }
            to_json(&value)
        }
        Format::Csv => {
            let mut out = String::from("re,im,mult,closed_form_mult\n");
            for e in &report.eigenvalues {
                let closed_mult = closed.map_or(String::new(), |c| {
                    c.iter().filter(|z| (*z - e.value).norm() <= tol).count().to_string()
                });
                let _ = writeln!(out, "{},{},{},{closed_mult}", e.value.re, e.value.im, e.multiplicity);
            }
            out
        }
    };
    emit(output.out.as_deref(), &text)?;
    Ok(0)
}

/// Path of the norms sidecar for a cascade output file.
pub fn norms_sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".norms.json");
    PathBuf::from(name)
}

pub fn cmd_cascade(source: &FilterSource, stages: u32, output: &Output) -> Result<i32, CliError> {
    let loaded = source.load()?;
    require_valid(&loaded.filter)?;
    let start = DyadicStepFunction::haar_initial(loaded.filter.degree() as i64);
    let run = cascade_run(&loaded.filter, &start, stages, false)?;
    let norms = json!({
        "stages": stages,
        "norms": run.norms,
        "step_distances": run.step_distances,
    });
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => run.last().to_csv(),
        Format::Json => {
            let psi = run.last();
            let (lo, hi) = psi.window();
            to_json(&json!({
                "level": psi.level(),
                "lo": lo,
                "hi": hi,
                "values": psi.values().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                "norms": run.norms,
                "step_distances": run.step_distances,
            }))
        }
    };
    emit(output.out.as_deref(), &text)?;
    if let Some(out) = &output.out {
        let sidecar = norms_sidecar(out);
        fs::write(&sidecar, to_json(&norms)).map_err(|e| CliError::io(sidecar, e))?;
    }
    Ok(0)
}

pub fn cmd_jumps(
    source: &FilterSource,
    resolution: u32,
    stages: u32,
    generalized: bool,
    output: &Output,
) -> Result<i32, CliError> {
    let loaded = source.load()?;
    require_valid(&loaded.filter)?;
    let start = if generalized {
        OneSidedTrace::generalized(resolution, loaded.filter.degree())?
    } else {
        OneSidedTrace::new(resolution)?
    };
    let trace = start.run(&loaded.filter, stages)?;
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => trace.to_csv(),
        Format::Json => to_json(&json!({
            "resolution": trace.resolution(),
            "stage": trace.stage(),
            "max_jump": trace.max_jump(),
            "psi_plus": trace.plus(),
            "psi_minus": trace.minus(),
        })),
    };
    emit(output.out.as_deref(), &text)?;
    Ok(0)
}

/// `frames` angles evenly spaced on `[−π/2, π/2]`; a single frame sits at 0.
pub fn movie_thetas(frames: usize) -> Vec<Theta> {
    match frames {
        0 => Vec::new(),
        1 => vec![Theta::new(0.0).expect("finite")],
        n => (0..n)
            .map(|i| {
                let t = -FRAC_PI_2 + std::f64::consts::PI * i as f64 / (n - 1) as f64;
                Theta::new(t).expect("finite")
            })
            .collect(),
    }
}

pub fn movie_frame_name(index: usize, theta: Theta) -> String {
    format!("frame_{index:02}_theta_{:+.6}.csv", theta.radians())
}

pub fn cmd_movie(thetas: &[Theta], frames: usize, stages: u32, out: &Path) -> Result<i32, CliError> {
    let thetas = if thetas.is_empty() {
        movie_thetas(frames)
    } else {
        thetas.to_vec()
    };
    if thetas.is_empty() {
        return Err(CliError::Validation("the movie needs at least one frame".into()));
    }
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let filter = WaveletFilter::theta_family(theta);
            let run = cascade_run(&filter, &DyadicStepFunction::haar_initial(3), stages, false)?;
            let path = out.join(movie_frame_name(i, theta));
            fs::write(&path, run.last().to_csv()).map_err(|e| CliError::io(path, e))
        })
        .collect::<Result<Vec<()>, CliError>>()?;
    Ok(0)
}

fn peaks_json(rows: &[PeakRow]) -> String {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| match r.values {
            Some([a, b, c]) => json!({"theta": r.theta.radians(), "x1": a, "x15": b, "x2": c}),
            None => json!({"theta": r.theta.radians(), "degenerate": true}),
        })
        .collect();
    to_json(&Value::Array(rows))
}

pub fn cmd_peaks(thetas: &[Theta], output: &Output) -> Result<i32, CliError> {
    let thetas = if thetas.is_empty() {
        default_peak_thetas()
    } else {
        thetas.to_vec()
    };
    let rows = peak_table(&thetas);
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => peak_table_csv(&rows),
        Format::Json => peaks_json(&rows),
    };
    emit(output.out.as_deref(), &text)?;
    Ok(0)
}

//! Command-line front end: `orthogonalize`, `diagnose` and `sweep`.
//!
//! Exit codes: `0` success with every certificate passing, `1` input or usage
//! error, `2` a certificate failed.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use orthobasis::diag::report_with;
use orthobasis::oracle::{sweep_with, DEFAULT_SAMPLES};
use orthobasis::{
    diagnose, gram_schmidt, load_vector_set, lowdin_symmetric, min_m, random_unitary, schweinler_wigner,
    write_vector_set, DiagnosticsReport, Format, SweepResult, Tolerances, VectorSet,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "orthobasis", version, about = "Orthonormalize complex vector sets and certify the m-functional extrema")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one orthonormal basis and report its diagnostics.
    Orthogonalize {
        #[arg(long, value_enum)]
        method: Method,
        /// Where to write the diagnostics report (default: stderr).
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Report all three procedures side by side.
    Diagnose {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample Haar-random bases and check the bounds on m.
    Sweep {
        #[arg(long, default_value_t = DEFAULT_SAMPLES as u64, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Input vectors (default: stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// File format; inferred from the input extension when omitted, else json.
    #[arg(long, value_enum)]
    pub format: Option<FileFormat>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_ortho: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_cert: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    GramSchmidt,
    SchweinlerWigner,
    MinM,
    /// Symmetric variant V·M^{-1/2}.
    Lowdin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Csv,
    Json,
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Csv => Format::Csv,
            FileFormat::Json => Format::Json,
        }
    }
}

impl CommonArgs {
    fn format(&self) -> Format {
        match (self.format, &self.input) {
            (Some(f), _) => f.into(),
            (None, Some(p)) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        }
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances { ortho: self.tol_ortho, cert: self.tol_cert }
    }
}

/// Failure of a run, mapped onto an exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Certificate(Vec<String>),
}

impl From<orthobasis::Error> for Failure {
    fn from(e: orthobasis::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("json: {e}"))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdin, stdout, stderr),
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            EXIT_INPUT
        }
        // --help / --version
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            EXIT_OK
        }
    }
}

pub fn run(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Orthogonalize { method, report, common } => {
            orthogonalize(*method, report.as_deref(), common, stdin, stdout, stderr)
        }
        Command::Diagnose { common } => diagnose_cmd(common, stdin, stdout, stderr),
        Command::Sweep { samples, seed, common } => sweep_cmd(*samples as usize, *seed, common, stdin, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Certificate(lines)) => {
            for line in lines {
                let _ = writeln!(stderr, "certificate failed: {line}");
            }
            EXIT_CERTIFICATE
        }
    }
}

fn load(common: &CommonArgs, stdin: &mut dyn Read) -> Result<VectorSet, Failure> {
    let format = common.format();
    let loaded = match &common.input {
        Some(path) => {
            let file = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            load_vector_set(BufReader::new(file), format)
        }
        None => load_vector_set(stdin, format),
    };
    loaded.map_err(|e| match &common.input {
        Some(path) => Failure::Input(format!("{}: {e}", path.display())),
        None => e.into(),
    })
}

fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, body: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> Result<(), Failure>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn certificate_failures(r: &DiagnosticsReport) -> Vec<String> {
    r.failures()
        .map(|c| format!("{} for {}: residual {:e}", c.name, r.method, c.residual))
        .collect()
}

fn orthogonalize(
    method: Method,
    report_path: Option<&Path>,
    common: &CommonArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let v = load(common, stdin)?;
    let basis = match method {
        Method::GramSchmidt => gram_schmidt(&v)?,
        Method::SchweinlerWigner => schweinler_wigner(&v)?,
        Method::MinM => min_m(&v)?,
        Method::Lowdin => lowdin_symmetric(&v)?,
    };
    let report = report_with(&v, &basis, &common.tolerances())?;
    let format = common.format();
    with_output(common.output.as_deref(), stdout, |w| Ok(write_vector_set(w, basis.vectors(), format)?))?;
    match report_path {
        Some(p) => with_output(Some(p), stdout, |w| write_json(w, &report))?,
        None => write_json(stderr, &report)?,
    }
    let failures = certificate_failures(&report);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificate(failures))
    }
}

#[derive(Serialize)]
struct DiagnoseOutput {
    reports: Vec<DiagnosticsReport>,
}

fn diagnose_cmd(
    common: &CommonArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let v = load(common, stdin)?;
    let reports = diagnose(&v, &common.tolerances())?;

    let first = &reports[0];
    writeln!(
        stderr,
        "N = {}, d = {}, Tr M = {}, Tr M^2 = {}, bounds [{}, {}], degenerate spectrum: {}",
        v.count(),
        v.dim(),
        first.trace_m,
        first.trace_m2,
        first.m_min_bound,
        first.m_max_bound,
        first.degenerate_spectrum
    )?;
    writeln!(stderr, "{:<18} {:>14} {:>14} {:>12}  certificates", "method", "m", "n", "ortho")?;
    for r in &reports {
        writeln!(
            stderr,
            "{:<18} {:>14.10} {:>14.10} {:>12.3e}  {}",
            r.method.name(),
            r.m_value,
            r.n_value,
            r.orthonormality_residual,
            if r.all_pass() { "pass" } else { "FAIL" }
        )?;
    }

    let failures: Vec<String> = reports.iter().flat_map(certificate_failures).collect();
    with_output(common.output.as_deref(), stdout, |w| write_json(w, &DiagnoseOutput { reports }))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificate(failures))
    }
}

fn sweep_cmd(
    samples: usize,
    seed: u64,
    common: &CommonArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let v = load(common, stdin)?;
    let result: SweepResult = sweep_with(&v, samples, seed, common.tol_cert, random_unitary)?;
    with_output(common.output.as_deref(), stdout, |w| write_json(w, &result))?;
    let mut failures = Vec::new();
    if result.bound_violations > 0 {
        failures.push(format!("bound_sandwich: {} of {} samples outside the bounds", result.bound_violations, samples));
    }
    if result.trace_identity_residual > common.tol_cert {
        failures.push(format!("trace_identity: residual {:e}", result.trace_identity_residual));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certificate(failures))
    }
}

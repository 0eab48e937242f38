//! `invlab`: generate ill-conditioned test problems, invert them by several
//! strategies and measure how accurately `V b` solves `A x = b`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage, 3 parse, 4 dimension,
//! 5 singular matrix, 6 non-convergence. Failures print a one-line JSON
//! error record on stderr.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use invlab_core::experiment::{self, ExperimentConfig, OutputFormat};
use invlab_core::inversion::InverseMethod;
use invlab_core::io::{self as mio, FormatError};
use invlab_core::linalg::{lu_gepp, norm2, qr_householder, solve_lu, solve_qr};
use invlab_core::matgen::RhsMode;
use invlab_core::metrics::{solve_report, SolveReport};
use invlab_core::{LinalgError, Matrix};

#[derive(Parser, Debug)]
#[command(name = "invlab", version, about = "Accuracy of solving linear systems by multiplying with a computed inverse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full accuracy experiment on a generated problem.
    Accuracy {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Include wall-clock time per phase (makes output run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Projections of three rows of V − A⁻¹ on the left singular vectors of A.
    Fig1 {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write A, its reference inverse, b and the reference x into a directory.
    Gen {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Invert a matrix file.
    Invert {
        /// Matrix file, or `-` for stdin.
        matrix: PathBuf,
        #[arg(long, default_value = "getri", value_parser = parse_method)]
        method: InverseMethod,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve A x = b from files and report residual and backward error.
    #[command(group(ArgGroup::new("via").required(true).args(["via_inverse", "via_lu", "via_qr"])))]
    Solve {
        matrix: PathBuf,
        rhs: PathBuf,
        /// x = V b, with V from --inverse or computed with --method.
        #[arg(long)]
        via_inverse: bool,
        /// GEPP factorization and triangular solves.
        #[arg(long)]
        via_lu: bool,
        /// Householder QR.
        #[arg(long)]
        via_qr: bool,
        /// Precomputed inverse for --via-inverse.
        #[arg(long)]
        inverse: Option<PathBuf>,
        #[arg(long, default_value = "getri", value_parser = parse_method)]
        method: InverseMethod,
        /// Reference solution; adds the relative forward error to the report.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Matrix order.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Largest singular value.
    #[arg(long = "sigma1", default_value_t = 1e4)]
    sigma_1: f64,
    /// Smallest singular value.
    #[arg(long = "sigman", default_value_t = 1e-4)]
    sigma_n: f64,
    #[arg(long, env = "INVLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// rows-gepp, cols-gepp, getri, newton-left, newton-right or strassen.
    #[arg(long, default_value = "getri", value_parser = parse_method)]
    method: InverseMethod,
    /// Right-hand side written by `gen`: random-b or random-x.
    #[arg(long, default_value = "random-b", value_parser = parse_rhs)]
    rhs: RhsMode,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// json or csv.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<InverseMethod, String> {
    s.parse().map_err(|e: LinalgError| e.to_string())
}

fn parse_rhs(s: &str) -> Result<RhsMode, String> {
    match s {
        "random-b" => Ok(RhsMode::RandomB),
        "random-x" => Ok(RhsMode::RandomX),
        _ => Err(format!("unknown right-hand side mode `{s}` (random-b or random-x)")),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        _ => Err(format!("unknown format `{s}` (json or csv)")),
    }
}

impl ProblemArgs {
    fn config(&self, output: Option<&OutputArgs>, default_format: OutputFormat) -> ExperimentConfig {
        ExperimentConfig {
            n: self.n,
            sigma_1: self.sigma_1,
            sigma_n: self.sigma_n,
            seed: self.seed,
            method: self.method,
            rhs_mode: self.rhs,
            output_format: output.and_then(|o| o.format).unwrap_or(default_format),
            output_path: output.and_then(|o| o.out.clone()),
        }
    }
}

#[derive(Debug)]
enum CliError {
    Linalg(LinalgError),
    Format(FormatError),
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Format(FormatError::Io { .. }) => 1,
            CliError::Linalg(LinalgError::InvalidArgument(_)) => 2,
            CliError::Format(FormatError::Parse(_)) => 3,
            CliError::Format(FormatError::Dimension(_))
            | CliError::Linalg(LinalgError::DimensionMismatch { .. }) => 4,
            CliError::Linalg(LinalgError::SingularMatrix { .. }) => 5,
            CliError::Linalg(LinalgError::NonConvergence { .. }) => 6,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "io",
            2 => "usage",
            3 => "parse",
            4 => "dimension",
            5 => "singular_matrix",
            _ => "non_convergence",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Linalg(e) => e.to_string(),
            CliError::Format(e) => e.to_string(),
            CliError::Io { path, source } => format!("{path}: {source}"),
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Linalg(e)
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e)
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    exit_code: u8,
    message: String,
}

#[derive(Serialize)]
struct SolveOutput {
    via: &'static str,
    #[serde(flatten)]
    report: SolveReport,
}

#[derive(Serialize)]
struct GenManifest {
    config: ExperimentConfig,
    kappa: f64,
    files: [&'static str; 4],
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            let record = ErrorRecord {
                error: e.kind(),
                exit_code: code,
                message: e.message(),
            };
            eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Accuracy {
            problem,
            output,
            timings,
        } => {
            let config = problem.config(Some(&output), OutputFormat::Json);
            let record = experiment::run_accuracy(&config, timings)?;
            emit(&record, config.output_format, config.output_path.as_deref())
        }
        Command::Fig1 { problem, output } => {
            let config = problem.config(Some(&output), OutputFormat::Csv);
            let rows = experiment::run_fig1(&config)?;
            emit(&rows, config.output_format, config.output_path.as_deref())
        }
        Command::Gen { problem, out } => gen(&problem.config(None, OutputFormat::Json), &out),
        Command::Invert { matrix, method, out } => {
            let a = read_matrix(&matrix)?;
            let inv = experiment::checked_invert(&a, method)?;
            let mut buf = Vec::new();
            mio::write_matrix(&mut buf, &inv.v).expect("write to memory");
            write_out(&buf, out.as_deref())
        }
        Command::Solve {
            matrix,
            rhs,
            via_inverse,
            via_lu: _,
            via_qr,
            inverse,
            method,
            reference,
            output,
        } => {
            let a = read_matrix(&matrix)?;
            let b = mio::load_vector(&rhs)?;
            let x_ref = reference.as_deref().map(mio::load_vector).transpose()?;
            let n = a.rows();
            if !a.is_square() {
                return Err(FormatError::Dimension(format!("{}: matrix is not square", matrix.display())).into());
            }
            if b.len() != n {
                return Err(FormatError::Dimension(format!(
                    "{}: right-hand side has length {}, matrix has order {n}",
                    rhs.display(),
                    b.len()
                ))
                .into());
            }
            if let Some(r) = &x_ref {
                if r.len() != n {
                    return Err(FormatError::Dimension(format!("reference solution has length {}, expected {n}", r.len())).into());
                }
            }
            let (via, x) = if via_inverse {
                let v = match &inverse {
                    Some(path) => mio::load_matrix(path)?,
                    None => experiment::checked_invert(&a, method)?.v,
                };
                if v.rows() != n || v.cols() != n {
                    return Err(FormatError::Dimension(format!(
                        "inverse is {}x{}, matrix has order {n}",
                        v.rows(),
                        v.cols()
                    ))
                    .into());
                }
                ("inverse", v.matvec(&b)?)
            } else if via_qr {
                ("qr", solve_qr(&qr_householder(&a)?, &b)?)
            } else {
                ("lu", solve_lu(&lu_gepp(&a)?, &b)?)
            };
            let report = solve_report(&a, norm2(&a), x, &b, x_ref.as_ref())?;
            emit(
                &SolveOutput { via, report },
                output.format.unwrap_or(OutputFormat::Json),
                output.out.as_deref(),
            )
        }
    }
}

fn gen(config: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let p = config.problem()?;
    let rhs = config.rhs(&p, config.rhs_mode)?;
    fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    mio::save_matrix(&dir.join("A.txt"), &p.a)?;
    mio::save_matrix(&dir.join("A_inv.txt"), &p.a_inv)?;
    mio::save_vector(&dir.join("b.txt"), &rhs.b)?;
    mio::save_vector(&dir.join("x_ref.txt"), &rhs.x_ref)?;
    let manifest = GenManifest {
        config: config.clone(),
        kappa: p.kappa,
        files: ["A.txt", "A_inv.txt", "b.txt", "x_ref.txt"],
    };
    let mut buf = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    buf.push(b'\n');
    write_out(&buf, Some(&dir.join("problem.json")))
}

fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    if path == Path::new("-") {
        Ok(mio::read_matrix(io::stdin().lock())?)
    } else {
        Ok(mio::load_matrix(path)?)
    }
}

fn emit<T: Serialize>(value: &T, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    experiment::write_report(value, format, &mut buf).expect("write to memory");
    write_out(&buf, out)
}

fn write_out(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    let res = match out {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush())
        }
    };
    res.map_err(|source| CliError::Io {
        path: out.map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string()),
        source,
    })
}

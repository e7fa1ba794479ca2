//! Command-line front end: `regpolar <command> [problem.json] [flags]`.

pub mod commands;
pub mod problem;
pub mod report;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::run_command;
pub use problem::{parse_problem, parse_problem_str, Backend, Problem, ProblemFile};
pub use report::{Report, Status};

use crate::error::Error;
use crate::Tolerances;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("command `{command}` is not supported for the {backend} backend")]
    UnsupportedCommandForBackend { command: String, backend: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Parse { .. } => "parse",
            CliError::Schema(_) => "schema",
            CliError::UnsupportedCommandForBackend { .. } => "unsupported_command_for_backend",
            CliError::Usage(_) => "usage",
            CliError::Compute(_) => "computation",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Polar,
    Pinv,
    Btransform,
    InvBtransform,
    VerifyThm31,
    CheckComplemented,
    ClosedRange,
    Classify,
    GradedReport,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Polar => "polar",
            Command::Pinv => "pinv",
            Command::Btransform => "btransform",
            Command::InvBtransform => "inv-btransform",
            Command::VerifyThm31 => "verify-thm31",
            Command::CheckComplemented => "check-complemented",
            Command::ClosedRange => "closed-range",
            Command::Classify => "classify",
            Command::GradedReport => "graded-report",
            Command::Selftest => "selftest",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        ALL_COMMANDS.iter().copied().find(|c| c.name() == name)
    }
}

const ALL_COMMANDS: [Command; 10] = [
    Command::Polar,
    Command::Pinv,
    Command::Btransform,
    Command::InvBtransform,
    Command::VerifyThm31,
    Command::CheckComplemented,
    Command::ClosedRange,
    Command::Classify,
    Command::GradedReport,
    Command::Selftest,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    Json,
    #[default]
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "regpolar",
    version,
    about = "Polar decompositions and generalized inverses of regular operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Identity residual tolerance [default: 1e-8, or $REGPOLAR_TOL]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Relative rank cut-off for singular values [default: 1e-10]
    #[arg(long = "rank-tol", global = true)]
    rank_tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the selftest suites
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of graded components to keep
    #[arg(long, global = true)]
    components: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Polar decomposition t = V|t|
    Polar { problem: PathBuf },
    /// Generalized inverse s
    Pinv { problem: PathBuf },
    /// Bounded transform F_t = t(1 + t*t)^(-1/2)
    Btransform { problem: PathBuf },
    /// Recover t from its bounded transform
    #[command(name = "inv-btransform")]
    InvBtransform { problem: PathBuf },
    /// Check that polar decomposition, complemented ranges and generalized inverse agree
    #[command(name = "verify-thm31")]
    VerifyThm31 { problem: PathBuf },
    /// Decide whether the range closures are orthogonally complemented
    #[command(name = "check-complemented")]
    CheckComplemented { problem: PathBuf },
    /// Closed range, bounded inverse and transform range, checked for consistency
    #[command(name = "closed-range")]
    ClosedRange { problem: PathBuf },
    /// Normal / self-adjoint / positive
    Classify { problem: PathBuf },
    /// Growth of a graded operator's components
    #[command(name = "graded-report")]
    GradedReport { problem: PathBuf },
    /// Run the randomized invariant suites
    Selftest {
        /// Instances per suite
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

impl Cmd {
    fn split(&self) -> (Command, Option<&Path>) {
        match self {
            Cmd::Polar { problem } => (Command::Polar, Some(problem)),
            Cmd::Pinv { problem } => (Command::Pinv, Some(problem)),
            Cmd::Btransform { problem } => (Command::Btransform, Some(problem)),
            Cmd::InvBtransform { problem } => (Command::InvBtransform, Some(problem)),
            Cmd::VerifyThm31 { problem } => (Command::VerifyThm31, Some(problem)),
            Cmd::CheckComplemented { problem } => (Command::CheckComplemented, Some(problem)),
            Cmd::ClosedRange { problem } => (Command::ClosedRange, Some(problem)),
            Cmd::Classify { problem } => (Command::Classify, Some(problem)),
            Cmd::GradedReport { problem } => (Command::GradedReport, Some(problem)),
            Cmd::Selftest { .. } => (Command::Selftest, None),
        }
    }
}

fn check_positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(CliError::Usage(format!(
            "--{name} must be positive and finite"
        ))),
        _ => Ok(()),
    }
}

/// Builds the report for one invocation and the matching exit code.
fn execute(cli: &Cli) -> (Report, i32) {
    let (cmd, path) = cli.command.split();
    let mut report = Report::new(cmd.name());
    if let Some(p) = path {
        report.problem = p.file_name().map(|n| n.to_string_lossy().into_owned());
    }
    let result = (|| -> Result<i32, CliError> {
        check_positive("tol", cli.tol)?;
        check_positive("rank-tol", cli.rank_tol)?;
        let mut tol = Tolerances::from_env();
        let Some(path) = path else {
            apply_flags(cli, &mut tol);
            let Cmd::Selftest { count } = cli.command else {
                unreachable!()
            };
            let ok = selftest::run_selftest(cli.seed.unwrap_or(0), count, &tol, &mut report);
            return Ok(if ok { EXIT_OK } else { EXIT_SELFTEST_FAILED });
        };
        let mut problem = parse_problem(path)?;
        report.backend = Some(problem.file.backend.name().to_string());
        if let Some(o) = &problem.file.options {
            o.apply(&mut tol);
        }
        apply_flags(cli, &mut tol);
        if let Some(n) = cli.components {
            if n == 0 {
                return Err(CliError::Usage("--components must be positive".into()));
            }
            problem = problem.with_components(n)?;
        }
        let r = run_command(cmd, &problem, &tol)?;
        report = Report {
            problem: report.problem.take(),
            ..r
        };
        Ok(EXIT_OK)
    })();
    match result {
        Ok(code) => (report, code),
        Err(e) => {
            report.error(e.kind(), e.to_string());
            (report, EXIT_INPUT)
        }
    }
}

fn apply_flags(cli: &Cli, tol: &mut Tolerances) {
    if let Some(v) = cli.tol {
        tol.identity = v;
    }
    if let Some(v) = cli.rank_tol {
        tol.rank = v;
    }
}

/// Runs `command` on an in-memory problem file and returns the json report
/// with its exit code. Tolerances follow defaults, then the file's options,
/// then `tol` when given; the environment is not consulted.
pub fn run_problem_json(command: &str, problem: &str, tol: Option<f64>) -> (String, i32) {
    let mut report = Report::new(command);
    let result = (|| -> Result<Report, CliError> {
        let cmd = Command::from_name(command)
            .filter(|c| *c != Command::Selftest)
            .ok_or_else(|| CliError::Usage(format!("unknown command `{command}`")))?;
        check_positive("tol", tol)?;
        let problem = parse_problem_str(problem)?;
        report.backend = Some(problem.file.backend.name().to_string());
        let mut t = Tolerances::default();
        if let Some(o) = &problem.file.options {
            o.apply(&mut t);
        }
        if let Some(v) = tol {
            t.identity = v;
        }
        run_command(cmd, &problem, &t)
    })();
    match result {
        Ok(r) => (r.to_json(), EXIT_OK),
        Err(e) => {
            report.error(e.kind(), e.to_string());
            (report.to_json(), EXIT_INPUT)
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let (report, code) = execute(&cli);
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => {
            let mut t = report.to_text();
            t.push_str(&format!(
                "\nelapsed:  {:.3} s\n",
                start.elapsed().as_secs_f64()
            ));
            t
        }
    };
    let _ = out.write_all(text.as_bytes());
    for e in &report.errors {
        let _ = writeln!(err, "regpolar: {}", e.message);
    }
    code
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

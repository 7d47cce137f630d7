//! `paracontact`: classify, verify, deform and sweep g-natural paracontact
//! structures on unit tangent sphere bundles.
//!
//! Exit codes: 0 success, 1 bad input, 2 classification diagnostic,
//! 3 invariant failure.

mod commands;
mod config;
mod report;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use paracontact::deform::Deform2Sign;
use paracontact::Flavor;

use report::{Report, Status};

#[derive(Parser, Debug)]
#[command(name = "paracontact", version, about)]
struct Cli {
    /// Tolerance applied to every residual check.
    #[arg(long, global = true, env = "PARACONTACT_TOL", default_value_t = 1e-8)]
    tol: f64,

    /// Write output to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Add wall-clock timing to JSON reports (makes them non-reproducible).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a structure (paraSasakian, h^2 = 0, (kappa, mu), ...).
    Classify(ClassifyArgs),
    /// Run the invariant suite and fail with exit code 3 on any violation.
    Verify(VerifyArgs),
    /// Apply a D-homothetic or canonical deformation.
    Deform(DeformArgs),
    /// Classify every admissible point of a parameter grid; writes CSV.
    Sweep(SweepArgs),
    /// Export the curvature tensor of T_1M in the adapted frame.
    R4(R4Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Paracontact,
    Contact,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Paracontact => Flavor::Paracontact,
            FlavorArg::Contact => Flavor::Contact,
        }
    }
}

impl fmt::Display for FlavorArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlavorArg::Paracontact => "paracontact",
            FlavorArg::Contact => "contact",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SignArg {
    MinusH,
    PlusH,
}

impl From<SignArg> for Deform2Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::MinusH => Deform2Sign::MinusH,
            SignArg::PlusH => Deform2Sign::PlusH,
        }
    }
}

#[derive(Args, Debug)]
struct StructureArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    /// Explicit d; by default it is solved from the compatibility condition.
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, value_enum, default_value_t = FlavorArg::Paracontact)]
    flavor: FlavorArg,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Base curvature: const:<cbar>, cpx:<holomorphic curvature> or file:<path>.
    #[arg(long, default_value = "const:0")]
    model: String,
    /// Dimension of the base (default 3, or 4 for cpx).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    s: StructureArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    s: StructureArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deformation constant used by the D-homothety tensor check.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    dhom: f64,
}

#[derive(Args, Debug)]
struct DeformArgs {
    #[command(flatten)]
    s: StructureArgs,
    /// D-homothetic deformation constant t.
    #[arg(
        long,
        allow_negative_numbers = true,
        conflicts_with = "canonical",
        required_unless_present = "canonical"
    )]
    dhom: Option<f64>,
    /// Canonical deformation of a contact (kappa, mu)-space.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    canonical: Option<u8>,
    /// Sign of h' in the second canonical deformation.
    #[arg(long, value_enum, default_value_t = SignArg::MinusH)]
    sign: SignArg,
    /// Constant curvature of the base.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    cbar: f64,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Grid for a: comma separated values or lin:start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    /// Grid of base curvatures.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    cbar: String,
    #[arg(long, default_value_t = 3)]
    dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum R4Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct R4Args {
    #[command(flatten)]
    s: StructureArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value_t = R4Format::Json)]
    format: R4Format,
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_report(cli: &Cli, report: &Report) -> Result<u8> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    emit(cli.output.as_deref(), &bytes)?;
    match report.status {
        Status::InvariantFailure => {
            if let Some(c) = report.first_failure() {
                let residual = c.residual.map_or("n/a".to_string(), |r| format!("{r:e}"));
                eprintln!(
                    "invariant failure: {} (residual {residual}, tolerance {:e})",
                    c.name, c.tolerance
                );
            }
        }
        Status::Diagnostic => {
            let classes = std::iter::once(&report.subject)
                .chain(report.deformation.iter().map(|d| &d.after))
                .filter_map(|s| s.classification.as_ref());
            for d in classes.flat_map(|c| &c.diagnostics) {
                eprintln!("diagnostic: {d}");
            }
        }
        Status::Ok => {}
    }
    Ok(report.status.exit_code() as u8)
}

fn run(cli: &Cli) -> Result<u8> {
    let tol = config::check_tolerance(cli.tol)?;
    match &cli.command {
        Command::Classify(args) => emit_report(cli, &commands::classify(args, tol, cli.timing)?),
        Command::Verify(args) => emit_report(cli, &commands::verify(args, tol, cli.timing)?),
        Command::Deform(args) => emit_report(cli, &commands::deform(args, tol, cli.timing)?),
        Command::Sweep(args) => {
            emit(cli.output.as_deref(), &commands::sweep(args)?)?;
            Ok(0)
        }
        Command::R4(args) => {
            emit(cli.output.as_deref(), &commands::r4(args)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod grid;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csk_core::verify::Suite;

use commands::{CliError, DensityOptions, Which};
use grid::GridSpec;

/// Cauchy-Stieltjes kernel families: densities, transforms and verification.
#[derive(Parser)]
#[command(name = "csk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
    /// Relative tolerance for quadrature and numerical checks.
    #[arg(long, env = "CSK_TOL")]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Density of a law on a grid, as `x,density,atom_weight`.
    Density {
        /// JSON law spec, e.g. {"kind":"cubic","a":1,"b":0,"c":0}.
        #[arg(long)]
        law: PathBuf,
        /// Grid `a:b:n`: n points from a to b inclusive.
        #[arg(long, allow_hyphen_values = true)]
        grid: GridSpec,
        /// Recover the density by Stieltjes inversion instead of the closed form.
        #[arg(long)]
        numeric: bool,
        /// Comma-separated ε values for the inversion, each half the previous.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps_schedule: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
    /// A transform of a law on a grid, as `input,value`.
    Transform {
        #[arg(long)]
        law: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, allow_hyphen_values = true)]
        grid: GridSpec,
        /// Evaluate by quadrature against the density instead of closed forms.
        #[arg(long)]
        numeric: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run verification suites and write a JSON report.
    Verify {
        /// all, reciprocity, domains, roundtrip, gineq, bis, reproductive,
        /// oracle, stieltjes, properties or divergent.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: csk_core::Error| e.to_string())
}

fn write_out(path: &str, text: &str) -> Result<(), CliError> {
    let res = if path == "-" {
        std::io::stdout().lock().write_all(text.as_bytes())
    } else {
        std::fs::write(path, text)
    };
    res.map_err(|e| CliError::Usage(format!("{path}: {e}")))
}

fn check_tol(tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if !(t > 0.0 && t < 1.0) => Err(CliError::Usage(format!(
            "tolerance must be in (0, 1), got {t}"
        ))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Density {
            law,
            grid,
            numeric,
            eps_schedule,
            output,
        } => {
            check_tol(output.tol)?;
            let spec = commands::load_law(&law)?;
            let csv = commands::density(
                &spec,
                &grid,
                &DensityOptions {
                    numeric,
                    eps_schedule,
                },
            )?;
            write_out(&output.out, &csv)?;
            Ok(true)
        }
        Command::Transform {
            law,
            which,
            grid,
            numeric,
            output,
        } => {
            check_tol(output.tol)?;
            let spec = commands::load_law(&law)?;
            let (csv, skipped) = commands::transform(&spec, which, &grid, numeric, output.tol)?;
            if !skipped.is_empty() {
                let list: Vec<String> = skipped.iter().map(|x| commands::fmt_num(*x)).collect();
                eprintln!(
                    "note: skipped {} inputs outside the domain: {}",
                    skipped.len(),
                    list.join(", ")
                );
            }
            write_out(&output.out, &csv)?;
            Ok(true)
        }
        Command::Verify {
            suite,
            seed,
            output,
        } => {
            check_tol(output.tol)?;
            let (json, pass) = commands::verify(suite, seed, output.tol);
            write_out(&output.out, &json)?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

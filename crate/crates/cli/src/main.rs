use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use shleib::check::Mode;
use shleib::io::{parse_document, run_command, Command, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    /// JSON
    Structured,
}

/// Exact verification of higher derived brackets on graded Leibniz algebras.
#[derive(Debug, Parser)]
#[command(name = "shleib", version)]
struct Cli {
    /// One of: validate, check-leibniz, check-deformation, derive, check-sh,
    /// check-codifferential, check-key-lemma, gauge, check-gauge-equivalence,
    /// check-coalgebra, report-all
    command: String,
    /// Algebra document
    file: PathBuf,
    #[arg(long, default_value_t = 6)]
    max_const: usize,
    #[arg(long, default_value_t = 4)]
    max_word_len: usize,
    #[arg(long, default_value_t = 3)]
    max_arity: usize,
    /// Stop at the first violation instead of collecting all of them
    #[arg(long)]
    first_violation: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Command = match cli.command.parse() {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let text = match std::fs::read_to_string(&cli.file) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", cli.file.display())),
    };
    let doc = match parse_document(&text) {
        Ok(d) => d,
        Err(errors) => {
            for e in &errors {
                eprintln!("{}: {e}", cli.file.display());
            }
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        max_const: cli.max_const,
        max_word_len: cli.max_word_len,
        max_arity: cli.max_arity,
        mode: if cli.first_violation {
            Mode::FirstViolation
        } else {
            Mode::Exhaustive
        },
    };
    let report = match run_command(command, &doc, &opts) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Structured => println!("{}", report.to_json()),
    }
    if report.passes() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

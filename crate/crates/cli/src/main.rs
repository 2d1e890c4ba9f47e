use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

mod commands;
mod error;
mod input;

use commands::{AnalyzeArgs, AuditArgs, CompileArgs, ExtractArgs, TransformArgs};
use error::Failure;
use input::SourceArgs;

/// Information extraction with regular spanners and extraction rules.
///
/// Exit codes: 0 success, 1 other errors, 2 syntax, 3 input outside the
/// supported fragment, 4 empty result, 5 budget exceeded.
#[derive(Parser)]
#[command(name = "spanex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every mapping on each document as a JSON line.
    Extract(ExtractArgs),
    /// Report the syntactic classes of an expression, rule or automaton.
    Check(SourceArgs),
    /// Compile an expression to automaton JSON.
    Compile(CompileArgs),
    /// Rewrite rules, expressions and automata.
    Transform(TransformArgs),
    /// Satisfiability, containment and point-disjointness.
    Analyze(AnalyzeArgs),
    /// Count evaluation calls between consecutive outputs.
    Audit(AuditArgs),
}

fn print(v: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{v}");
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Extract(a) => commands::extract(&a, &mut print),
        Command::Check(a) => commands::check(&a).map(|v| print(&v)),
        Command::Compile(a) => commands::compile(&a).map(|s| println!("{s}")),
        Command::Transform(a) => commands::transform(&a).map(|v| print(&v)),
        Command::Analyze(a) => commands::analyze(&a).map(|v| print(&v)),
        Command::Audit(a) => commands::audit(&a).map(|v| print(&v)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("spanex: {f}");
            ExitCode::from(f.code)
        }
    }
}

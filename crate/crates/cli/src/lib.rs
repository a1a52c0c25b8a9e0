//! Command line surface: `analyze` runs the reduction pipeline on one
//! curve, `atlas` prints the catalog of reduction types for a genus, and
//! `check` runs the randomized invariant suite.

use std::io::{IsTerminal, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use hyperred_core::fiber::{analyze, ReductionReport};

pub mod dot;
pub mod input;
pub mod report;

pub use input::{parse_input, to_curve_data, CurveData, InputError, RawInput};
pub use report::{emit_atlas_json, emit_json};

#[derive(Parser)]
#[command(
    name = "hyperred",
    about = "Stable reduction of hyperelliptic curves y^2 = f(x) over Q at an odd prime",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the stable marked reduction of one curve.
    Analyze {
        /// Input file, or "-" for standard input.
        input: String,
        /// Write the JSON report here ("-" for standard output).
        #[arg(long)]
        json: Option<String>,
        /// Write the marked tree as DOT here ("-" for standard output).
        #[arg(long = "dot-tree")]
        dot_tree: Option<String>,
        /// Write the special fiber as DOT here ("-" for standard output).
        #[arg(long = "dot-fiber")]
        dot_fiber: Option<String>,
    },
    /// List all combinatorial reduction types for a genus.
    Atlas {
        g: usize,
        /// Write the JSON catalog here ("-" for standard output).
        #[arg(long)]
        json: Option<String>,
    },
    /// Run the randomized invariant suite.
    Check {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        cases: usize,
    },
}

/// Exit status: 0 success, 1 input error, 2 internal invariant violation.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e.to_string());
            e.exit_code()
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(InputError),
    Domain(hyperred_core::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(e) => e.fmt(f),
            CliError::Domain(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(e) if e.is_internal() => 2,
            CliError::Domain(e) if e.is_internal() => 2,
            CliError::Input(_) | CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e)
    }
}

impl From<hyperred_core::Error> for CliError {
    fn from(e: hyperred_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn report_error(msg: &str) {
    let stderr = std::io::stderr();
    let color = stderr.is_terminal() && std::env::var_os("NO_COLOR").is_none();
    if color {
        eprintln!("\x1b[31merror:\x1b[0m {msg}");
    } else {
        eprintln!("error: {msg}");
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(PathBuf::from(path))?)
    }
}

fn write_output(target: &str, content: &str) -> Result<(), CliError> {
    if target == "-" {
        std::io::stdout().write_all(content.as_bytes())?;
        Ok(())
    } else {
        std::fs::write(PathBuf::from(target), content)?;
        Ok(())
    }
}

/// Parse + analyze one input text; shared by the binary and the tests.
pub fn analyze_text(text: &str) -> Result<(RawInput, ReductionReport), CliError> {
    let raw = parse_input(text)?;
    let (p, c, points) = to_curve_data(&raw)?;
    let report = analyze(p, c, points)?;
    Ok((raw, report))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            input,
            json,
            dot_tree,
            dot_fiber,
        } => {
            let text = read_input(&input)?;
            let (raw, report) = analyze_text(&text)?;
            let default_json = json.is_none() && dot_tree.is_none() && dot_fiber.is_none();
            if let Some(target) = json.as_deref().or(default_json.then_some("-")) {
                write_output(target, &emit_json(&report, &raw))?;
            }
            if let Some(target) = dot_tree.as_deref() {
                write_output(target, &dot::emit_dot_tree(&report))?;
            }
            if let Some(target) = dot_fiber.as_deref() {
                write_output(target, &dot::emit_dot_fiber(&report))?;
            }
            Ok(())
        }
        Command::Atlas { g, json } => {
            let types = hyperred_core::atlas::enumerate_types(g)?;
            write_output(
                json.as_deref().unwrap_or("-"),
                &emit_atlas_json(g, &types),
            )?;
            Ok(())
        }
        Command::Check { seed, cases } => {
            hyperred_core::selfcheck::run_suite(seed, cases)?;
            println!("{cases}/{cases} ok");
            Ok(())
        }
    }
}

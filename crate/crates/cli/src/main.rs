//! `atlas`: command-line front end. Reads a JSON tuple document (or an array
//! of them) from a file or stdin and prints JSON or text reports.
//!
//! Exit codes: 0 success, 2 input or analysis error, 1 internal error.

use std::io::Read;
use std::process::ExitCode;

use atlas_core::corpus::selfcheck;
use atlas_core::document::{error_document, process, render_text, Mode, OutputDocument};
use atlas_core::AtlasError;
use clap::{Parser, Subcommand, ValueEnum};

const SUBCOMMANDS: &[&str] = &["analyze", "mixed-volume", "decompose", "degrees", "selfcheck", "help"];

#[derive(Parser)]
#[command(name = "atlas", version, about = "Discriminant atlas of sparse polynomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(clap::Args)]
struct Input {
    /// Input JSON file, or `-` for stdin.
    #[arg(default_value = "-")]
    file: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Classification, poset, the three discriminants and degrees (default).
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "on")]
        degrees: Switch,
    },
    /// Mixed volume only.
    MixedVolume {
        #[command(flatten)]
        input: Input,
    },
    /// Classification and poset only.
    Decompose {
        #[command(flatten)]
        input: Input,
    },
    /// Degree table only.
    Degrees {
        #[command(flatten)]
        input: Input,
    },
    /// Runs the oracle suite on the built-in instances.
    Selfcheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Extra random instances for the root-count oracle.
        #[arg(long, default_value_t = 10)]
        random: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn read_input(file: &str) -> Result<String, AtlasError> {
    let mut text = String::new();
    let outcome = if file == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(file).map(|t| text = t)
    };
    outcome
        .map(|_| text)
        .map_err(|e| AtlasError::Parse(format!("cannot read {file}: {e}")))
}

fn print_documents(docs: &[OutputDocument], batch_json: &serde_json::Value, format: Format) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(batch_json).expect("JSON values always serialize")
        ),
        Format::Text => {
            for (i, d) in docs.iter().enumerate() {
                if i > 0 {
                    println!("---");
                }
                print!("{}", render_text(d));
            }
        }
    }
}

fn run_documents(input: &Input, mode: Mode, degrees: bool) -> u8 {
    let text = match read_input(&input.file) {
        Ok(t) => t,
        Err(e) => {
            let doc = error_document(&e);
            print_documents(std::slice::from_ref(&doc), doc.value(), input.format);
            return 2;
        }
    };
    let p = process(&text, mode, degrees);
    print_documents(&p.documents, &p.output, input.format);
    p.exit_code as u8
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Analyze { input, degrees } => run_documents(&input, Mode::Analyze, degrees == Switch::On),
        Command::MixedVolume { input } => run_documents(&input, Mode::MixedVolume, true),
        Command::Decompose { input } => run_documents(&input, Mode::Decompose, false),
        Command::Degrees { input } => run_documents(&input, Mode::Degrees, true),
        Command::Selfcheck {
            seed,
            trials,
            random,
            format,
        } => match selfcheck(seed, trials, random) {
            Ok(report) => {
                match format {
                    Format::Json => println!(
                        "{}",
                        serde_json::to_string_pretty(&report).expect("report serializes")
                    ),
                    Format::Text => {
                        for c in &report.checks {
                            let mark = if c.passed { "pass" } else { "FAIL" };
                            println!("{mark}  {}  {}", c.name, c.detail);
                        }
                        println!("{}", if report.passed { "all checks passed" } else { "some checks failed" });
                    }
                }
                if report.passed {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                let doc = error_document(&e);
                print_documents(std::slice::from_ref(&doc), doc.value(), format);
                if e.is_internal() {
                    1
                } else {
                    2
                }
            }
        },
    }
}

fn main() -> ExitCode {
    let mut args: Vec<String> = std::env::args().collect();
    // `analyze` is the default subcommand
    let explicit = args.get(1).is_some_and(|a| {
        SUBCOMMANDS.contains(&a.as_str()) || matches!(a.as_str(), "-h" | "--help" | "-V" | "--version")
    });
    if !explicit {
        args.insert(1, "analyze".into());
    }
    let cli = Cli::parse_from(args);
    ExitCode::from(run(cli))
}

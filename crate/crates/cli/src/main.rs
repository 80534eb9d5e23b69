use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gentle_cli::{run, CliError, Command, Config};

/// Semi-invariant presentations for gentle string algebras.
#[derive(Debug, Parser)]
#[command(name = "gentle-si", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Model or system file; reads stdin when absent or `-`.
    file: Option<PathBuf>,
    /// Emit Graphviz DOT (only for `peg`).
    #[arg(long)]
    dot: bool,
    /// Coordinate cap for the brute-force oracle.
    #[arg(long)]
    cap: Option<u32>,
    /// Seed for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

fn read_input(file: Option<&PathBuf>) -> Result<String, CliError> {
    let mut text = String::new();
    match file {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let config = Config {
        dot: args.dot,
        cap: args.cap,
        seed: args.seed,
    };
    match read_input(args.file.as_ref()).and_then(|text| run(args.command, &text, &config)) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            print!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

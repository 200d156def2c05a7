//! `stirap`: configuration-driven scenario runner.
//!
//! Subcommands: `run <config>`, `validate <config>`, `version`.
//! Exit codes: 0 success, 2 parse/validation error, 3 numerical failure,
//! 4 I/O failure.

mod config;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use config::{parse_config, validate_file};
use scenario::{run_scenario, RunError};

fn usage() -> &'static str {
    "stirap - three-level transfer and lattice dynamics toolkit

USAGE:
  stirap run <CONFIG> [--output PATH] [--threads N] [--seed N]
  stirap validate <CONFIG>
  stirap version

OPTIONS:
  --output PATH   Override the config's output path
  --threads N     Size of the worker pool for scan points
  --seed N        Reserved; all models are deterministic

Relative output paths are rooted in $STIRAP_OUTPUT_DIR when set.
"
}

struct RunArgs {
    config: PathBuf,
    output: Option<String>,
    threads: Option<usize>,
}

fn parse_run_args(args: &[String]) -> Result<RunArgs, String> {
    let mut config = None;
    let mut output = None;
    let mut threads = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--output" => {
                output = Some(it.next().ok_or("--output needs a path")?.clone());
            }
            "--threads" => {
                let v = it.next().ok_or("--threads needs a count")?;
                threads = Some(v.parse::<usize>().map_err(|_| format!("bad thread count '{v}'"))?);
            }
            "--seed" => {
                let v = it.next().ok_or("--seed needs a value")?;
                v.parse::<u64>().map_err(|_| format!("bad seed '{v}'"))?;
                // reserved: parsed for forward compatibility, unused
            }
            other if other.starts_with('-') => return Err(format!("unknown flag '{other}'")),
            other => {
                if config.is_some() {
                    return Err(format!("unexpected argument '{other}'"));
                }
                config = Some(PathBuf::from(other));
            }
        }
    }
    Ok(RunArgs {
        config: config.ok_or("missing config path")?,
        output,
        threads,
    })
}

fn cmd_run(args: &[String]) -> ExitCode {
    let parsed = match parse_run_args(args) {
        Ok(p) => p,
        Err(m) => {
            eprintln!("error: {m}\n\n{}", usage());
            return ExitCode::from(2);
        }
    };
    if let Some(n) = parsed.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = match std::fs::read_to_string(&parsed.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", parsed.config.display());
            return ExitCode::from(4);
        }
    };
    let scenario = match parse_config(&text) {
        Ok(s) => s,
        Err(diags) => {
            for d in &diags {
                eprintln!("{}: {d}", parsed.config.display());
            }
            return ExitCode::from(2);
        }
    };
    match run_scenario(&scenario, parsed.output.as_deref()) {
        Ok(s) => {
            println!("wrote {}", s.csv_path.display());
            println!("wrote {}", s.manifest_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_validate(args: &[String]) -> ExitCode {
    let [path] = args else {
        eprintln!("error: validate takes exactly one config path\n\n{}", usage());
        return ExitCode::from(2);
    };
    let path = PathBuf::from(path);
    match validate_file(&path) {
        Ok(diags) if diags.is_empty() => {
            println!("{}: ok", path.display());
            ExitCode::SUCCESS
        }
        Ok(diags) => {
            for d in &diags {
                eprintln!("{}: {d}", path.display());
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(RunError::Io(String::new()).exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("validate") => cmd_validate(&args[1..]),
        Some("version") => {
            println!("stirap {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
        Some("--help") | Some("-h") | Some("help") => {
            print!("{}", usage());
            ExitCode::SUCCESS
        }
        _ => {
            eprint!("{}", usage());
            ExitCode::from(2)
        }
    }
}

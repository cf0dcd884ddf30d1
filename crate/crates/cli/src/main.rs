mod args;
mod commands;
mod run;
mod source;

use std::ffi::OsString;
use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

const SUBCOMMANDS: [&str; 6] = ["generate", "equilibrium", "select", "sweep", "compare", "fixtures"];

/// Bad flags or flag combinations detected after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Splices `key = value` pairs from `--config FILE` in right after the
/// subcommand. Keys also given on the command line are skipped.
fn expand_config(argv: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let mut config = None;
    for (i, arg) in argv.iter().enumerate() {
        let arg = arg.to_string_lossy();
        if arg == "--" {
            break;
        }
        if arg == "--config" {
            config = argv.get(i + 1).cloned();
        } else if let Some(path) = arg.strip_prefix("--config=") {
            config = Some(path.into());
        }
    }
    let Some(config) = config else {
        return Ok(argv);
    };
    let Some(at) = argv.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref())) else {
        return Ok(argv);
    };
    let given = |key: &str| {
        let flag = format!("--{key}");
        argv.iter().map(|a| a.to_string_lossy()).any(|a| a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut spliced: Vec<OsString> = Vec::new();
    for (key, value) in asch::io::parse_config(&config)? {
        if key == "config" || given(&key) {
            continue;
        }
        match value.as_str() {
            "true" => spliced.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                spliced.push(format!("--{key}").into());
                spliced.push(value.into());
            }
        }
    }
    let mut out = argv;
    out.splice(at + 1..at + 1, spliced);
    Ok(out)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match e.downcast_ref::<asch::Error>() {
        Some(err) if err.is_convergence_failure() => 3,
        Some(asch::Error::InvalidParameter(_) | asch::Error::BudgetExceeded { .. }) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv = match expand_config(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

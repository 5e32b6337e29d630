use std::process::ExitCode;

use capq_cli::args::{threads_from_env, Cli};
use capq_cli::{run, CliError};
use clap::error::ErrorKind as ClapKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("capq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = threads_from_env(std::env::var("CAPQ_THREADS").ok().as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::numerical("cli", "thread_pool", e.to_string()))?;
    }
    let cfg = cli.into_config()?;
    let out = run(&cfg)?;
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|e| CliError::usage("cli", "write_output", format!("{}: {e}", path.display())))?,
        None => print!("{}", out.text),
    }
    Ok(out.exit_code() as u8)
}

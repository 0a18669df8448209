use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dirac_cli::commands::{run, Cli};
use dirac_cli::error::{EXIT_NUMERICAL, EXIT_USAGE};
use dirac_cli::{configure_threads, CliError};

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|source| CliError::Write { path: p.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|source| CliError::Write { path: "stdout".into(), source }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| run(&cli)).and_then(|r| {
        emit(&cli, &r.body)?;
        if r.passed {
            Ok(())
        } else {
            Err(CliError::CheckFailed("see the check column of the output".into()))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            debug_assert!(code == EXIT_USAGE || code == EXIT_NUMERICAL);
            ExitCode::from(code)
        }
    }
}

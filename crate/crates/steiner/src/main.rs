use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use steiner::cli::{run, Cli, CliError, Output};

fn write_output(out: &Output) -> std::io::Result<()> {
    match &out.path {
        Some(p) => std::fs::write(p, &out.payload),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.payload.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let level = std::env::var("STEINER_LOG_LEVEL").unwrap_or_else(|_| "warn".into());
    env_logger::Builder::new()
        .parse_filters(&level)
        .target(env_logger::Target::Stderr)
        .init();

    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(out) => match write_output(&out) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Err(CliError::Partial { message, output }) => {
            let _ = write_output(&output);
            eprintln!("error: {message}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

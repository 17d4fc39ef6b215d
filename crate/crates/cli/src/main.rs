#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod failure;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::failure::Failure;

fn run(cli: &Cli) -> Result<Option<Failure>, Failure> {
    commands::check_format(&cli.command, cli.format)?;
    let out = commands::run(&cli.command)?;
    let text = render::render(&out, cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure {
            code: failure::USAGE,
            kind: "io",
            path: Some(path.display().to_string()),
            message: e.to_string(),
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    Ok(out.deferred)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", Failure::from(e).line());
            return ExitCode::from(failure::USAGE);
        }
    };
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(f)) | Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.code)
        }
    }
}

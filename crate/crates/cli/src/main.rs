mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Stratify(a) => commands::stratify_cmd(a),
        Command::Lanczos(a) => commands::lanczos_cmd(a),
        Command::Measure(a) => commands::measure_cmd(a),
        Command::Walk(a) => commands::walk_cmd(a),
        Command::Verify(a) => commands::verify_cmd(a),
        Command::Gqd(a) => commands::gqd_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, commands::CliError::VerifyFailed) {
                eprintln!("qwalk: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

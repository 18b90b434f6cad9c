use std::process::ExitCode;

use clap::Parser;
use sdfforge_cli::cli::Cli;
use sdfforge_cli::{commands, with_threads};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let threads = cli.command.common().threads;
    match with_threads(threads, || commands::run(cli.command)).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

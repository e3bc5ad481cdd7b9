mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::output::emit;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global() {
            eprintln!("error [Config]: {e}");
            return ExitCode::from(3);
        }
    }
    let result = commands::run(&cli.command, &cli.global).and_then(|o| emit(&o, &cli.global).map(|_| o));
    match result {
        Ok(outcome) => ExitCode::from(if outcome.pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error [{}]: {}", e.kind(), e);
            ExitCode::from(e.exit_code())
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use tagdesc::commands::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tagdesc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

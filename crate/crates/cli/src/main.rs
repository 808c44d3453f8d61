use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = advdiv_cli::Cli::parse();
    match advdiv_cli::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use injnorm_cli::args::Cli;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    // clap prints usage errors itself and exits with status 2.
    let cli = Cli::parse();
    match injnorm_cli::run(cli, &argv, &mut std::io::stdout().lock()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

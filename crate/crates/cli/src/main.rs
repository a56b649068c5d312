use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use utvpi_cli::{run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    };
    if out.flush().is_err() {
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(code)
}

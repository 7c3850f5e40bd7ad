use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use lacunary::cli::{execute, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut err = io::stderr().lock();
    let code = match &cli.command.output().out {
        Some(path) => match File::create(path) {
            Ok(file) => {
                let mut w = BufWriter::new(file);
                let code = execute(&cli, &mut w, &mut err);
                if let Err(e) = w.flush() {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_ERROR
                } else {
                    code
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: cannot create {}: {e}", path.display());
                EXIT_ERROR
            }
        },
        None => execute(&cli, &mut io::stdout().lock(), &mut err),
    };
    ExitCode::from(code as u8)
}

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use geomean_cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let (output, path) = match run(cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    for note in &output.diagnostics {
        eprintln!("{note}");
    }
    let written = match &path {
        Some(p) => std::fs::write(p, &output.body),
        None => std::io::stdout().lock().write_all(output.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(output.exit_code)
}

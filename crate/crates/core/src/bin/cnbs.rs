use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use cnbs::cli::{run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();
    match run(&config, &mut out, &mut err) {
        Ok(()) => {
            let _ = out.flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "{}", e.render());
            ExitCode::from(e.code)
        }
    }
}

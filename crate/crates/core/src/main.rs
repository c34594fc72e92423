use std::io::Write;
use std::process::ExitCode;

use bose_thermo::cli::{run, RunConfig};
use clap::Parser;

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&config) {
        Ok(outcome) => {
            if config.out.is_some() {
                println!("{}", outcome.summary);
            } else {
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(outcome.artifact.as_bytes());
                eprintln!("{}", outcome.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

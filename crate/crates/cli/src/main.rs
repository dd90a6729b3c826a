use std::process::ExitCode;

use clap::Parser;

use supra_cli::{render, run, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let outcome = run(&config);
    let text = render(&outcome.report);
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.code == 2 {
        if let Some(msg) = outcome.report["error"]["message"].as_str() {
            eprintln!("error: {msg}");
        }
    }
    ExitCode::from(outcome.code as u8)
}

use std::process::ExitCode;

use clap::Parser;
use stable_extrema_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("STABLE_EXTREMA_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    eprintln!("cannot size the thread pool: {e}");
                }
            }
            _ => {
                eprintln!("STABLE_EXTREMA_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

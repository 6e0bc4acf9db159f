//! Command-line driver for the scattering benchmarks.

use clap::Parser;
use scatter::cli::{run, Args};

fn main() {
    match run(Args::parse()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

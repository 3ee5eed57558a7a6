use clap::Parser;
use freeprod::cli::{run, RunConfig};

fn main() {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(report) => print!("{report}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

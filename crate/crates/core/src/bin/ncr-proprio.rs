use clap::Parser;
use ncr_proprio::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}

use clap::Parser;

fn main() {
    std::process::exit(percolab::cli::execute(percolab::cli::Cli::parse()));
}

use clap::Parser;

fn main() {
    std::process::exit(cylbuck_cli::run(cylbuck_cli::args::Cli::parse()));
}

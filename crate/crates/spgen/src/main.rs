use std::process::exit;

mod cli;

fn main() {
    exit(cli::run());
}

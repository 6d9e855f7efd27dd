use std::process::exit;

fn main() {
    exit(robinspec_cli::run(std::env::args_os()));
}

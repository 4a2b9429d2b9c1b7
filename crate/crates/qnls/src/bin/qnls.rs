//! Command-line entry point; see `qnls::cli` for the verbs and flags.

fn main() {
    std::process::exit(qnls::cli::main_with_args(std::env::args_os()));
}

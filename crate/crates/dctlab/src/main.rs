use std::process::ExitCode;

fn main() -> ExitCode {
    dctlab::cli::run(std::env::args_os())
}

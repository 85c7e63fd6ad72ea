use std::process::ExitCode;

fn main() -> ExitCode {
    metacond::cli::main_with_args(std::env::args_os())
}

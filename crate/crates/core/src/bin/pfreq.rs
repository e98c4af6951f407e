use std::process::ExitCode;

fn main() -> ExitCode {
    principal_frequency::cli::main_with_args(std::env::args_os())
}

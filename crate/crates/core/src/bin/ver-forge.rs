use std::process::ExitCode;

fn main() -> ExitCode {
    ver_forge::cli::run_from(std::env::args_os())
}

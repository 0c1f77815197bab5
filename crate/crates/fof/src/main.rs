use std::process::ExitCode;

fn main() -> ExitCode {
    fof::cli::main_with(std::env::args_os())
}

use std::process::ExitCode;

fn main() -> ExitCode {
    udw_cli::main_with(std::env::args_os())
}

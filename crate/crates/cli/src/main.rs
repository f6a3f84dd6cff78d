use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(volspill_cli::run(std::env::args_os()))
}

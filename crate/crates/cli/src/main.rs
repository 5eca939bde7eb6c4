use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(sskit_cli::run(std::env::args_os()))
}

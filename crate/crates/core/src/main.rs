use std::process::ExitCode;

fn main() -> ExitCode {
    divpos::cli::init_logging();
    let status = divpos::cli::run(std::env::args_os());
    ExitCode::from(status as u8)
}

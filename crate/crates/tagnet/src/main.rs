use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(tagnet::cli::run(std::env::args()) as u8)
}

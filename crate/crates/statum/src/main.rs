use std::process::ExitCode;

fn main() -> ExitCode {
    statum::cli::run()
}

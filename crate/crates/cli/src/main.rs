use std::io::{stderr, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = hardlimit_cli::run(std::env::args(), &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(code as u8)
}

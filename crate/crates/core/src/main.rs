use std::io::{stderr, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = saddlepoint::cli::execute(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(code.clamp(0, 255) as u8)
}

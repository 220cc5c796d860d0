use std::io;
use std::panic;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = panic::catch_unwind(|| {
        let mut out = io::stdout().lock();
        let mut err = io::stderr().lock();
        normdebt_cli::main_with_args(std::env::args_os(), &mut out, &mut err)
    })
    .unwrap_or(4);
    ExitCode::from(code as u8)
}

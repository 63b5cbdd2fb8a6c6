use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = equigraph::cli::run_command(&argv, &mut out);
    let _ = out.flush();
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

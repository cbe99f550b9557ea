use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = greenop_cli::run_command(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}

use std::process::ExitCode;

fn main() -> ExitCode {
    let result = fcar_cli::parse_args(std::env::args_os()).and_then(|cli| fcar_cli::execute(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::process::ExitCode;

fn main() -> ExitCode {
    match tra_cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e });
            eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code)
        }
    }
}

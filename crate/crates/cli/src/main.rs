use std::process::ExitCode;

use tempwave_cli::{execute, Cli, OUT_ENV};

fn main() -> ExitCode {
    let cli = match Cli::parse_with_keys(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let env_out = std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(Into::into);
    match execute(&cli, env_out) {
        Ok((dir, outcome)) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            println!("wrote {} files to {}", outcome.files.len(), dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::process::ExitCode;

use carnot_lab::cli::{execute, resolve, Cli};
use carnot_lab::config::OUTPUT_ENV;
use carnot_lab::LabError;
use clap::error::ErrorKind;
use clap::Parser;

fn fail(err: &LabError) -> ExitCode {
    let payload = serde_json::json!({ "error": err.payload() });
    eprintln!("{payload}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return fail(&LabError::Usage(e.to_string().trim().to_string())),
    };
    let config = match resolve(cli, std::env::var(OUTPUT_ENV).ok()) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let mut stdout = std::io::stdout().lock();
    match execute(config, &mut stdout) {
        Ok(out) => {
            eprintln!("{} finished in {:.1} ms", out.bundle.command, out.timing.wall_time_ms);
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

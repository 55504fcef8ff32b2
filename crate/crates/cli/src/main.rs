use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use focklab_cli::{configure_threads, render, run, Cli, CliError, OutputFormat, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = cli.command.name();
    let outcome = configure_threads()
        .and_then(|_| RunConfig::from_args(&cli.global, &cli.command))
        .and_then(|cfg| run(&cli.command, &cfg).map(|r| (r, cfg.output_format)));
    let mut stdout = std::io::stdout().lock();
    match outcome {
        Ok((report, format)) => {
            let _ = stdout.write_all(render(&report, format).as_bytes());
            ExitCode::SUCCESS
        }
        Err(CliError::Failed(report)) => {
            let _ = stdout.write_all(render(&report, OutputFormat::Json).as_bytes());
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("{}", e.to_json(name));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

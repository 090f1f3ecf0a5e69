use std::path::PathBuf;
use std::process::ExitCode;

use capband::config::{parse_config, OutputFormat};
use capband::io;
use capband::run::{run_command, Command};
use clap::Parser;
use serde_json::json;

/// Band structures of time-modulated subwavelength resonator lattices.
#[derive(Parser, Debug)]
#[command(name = "capband", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Result file; stdout when absent. The report goes to `<output>.report.json`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail("usage", "--threads must be at least 1".into(), 2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail("usage", e.to_string(), 2);
        }
    }
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => return fail("io", format!("{}: {e}", cli.config.display()), 2),
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(capband::run::RunError::from(e.clone()).kind(), e.to_string(), 2),
    };
    let format = match cli.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => config.output.format,
    };
    let output = cli.output.clone().or_else(|| config.output.destination.as_ref().map(PathBuf::from));
    log::info!("running {} on {}", cli.command.name(), cli.config.display());
    let out = match run_command(&config, cli.command) {
        Ok(o) => o,
        Err(e) => {
            let code = if matches!(e, capband::run::RunError::Config(_)) { 2 } else { 1 };
            return fail(e.kind(), e.to_string(), code);
        }
    };
    let body = out.render(format);
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, body) {
                return fail("io", format!("{}: {e}", path.display()), 1);
            }
            let mut report = path.into_os_string();
            report.push(".report.json");
            if let Err(e) = std::fs::write(&report, io::pretty(&out.report)) {
                return fail("io", format!("{}: {e}", PathBuf::from(report).display()), 1);
            }
        }
        None => {
            print!("{body}");
            eprint!("{}", io::pretty(&out.report));
        }
    }
    ExitCode::SUCCESS
}

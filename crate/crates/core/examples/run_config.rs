//! Library equivalent of `capband <command> --config <path>`: parse a preset
//! and print the first rows of its CSV and the report.
//!
//! cargo run --release --example run_config -- configs/fig-SLc-square-uniform.toml uniform-bands

use capband::config::parse_config;
use capband::io::pretty;
use capband::run::{run_command, Command};
use clap::ValueEnum;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "crates/core/configs/fig-SLc-square-uniform.toml".into());
    let command = args.next().unwrap_or_else(|| "uniform-bands".into());
    let command = Command::from_str(&command, true).map_err(anyhow::Error::msg)?;

    let config = parse_config(&std::fs::read_to_string(&path)?)?;
    let out = run_command(&config, command)?;
    for line in out.csv.lines().take(8) {
        println!("{line}");
    }
    println!("... {} rows", out.csv.lines().count() - 1);
    print!("{}", pretty(&out.report));
    Ok(())
}

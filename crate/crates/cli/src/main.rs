use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use chainrec_cli::{run, Command, ExperimentConfig};

/// Exact certificates for chain recurrence and shadowing constructions.
#[derive(Parser)]
#[command(name = "chainrec", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Directory for certificates.csv and report.md.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match &args.config {
        Some(path) => ExperimentConfig::load(args.command, path),
        None => Ok(ExperimentConfig::new(args.command)),
    };
    let result = cfg.and_then(|mut cfg| {
        cfg.seed = args.seed.or(cfg.seed);
        cfg.horizon = args.horizon.or(cfg.horizon);
        run(&cfg, &args.out)
    });
    match result {
        Ok(outcome) => {
            println!("{}: {} checks verified, artifacts in {}", args.command, outcome.log.rows.len(), args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

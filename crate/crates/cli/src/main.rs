use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hopfctl::{parse_config, resolve_out_dir, run, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "hopfctl", version, about = "Locate and control Hopf bifurcations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the task described by a configuration file.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config file and the environment).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        verbose: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { config, out, verbose } = cli.command;
    let text = match std::fs::read_to_string(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("hopfctl: cannot read {}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hopfctl: {}: {e}", config.display());
            return ExitCode::from(2);
        }
    };
    let env = std::env::var_os(OUT_DIR_ENV).filter(|s| !s.is_empty()).map(PathBuf::from);
    let dir = resolve_out_dir(out, &cfg, env);
    match run(&cfg, &dir, verbose) {
        Ok(report) => {
            if let Some(e) = &report.error {
                eprintln!("hopfctl: {e}");
            }
            println!("{}", dir.join("summary.json").display());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("hopfctl: cannot write to {}: {e}", dir.display());
            ExitCode::from(2)
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use eit_qhe::{exit, exit_code, run, validate_config, Mode};

/// Steady states, cross-sections and spectral brightness of an SGC-assisted
/// EIT heat engine.
#[derive(Debug, Parser)]
#[command(name = "eit-qhe", version)]
struct Cli {
    #[arg(value_enum)]
    mode: Mode,

    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `outputs.dir`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, env = "EIT_QHE_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(exit::CONFIG as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(exit::CONFIG as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    }

    let raw = match fs::read_to_string(&cli.config) {
        Ok(raw) => raw,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    let config = match validate_config(&raw) {
        Ok(c) => c,
        Err(errors) => {
            eprintln!("error: invalid configuration {}", cli.config.display());
            for e in errors.iter() {
                eprintln!("  {e}");
            }
            return ExitCode::from(exit::CONFIG as u8);
        }
    };

    match run(&config, cli.mode, cli.out.as_deref()) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", f.display());
            }
            let code = exit_code(&summary);
            if code != exit::SUCCESS {
                eprintln!(
                    "error: {} consistency failure(s); see the written artifacts",
                    summary.consistency_failures
                );
            }
            ExitCode::from(code as u8)
        }
        // Invalid parameter combinations and unwritable outputs are both
        // configuration problems.
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::CONFIG as u8)
        }
    }
}

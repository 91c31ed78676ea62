use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use latembed_cli::{demo, run, validate, RunOptions};

#[derive(Parser)]
#[command(
    name = "latembed",
    version,
    about = "Embed integer lattices onto smooth manifolds"
)]
struct Cli {
    /// Worker threads for per-point evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the embedding described by a config file.
    Run {
        config: PathBuf,
        /// Write outputs here instead of the config's output directory.
        #[arg(long, env = "LATEMBED_OUTPUT_DIR")]
        output_dir: Option<PathBuf>,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// Write a built-in config (plane, sphere, torus or cylinder).
    Demo {
        name: String,
        /// Destination file; defaults to `<name>.toml`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, output_dir } => match run(
            &config,
            &RunOptions {
                threads: cli.threads,
                output_dir,
            },
        ) {
            Ok(summary) => {
                println!(
                    "{} after {} iterations; wrote {}, {} and {}",
                    summary.termination.as_str(),
                    summary.iterations,
                    summary.points_csv.display(),
                    summary.edges_csv.display(),
                    summary.report.display()
                );
                summary.exit_code()
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::Validate { config } => match validate(&config) {
            Ok(diags) if diags.is_empty() => {
                println!("{}: ok", config.display());
                0
            }
            Ok(diags) => {
                for d in diags {
                    eprintln!("{}: {d}", config.display());
                }
                2
            }
            Err(e) => {
                eprintln!("error: reading {}: {e}", config.display());
                1
            }
        },
        Command::Demo { name, output } => match write_demo(&name, output) {
            Ok(path) => {
                println!("wrote {}", path.display());
                0
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                1
            }
        },
    };
    ExitCode::from(code as u8)
}

fn write_demo(name: &str, output: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    let text = demo::config(name).with_context(|| {
        format!(
            "unknown demo `{name}`; choose one of {}",
            demo::NAMES.join(", ")
        )
    })?;
    let path = output.unwrap_or_else(|| PathBuf::from(format!("{name}.toml")));
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

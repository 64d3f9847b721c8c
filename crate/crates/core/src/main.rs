//! Command-line experiment runner.

use clap::{Parser, Subcommand};
use rmtlab::harness::{emit, preset, run, ExperimentConfig, Format};
use rmtlab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rmtlab", version, about = "Random-matrix Monte Carlo laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a named preset.
    Run {
        /// Path to a flat key = value config file.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Name of a built-in preset.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Results do not depend on
        /// this.
        #[arg(long)]
        threads: Option<usize>,
        /// Comma-separated artifact formats: json,csv,svg.
        #[arg(long, value_delimiter = ',')]
        formats: Option<Vec<String>>,
    },
    /// List the available presets.
    Presets,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::Numerical(_) | Error::ResourceCap(_) => 3,
        Error::Io(_) => 4,
    }
}

fn load_config(
    config: Option<PathBuf>,
    preset_name: Option<String>,
) -> Result<ExperimentConfig, Error> {
    match (config, preset_name) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            rmtlab::harness::config::parse_config(&text)
        }
        (None, Some(name)) => preset(&name),
        _ => Err(Error::Config(
            "exactly one of --config or --preset is required".into(),
        )),
    }
}

fn run_command(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Presets => {
            for name in rmtlab::harness::preset_names() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Run {
            config,
            preset,
            out,
            seed,
            threads,
            formats,
        } => {
            let mut cfg = load_config(config, preset)?;
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(formats) = formats {
                cfg.formats = formats
                    .iter()
                    .map(|f| Format::parse(f))
                    .collect::<Result<Vec<_>, _>>()?;
            }

            let output = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Config(format!("thread pool: {e}")))?
                    .install(|| run(&cfg)),
                None => run(&cfg),
            }?;

            let written = emit(&output, &cfg)?;
            for r in &output.report.results {
                let m2 = r
                    .moments
                    .iter()
                    .find(|m| m.k == 2)
                    .map(|m| format!("{:.4}", m.mean))
                    .unwrap_or_else(|| "-".into());
                let ks = r
                    .ks
                    .as_ref()
                    .map(|k| format!("{:.4}", k.mean))
                    .unwrap_or_else(|| "-".into());
                println!(
                    "{:<18} N={:<5} replicas={:<3} m2={} ks={} op_norm={:.4} ({:.2}s)",
                    r.ensemble, r.n, r.replicas, m2, ks, r.op_norm.mean, r.wall_clock_s
                );
            }
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

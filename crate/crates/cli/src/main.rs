use clap::{Parser, Subcommand};
use gossip_cli::config::{load_config, SeedSpec};
use gossip_cli::{presets, run_experiment, CliError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gossip", about = "Gossip scheme experiment runner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory (default: runs/<experiment name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named preset (all its variants).
    Preset {
        name: String,
        /// Override the number of seeds per variant.
        #[arg(long)]
        seed_count: Option<u64>,
        /// Output directory (default: runs/<preset name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available presets.
    ListPresets,
    /// List the registered algorithm ids.
    ListAlgorithms,
    /// Validate a config file without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let base = config.parent().unwrap_or(Path::new(".")).to_path_buf();
            let out = out.unwrap_or_else(|| PathBuf::from("runs").join(&cfg.name));
            let outcome = run_experiment(&cfg, &base, Some(&out))?;
            println!(
                "{}: {} seeds, {} recorded rows each -> {}",
                cfg.name,
                outcome.traces.len(),
                outcome.traces[0].rows.len(),
                out.display()
            );
            println!(
                "final consensus mean {:.6} (std {:.6})",
                outcome.aggregate.final_consensus_mean, outcome.aggregate.final_consensus_std
            );
            Ok(())
        }
        Command::Preset { name, seed_count, out } => {
            let preset = presets::find(&name).ok_or_else(|| {
                CliError::Config(gossip_cli::config::ConfigError::Parse(format!(
                    "unknown preset '{name}'; see list-presets"
                )))
            })?;
            let out_root = out.unwrap_or_else(|| PathBuf::from("runs").join(name.clone()));
            for (label, mut config) in (preset.build)() {
                if let Some(n) = seed_count {
                    config.seeds = SeedSpec::Count { n, base: 0 };
                }
                let dir = out_root.join(&label);
                let outcome = run_experiment(&config, Path::new("."), Some(&dir))?;
                let last = outcome.aggregate.rows.last().expect("at least one row");
                println!(
                    "{name}/{label}: {} seeds, final supErr mean {:.6} -> {}",
                    outcome.traces.len(),
                    last.mean[0],
                    dir.display()
                );
            }
            Ok(())
        }
        Command::ListPresets => {
            for preset in presets::all() {
                println!("{:<28} {}", preset.name, preset.description);
            }
            Ok(())
        }
        Command::ListAlgorithms => {
            for entry in gossip_core::algo::registry::all() {
                println!("{:<16} {}", entry.id, entry.summary);
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            let base = config.parent().unwrap_or(Path::new(".")).to_path_buf();
            cfg.prepare(&base)?;
            // Exercise the algorithm builder too, so bad params fail here.
            let prepared = cfg.prepare(&base)?;
            let ctx = gossip_core::algo::registry::BuildContext {
                network: prepared.network.as_ref(),
                x0: &prepared.x0,
                params: &cfg.algorithm.params,
            };
            gossip_core::algo::registry::build(&cfg.algorithm.id, &ctx)?;
            println!("{}: ok ({} seeds)", cfg.name, prepared.seeds.len());
            Ok(())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gcnn_ridgelet_cli::{load_config, presets, run, CliError};

#[derive(Parser)]
#[command(
    name = "gcnn-ridgelet",
    version,
    about = "Ridgelet reconstruction and universality experiments for group-convolutional networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a shipped preset.
    Run(RunArgs),
    /// List the shipped presets.
    ListPresets,
    /// Print a preset as a JSON config.
    ShowPreset { name: String },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Name of a shipped preset, see `list-presets`.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn preset(name: &str) -> Result<&'static presets::Preset, CliError> {
    presets::find(name)
        .ok_or_else(|| CliError::Validation(format!("unknown preset '{name}'; see list-presets")))
}

fn execute(args: RunArgs) -> Result<(), CliError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => preset(name)?.config(),
        (None, None) => unreachable!("clap requires one of --config and --preset"),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = run(&cfg, &args.out, args.threads)?;
    let s = &out.summary;
    eprintln!(
        "{}: {} in {:.0} ms, outputs in {}",
        s.name,
        s.experiment,
        s.wall_ms,
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => execute(args),
        Command::ListPresets => {
            for p in presets::PRESETS {
                println!("{:<34} {}", p.name, p.description);
            }
            Ok(())
        }
        Command::ShowPreset { name } => {
            preset(&name).map(|p| println!("{}", p.config().to_json_pretty()))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

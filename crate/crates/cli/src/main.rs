use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dsmimo_cli::{exit_code, run_diag_command, run_experiment_command, run_figure_preset, Invocation, Preset};

/// Multi-cell massive MIMO uplink simulator with double scattering channels.
#[derive(Debug, Parser)]
#[command(name = "dsmimo", version)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an SE experiment from a TOML configuration (built-in defaults when omitted).
    Run(Common),
    /// Regenerate the data behind one figure.
    Figure(Common),
    /// Correlation or favorable propagation diagnostics (fig1, fig3, fig4, fig5).
    Diag(Common),
    /// CI-scale experiment: M = 32, 10 drops, 200 realizations.
    Smoke(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Base preset: fig1, fig3, fig4, fig5, fig7, fig8, fig9 or smoke.
    #[arg(long)]
    preset: Option<Preset>,
    /// TOML configuration file merged over the preset.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    drops: Option<usize>,
    /// Fading realizations per drop (samples or pairs for diagnostics).
    #[arg(long)]
    realizations: Option<usize>,
    /// Worker threads; drops are distributed over them.
    #[arg(long)]
    workers: Option<usize>,
    /// Extra `dotted.key=value` override, e.g. `--set network.antennas=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl From<Common> for Invocation {
    fn from(c: Common) -> Self {
        Invocation {
            preset: c.preset,
            config_file: c.config,
            seed: c.seed,
            out: c.out,
            drops: c.drops,
            realizations: c.realizations,
            workers: c.workers,
            overrides: c.overrides,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Run(c) => run_experiment_command(&c.into()),
        Command::Figure(c) => {
            if c.preset.is_none() {
                eprintln!("error: figure needs --preset");
                return ExitCode::from(2);
            }
            run_figure_preset(&c.into())
        }
        Command::Diag(c) => run_diag_command(&c.into()),
        Command::Smoke(c) => {
            let mut inv: Invocation = c.into();
            inv.preset = Some(inv.preset.unwrap_or(Preset::Smoke));
            run_experiment_command(&inv)
        }
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

//! Command-line entry point: argument parsing and exit-code policy.

use std::path::PathBuf;
use std::process;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use flexion_cli::commands::{
    cmd_dse, cmd_flexion, cmd_mse, cmd_report, DseArgs, FlexionArgs, Format, MseArgs, ReportArgs,
};
use flexion_core::cost::Objective;

/// Map-space flexibility counting, mapping search, and design-space
/// experiments for DNN accelerators.
#[derive(Parser)]
#[command(name = "flexion", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    match s {
        "runtime" => Ok(Objective::Runtime),
        "energy" => Ok(Objective::Energy),
        "edp" => Ok(Objective::Edp),
        other => Err(format!(
            "unknown objective {other:?} (expected runtime, energy or edp)"
        )),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count workload, supported and potential mapping choices per layer
    Flexion {
        /// Workload model JSON file
        #[arg(long)]
        model: PathBuf,
        /// Accelerator specification JSON file
        #[arg(long)]
        accel: PathBuf,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Which artifact families to write
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Find the best mapping of every layer of a model on one accelerator
    Mse {
        /// Workload model JSON file
        #[arg(long)]
        model: PathBuf,
        /// Accelerator specification JSON file
        #[arg(long)]
        accel: PathBuf,
        /// Objective to minimize
        #[arg(long, value_parser = parse_objective, default_value = "runtime")]
        objective: Objective,
        /// Root seed for the searches
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = one per core)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Which artifact families to write
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Run an experiment file: axis isolation, sweeps, class comparisons,
    /// future-proofing
    Dse {
        /// Experiment JSON file
        #[arg(long)]
        experiment: PathBuf,
        /// Override the experiment's objective
        #[arg(long, value_parser = parse_objective)]
        objective: Option<Objective>,
        /// Override the experiment's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = one per core)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Result directory (default: "<experiment name>-results")
        #[arg(long)]
        out: Option<PathBuf>,
        /// Which artifact families to write
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Render normalized comparison matrices from a result directory
    Report {
        /// Result directory previously written by `dse`
        result_dir: PathBuf,
        /// Output directory (default: the result directory itself)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Which artifact families to write
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
}

fn main() {
    // clap exits with 2 on usage errors by default; here bad usage is a
    // validation failure (exit 1), and 2 is reserved for failures while
    // producing outputs. Help and version displays are successes.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Flexion {
            model,
            accel,
            out,
            format,
        } => cmd_flexion(&FlexionArgs {
            model,
            accel,
            out,
            format,
        }),
        Command::Mse {
            model,
            accel,
            objective,
            seed,
            jobs,
            out,
            format,
        } => cmd_mse(&MseArgs {
            model,
            accel,
            objective,
            seed,
            jobs,
            out,
            format,
        }),
        Command::Dse {
            experiment,
            objective,
            seed,
            jobs,
            out,
            format,
        } => cmd_dse(&DseArgs {
            experiment,
            objective,
            seed,
            jobs,
            out,
            format,
        }),
        Command::Report {
            result_dir,
            out,
            format,
        } => cmd_report(&ReportArgs {
            result_dir,
            out,
            format,
        }),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridactive::{run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "gridactive", about = "Active-learning experiment harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config
    #[arg(long, value_name = "path.json")]
    config: PathBuf,
    /// Master seed; overrides the config's master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (a .manifest.json is written alongside)
    #[arg(long, value_name = "path")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long, value_name = "k")]
    jobs: Option<usize>,
    /// Replace existing outputs
    #[arg(long)]
    overwrite: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Success-rate grid over the engine constants (c1, b1, c2, b2)
    SuccessGrid(CommonArgs),
    /// Disagreement-coefficient scaling across dataset sizes
    ThetaScaling(CommonArgs),
    /// Median/p90 query counts across dataset sizes
    LabelComplexity(CommonArgs),
}

fn run(args: &CommonArgs, expected: &str) -> gridactive::Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let got = match cfg {
        ExperimentConfig::SuccessGrid(_) => "success-grid",
        ExperimentConfig::ThetaScaling(_) => "theta-scaling",
        ExperimentConfig::LabelComplexity(_) => "label-complexity",
    };
    if got != expected {
        return Err(gridactive::Error::InvalidParameter(format!(
            "config is a {got} experiment but the {expected} subcommand was invoked"
        )));
    }
    run_experiment(&cfg, args.seed, &args.out, args.jobs, args.overwrite)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, expected) = match &cli.command {
        Command::SuccessGrid(a) => (a, "success-grid"),
        Command::ThetaScaling(a) => (a, "theta-scaling"),
        Command::LabelComplexity(a) => (a, "label-complexity"),
    };
    match run(args, expected) {
        Ok(()) => {
            eprintln!("wrote {}", args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use diclique_cli::commands::{self, Written};
use diclique_cli::{CliError, Format, GlobalOpts};

#[derive(Parser, Debug)]
#[command(name = "diclique", version, about = "Random intersection digraphs: sampling, motif clustering and limit-law checks")]
struct Cli {
    /// Master seed; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one instance (single-cell config) or project a bipartite file.
    #[command(group(ArgGroup::new("input").required(true).args(["config", "from_bipartite"])))]
    Generate {
        config: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        from_bipartite: Option<PathBuf>,
    },
    /// Motif counts and clustering coefficients of a graph file.
    Coeffs {
        graph: PathBuf,
        /// Also report the local coefficient of this node.
        #[arg(long)]
        ego: Option<usize>,
    },
    /// Monte Carlo sweep with theory references.
    Experiment { config: PathBuf },
    /// Empirical degree pmfs against the limit laws.
    DegreeCompare { config: PathBuf },
}

fn report_files(w: &Written) {
    for f in &w.files {
        eprintln!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let opts = GlobalOpts { seed: cli.seed, threads: cli.threads, out: cli.out, format: cli.format };
    match cli.command {
        Command::Generate { config: Some(config), .. } => report_files(&commands::generate(&config, &opts)?),
        Command::Generate { from_bipartite: Some(file), .. } => report_files(&commands::project_file(&file, &opts)?),
        Command::Generate { .. } => unreachable!("clap enforces the input group"),
        Command::Coeffs { graph, ego } => match commands::coeffs(&graph, ego, &opts)? {
            (Some(w), _) => report_files(&w),
            (None, text) => print!("{text}"),
        },
        Command::Experiment { config } => return sweep(commands::experiment(&config, &opts)?),
        Command::DegreeCompare { config } => return sweep(commands::degree_compare(&config, &opts)?),
    }
    Ok(true)
}

fn sweep(outcome: commands::SweepOutcome) -> Result<bool, CliError> {
    report_files(&outcome.written);
    for d in outcome.diagnostics() {
        eprintln!("{d}");
    }
    Ok(outcome.result.all_completed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some cells did not complete");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

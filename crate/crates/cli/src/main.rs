use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use newslens::pipeline::{run_pipeline, PipelineConfig, PipelineError, Stage};

/// Keyword snippets, variant merging, state embeddings, log-odds and reprint
/// networks over Chronicling America OCR.
#[derive(Debug, Parser)]
#[command(name = "newslens", version)]
struct Cli {
    /// JSON config file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated stages to run (only with `all` or no subcommand).
    #[arg(long, global = true)]
    stages: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory of recorded responses; no network requests are made.
    #[arg(long, global = true)]
    fixture_dir: Option<PathBuf>,
    /// Output directory for all artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Search for the keyword and cache OCR text of every hit.
    Fetch,
    /// Cut keyword snippets from cached pages.
    Extract,
    /// Clean snippets and merge OCR spelling variants of the keyword.
    Normalize,
    /// Train word embeddings.
    TrainEmbed,
    /// Compare the keyword's vectors across states.
    CompareStates,
    /// Log-odds comparison of Confederate and Union snippets.
    Logodds,
    /// Find reprinted passages.
    DetectReuse,
    /// Aggregate reprints into a state network.
    Network,
    /// Write report.md and summary tables.
    Report,
    /// Run every stage (or those given by --stages).
    All,
}

impl Command {
    fn stage(self) -> Option<Stage> {
        Some(match self {
            Command::Fetch => Stage::Fetch,
            Command::Extract => Stage::Extract,
            Command::Normalize => Stage::Normalize,
            Command::TrainEmbed => Stage::TrainEmbed,
            Command::CompareStates => Stage::CompareStates,
            Command::Logodds => Stage::Logodds,
            Command::DetectReuse => Stage::DetectReuse,
            Command::Network => Stage::Network,
            Command::Report => Stage::Report,
            Command::All => return None,
        })
    }
}

fn exit_code(e: &PipelineError) -> u8 {
    match e {
        PipelineError::ConfigInvalid(_) => 2,
        PipelineError::MissingUpstreamArtifact { .. } => 3,
        PipelineError::StageFailure { .. } => 4,
    }
}

fn resolve(cli: &Cli) -> Result<(PipelineConfig, Vec<Stage>), PipelineError> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if let Some(dir) = &cli.fixture_dir {
        cfg.paths.fixtures = Some(dir.clone());
    }
    if let Some(out) = &cli.out {
        cfg.paths.output = out.clone();
    }
    let single = cli.command.and_then(Command::stage);
    let stages = match (single, &cli.stages) {
        (Some(_), Some(_)) => return Err(PipelineError::ConfigInvalid("--stages only combines with `all`".into())),
        (Some(stage), None) => vec![stage],
        (None, Some(list)) => Stage::parse_list(list)?,
        (None, None) => Stage::ALL.to_vec(),
    };
    Ok((cfg, stages))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = resolve(&cli).and_then(|(cfg, stages)| run_pipeline(&cfg, &stages));
    match result {
        Ok(runs) => {
            for r in runs {
                log::info!("{} finished in {:.2}s", r.stage, r.seconds);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

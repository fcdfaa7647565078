use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eeg_emotion::cli::{self, Overrides, RunConfig};
use eeg_emotion::dataset::MidpointPolicy;
use eeg_emotion::eval::{render_table, CvMode};
use eeg_emotion::FeatureFamily;

#[derive(Parser)]
#[command(
    name = "eeg-emotion",
    version,
    about = "EEG asymmetry features and SVM emotion classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the per-recording feature table.
    Extract(Common),
    /// Cross-validate the classifier on each selected feature set.
    Evaluate(Common),
    /// Generate a synthetic session (recordings plus manifest).
    Synth(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    PaperFaithful,
    LeakageSafe,
}

#[derive(Clone, Copy, ValueEnum)]
enum Midpoint {
    Reject,
    AssignPositive,
    AssignNegative,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    /// Session manifest to read instead of a synthetic session.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Comma-separated feature sets: rasm, dasm, corr, all.
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<FeatureFamily>>,
    /// Number of cross-validation folds.
    #[arg(long)]
    folds: Option<usize>,
    /// Evaluation seed (resampling, folds, SMO).
    #[arg(long)]
    seed: Option<u64>,
    /// Where class balancing happens relative to folding.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Treatment of SAM ratings of exactly 5.
    #[arg(long, value_enum)]
    midpoint_policy: Option<Midpoint>,
    /// Seed for the synthetic generator; adds a default [synth] section if missing.
    #[arg(long)]
    synth_seed: Option<u64>,
}

impl Common {
    fn into_config(self) -> eeg_emotion::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(Overrides {
            output_dir: self.output_dir,
            manifest: self.manifest,
            features: self.features,
            folds: self.folds,
            seed: self.seed,
            mode: self.mode.map(|m| match m {
                Mode::PaperFaithful => CvMode::PaperFaithful,
                Mode::LeakageSafe => CvMode::LeakageSafe,
            }),
            midpoint_policy: self.midpoint_policy.map(|m| match m {
                Midpoint::Reject => MidpointPolicy::Reject,
                Midpoint::AssignPositive => MidpointPolicy::AssignPositive,
                Midpoint::AssignNegative => MidpointPolicy::AssignNegative,
            }),
            synth_seed: self.synth_seed,
        });
        Ok(cfg)
    }
}

fn run(command: Command) -> eeg_emotion::Result<()> {
    match command {
        Command::Extract(c) => {
            let path = cli::cmd_extract(&c.into_config()?)?;
            println!("{}", path.display());
        }
        Command::Evaluate(c) => {
            let run = cli::cmd_evaluate(&c.into_config()?)?;
            print!("{}", render_table(&run.reports));
        }
        Command::Synth(c) => {
            let path = cli::cmd_synth(&c.into_config()?)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}

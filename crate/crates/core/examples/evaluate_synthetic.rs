//! Cross-validates the classifier on the default synthetic session and prints
//! the four-row summary (RASM, DASM, Correlation, All).
//!
//! ```text
//! cargo run --release --example evaluate_synthetic
//! ```

use eeg_emotion::cli::{cmd_evaluate, RunConfig};
use eeg_emotion::eval::render_table;
use eeg_emotion::synth::SynthSpec;

pub fn run_example() -> eeg_emotion::Result<String> {
    let out = std::env::temp_dir().join("eeg-emotion-evaluate-example");
    let cfg = RunConfig {
        output_dir: out,
        synth: Some(SynthSpec::default()),
        ..Default::default()
    };
    let run = cmd_evaluate(&cfg)?;
    Ok(render_table(&run.reports))
}

fn main() -> eeg_emotion::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

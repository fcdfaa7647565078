//! Writes a small synthetic session (recording CSVs plus a manifest) and
//! loads it back through the regular ingestion path.
//!
//! ```text
//! cargo run --example synth_session -- /tmp/session
//! ```

use std::path::PathBuf;

use eeg_emotion::session::load_session_file;
use eeg_emotion::synth::{generate_session, write_session, SynthSpec};

pub fn run_example(dir: PathBuf) -> eeg_emotion::Result<String> {
    let spec = SynthSpec {
        participants: 3,
        ..Default::default()
    };
    let session = generate_session(&spec)?;
    std::fs::create_dir_all(&dir).map_err(|e| eeg_emotion::Error::io(&dir, e))?;
    let manifest = write_session(&session, &dir)?;

    let loaded = load_session_file(&manifest)?;
    let mut out = format!("{}\n", manifest.display());
    for (rec, rating) in &loaded {
        out.push_str(&format!(
            "{:<14} {:>6} samples  valence {} arousal {}\n",
            rec.recording_id(),
            rec.len(),
            rating.valence(),
            rating.arousal()
        ));
    }
    Ok(out)
}

fn main() -> eeg_emotion::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("eeg-emotion-synth"));
    print!("{}", run_example(dir)?);
    Ok(())
}

//! The 30-slot asymmetry feature vector of one synthetic recording.

use eeg_emotion::extract_features;
use eeg_emotion::features::feature_names;
use eeg_emotion::spectral::SpectralSettings;
use eeg_emotion::synth::{generate_session, SynthSpec};

pub fn run_example() -> eeg_emotion::Result<String> {
    let spec = SynthSpec {
        participants: 1,
        ..Default::default()
    };
    let session = generate_session(&spec)?;
    let (rec, rating) = &session[0];
    let fv = extract_features(rec, &SpectralSettings::default())?;

    let mut out = format!(
        "{} (valence {}, arousal {})\n",
        rec.recording_id(),
        rating.valence(),
        rating.arousal()
    );
    for (name, value) in feature_names().iter().zip(fv.as_slice()) {
        out.push_str(&format!("{name:<24} {value:>10.4}\n"));
    }
    Ok(out)
}

fn main() -> eeg_emotion::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

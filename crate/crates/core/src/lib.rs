//! Emotion recognition from four-electrode EEG.
//!
//! Recordings from TP9, AF7, AF8 and TP10 are reduced to Welch band powers
//! over five bands, turned into hemispheric asymmetry features (rational and
//! differential asymmetry plus left/right band-power correlation), labeled
//! from valence/arousal self-ratings, and classified into four quadrant
//! emotions by a one-vs-one polynomial-kernel SVM trained with SMO.
//!
//! ```no_run
//! use eeg_emotion::{cli, synth::SynthSpec};
//!
//! let cfg = cli::RunConfig {
//!     synth: Some(SynthSpec::default()),
//!     ..Default::default()
//! };
//! let run = cli::cmd_evaluate(&cfg)?;
//! print!("{}", eeg_emotion::eval::render_table(&run.reports));
//! # Ok::<(), eeg_emotion::Error>(())
//! ```

pub mod cli;
pub mod dataset;
mod error;
pub mod eval;
pub mod features;
pub mod recording;
pub mod rng;
pub mod session;
pub mod spectral;
pub mod svm;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use features::{extract_features, FeatureFamily, FeatureVector};
pub use recording::{
    parse_recording, ClipId, EegRecording, Electrode, EmotionLabel, SamRating, SymmetricPair,
};

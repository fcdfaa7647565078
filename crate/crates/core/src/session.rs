//! Session manifests: TOML files listing recording paths with their metadata
//! and SAM ratings.
//!
//! ```toml
//! [[recording]]
//! path = "p01_cold_air.csv"
//! recording_id = "p01_cold_air"
//! participant_id = "p01"
//! clip_id = "cold_air"
//! sample_rate = 256.0
//! valence = 7
//! arousal = 6
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::{parse_recording_with, ClipId, EegRecording, RecordingMeta, SamRating};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub recording_id: String,
    pub participant_id: String,
    pub clip_id: ClipId,
    pub sample_rate: f64,
    pub valence: i64,
    pub arousal: i64,
}

impl ManifestEntry {
    pub fn meta(&self) -> RecordingMeta {
        RecordingMeta {
            recording_id: self.recording_id.clone(),
            participant_id: self.participant_id.clone(),
            clip_id: self.clip_id,
            sample_rate: self.sample_rate,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default, rename = "recording")]
    pub recordings: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    /// Range and uniqueness checks, done before touching any file.
    pub fn validate(&self) -> Result<Vec<SamRating>> {
        let mut seen = HashSet::new();
        self.recordings
            .iter()
            .map(|e| {
                if !seen.insert(e.recording_id.as_str()) {
                    return Err(Error::DuplicateRecording(e.recording_id.clone()));
                }
                SamRating::new(e.valence, e.arousal)
            })
            .collect()
    }
}

/// Loads every recording a manifest references, in manifest order.
pub fn load_session(
    manifest_text: &str,
    base_dir: &Path,
) -> Result<Vec<(EegRecording, SamRating)>> {
    let manifest = Manifest::parse(manifest_text)?;
    let ratings = manifest.validate()?;
    manifest
        .recordings
        .par_iter()
        .zip(ratings)
        .map(|(entry, rating)| {
            let path = base_dir.join(&entry.path);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let rec = parse_recording_with(&text, &entry.meta())
                .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
            Ok((rec, rating))
        })
        .collect()
}

pub fn load_session_file(manifest_path: &Path) -> Result<Vec<(EegRecording, SamRating)>> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    load_session(&text, base)
}

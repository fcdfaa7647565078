//! Deterministic synthetic sessions with controllable band-power asymmetry
//! and left/right band-power correlation per emotion class.
//!
//! Each channel is a sum over the five bands of amplitude-modulated sinusoid
//! mixtures, plus white noise. Within a symmetric pair, the right channel's
//! band amplitude is scaled so that right/left power matches the class
//! profile, and the two envelopes share a common slow component whose weight
//! sets the correlation of the windowed band powers.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::{
    write_recording, ClipId, EegRecording, EmotionLabel, RecordingMeta, SamRating, SymmetricPair,
    DEFAULT_SAMPLE_RATE,
};
use crate::rng::{derive_seed, seeded, Rng};
use crate::session::{Manifest, ManifestEntry};
use crate::spectral::FrequencyBand;

/// Target asymmetry for one class: `[pair][band]`, pairs in layout order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassProfile {
    /// Right/left band-power ratio.
    pub power_ratio: [[f64; 5]; 2],
    /// Target correlation of left and right windowed band powers.
    pub correlation: [[f64; 5]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassProfiles {
    pub happy: ClassProfile,
    pub relaxed: ClassProfile,
    pub sad: ClassProfile,
    pub angry: ClassProfile,
}

impl ClassProfiles {
    pub fn get(&self, label: EmotionLabel) -> &ClassProfile {
        match label {
            EmotionLabel::Happy => &self.happy,
            EmotionLabel::Relaxed => &self.relaxed,
            EmotionLabel::Sad => &self.sad,
            EmotionLabel::Angry => &self.angry,
        }
    }

    pub fn get_mut(&mut self, label: EmotionLabel) -> &mut ClassProfile {
        match label {
            EmotionLabel::Happy => &mut self.happy,
            EmotionLabel::Relaxed => &mut self.relaxed,
            EmotionLabel::Sad => &mut self.sad,
            EmotionLabel::Angry => &mut self.angry,
        }
    }
}

impl Default for ClassProfiles {
    fn default() -> Self {
        let p = |tp: [f64; 5], af: [f64; 5], rho: f64| ClassProfile {
            power_ratio: [tp, af],
            correlation: [[rho; 5]; 2],
        };
        ClassProfiles {
            happy: p([1.0, 1.0, 1.6, 1.3, 1.0], [1.0, 1.2, 2.5, 1.5, 1.0], 0.8),
            relaxed: p([1.0, 1.3, 2.0, 0.8, 1.0], [1.0, 1.0, 1.5, 0.7, 0.8], 0.4),
            sad: p([1.2, 1.0, 0.6, 0.9, 1.0], [1.3, 0.8, 0.5, 0.8, 1.0], 0.0),
            angry: p([1.0, 0.8, 0.8, 1.6, 1.5], [0.8, 1.0, 0.6, 2.2, 1.8], -0.4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClipSeconds {
    pub cold_air: f64,
    pub hot_air: f64,
}

impl Default for ClipSeconds {
    fn default() -> Self {
        ClipSeconds {
            cold_air: 58.0,
            hot_air: 21.0,
        }
    }
}

impl ClipSeconds {
    pub fn get(&self, clip: ClipId) -> f64 {
        match clip {
            ClipId::ColdAir => self.cold_air,
            ClipId::HotAir => self.hot_air,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub participants: usize,
    pub sample_rate: f64,
    pub clip_seconds: ClipSeconds,
    /// Left-hemisphere power per band, µV².
    pub band_power: [f64; 5],
    pub class_profiles: ClassProfiles,
    /// White-noise standard deviation relative to the clean channel RMS.
    pub noise_level: f64,
    /// Depth of the slow amplitude modulation that drives band-power
    /// fluctuations between analysis windows.
    pub modulation_depth: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            participants: 21,
            sample_rate: DEFAULT_SAMPLE_RATE,
            clip_seconds: ClipSeconds::default(),
            band_power: [20.0, 10.0, 12.0, 6.0, 2.0],
            class_profiles: ClassProfiles::default(),
            noise_level: 0.05,
            modulation_depth: 0.3,
            seed: 7,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InfeasibleProfile(msg));
        if self.participants == 0 {
            return bad("participants must be >= 1".into());
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return bad(format!("sample_rate {} must be positive", self.sample_rate));
        }
        for clip in ClipId::ALL {
            let secs = self.clip_seconds.get(clip);
            if !(secs > 2.0 && secs.is_finite()) {
                return bad(format!("{clip} duration {secs} s must exceed 2 s"));
            }
        }
        if self.band_power.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return bad("band powers must be positive".into());
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return bad(format!("noise_level {} must be >= 0", self.noise_level));
        }
        if !(0.0..1.0).contains(&self.modulation_depth) {
            return bad(format!(
                "modulation_depth {} outside [0, 1)",
                self.modulation_depth
            ));
        }
        for label in EmotionLabel::ALL {
            let prof = self.class_profiles.get(label);
            for (p, pair) in SymmetricPair::ALL.iter().enumerate() {
                for b in 0..5 {
                    let r = prof.power_ratio[p][b];
                    if !(r > 0.0 && r.is_finite()) {
                        return bad(format!(
                            "{label} {} band {b}: power ratio {r} requires non-positive power",
                            pair.name()
                        ));
                    }
                    let c = prof.correlation[p][b];
                    if !(-1.0..=1.0).contains(&c) {
                        return bad(format!(
                            "{label} {}: correlation {c} outside [-1, 1]",
                            pair.name()
                        ));
                    }
                }
            }
        }
        for band in FrequencyBand::standard(FrequencyBand::DEFAULT_GAMMA_HI) {
            if carrier_candidates(&band, self.sample_rate).is_empty() {
                return bad(format!(
                    "no carrier frequency for {} below Nyquist at {} Hz",
                    band.name, self.sample_rate
                ));
            }
        }
        Ok(())
    }

    /// Class of a participant-clip slot (round-robin over label order).
    pub fn class_of(participant: usize, clip: ClipId) -> EmotionLabel {
        let slot = 2 * participant + usize::from(clip == ClipId::HotAir);
        EmotionLabel::ALL[slot % 4]
    }
}

/// Integer-Hz carriers kept one bin clear of each band edge.
fn carrier_candidates(band: &FrequencyBand, sample_rate: f64) -> Vec<f64> {
    let lo = band.lo.ceil() as i64 + 1;
    let hi = band.hi.ceil() as i64 - 2;
    (lo..=hi)
        .map(|f| f as f64)
        .filter(|&f| f < sample_rate / 2.0 - 1.0)
        .collect()
}

const CARRIERS_PER_BAND: usize = 3;
const ENVELOPE_COMPONENTS: usize = 3;

/// Zero-mean, unit-variance slow process: a few sinusoids in 0.1..0.6 Hz.
struct SlowProcess {
    parts: Vec<(f64, f64)>,
}

impl SlowProcess {
    fn new(rng: &mut Rng) -> Self {
        let parts = (0..ENVELOPE_COMPONENTS)
            .map(|_| (rng.random_range(0.1..0.6), rng.random_range(0.0..2.0 * PI)))
            .collect();
        SlowProcess { parts }
    }

    fn at(&self, t: f64) -> f64 {
        let amp = (2.0 / ENVELOPE_COMPONENTS as f64).sqrt();
        self.parts
            .iter()
            .map(|(f, ph)| amp * (2.0 * PI * f * t + ph).sin())
            .sum()
    }
}

fn random_rating(label: EmotionLabel, rng: &mut Rng) -> SamRating {
    let mut side = |positive: bool| -> i64 {
        if positive {
            rng.random_range(6..=9)
        } else {
            rng.random_range(1..=4)
        }
    };
    let (v, a) = match label {
        EmotionLabel::Happy => (side(true), side(true)),
        EmotionLabel::Relaxed => (side(true), side(false)),
        EmotionLabel::Sad => (side(false), side(false)),
        EmotionLabel::Angry => (side(false), side(true)),
    };
    SamRating::new(v, a).expect("generated rating in range")
}

fn generate_one(spec: &SynthSpec, participant: usize, clip: ClipId) -> (EegRecording, SamRating) {
    let slot = 2 * participant + usize::from(clip == ClipId::HotAir);
    let mut rng = seeded(derive_seed(spec.seed, slot as u64));
    let label = SynthSpec::class_of(participant, clip);
    let profile = spec.class_profiles.get(label);
    let fs = spec.sample_rate;
    let n = (spec.clip_seconds.get(clip) * fs).round() as usize;
    let bands = FrequencyBand::standard(FrequencyBand::DEFAULT_GAMMA_HI);
    let depth = spec.modulation_depth;
    // removes the mean-square gain of the envelope
    let env_gain = (1.0 + depth * depth).sqrt();

    let mut channels: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
    for (p, pair) in SymmetricPair::ALL.iter().enumerate() {
        for (b, band) in bands.iter().enumerate() {
            let mut freqs = carrier_candidates(band, fs);
            freqs.shuffle(&mut rng);
            freqs.truncate(CARRIERS_PER_BAND);
            let rho: f64 = profile.correlation[p][b];
            let shared_w = rho.abs().sqrt();
            let own_w = (1.0 - rho.abs()).sqrt();
            let shared = SlowProcess::new(&mut rng);

            let left_power = spec.band_power[b];
            let right_power = left_power * profile.power_ratio[p][b];
            let sides = [
                (pair.left, left_power, 1.0),
                (pair.right, right_power, rho.signum()),
            ];
            for (electrode, power, shared_sign) in sides {
                let own = SlowProcess::new(&mut rng);
                let amp = (2.0 * power / freqs.len() as f64).sqrt() / env_gain;
                let phases: Vec<f64> = freqs
                    .iter()
                    .map(|_| rng.random_range(0.0..2.0 * PI))
                    .collect();
                let out = &mut channels[electrode.index()];
                for (i, v) in out.iter_mut().enumerate() {
                    let t = i as f64 / fs;
                    let env =
                        1.0 + depth * (shared_sign * shared_w * shared.at(t) + own_w * own.at(t));
                    let carrier: f64 = freqs
                        .iter()
                        .zip(&phases)
                        .map(|(f, ph)| (2.0 * PI * f * t + ph).sin())
                        .sum();
                    *v += amp * env * carrier;
                }
            }
        }
    }

    if spec.noise_level > 0.0 {
        for ch in channels.iter_mut() {
            let rms = (ch.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
            let sd = spec.noise_level * rms;
            for v in ch.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v += sd * z;
            }
        }
    }

    let rating = random_rating(label, &mut rng);
    let pid = format!("p{:02}", participant + 1);
    let meta = RecordingMeta {
        recording_id: format!("{pid}_{clip}"),
        participant_id: pid,
        clip_id: clip,
        sample_rate: fs,
    };
    let rec = EegRecording::new(meta, channels).expect("synthetic recording is valid");
    (rec, rating)
}

/// One recording per participant and clip, participant-major, cold clip first.
pub fn generate_session(spec: &SynthSpec) -> Result<Vec<(EegRecording, SamRating)>> {
    spec.validate()?;
    let slots: Vec<(usize, ClipId)> = (0..spec.participants)
        .flat_map(|p| ClipId::ALL.map(|c| (p, c)))
        .collect();
    Ok(slots
        .into_par_iter()
        .map(|(p, c)| generate_one(spec, p, c))
        .collect())
}

/// Manifest describing `session` with files named `<recording_id>.csv`.
pub fn session_manifest(session: &[(EegRecording, SamRating)]) -> Manifest {
    let recordings = session
        .iter()
        .map(|(rec, rating)| {
            let m = rec.meta();
            ManifestEntry {
                path: format!("{}.csv", m.recording_id).into(),
                recording_id: m.recording_id.clone(),
                participant_id: m.participant_id.clone(),
                clip_id: m.clip_id,
                sample_rate: m.sample_rate,
                valence: rating.valence().into(),
                arousal: rating.arousal().into(),
            }
        })
        .collect();
    Manifest { recordings }
}

/// Writes one `<recording_id>.csv` per recording into `dir`.
pub fn write_recordings(session: &[(EegRecording, SamRating)], dir: &Path) -> Result<()> {
    for (rec, _) in session {
        let path = dir.join(format!("{}.csv", rec.recording_id()));
        std::fs::write(&path, write_recording(rec)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Writes the recordings and `manifest.toml` into `dir`; returns the
/// manifest path.
pub fn write_session(session: &[(EegRecording, SamRating)], dir: &Path) -> Result<PathBuf> {
    write_recordings(session, dir)?;
    let path = dir.join("manifest.toml");
    std::fs::write(&path, session_manifest(session).to_toml()).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

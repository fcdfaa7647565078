//! Recording and rating types, plus the per-recording CSV format.
//!
//! A recording file is UTF-8 CSV with a `TP9,AF7,AF8,TP10` header and one
//! row per sample. Metadata either comes from a `# key: value` preamble
//! ahead of the header or from a sidecar (the session manifest):
//!
//! ```text
//! # recording_id: p01_cold_air
//! # participant_id: p01
//! # clip_id: cold_air
//! # sample_rate: 256
//! TP9,AF7,AF8,TP10
//! -3.25,1.5,0.75,2
//! ```
//!
//! Extra columns (timestamps, aux channels) are tolerated and ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default MUSE headband sample rate in samples/second.
pub const DEFAULT_SAMPLE_RATE: f64 = 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Electrode {
    TP9,
    AF7,
    AF8,
    TP10,
}

impl Electrode {
    /// Serialization (and column) order.
    pub const ALL: [Electrode; 4] = [
        Electrode::TP9,
        Electrode::AF7,
        Electrode::AF8,
        Electrode::TP10,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Electrode::TP9 => "TP9",
            Electrode::AF7 => "AF7",
            Electrode::AF8 => "AF8",
            Electrode::TP10 => "TP10",
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, Electrode::TP9 | Electrode::AF7)
    }

    /// The electrode at the mirrored position on the other hemisphere.
    pub fn partner(self) -> Electrode {
        match self {
            Electrode::TP9 => Electrode::TP10,
            Electrode::TP10 => Electrode::TP9,
            Electrode::AF7 => Electrode::AF8,
            Electrode::AF8 => Electrode::AF7,
        }
    }
}

impl fmt::Display for Electrode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A hemispherically symmetric electrode pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricPair {
    pub left: Electrode,
    pub right: Electrode,
}

impl SymmetricPair {
    /// Feature layout order: temporal pair first, then frontal.
    pub const ALL: [SymmetricPair; 2] = [
        SymmetricPair {
            left: Electrode::TP9,
            right: Electrode::TP10,
        },
        SymmetricPair {
            left: Electrode::AF7,
            right: Electrode::AF8,
        },
    ];

    pub fn name(&self) -> String {
        format!("{}_{}", self.left, self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipId {
    ColdAir,
    HotAir,
}

impl ClipId {
    pub const ALL: [ClipId; 2] = [ClipId::ColdAir, ClipId::HotAir];

    pub fn as_str(self) -> &'static str {
        match self {
            ClipId::ColdAir => "cold_air",
            ClipId::HotAir => "hot_air",
        }
    }
}

impl fmt::Display for ClipId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClipId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cold_air" => Ok(ClipId::ColdAir),
            "hot_air" => Ok(ClipId::HotAir),
            other => Err(Error::Metadata(format!(
                "unknown clip_id `{other}` (expected cold_air or hot_air)"
            ))),
        }
    }
}

/// The four valence/arousal quadrant emotions, in confusion-matrix index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmotionLabel {
    Happy,
    Relaxed,
    Sad,
    Angry,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 4] = [
        EmotionLabel::Happy,
        EmotionLabel::Relaxed,
        EmotionLabel::Sad,
        EmotionLabel::Angry,
    ];
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<EmotionLabel> {
        Self::ALL.get(i).copied()
    }

    pub fn one_hot(self) -> [f64; 4] {
        let mut v = [0.0; 4];
        v[self.index()] = 1.0;
        v
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EmotionLabel::Happy => "Happy",
            EmotionLabel::Relaxed => "Relaxed",
            EmotionLabel::Sad => "Sad",
            EmotionLabel::Angry => "Angry",
        };
        f.write_str(s)
    }
}

/// A 9-point self-assessment manikin rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSam", into = "RawSam")]
pub struct SamRating {
    valence: u8,
    arousal: u8,
}

#[derive(Serialize, Deserialize)]
struct RawSam {
    valence: i64,
    arousal: i64,
}

impl TryFrom<RawSam> for SamRating {
    type Error = Error;
    fn try_from(raw: RawSam) -> Result<Self> {
        SamRating::new(raw.valence, raw.arousal)
    }
}

impl From<SamRating> for RawSam {
    fn from(s: SamRating) -> Self {
        RawSam {
            valence: s.valence.into(),
            arousal: s.arousal.into(),
        }
    }
}

impl SamRating {
    pub const MIDPOINT: u8 = 5;

    pub fn new(valence: i64, arousal: i64) -> Result<Self> {
        let check = |field, v: i64| {
            if (1..=9).contains(&v) {
                Ok(v as u8)
            } else {
                Err(Error::SamOutOfRange { field, value: v })
            }
        };
        Ok(SamRating {
            valence: check("valence", valence)?,
            arousal: check("arousal", arousal)?,
        })
    }

    pub fn valence(&self) -> u8 {
        self.valence
    }

    pub fn arousal(&self) -> u8 {
        self.arousal
    }
}

/// Identity and acquisition settings of one recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub recording_id: String,
    pub participant_id: String,
    pub clip_id: ClipId,
    pub sample_rate: f64,
}

/// One participant-clip session: four equal-length channels in microvolts.
#[derive(Debug, Clone, PartialEq)]
pub struct EegRecording {
    meta: RecordingMeta,
    channels: [Vec<f64>; 4],
}

impl EegRecording {
    /// Builds a recording from channels in `Electrode::ALL` order.
    pub fn new(meta: RecordingMeta, channels: [Vec<f64>; 4]) -> Result<Self> {
        if !(meta.sample_rate.is_finite() && meta.sample_rate > 0.0) {
            return Err(Error::Metadata(format!(
                "sample_rate must be positive, got {}",
                meta.sample_rate
            )));
        }
        if meta.recording_id.is_empty() {
            return Err(Error::Metadata("recording_id is empty".into()));
        }
        let n = channels[0].len();
        for ch in &channels[1..] {
            if ch.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: ch.len(),
                });
            }
        }
        for (e, ch) in Electrode::ALL.iter().zip(&channels) {
            if let Some(i) = ch.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: i + 1,
                    column: e.to_string(),
                    value: ch[i].to_string(),
                });
            }
        }
        let required = min_samples(meta.sample_rate);
        if n < required {
            return Err(Error::TooShort { rows: n, required });
        }
        Ok(EegRecording { meta, channels })
    }

    pub fn meta(&self) -> &RecordingMeta {
        &self.meta
    }

    pub fn recording_id(&self) -> &str {
        &self.meta.recording_id
    }

    pub fn participant_id(&self) -> &str {
        &self.meta.participant_id
    }

    pub fn clip_id(&self) -> ClipId {
        self.meta.clip_id
    }

    pub fn sample_rate(&self) -> f64 {
        self.meta.sample_rate
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, e: Electrode) -> &[f64] {
        &self.channels[e.index()]
    }

    pub fn channels(&self) -> &[Vec<f64>; 4] {
        &self.channels
    }

    pub fn into_channels(self) -> [Vec<f64>; 4] {
        self.channels
    }

    pub fn sample(&self, row: usize, e: Electrode) -> f64 {
        self.channels[e.index()][row]
    }
}

fn min_samples(sample_rate: f64) -> usize {
    (2.0 * sample_rate).ceil() as usize
}

/// Parses a recording whose metadata lives in its `#` preamble.
pub fn parse_recording(csv_text: &str) -> Result<EegRecording> {
    parse_inner(csv_text, None)
}

/// Parses a recording with metadata supplied by a sidecar. Preamble keys, if
/// present, must agree with the sidecar.
pub fn parse_recording_with(csv_text: &str, meta: &RecordingMeta) -> Result<EegRecording> {
    parse_inner(csv_text, Some(meta))
}

fn parse_inner(csv_text: &str, sidecar: Option<&RecordingMeta>) -> Result<EegRecording> {
    let text = csv_text.strip_prefix('\u{feff}').unwrap_or(csv_text);
    let (preamble, body) = split_preamble(text);
    let meta = resolve_meta(&preamble, sidecar)?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| Error::Metadata(format!("unreadable header: {e}")))?
        .clone();
    let mut cols = [0usize; 4];
    for e in Electrode::ALL {
        cols[e.index()] = header
            .iter()
            .position(|h| h == e.name())
            .ok_or(Error::MissingColumn(e))?;
    }

    let mut channels: [Vec<f64>; 4] = Default::default();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Metadata(format!("row {row}: {e}")))?;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        for e in Electrode::ALL {
            let cell = &record[cols[e.index()]];
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                row,
                column: e.to_string(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row,
                    column: e.to_string(),
                    value: cell.to_string(),
                });
            }
            channels[e.index()].push(v);
        }
    }
    EegRecording::new(meta, channels)
}

fn split_preamble(text: &str) -> (Vec<(String, String)>, &str) {
    let mut pairs = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            let Some(comment) = trimmed.strip_prefix('#') else {
                break;
            };
            if let Some((k, v)) = comment.split_once(':') {
                pairs.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        offset += line.len();
    }
    (pairs, &text[offset..])
}

fn resolve_meta(
    preamble: &[(String, String)],
    sidecar: Option<&RecordingMeta>,
) -> Result<RecordingMeta> {
    let get = |key: &str| {
        preamble
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let parse_rate = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Metadata(format!("sample_rate `{s}` is not a number")))
    };

    match sidecar {
        Some(meta) => {
            let conflict = |key: &str, found: &str, expected: &str| {
                Error::Metadata(format!(
                    "preamble {key} `{found}` conflicts with sidecar value `{expected}`"
                ))
            };
            if let Some(v) = get("recording_id") {
                if v != meta.recording_id {
                    return Err(conflict("recording_id", v, &meta.recording_id));
                }
            }
            if let Some(v) = get("participant_id") {
                if v != meta.participant_id {
                    return Err(conflict("participant_id", v, &meta.participant_id));
                }
            }
            if let Some(v) = get("clip_id") {
                if v.parse::<ClipId>()? != meta.clip_id {
                    return Err(conflict("clip_id", v, meta.clip_id.as_str()));
                }
            }
            if let Some(v) = get("sample_rate") {
                if parse_rate(v)? != meta.sample_rate {
                    return Err(conflict("sample_rate", v, &meta.sample_rate.to_string()));
                }
            }
            Ok(meta.clone())
        }
        None => {
            let required = |key: &str| {
                get(key).ok_or_else(|| Error::Metadata(format!("missing `{key}` in preamble")))
            };
            Ok(RecordingMeta {
                recording_id: required("recording_id")?.to_string(),
                participant_id: required("participant_id")?.to_string(),
                clip_id: required("clip_id")?.parse()?,
                sample_rate: parse_rate(required("sample_rate")?)?,
            })
        }
    }
}

/// Serializes a recording (preamble + CSV). Values use the shortest
/// representation that parses back to the identical `f64`.
pub fn write_recording(rec: &EegRecording) -> String {
    use std::fmt::Write;

    let m = rec.meta();
    let mut out = String::with_capacity(rec.len() * 48 + 128);
    let _ = writeln!(out, "# recording_id: {}", m.recording_id);
    let _ = writeln!(out, "# participant_id: {}", m.participant_id);
    let _ = writeln!(out, "# clip_id: {}", m.clip_id);
    let _ = writeln!(out, "# sample_rate: {}", m.sample_rate);
    out.push_str("TP9,AF7,AF8,TP10\n");
    for i in 0..rec.len() {
        let c = rec.channels();
        let _ = writeln!(out, "{},{},{},{}", c[0][i], c[1][i], c[2][i], c[3][i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(rate: f64) -> RecordingMeta {
        RecordingMeta {
            recording_id: "r1".into(),
            participant_id: "p1".into(),
            clip_id: ClipId::ColdAir,
            sample_rate: rate,
        }
    }

    fn csv_rows(n: usize) -> String {
        let mut s = String::from(
            "# recording_id: r1\n# participant_id: p1\n# clip_id: cold_air\n# sample_rate: 256\nTP9,AF7,AF8,TP10\n",
        );
        for i in 0..n {
            s.push_str(&format!(
                "{},{},{},{}\n",
                i,
                -(i as f64),
                0.5,
                1e-3 * i as f64
            ));
        }
        s
    }

    #[test]
    fn parses_minimal_file() {
        let rec = parse_recording(&csv_rows(512)).unwrap();
        assert_eq!(rec.len(), 512);
        assert_eq!(rec.sample_rate(), 256.0);
        assert_eq!(rec.clip_id(), ClipId::ColdAir);
        assert_eq!(rec.sample(7, Electrode::TP9), 7.0);
        assert_eq!(rec.sample(7, Electrode::AF7), -7.0);
    }

    #[test]
    fn missing_column_is_named() {
        let text = csv_rows(512).replace("TP9,AF7,AF8,TP10", "TP9,AF7,XX,TP10");
        let err = parse_recording(&text).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(Electrode::AF8)));
        assert!(err.to_string().contains("AF8"));
    }

    #[test]
    fn nan_reports_row_and_column() {
        let mut text = String::from("TP9,AF7,AF8,TP10\n");
        for i in 1..=512 {
            if i == 7 {
                text.push_str("NaN,0,0,0\n");
            } else {
                text.push_str("1,0,0,0\n");
            }
        }
        let err = parse_recording_with(&text, &meta(256.0)).unwrap_err();
        match &err {
            Error::NonFinite { row, column, .. } => {
                assert_eq!(*row, 7);
                assert_eq!(column, "TP9");
            }
            other => panic!("unexpected {other:?}"),
        }
        let msg = err.to_string();
        assert!(msg.contains("row 7") && msg.contains("TP9"), "{msg}");
    }

    #[test]
    fn non_numeric_cell() {
        let text = csv_rows(512).replacen("0.5", "abc", 1);
        let err = parse_recording(&text).unwrap_err();
        assert!(matches!(err, Error::NonNumeric { row: 1, .. }), "{err:?}");
    }

    #[test]
    fn short_recording_rejected() {
        let err = parse_recording(&csv_rows(511)).unwrap_err();
        assert!(matches!(
            err,
            Error::TooShort {
                rows: 511,
                required: 512
            }
        ));
    }

    #[test]
    fn extra_columns_are_ignored() {
        let mut text = String::from("timestamp,TP10,AF8,AF7,TP9\n");
        for i in 0..8 {
            text.push_str(&format!("{},{},{},{},{}\n", i * 4, 4, 3, 2, 1));
        }
        let rec = parse_recording_with(&text, &meta(4.0)).unwrap();
        assert_eq!(rec.channel(Electrode::TP9), &[1.0; 8]);
        assert_eq!(rec.channel(Electrode::TP10), &[4.0; 8]);
    }

    #[test]
    fn sidecar_conflict_detected() {
        let mut m = meta(256.0);
        m.recording_id = "other".into();
        assert!(matches!(
            parse_recording_with(&csv_rows(512), &m),
            Err(Error::Metadata(_))
        ));
    }

    #[test]
    fn missing_preamble_without_sidecar() {
        let text = "TP9,AF7,AF8,TP10\n1,2,3,4\n";
        assert!(matches!(parse_recording(text), Err(Error::Metadata(_))));
    }

    #[test]
    fn sam_bounds() {
        assert!(SamRating::new(1, 9).is_ok());
        assert!(matches!(
            SamRating::new(0, 5),
            Err(Error::SamOutOfRange {
                field: "valence",
                value: 0
            })
        ));
        assert!(SamRating::new(5, 10).is_err());
    }

    #[test]
    fn electrode_pairs() {
        for p in SymmetricPair::ALL {
            assert!(p.left.is_left());
            assert!(!p.right.is_left());
            assert_eq!(p.left.partner(), p.right);
        }
    }
}

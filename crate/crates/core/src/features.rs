//! Hemispheric asymmetry and band-correlation features.
//!
//! Every family yields 10 values laid out pair-major, band-minor: the
//! (TP9, TP10) pair first, then (AF7, AF8), each over delta..gamma. The full
//! vector is `[rasm | dasm | corr]`, 30 values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::{EegRecording, EmotionLabel, SymmetricPair};
use crate::spectral::{
    band_power_matrix, band_power_series, BandName, BandPowerMatrix, BandPowerSeries,
    SpectralSettings,
};

pub const FAMILY_LEN: usize = 10;
pub const FEATURE_LEN: usize = 3 * FAMILY_LEN;

/// Denominator floor for power ratios, µV².
pub const RASM_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    #[serde(with = "serde_array30")]
    values: [f64; FEATURE_LEN],
}

impl FeatureVector {
    pub fn from_parts(
        rasm: [f64; FAMILY_LEN],
        dasm: [f64; FAMILY_LEN],
        corr: [f64; FAMILY_LEN],
    ) -> Result<Self> {
        let mut values = [0.0; FEATURE_LEN];
        values[..10].copy_from_slice(&rasm);
        values[10..20].copy_from_slice(&dasm);
        values[20..].copy_from_slice(&corr);
        Self::from_array(values)
    }

    pub fn from_array(values: [f64; FEATURE_LEN]) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "feature {i} is not finite"
            )));
        }
        if values[..10].iter().any(|&r| r <= 0.0) {
            return Err(Error::InvalidParameter(
                "RASM values must be positive".into(),
            ));
        }
        if values[20..].iter().any(|c| !(-1.0..=1.0).contains(c)) {
            return Err(Error::InvalidParameter(
                "correlations must lie in [-1, 1]".into(),
            ));
        }
        Ok(FeatureVector { values })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn rasm(&self) -> &[f64] {
        &self.values[..10]
    }

    pub fn dasm(&self) -> &[f64] {
        &self.values[10..20]
    }

    pub fn corr(&self) -> &[f64] {
        &self.values[20..]
    }

    pub fn select(&self, family: FeatureFamily) -> &[f64] {
        match family {
            FeatureFamily::Rasm => self.rasm(),
            FeatureFamily::Dasm => self.dasm(),
            FeatureFamily::Corr => self.corr(),
            FeatureFamily::All => &self.values,
        }
    }
}

mod serde_array30 {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64; 30], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 30], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| D::Error::invalid_length(v.len(), &"30 features"))
    }
}

/// Which feature columns a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureFamily {
    Rasm,
    Dasm,
    Corr,
    All,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 4] = [
        FeatureFamily::Rasm,
        FeatureFamily::Dasm,
        FeatureFamily::Corr,
        FeatureFamily::All,
    ];

    pub fn len(self) -> usize {
        match self {
            FeatureFamily::All => FEATURE_LEN,
            _ => FAMILY_LEN,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Row label used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            FeatureFamily::Rasm => "RASM",
            FeatureFamily::Dasm => "DASM",
            FeatureFamily::Corr => "Correlation",
            FeatureFamily::All => "All",
        }
    }

    pub fn column_names(self) -> Vec<String> {
        let names = feature_names();
        match self {
            FeatureFamily::Rasm => names[..10].to_vec(),
            FeatureFamily::Dasm => names[10..20].to_vec(),
            FeatureFamily::Corr => names[20..].to_vec(),
            FeatureFamily::All => names,
        }
    }
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureFamily::Rasm => "rasm",
            FeatureFamily::Dasm => "dasm",
            FeatureFamily::Corr => "corr",
            FeatureFamily::All => "all",
        })
    }
}

impl FromStr for FeatureFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rasm" => Ok(FeatureFamily::Rasm),
            "dasm" => Ok(FeatureFamily::Dasm),
            "corr" => Ok(FeatureFamily::Corr),
            "all" => Ok(FeatureFamily::All),
            other => Err(Error::Config(format!("unknown feature family `{other}`"))),
        }
    }
}

/// Column names in layout order, e.g. `rasm_TP9_TP10_alpha`.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(FEATURE_LEN);
    for family in ["rasm", "dasm", "corr"] {
        for pair in SymmetricPair::ALL {
            for band in BandName::ALL {
                names.push(format!("{family}_{}_{band}", pair.name()));
            }
        }
    }
    names
}

fn per_pair_band(mut f: impl FnMut(SymmetricPair, BandName) -> f64) -> [f64; FAMILY_LEN] {
    let mut out = [0.0; FAMILY_LEN];
    for (p, pair) in SymmetricPair::ALL.into_iter().enumerate() {
        for band in BandName::ALL {
            out[p * 5 + band.index()] = f(pair, band);
        }
    }
    out
}

/// Right/left power ratio per pair and band. Both operands are floored at
/// [`RASM_EPSILON`], which keeps the ratio positive and finite on dead channels.
pub fn rasm(bp: &BandPowerMatrix) -> [f64; FAMILY_LEN] {
    per_pair_band(|pair, band| {
        bp.get(pair.right, band).max(RASM_EPSILON) / bp.get(pair.left, band).max(RASM_EPSILON)
    })
}

/// Right minus left power per pair and band.
pub fn dasm(bp: &BandPowerMatrix) -> [f64; FAMILY_LEN] {
    per_pair_band(|pair, band| bp.get(pair.right, band) - bp.get(pair.left, band))
}

/// Pearson correlation coefficient. Returns 0 when either input has zero
/// variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs at least 2 samples, got {}",
            a.len()
        )));
    }
    // shifted means, so a constant series has exactly zero deviation
    let n = a.len() as f64;
    let mean_a = a[0] + a.iter().map(|x| x - a[0]).sum::<f64>() / n;
    let mean_b = b[0] + b.iter().map(|y| y - b[0]).sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(0.0);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Left/right correlation of the windowed band-power series, per pair and band.
pub fn band_correlation(series: &BandPowerSeries) -> Result<[f64; FAMILY_LEN]> {
    let mut out = [0.0; FAMILY_LEN];
    for (p, pair) in SymmetricPair::ALL.into_iter().enumerate() {
        for band in BandName::ALL {
            out[p * 5 + band.index()] =
                pearson(series.get(pair.left, band), series.get(pair.right, band))?;
        }
    }
    Ok(out)
}

pub fn extract_features(rec: &EegRecording, cfg: &SpectralSettings) -> Result<FeatureVector> {
    let bp = band_power_matrix(rec, cfg)?;
    let series = band_power_series(rec, cfg)?;
    FeatureVector::from_parts(rasm(&bp), dasm(&bp), band_correlation(&series)?)
}

/// One row of the exported feature table.
#[derive(Debug, Clone)]
pub struct FeatureRow<'a> {
    pub recording_id: &'a str,
    pub features: &'a FeatureVector,
    pub label: Option<EmotionLabel>,
}

/// Flat CSV: `recording_id`, the selected feature columns, `label`. Columns of
/// several families are emitted in layout order without duplicates.
pub fn write_feature_table(rows: &[FeatureRow<'_>], families: &[FeatureFamily]) -> Result<String> {
    let mut slots: Vec<usize> = families
        .iter()
        .flat_map(|f| match f {
            FeatureFamily::Rasm => 0..10,
            FeatureFamily::Dasm => 10..20,
            FeatureFamily::Corr => 20..30,
            FeatureFamily::All => 0..30,
        })
        .collect();
    slots.sort_unstable();
    slots.dedup();
    if slots.is_empty() {
        return Err(Error::Config("feature selector is empty".into()));
    }

    let names = feature_names();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["recording_id".to_string()];
    header.extend(slots.iter().map(|&i| names[i].clone()));
    header.push("label".into());
    let to_err = |e: csv::Error| Error::InvalidParameter(format!("feature table: {e}"));
    w.write_record(&header).map_err(to_err)?;
    for row in rows {
        let mut rec = vec![row.recording_id.to_string()];
        rec.extend(
            slots
                .iter()
                .map(|&i| row.features.as_slice()[i].to_string()),
        );
        rec.push(row.label.map(|l| l.to_string()).unwrap_or_default());
        w.write_record(&rec).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recording::{ClipId, Electrode, RecordingMeta};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn matrix(f: impl Fn(usize, usize) -> f64) -> BandPowerMatrix {
        BandPowerMatrix::new(std::array::from_fn(|e| std::array::from_fn(|b| f(e, b)))).unwrap()
    }

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn rec(channels: [Vec<f64>; 4]) -> EegRecording {
        let meta = RecordingMeta {
            recording_id: "r".into(),
            participant_id: "p".into(),
            clip_id: ClipId::HotAir,
            sample_rate: 256.0,
        };
        EegRecording::new(meta, channels).unwrap()
    }

    #[test]
    fn symmetric_powers() {
        let m = matrix(|_, b| 1.0 + b as f64);
        assert_eq!(rasm(&m), [1.0; 10]);
        assert_eq!(dasm(&m), [0.0; 10]);
    }

    #[test]
    fn single_slot_arithmetic() {
        // (AF7, AF8) alpha: right = AF8 = 2, left = AF7 = 4
        let m = matrix(|e, b| {
            if b == BandName::Alpha.index() && e == Electrode::AF8.index() {
                2.0
            } else if b == BandName::Alpha.index() && e == Electrode::AF7.index() {
                4.0
            } else {
                1.0
            }
        });
        let slot = 5 + BandName::Alpha.index();
        assert_eq!(rasm(&m)[slot], 0.5);
        assert_eq!(dasm(&m)[slot], -2.0);
        assert_eq!(rasm(&m).iter().filter(|&&v| v == 1.0).count(), 9);
    }

    #[test]
    fn zero_denominator_is_finite() {
        let m = matrix(|e, _| {
            if e == Electrode::TP9.index() {
                0.0
            } else {
                1.0
            }
        });
        let r = rasm(&m);
        assert!(r[..5].iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn pearson_cases() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(
            pearson(&[1.0, -1.0, 1.0, -1.0], &[-1.0, 1.0, -1.0, 1.0]).unwrap(),
            -1.0
        );
        assert_eq!(pearson(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn pearson_long_hand() {
        // a = (1,2,3,4), mean 2.5; b = (1,2,4,8), mean 3.75
        // da = (-1.5,-0.5,0.5,1.5); db = (-2.75,-1.75,0.25,4.25)
        // sab = 4.125 + 0.875 + 0.125 + 6.375 = 11.5
        // saa = 5; sbb = 7.5625 + 3.0625 + 0.0625 + 18.0625 = 28.75
        let expected = 11.5 / (5.0f64 * 28.75).sqrt();
        let got = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn names_follow_layout() {
        let n = feature_names();
        assert_eq!(n.len(), 30);
        assert_eq!(n[0], "rasm_TP9_TP10_delta");
        assert_eq!(n[7], "rasm_AF7_AF8_alpha");
        assert_eq!(n[29], "corr_AF7_AF8_gamma");
    }

    #[test]
    fn full_symmetry_recording() {
        let x = noise(21 * 256, 1);
        let fv = extract_features(
            &rec([x.clone(), x.clone(), x.clone(), x]),
            &Default::default(),
        )
        .unwrap();
        assert_eq!(fv.as_slice().len(), 30);
        assert!(fv.rasm().iter().all(|&v| v == 1.0));
        assert!(fv.dasm().iter().all(|&v| v == 0.0));
        assert!(fv.corr().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn constant_channels_give_zero_correlation() {
        let a = vec![2.0; 4 * 256];
        let b = vec![-1.0; 4 * 256];
        let series =
            band_power_series(&rec([a.clone(), b.clone(), b, a]), &Default::default()).unwrap();
        assert_eq!(band_correlation(&series).unwrap(), [0.0; 10]);
    }

    #[test]
    fn independent_noise_weakly_correlated() {
        // 100.5 s at 0.5 s hop: 200 windows
        let n = 256 * 201 / 2;
        let chans: [Vec<f64>; 4] = std::array::from_fn(|c| noise(n, 100 + c as u64));
        let series = band_power_series(&rec(chans), &Default::default()).unwrap();
        assert_eq!(series.window_count(), 200);
        for c in band_correlation(&series).unwrap() {
            assert!(c.abs() < 0.3, "{c}");
        }
    }

    #[test]
    fn extraction_is_deterministic() {
        let chans: [Vec<f64>; 4] = std::array::from_fn(|c| noise(3000, c as u64));
        let r = rec(chans);
        let a = extract_features(&r, &Default::default()).unwrap();
        let b = extract_features(&r, &Default::default()).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert!(a.rasm().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn feature_table_columns() {
        let chans: [Vec<f64>; 4] = std::array::from_fn(|c| noise(1024, c as u64));
        let fv = extract_features(&rec(chans), &Default::default()).unwrap();
        let rows = [FeatureRow {
            recording_id: "r",
            features: &fv,
            label: Some(EmotionLabel::Sad),
        }];
        let t = write_feature_table(&rows, &[FeatureFamily::Rasm]).unwrap();
        let header = t.lines().next().unwrap();
        assert_eq!(header.split(',').count(), 12);
        assert!(t.lines().nth(1).unwrap().ends_with(",Sad"));
        let t = write_feature_table(&rows, &[FeatureFamily::All, FeatureFamily::Dasm]).unwrap();
        assert_eq!(t.lines().next().unwrap().split(',').count(), 32);
    }

    proptest! {
        #[test]
        fn rasm_scale_invariant(k in 0.1f64..100.0, seed in 0u64..1000) {
            let chans: [Vec<f64>; 4] = std::array::from_fn(|c| noise(1024, seed * 4 + c as u64));
            let scaled = chans.clone().map(|c| c.into_iter().map(|v| k * v).collect());
            let cfg = SpectralSettings::default();
            let a = rasm(&band_power_matrix(&rec(chans), &cfg).unwrap());
            let b = rasm(&band_power_matrix(&rec(scaled), &cfg).unwrap());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-6 * x.abs());
            }
        }

        #[test]
        fn channel_swap_antisymmetry(seed in 0u64..1000) {
            let [tp9, af7, af8, tp10]: [Vec<f64>; 4] =
                std::array::from_fn(|c| noise(4 * 256, seed * 4 + c as u64));
            let cfg = SpectralSettings::default();
            let a = extract_features(&rec([tp9.clone(), af7.clone(), af8.clone(), tp10.clone()]), &cfg).unwrap();
            let b = extract_features(&rec([tp10, af8, af7, tp9]), &cfg).unwrap();
            for i in 0..10 {
                prop_assert!((a.rasm()[i] * b.rasm()[i] - 1.0).abs() < 1e-9);
                prop_assert_eq!(a.dasm()[i], -b.dasm()[i]);
                prop_assert!((a.corr()[i] - b.corr()[i]).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&a.corr()[i]));
                prop_assert!(a.rasm()[i] > 0.0);
            }
        }
    }
}

//! Welch power spectral density and EEG band powers.

use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recording::{EegRecording, Electrode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BandName {
    Delta,
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl BandName {
    pub const ALL: [BandName; 5] = [
        BandName::Delta,
        BandName::Theta,
        BandName::Alpha,
        BandName::Beta,
        BandName::Gamma,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BandName::Delta => "delta",
            BandName::Theta => "theta",
            BandName::Alpha => "alpha",
            BandName::Beta => "beta",
            BandName::Gamma => "gamma",
        }
    }
}

impl fmt::Display for BandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named frequency range `[lo, hi)` in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand {
    pub name: BandName,
    pub lo: f64,
    pub hi: f64,
}

impl FrequencyBand {
    pub const DEFAULT_GAMMA_HI: f64 = 44.0;

    /// The five canonical bands. Theta is closed up to 8 Hz so the bands
    /// tile 1 Hz..`gamma_hi` without gaps.
    pub fn standard(gamma_hi: f64) -> [FrequencyBand; 5] {
        let b = |name, lo, hi| FrequencyBand { name, lo, hi };
        [
            b(BandName::Delta, 1.0, 4.0),
            b(BandName::Theta, 4.0, 8.0),
            b(BandName::Alpha, 8.0, 13.0),
            b(BandName::Beta, 13.0, 30.0),
            b(BandName::Gamma, 30.0, gamma_hi),
        ]
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Analysis parameters shared by the whole-recording and windowed band powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSettings {
    /// Welch segment length in samples; a power of two.
    pub segment_length: usize,
    pub overlap_fraction: f64,
    /// Correlation window length and stride, in seconds.
    pub window_seconds: f64,
    pub hop_seconds: f64,
    pub gamma_hi: f64,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        SpectralSettings {
            segment_length: 256,
            overlap_fraction: 0.5,
            window_seconds: 1.0,
            hop_seconds: 0.5,
            gamma_hi: FrequencyBand::DEFAULT_GAMMA_HI,
        }
    }
}

impl SpectralSettings {
    pub fn bands(&self) -> [FrequencyBand; 5] {
        FrequencyBand::standard(self.gamma_hi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segment_length < 2 || !self.segment_length.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "segment_length {} is not a power of two >= 2",
                self.segment_length
            )));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidParameter(format!(
                "overlap_fraction {} outside [0, 1)",
                self.overlap_fraction
            )));
        }
        if !(self.window_seconds > 0.0 && self.hop_seconds > 0.0) {
            return Err(Error::InvalidParameter(
                "window_seconds and hop_seconds must be positive".into(),
            ));
        }
        if !(self.gamma_hi > 30.0 && self.gamma_hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_hi {} must exceed 30 Hz",
                self.gamma_hi
            )));
        }
        Ok(())
    }
}

/// One-sided power spectral density, µV²/Hz on a uniform grid from 0 Hz to Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    pub frequencies: Vec<f64>,
    pub power_density: Vec<f64>,
}

impl PsdEstimate {
    pub fn resolution(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }

    pub fn nyquist(&self) -> f64 {
        *self.frequencies.last().expect("non-empty psd")
    }

    /// Trapezoidal integral over the whole grid.
    pub fn total_power(&self) -> f64 {
        integrate_linear(self, 0.0, self.nyquist())
    }

    pub fn peak_frequency(&self) -> f64 {
        let (i, _) =
            self.power_density
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &p)| {
                    if p > best.1 {
                        (i, p)
                    } else {
                        best
                    }
                });
        self.frequencies[i]
    }
}

/// Averaged Hann-windowed periodogram (Welch), density-scaled and one-sided.
/// No detrending is applied, so a DC offset shows up at 0 Hz.
pub fn welch_psd(
    signal: &[f64],
    sample_rate: f64,
    segment_length: usize,
    overlap_fraction: f64,
) -> Result<PsdEstimate> {
    if segment_length < 2 || !segment_length.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "segment_length {segment_length} is not a power of two >= 2"
        )));
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::InvalidParameter(format!(
            "overlap_fraction {overlap_fraction} outside [0, 1)"
        )));
    }
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sample_rate {sample_rate} must be positive"
        )));
    }
    if signal.len() < segment_length {
        return Err(Error::SignalTooShort {
            len: signal.len(),
            needed: segment_length,
        });
    }
    if let Some(index) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample { index });
    }

    let n = segment_length;
    let overlap = (n as f64 * overlap_fraction).floor() as usize;
    let step = (n - overlap).max(1);
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect();
    let window_energy: f64 = window.iter().map(|w| w * w).sum();

    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let bins = n / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut segments = 0usize;
    let mut start = 0;
    while start + n <= signal.len() {
        for ((b, &x), &w) in buf.iter_mut().zip(&signal[start..start + n]).zip(&window) {
            *b = Complex::new(x * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, c) in acc.iter_mut().zip(&buf[..bins]) {
            *a += c.norm_sqr();
        }
        segments += 1;
        start += step;
    }

    let scale = 1.0 / (sample_rate * window_energy * segments as f64);
    let power_density: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            // fold negative frequencies onto their positive twins
            let one_sided = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    let df = sample_rate / n as f64;
    let frequencies = (0..bins).map(|k| k as f64 * df).collect();
    Ok(PsdEstimate {
        frequencies,
        power_density,
    })
}

/// Integral of the piecewise-linear PSD interpolant over `[lo, hi]`.
fn integrate_linear(psd: &PsdEstimate, lo: f64, hi: f64) -> f64 {
    let f = &psd.frequencies;
    let p = &psd.power_density;
    let mut total = 0.0;
    for i in 0..f.len() - 1 {
        let (f0, f1) = (f[i], f[i + 1]);
        let a = f0.max(lo);
        let b = f1.min(hi);
        if b <= a {
            continue;
        }
        let slope = (p[i + 1] - p[i]) / (f1 - f0);
        let pa = p[i] + slope * (a - f0);
        let pb = p[i] + slope * (b - f0);
        total += 0.5 * (pa + pb) * (b - a);
    }
    total
}

/// Power in µV² inside `band`, by trapezoidal integration of the density.
pub fn band_power(psd: &PsdEstimate, band: &FrequencyBand) -> Result<f64> {
    let nyquist = psd.nyquist();
    if band.hi > nyquist * (1.0 + 1e-12) || band.lo < 0.0 || band.lo >= band.hi {
        return Err(Error::BandAboveNyquist {
            lo: band.lo,
            hi: band.hi,
            nyquist,
        });
    }
    Ok(integrate_linear(psd, band.lo, band.hi).max(0.0))
}

fn five_band_powers(psd: &PsdEstimate, bands: &[FrequencyBand; 5]) -> Result<[f64; 5]> {
    let mut out = [0.0; 5];
    for (o, b) in out.iter_mut().zip(bands) {
        *o = band_power(psd, b)?;
    }
    Ok(out)
}

/// Mean band power per electrode (rows) and band (columns), µV².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPowerMatrix {
    pub values: [[f64; 5]; 4],
}

impl BandPowerMatrix {
    pub fn new(values: [[f64; 5]; 4]) -> Result<Self> {
        if values
            .iter()
            .flatten()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::InvalidParameter(
                "band powers must be finite and non-negative".into(),
            ));
        }
        Ok(BandPowerMatrix { values })
    }

    pub fn get(&self, e: Electrode, band: BandName) -> f64 {
        self.values[e.index()][band.index()]
    }

    pub fn row(&self, e: Electrode) -> &[f64; 5] {
        &self.values[e.index()]
    }
}

pub fn band_power_matrix(rec: &EegRecording, cfg: &SpectralSettings) -> Result<BandPowerMatrix> {
    cfg.validate()?;
    let bands = cfg.bands();
    let mut values = [[0.0; 5]; 4];
    for e in Electrode::ALL {
        let psd = welch_psd(
            rec.channel(e),
            rec.sample_rate(),
            cfg.segment_length,
            cfg.overlap_fraction,
        )?;
        values[e.index()] = five_band_powers(&psd, &bands)?;
    }
    Ok(BandPowerMatrix { values })
}

/// Windowed band powers: `series[electrode][band][window]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandPowerSeries {
    pub series: [[Vec<f64>; 5]; 4],
}

impl BandPowerSeries {
    pub fn get(&self, e: Electrode, band: BandName) -> &[f64] {
        &self.series[e.index()][band.index()]
    }

    pub fn window_count(&self) -> usize {
        self.series[0][0].len()
    }
}

fn window_geometry(sample_rate: f64, window_seconds: f64, hop_seconds: f64) -> (usize, usize) {
    let win = (window_seconds * sample_rate).round() as usize;
    let hop = ((hop_seconds * sample_rate).round() as usize).max(1);
    (win, hop)
}

/// Number of analysis windows that fit in `n` samples.
pub fn window_count(n: usize, sample_rate: f64, window_seconds: f64, hop_seconds: f64) -> usize {
    let (win, hop) = window_geometry(sample_rate, window_seconds, hop_seconds);
    if win == 0 || n < win {
        0
    } else {
        (n - win) / hop + 1
    }
}

pub fn band_power_series(rec: &EegRecording, cfg: &SpectralSettings) -> Result<BandPowerSeries> {
    cfg.validate()?;
    let fs = rec.sample_rate();
    let (win, hop) = window_geometry(fs, cfg.window_seconds, cfg.hop_seconds);
    let count = window_count(rec.len(), fs, cfg.window_seconds, cfg.hop_seconds);
    if win < 2 || count < 2 {
        return Err(Error::InvalidParameter(format!(
            "recording of {} samples too short for two {}-sample windows",
            rec.len(),
            win
        )));
    }
    // largest power of two that fits inside a window
    let seg = cfg
        .segment_length
        .min(1 << (usize::BITS - 1 - win.leading_zeros()));
    let bands = cfg.bands();

    let mut series: [[Vec<f64>; 5]; 4] = Default::default();
    for e in Electrode::ALL {
        let ch = rec.channel(e);
        for s in series[e.index()].iter_mut() {
            s.reserve(count);
        }
        for w in 0..count {
            let start = w * hop;
            let psd = welch_psd(&ch[start..start + win], fs, seg, cfg.overlap_fraction)?;
            let bp = five_band_powers(&psd, &bands)?;
            for (s, v) in series[e.index()].iter_mut().zip(bp) {
                s.push(v);
            }
        }
    }
    Ok(BandPowerSeries { series })
}

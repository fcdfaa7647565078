//! Welch power spectrum and five-band power matrix of a synthetic recording.

use std::f64::consts::PI;

use eeg_emotion::recording::{ClipId, RecordingMeta};
use eeg_emotion::spectral::{band_power_matrix, welch_psd, BandName, SpectralSettings};
use eeg_emotion::{EegRecording, Electrode};

pub fn run_example() -> eeg_emotion::Result<String> {
    let fs = 256.0;
    let n = 8 * 256;
    let tone = |f: f64, amp: f64| -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * PI * f * i as f64 / fs).sin())
            .collect()
    };
    let psd = welch_psd(&tone(10.0, 1.0), fs, 256, 0.5)?;
    let mut out = format!(
        "10 Hz tone: peak {:.1} Hz, total power {:.3} uV^2\n",
        psd.peak_frequency(),
        psd.total_power()
    );

    // alpha-dominant left channels, beta-dominant right channels
    let left = tone(10.0, 4.0);
    let right = tone(20.0, 2.0);
    let meta = RecordingMeta {
        recording_id: "demo".into(),
        participant_id: "p00".into(),
        clip_id: ClipId::ColdAir,
        sample_rate: fs,
    };
    let rec = EegRecording::new(meta, [left.clone(), left, right.clone(), right])?;
    let bp = band_power_matrix(&rec, &SpectralSettings::default())?;

    out.push_str("electrode");
    for band in BandName::ALL {
        out.push_str(&format!(" {:>8}", band.as_str()));
    }
    out.push('\n');
    for e in Electrode::ALL {
        out.push_str(&format!("{:<9}", e.name()));
        for band in BandName::ALL {
            out.push_str(&format!(" {:>8.3}", bp.get(e, band)));
        }
        out.push('\n');
    }
    Ok(out)
}

fn main() -> eeg_emotion::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

//! Reading a recording from CSV text with a `# key: value` preamble, and
//! what a malformed file reports.

use eeg_emotion::recording::write_recording;
use eeg_emotion::{parse_recording, Electrode};

pub fn run_example() -> eeg_emotion::Result<String> {
    let mut text = String::from(
        "# recording_id: p01_cold_air\n\
         # participant_id: p01\n\
         # clip_id: cold_air\n\
         # sample_rate: 256\n\
         timestamp,TP9,AF7,AF8,TP10\n",
    );
    for i in 0..512 {
        let t = i as f64 / 256.0;
        let v = (2.0 * std::f64::consts::PI * 10.0 * t).sin();
        text.push_str(&format!("{t},{v},{},{},{}\n", 0.5 * v, -v, 2.0 * v));
    }
    let rec = parse_recording(&text)?;
    let mut out = format!(
        "{}: {} samples at {} Hz, TP10[1] = {:.4}\n",
        rec.recording_id(),
        rec.len(),
        rec.sample_rate(),
        rec.sample(1, Electrode::TP10)
    );

    // the canonical writer drops the extra timestamp column
    let again = parse_recording(&write_recording(&rec))?;
    out.push_str(&format!("round trip equal: {}\n", again == rec));

    let broken = text.replacen(",TP10\n", ",TP11\n", 1);
    match parse_recording(&broken) {
        Ok(_) => out.push_str("unexpectedly parsed\n"),
        Err(e) => out.push_str(&format!("rejected: {e}\n")),
    }
    Ok(out)
}

fn main() -> eeg_emotion::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

//! SMO on XOR with a degree-2 polynomial kernel, the KKT check on the
//! solution, and a one-vs-one model over four clusters.

use eeg_emotion::svm::{
    train_binary_smo, train_multiclass_rows, verify_kkt, KernelParams, SmoSettings, SvmConfig,
};
use eeg_emotion::EmotionLabel;

pub fn run_example() -> eeg_emotion::Result<String> {
    let x = vec![
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
    ];
    let y = [1.0, 1.0, -1.0, -1.0];
    let kernel = KernelParams::new(1.0, 2)?;
    let model = train_binary_smo(&x, &y, &kernel, &SmoSettings::new(10.0, 1e-3, 1))?;
    let mut out = String::new();
    for (xi, yi) in x.iter().zip(y) {
        out.push_str(&format!(
            "{xi:?} label {yi:+} decision {:+.4}\n",
            model.decision(xi)
        ));
    }
    let kkt = verify_kkt(&model, &x, &y);
    out.push_str(&format!(
        "support vectors {}, max KKT violation {:.2e}\n",
        model.support_vectors.len(),
        kkt.max_violation
    ));

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (k, label) in EmotionLabel::ALL.into_iter().enumerate() {
        let (cx, cy) = ((k % 2) as f64 * 4.0, (k / 2) as f64 * 4.0);
        for j in 0..5 {
            rows.push(vec![cx + 0.1 * j as f64, cy - 0.1 * j as f64]);
            labels.push(label);
        }
    }
    let ovo = train_multiclass_rows(&rows, &labels, &SvmConfig::default(), 7)?;
    let p = ovo.predict(&[4.0, 4.0])?;
    out.push_str(&format!("(4, 4) -> {} votes {:?}\n", p.label, p.votes));
    Ok(out)
}

fn main() -> eeg_emotion::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}

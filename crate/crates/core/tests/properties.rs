use eeg_emotion::eval::{kappa, ConfusionMatrix};
use eeg_emotion::recording::{write_recording, ClipId, RecordingMeta};
use eeg_emotion::spectral::{band_power, welch_psd, FrequencyBand};
use eeg_emotion::svm::{
    gram_matrix, solve_dual, KernelParams, NormalizationParams, Prediction, SmoSettings,
};
use eeg_emotion::{parse_recording, EegRecording};
use proptest::prelude::*;

fn channel(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-500.0f64..500.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recording_text_round_trip(
        len in 512usize..700,
        seed in any::<u64>(),
        hot in any::<bool>(),
    ) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 200.0 - 100.0
        };
        let channels: [Vec<f64>; 4] = std::array::from_fn(|_| (0..len).map(|_| next()).collect());
        let meta = RecordingMeta {
            recording_id: format!("r{seed}"),
            participant_id: "p7".into(),
            clip_id: if hot { ClipId::HotAir } else { ClipId::ColdAir },
            sample_rate: 256.0,
        };
        let rec = EegRecording::new(meta, channels).unwrap();
        prop_assert_eq!(parse_recording(&write_recording(&rec)).unwrap(), rec);
    }

    #[test]
    fn psd_nonnegative_and_quadratic(x in channel(1024), k in 0.1f64..10.0) {
        let psd = welch_psd(&x, 256.0, 256, 0.5).unwrap();
        prop_assert!(psd.power_density.iter().all(|&p| p >= 0.0));
        let scaled: Vec<f64> = x.iter().map(|v| k * v).collect();
        let psd_k = welch_psd(&scaled, 256.0, 256, 0.5).unwrap();
        for band in FrequencyBand::standard(44.0) {
            let (p, pk) = (band_power(&psd, &band).unwrap(), band_power(&psd_k, &band).unwrap());
            prop_assert!(p >= 0.0);
            prop_assert!((pk - k * k * p).abs() <= 1e-9 * pk.max(1e-300));
        }
    }

    #[test]
    fn normalization_maps_training_rows_into_unit_box(
        rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 5), 1..30),
    ) {
        let norm = NormalizationParams::fit(&rows).unwrap();
        for r in &rows {
            prop_assert!(norm.apply(r).iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn kappa_bounded(counts in prop::array::uniform4(prop::array::uniform4(0u64..50))) {
        let cm = ConfusionMatrix::from_counts(counts);
        prop_assume!(cm.total() > 0);
        let k = kappa(&cm).unwrap();
        prop_assert!((-1.0..=1.0).contains(&k));
    }

    #[test]
    fn votes_give_distribution(votes in prop::array::uniform4(0u8..4)) {
        prop_assume!(votes.iter().map(|&v| u32::from(v)).sum::<u32>() > 0);
        let p = Prediction::from_votes(votes);
        prop_assert!((p.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let top = *votes.iter().max().unwrap();
        prop_assert_eq!(votes.iter().position(|&v| v == top), Some(p.label.index()));
    }

    #[test]
    fn smo_respects_box_and_equality(
        points in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, any::<bool>()), 4..16),
        c in 0.05f64..10.0,
        degree in 1u32..4,
    ) {
        let x: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0, p.1]).collect();
        let mut y: Vec<f64> = points.iter().map(|p| if p.2 { 1.0 } else { -1.0 }).collect();
        y[0] = 1.0;
        y[1] = -1.0;
        let gram = gram_matrix(&x, &KernelParams::new(1.0, degree).unwrap());
        let sol = solve_dual(&gram, &y, &SmoSettings::new(c, 1e-3, 1)).unwrap();
        prop_assert!(sol.alphas.iter().all(|&a| (0.0..=c).contains(&a)));
        let residual: f64 = sol.alphas.iter().zip(&y).map(|(a, y)| a * y).sum();
        prop_assert!(residual.abs() <= 1e-6);
    }
}

//! Pipeline drivers behind the `extract`, `evaluate` and `synth` commands.
//!
//! A single TOML [`RunConfig`] drives every command. Each run writes the
//! effective configuration next to its outputs so it can be replayed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{label_from_sam, Dataset, MidpointPolicy};
use crate::error::{Error, ErrorKind, Result, StageExt};
use crate::eval::{
    cross_validate, render_class_metrics, render_table, CvMode, CvSettings, EvalReport,
};
use crate::features::{
    extract_features, write_feature_table, FeatureFamily, FeatureRow, FeatureVector,
};
use crate::recording::{EegRecording, SamRating};
use crate::session::load_session_file;
use crate::spectral::SpectralSettings;
use crate::svm::SvmConfig;
use crate::synth::{generate_session, session_manifest, write_recordings, SynthSpec};

pub const FEATURES_FILE: &str = "features.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TEXT: &str = "report.txt";
pub const CONFIG_ECHO: &str = "run_config.toml";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// Session manifest. When absent, `[synth]` supplies an in-memory session.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub folds: usize,
    pub seed: u64,
    pub mode: CvMode,
    pub midpoint_policy: MidpointPolicy,
}

impl Default for EvalConfig {
    fn default() -> Self {
        let cv = CvSettings::default();
        EvalConfig {
            folds: cv.folds,
            seed: cv.seed,
            mode: cv.mode,
            midpoint_policy: MidpointPolicy::default(),
        }
    }
}

impl EvalConfig {
    pub fn cv(&self) -> CvSettings {
        CvSettings {
            folds: self.folds,
            seed: self.seed,
            mode: self.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    /// Feature sets to export or evaluate, one report row each.
    pub features: Vec<FeatureFamily>,
    pub input: InputConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthSpec>,
    pub spectral: SpectralSettings,
    pub svm: SvmConfig,
    pub eval: EvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output_dir: PathBuf::from("out"),
            features: FeatureFamily::ALL.to_vec(),
            input: InputConfig::default(),
            synth: None,
            spectral: SpectralSettings::default(),
            svm: SvmConfig::default(),
            eval: EvalConfig::default(),
        }
    }
}

/// Command-line values that replace config keys when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub features: Option<Vec<FeatureFamily>>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<CvMode>,
    pub midpoint_policy: Option<MidpointPolicy>,
    pub synth_seed: Option<u64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(v) = o.output_dir {
            self.output_dir = v;
        }
        if let Some(v) = o.manifest {
            self.input.manifest = Some(v);
        }
        if let Some(v) = o.features {
            self.features = v;
        }
        if let Some(v) = o.folds {
            self.eval.folds = v;
        }
        if let Some(v) = o.seed {
            self.eval.seed = v;
        }
        if let Some(v) = o.mode {
            self.eval.mode = v;
        }
        if let Some(v) = o.midpoint_policy {
            self.eval.midpoint_policy = v;
        }
        if let Some(v) = o.synth_seed {
            self.synth.get_or_insert_with(SynthSpec::default).seed = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::Config("feature selector is empty".into()));
        }
        if self.eval.folds < 2 {
            return Err(Error::Config(format!(
                "eval.folds = {} must be >= 2",
                self.eval.folds
            )));
        }
        self.spectral.validate()?;
        self.svm.kernel()?;
        if let Some(spec) = &self.synth {
            spec.validate()?;
        }
        Ok(())
    }
}

/// Process exit status for an error: 65 validation, 70 convergence, 74 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err.kind() {
        ErrorKind::Validation => 65,
        ErrorKind::Convergence => 70,
        ErrorKind::Io => 74,
    }
}

fn load_input(cfg: &RunConfig) -> Result<Vec<(EegRecording, SamRating)>> {
    let session = match (&cfg.input.manifest, &cfg.synth) {
        (Some(path), _) => load_session_file(path)?,
        (None, Some(spec)) => generate_session(spec)?,
        (None, None) => {
            return Err(Error::Config(
                "set input.manifest or provide a [synth] section".into(),
            ))
        }
    };
    if session.is_empty() {
        return Err(Error::Manifest("manifest lists no recordings".into()));
    }
    Ok(session)
}

fn extract_all(
    session: &[(EegRecording, SamRating)],
    cfg: &SpectralSettings,
) -> Result<Vec<FeatureVector>> {
    session
        .par_iter()
        .map(|(rec, _)| {
            extract_features(rec, cfg).map_err(|e| Error::Stage {
                stage: "features",
                source: Box::new(Error::InvalidParameter(format!(
                    "{}: {e}",
                    rec.recording_id()
                ))),
            })
        })
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn prepare_output(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes the feature table for every recording in the input; returns its
/// path. Midpoint ratings rejected by the policy get an empty label.
pub fn cmd_extract(cfg: &RunConfig) -> Result<PathBuf> {
    cfg.validate().stage("config")?;
    let session = load_input(cfg).stage("load")?;
    let features = extract_all(&session, &cfg.spectral)?;
    let rows: Vec<FeatureRow<'_>> = session
        .iter()
        .zip(&features)
        .map(|((rec, rating), fv)| FeatureRow {
            recording_id: rec.recording_id(),
            features: fv,
            label: label_from_sam(*rating, cfg.eval.midpoint_policy),
        })
        .collect();
    let table = write_feature_table(&rows, &cfg.features).stage("features")?;

    prepare_output(&cfg.output_dir)?;
    let path = cfg.output_dir.join(FEATURES_FILE);
    write_file(&path, &table)?;
    write_file(&cfg.output_dir.join(CONFIG_ECHO), &cfg.to_toml())?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub reports: Vec<EvalReport>,
}

/// Human-readable report: the summary table, per-class blocks and the
/// configuration echo.
pub fn render_run(run: &RunReport) -> String {
    let mut out = render_table(&run.reports);
    for r in &run.reports {
        let _ = write!(
            out,
            "\n[{}] {} instances, {} features\n",
            r.feature_set.title(),
            r.instances,
            r.feature_len
        );
        out.push_str(&render_class_metrics(r));
    }
    let warnings: Vec<String> = run
        .reports
        .first()
        .map(|r| r.warnings.iter().map(ToString::to_string).collect())
        .unwrap_or_default();
    if !warnings.is_empty() {
        out.push_str("\nWarnings\n");
        for w in warnings {
            let _ = writeln!(out, "  {w}");
        }
    }
    out.push_str("\n# Configuration\n");
    out.push_str(&run.config.to_toml());
    out
}

/// Labels, balances, cross-validates and scores each selected feature set.
/// Writes `report.json`, `report.txt` and the configuration echo.
pub fn cmd_evaluate(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate().stage("config")?;
    let session = load_input(cfg).stage("load")?;
    let features = extract_all(&session, &cfg.spectral)?;
    let rated = session
        .iter()
        .zip(features)
        .map(|((rec, rating), fv)| (rec.recording_id().to_string(), fv, *rating));
    let (ds, label_warnings) = Dataset::from_rated(rated, cfg.eval.midpoint_policy);
    if ds.is_empty() {
        return Err(Error::Stage {
            stage: "label",
            source: Box::new(Error::SingleClass),
        });
    }

    let cv = cfg.eval.cv();
    let mut reports = Vec::with_capacity(cfg.features.len());
    for &family in &cfg.features {
        let mut report = cross_validate(&ds, family, &cfg.svm, &cv).stage("evaluate")?;
        let mut warnings = label_warnings.clone();
        warnings.append(&mut report.warnings);
        report.warnings = warnings;
        reports.push(report);
    }
    let run = RunReport {
        config: cfg.clone(),
        reports,
    };

    prepare_output(&cfg.output_dir)?;
    let json = serde_json::to_string_pretty(&run).expect("report serializes");
    write_file(&cfg.output_dir.join(REPORT_JSON), &json)?;
    write_file(&cfg.output_dir.join(REPORT_TEXT), &render_run(&run))?;
    write_file(&cfg.output_dir.join(CONFIG_ECHO), &cfg.to_toml())?;
    Ok(run)
}

/// Generates the synthetic session, writes recordings and a manifest whose
/// leading comment block echoes the configuration; returns the manifest path.
pub fn cmd_synth(cfg: &RunConfig) -> Result<PathBuf> {
    let spec = cfg
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("synth requires a [synth] section".into()))?;
    cfg.validate().stage("config")?;
    let session = generate_session(spec).stage("synth")?;

    prepare_output(&cfg.output_dir)?;
    write_recordings(&session, &cfg.output_dir)?;
    let mut text = String::from("# Generated by `eeg-emotion synth` with:\n");
    for line in cfg.to_toml().lines() {
        let _ = writeln!(text, "{}", format!("# {line}").trim_end());
    }
    text.push('\n');
    text.push_str(&session_manifest(&session).to_toml());
    let path = cfg.output_dir.join(MANIFEST_FILE);
    write_file(&path, &text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::ClipSeconds;

    fn tiny_synth() -> SynthSpec {
        SynthSpec {
            participants: 4,
            clip_seconds: ClipSeconds {
                cold_air: 6.0,
                hot_air: 5.0,
            },
            ..Default::default()
        }
    }

    #[test]
    fn config_round_trip() {
        let cfg = RunConfig {
            synth: Some(tiny_synth()),
            ..Default::default()
        };
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::default();
        cfg.features.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.eval.folds = 1;
        assert!(cfg.validate().is_err());
        assert!(RunConfig::parse("bogus = 1").is_err());
    }

    #[test]
    fn overrides_replace_keys() {
        let mut cfg = RunConfig::default();
        cfg.apply(Overrides {
            seed: Some(9),
            mode: Some(CvMode::LeakageSafe),
            features: Some(vec![FeatureFamily::Dasm]),
            ..Default::default()
        });
        assert_eq!(cfg.eval.seed, 9);
        assert_eq!(cfg.eval.mode, CvMode::LeakageSafe);
        assert_eq!(cfg.features, [FeatureFamily::Dasm]);
    }

    #[test]
    fn extract_columns_per_selector() {
        let dir = tempfile::tempdir().unwrap();
        for (family, cols) in [(FeatureFamily::All, 32), (FeatureFamily::Rasm, 12)] {
            let cfg = RunConfig {
                output_dir: dir.path().join(family.to_string()),
                features: vec![family],
                synth: Some(tiny_synth()),
                ..Default::default()
            };
            let path = cmd_extract(&cfg).unwrap();
            let text = std::fs::read_to_string(path).unwrap();
            assert_eq!(text.lines().count(), 9);
            assert_eq!(text.lines().next().unwrap().split(',').count(), cols);
        }
    }

    #[test]
    fn empty_manifest_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("m.toml");
        std::fs::write(&manifest, "").unwrap();
        let out = dir.path().join("out");
        let cfg = RunConfig {
            output_dir: out.clone(),
            input: InputConfig {
                manifest: Some(manifest),
            },
            ..Default::default()
        };
        let err = cmd_extract(&cfg).unwrap_err();
        assert_eq!(exit_code(&err), 65);
        assert!(!out.exists());
    }

    #[test]
    fn synth_writes_inventory() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            output_dir: dir.path().to_path_buf(),
            synth: Some(tiny_synth()),
            ..Default::default()
        };
        let manifest = cmd_synth(&cfg).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 9);
        let loaded = load_session_file(&manifest).unwrap();
        assert_eq!(loaded, generate_session(&tiny_synth()).unwrap());
    }

    #[test]
    fn synth_unwritable_output() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let cfg = RunConfig {
            output_dir: blocker.join("sub"),
            synth: Some(tiny_synth()),
            ..Default::default()
        };
        let err = cmd_synth(&cfg).unwrap_err();
        assert_eq!(exit_code(&err), 74);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn synth_requires_spec() {
        assert!(cmd_synth(&RunConfig::default()).is_err());
    }
}

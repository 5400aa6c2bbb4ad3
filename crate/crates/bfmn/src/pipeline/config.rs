//! Run configuration: a TOML file mirrored by CLI flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ColumnSpec;
use crate::twin::EndpointConfig;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub resources: ResourcePaths,
    pub params: Params,
    pub columns: ColumnSpec,
    pub cleaning: Cleaning,
    /// factor name -> 1-based questionnaire item indices
    pub mas_factors: BTreeMap<String, Vec<usize>>,
    pub twin: TwinConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub associations: Vec<PathBuf>,
    pub mas_it: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            associations: Vec::new(),
            mas_it: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ResourcePaths {
    pub lemma_map: Option<PathBuf>,
    pub emotion_lexicon: Option<PathBuf>,
    pub concreteness_norms: Option<PathBuf>,
    pub translations: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub alpha_valence: f64,
    pub alpha_concreteness: f64,
    pub n_null_concreteness: usize,
    pub n_null_emotion: usize,
    pub hub_fraction_network: f64,
    pub hub_fraction_frame: f64,
    pub min_edge_frequency: u64,
    /// `group` labels words within each analysis group; `pooled` labels
    /// them once over the whole dataset
    pub valence_mode: ValenceMode,
    /// count lexicon-missing lemmas toward emotion sample sizes
    pub emotion_include_unmatched: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            alpha_valence: crate::valence::DEFAULT_ALPHA,
            alpha_concreteness: 0.1,
            n_null_concreteness: crate::concreteness::DEFAULT_N_SAMPLES,
            n_null_emotion: crate::affect::DEFAULT_N_NULL,
            hub_fraction_network: 0.01,
            hub_fraction_frame: crate::frames::FRAME_HUB_FRACTION,
            min_edge_frequency: 1,
            valence_mode: ValenceMode::Group,
            emotion_include_unmatched: true,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [
            ("alpha_valence", self.alpha_valence),
            ("alpha_concreteness", self.alpha_concreteness),
        ] {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {a}")));
            }
        }
        for (name, f) in [
            ("hub_fraction_network", self.hub_fraction_network),
            ("hub_fraction_frame", self.hub_fraction_frame),
        ] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {f}")));
            }
        }
        if self.min_edge_frequency < 1 {
            return Err(Error::Config("min_edge_frequency must be >= 1".into()));
        }
        Ok(())
    }

    /// |z| threshold matching `alpha_concreteness`, two-sided. The
    /// conventional 1.6449 is used at the default 0.1 level.
    pub fn concreteness_z_crit(&self) -> f64 {
        if (self.alpha_concreteness - 0.1).abs() < 1e-12 {
            crate::concreteness::CONCRETENESS_Z_CRIT
        } else {
            crate::stats::normal_quantile(1.0 - self.alpha_concreteness / 2.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValenceMode {
    Group,
    Pooled,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct Cleaning {
    /// fixed cue-set size; when absent, each sample uses the widest cue
    /// count observed among its own participants
    pub cue_set_size: Option<usize>,
    /// per-sample overrides, keyed by sample tag
    pub per_sample: BTreeMap<String, usize>,
}


#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwinConfig {
    #[serde(flatten)]
    pub endpoint: EndpointConfig,
    /// cue list file: one cue per line, `#` comments allowed
    pub cue_set: Option<PathBuf>,
    pub cue_set_id: String,
    pub language: String,
    /// when > 0, twins also fill an n-item questionnaire
    pub mas_items: usize,
    pub request_log: Option<PathBuf>,
}

impl Default for TwinConfig {
    fn default() -> Self {
        TwinConfig {
            endpoint: EndpointConfig::default(),
            cue_set: None,
            cue_set_id: "set_3".into(),
            language: "it".into(),
            mas_items: 0,
            request_log: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.params.validate()?;
        // paths in the file are relative to the file's directory
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        for p in &mut self.paths.associations {
            fix(p);
        }
        if let Some(p) = &mut self.paths.mas_it {
            fix(p);
        }
        fix(&mut self.paths.output_dir);
        for p in [
            &mut self.resources.lemma_map,
            &mut self.resources.emotion_lexicon,
            &mut self.resources.concreteness_norms,
            &mut self.resources.translations,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        if let Some(p) = &mut self.twin.cue_set {
            fix(p);
        }
        if let Some(p) = &mut self.twin.request_log {
            fix(p);
        }
    }

    /// Stable fingerprint of the effective configuration, recorded in
    /// bundle manifests.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", crate::stats::fnv1a64(canon.as_bytes()))
    }
}

/// Loads a cue-set file: one cue per line, blank lines and `#` comments
/// skipped, words normalized.
pub fn load_cue_set(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read cue set {}: {e}", path.display())))?;
    let cues: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(crate::ingest::normalize)
        .collect();
    if cues.is_empty() {
        return Err(Error::Config(format!(
            "cue set {} is empty",
            path.display()
        )));
    }
    Ok(cues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_match_documented_parameters() {
        let p = Params::default();
        assert_eq!(p.alpha_valence, 0.1);
        assert_eq!(p.n_null_concreteness, 300);
        assert_eq!(p.n_null_emotion, 1000);
        assert_eq!(p.hub_fraction_network, 0.01);
        assert_eq!(p.hub_fraction_frame, 0.05);
        assert_eq!(p.concreteness_z_crit(), 1.6449);
    }

    #[test]
    fn non_default_alpha_uses_normal_quantile() {
        let p = Params {
            alpha_concreteness: 0.05,
            ..Params::default()
        };
        assert!((p.concreteness_z_crit() - 1.959963984540054).abs() < 1e-9);
    }

    #[test]
    fn invalid_alpha_rejected() {
        let p = Params {
            alpha_valence: 1.5,
            ..Params::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn config_roundtrip_and_rebase() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(
            f,
            "[paths]\nassociations = [\"data/a.csv\"]\noutput_dir = \"out\"\n\n\
             [params]\nalpha_valence = 0.05\n\n[twin]\nmodel = \"test-model\"\n"
        )
        .unwrap();
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(config.params.alpha_valence, 0.05);
        assert_eq!(config.twin.endpoint.model, "test-model");
        assert!(config.paths.associations[0].starts_with(dir.path()));
        // hash is stable
        assert_eq!(config.hash(), config.hash());
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[params]\ntypo_key = 3\n").unwrap();
        assert!(RunConfig::load(&path).is_err());
    }

    #[test]
    fn cue_set_loading() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cues.txt");
        std::fs::write(&path, "# set\nMatematica\n\n  Fisica  \n").unwrap();
        assert_eq!(load_cue_set(&path).unwrap(), vec!["matematica", "fisica"]);
        std::fs::write(&path, "# empty\n").unwrap();
        assert!(load_cue_set(&path).is_err());
    }
}

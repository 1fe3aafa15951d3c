use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use scalefree::dataset::{self, InfeasiblePolicy, SubtypeLabel};
use scalefree::pipeline::{
    CandidateMode, CandidateSpace, ModelSource, PipelineConfig, DEFAULT_EXHAUSTIVE_CEILING,
    DEFAULT_THRESHOLD,
};
use serde::{Deserialize, Serialize};

/// Settings for `predict`, read from a TOML file and then overridden by flags.
///
/// Training blocks accept every `TrainConfig` field; their `seed` is replaced by
/// the stage seed derived from the master `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Observed network: a `.bin` matrix, or an edge list (needs `nodes`).
    pub input: Option<PathBuf>,
    pub nodes: Option<usize>,
    /// Number of missing nodes to pad.
    pub m: usize,
    pub seed: u64,
    pub threshold: f64,
    pub per_group: Option<usize>,
    pub per_class: Option<usize>,
    /// `[x_in, x_out]` cells; all 100 grid cells when absent.
    pub subtypes: Option<Vec<[f64; 2]>>,
    pub infeasible: InfeasiblePolicy,
    pub candidates: CandidateSettings,
    pub ann1: ModelSource,
    pub ann2: ModelSource,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            input: None,
            nodes: None,
            m: 1,
            seed: p.seed,
            threshold: DEFAULT_THRESHOLD,
            per_group: None,
            per_class: None,
            subtypes: None,
            infeasible: p.infeasible,
            candidates: CandidateSettings::default(),
            ann1: p.ann1,
            ann2: p.ann2,
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CandidateSettings {
    pub mode: ModeName,
    /// Required in sampled mode.
    pub max_candidates: Option<usize>,
    pub space: CandidateSpace,
    pub exhaustive_ceiling: u64,
}

impl Default for CandidateSettings {
    fn default() -> Self {
        Self {
            mode: ModeName::Exhaustive,
            max_candidates: None,
            space: CandidateSpace::AllZeros,
            exhaustive_ceiling: DEFAULT_EXHAUSTIVE_CEILING,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_pipeline(&self) -> Result<PipelineConfig> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            bail!("threshold {} must lie in (0, 1)", self.threshold);
        }
        let mode = match (self.candidates.mode, self.candidates.max_candidates) {
            (ModeName::Exhaustive, _) => CandidateMode::Exhaustive,
            (ModeName::Sampled, Some(n)) if n > 0 => CandidateMode::Sampled { max_candidates: n },
            (ModeName::Sampled, _) => bail!("sampled mode needs max_candidates > 0"),
        };
        let subtypes = match &self.subtypes {
            None => dataset::all_subtypes(),
            Some(cells) => {
                if cells.is_empty() {
                    bail!("subtypes must not be empty");
                }
                cells
                    .iter()
                    .map(|&[a, b]| SubtypeLabel::new(a, b).map_err(anyhow::Error::from))
                    .collect::<Result<_>>()?
            }
        };
        for source in [&self.ann1, &self.ann2] {
            if let ModelSource::Load(p) = source {
                if !p.is_file() {
                    bail!("model checkpoint {} does not exist", p.display());
                }
            }
        }
        Ok(PipelineConfig {
            subtypes,
            infeasible: self.infeasible,
            per_group: self.per_group,
            per_class: self.per_class,
            ann1: self.ann1.clone(),
            ann2: self.ann2.clone(),
            mode,
            space: self.candidates.space,
            exhaustive_ceiling: self.candidates.exhaustive_ceiling,
            threshold: self.threshold,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let p = cfg.to_pipeline().unwrap();
        assert_eq!(p.threshold, 0.80);
        assert_eq!(p.subtypes.len(), 100);
        assert_eq!(p.infeasible, InfeasiblePolicy::Skip);
    }

    #[test]
    fn full_file_parses() {
        let cfg: RunConfig = toml::from_str(
            r#"
            input = "g.edges"
            nodes = 7
            m = 1
            seed = 9
            threshold = 0.9
            subtypes = [[2.2, 2.2], [2.5, 2.8]]
            infeasible = "fail"

            [candidates]
            mode = "sampled"
            max_candidates = 500
            space = "missing-nodes"

            [ann1.train]
            epochs = 5
            learning_rate = 0.01

            [ann2]
            load = "ann2.model"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.nodes, Some(7));
        assert_eq!(cfg.candidates.space, CandidateSpace::MissingNodes);
        assert!(matches!(&cfg.ann1, ModelSource::Train(t) if t.epochs == 5));
        assert_eq!(cfg.ann2, ModelSource::Load("ann2.model".into()));
        // The checkpoint does not exist, so resolution fails.
        assert!(cfg.to_pipeline().is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
        let cfg = RunConfig { threshold: 1.0, ..RunConfig::default() };
        assert!(cfg.to_pipeline().is_err());
        let cfg = RunConfig { subtypes: Some(vec![[2.15, 2.2]]), ..RunConfig::default() };
        assert!(cfg.to_pipeline().is_err());
        let mut cfg = RunConfig::default();
        cfg.candidates.mode = ModeName::Sampled;
        assert!(cfg.to_pipeline().is_err());
    }
}

//! Two-stage completion of a partially observed network.
//!
//! 1. The query matrix is padded with `m` isolated nodes (`G_new`).
//! 2. A 100-way subtype classifier picks the most probable exponent cell.
//! 3. A valid/invalid discriminator is trained for that cell.
//! 4. Completions of `G_new` (0 -> 1 flips on zero positions only) are scored
//!    and kept when the valid-class probability exceeds the threshold and the
//!    completion adds at least one link.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{
    self, build_discriminator_dataset, build_subtype_dataset, label_of, DatasetError, GroupId,
    InfeasiblePolicy, SubtypeCorpusSpec, SubtypeLabel, GROUP_COUNT, VALID_CLASS,
};
use crate::graph::AdjacencyMatrix;
use crate::mlp::{self, argmax, EpochStats, MlpError, MlpModel, TrainConfig};
use crate::rng::{self, derive_seed};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("exhaustive enumeration of 2^{zero_positions} candidates exceeds the ceiling of {ceiling}")]
    BudgetExceeded { zero_positions: usize, ceiling: u64 },
    #[error("predicted subtype {0} has no feasible (alpha, beta, gamma, delta) combination")]
    EmptyFeasibleSet(SubtypeLabel),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dataset stage: {0}")]
    Dataset(#[from] DatasetError),
    #[error("network stage: {0}")]
    Mlp(#[from] MlpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const DEFAULT_THRESHOLD: f64 = 0.80;
pub const DEFAULT_EXHAUSTIVE_CEILING: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SubtypePrediction {
    pub group: GroupId,
    pub label: SubtypeLabel,
    pub probability: f64,
    pub distribution: Vec<f64>,
}

/// Argmax over the 100 group probabilities, lowest index on ties.
pub fn predict_subtype(ann1: &MlpModel, g_new: &AdjacencyMatrix) -> Result<SubtypePrediction, PipelineError> {
    if ann1.output_size() != GROUP_COUNT {
        return Err(PipelineError::ShapeMismatch(format!(
            "subtype classifier has {} outputs, expected {GROUP_COUNT}",
            ann1.output_size()
        )));
    }
    check_input(ann1, g_new)?;
    let distribution = ann1.forward(&g_new.to_input())?;
    let best = argmax(&distribution);
    let group = GroupId::new(best).expect("argmax below GROUP_COUNT");
    Ok(SubtypePrediction {
        group,
        label: label_of(group),
        probability: distribution[best],
        distribution,
    })
}

fn check_input(model: &MlpModel, g: &AdjacencyMatrix) -> Result<(), PipelineError> {
    let width = g.size() * g.size();
    if model.input_size() != width {
        return Err(PipelineError::ShapeMismatch(format!(
            "model expects {} inputs but the matrix has side {} ({width} entries)",
            model.input_size(),
            g.size()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum CandidateMode {
    Exhaustive,
    Sampled { max_candidates: usize },
}

/// Which zero positions of `G_new` may be flipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateScope {
    /// Every zero entry.
    AllZeros,
    /// Zero entries in the rows and columns of the listed nodes.
    IncidentTo(Vec<usize>),
}

impl CandidateScope {
    fn free_positions(&self, g: &AdjacencyMatrix) -> Vec<usize> {
        let s = g.size();
        match self {
            CandidateScope::AllZeros => g.zero_positions(),
            CandidateScope::IncidentTo(nodes) => g
                .zero_positions()
                .into_iter()
                .filter(|&k| nodes.contains(&(k / s)) || nodes.contains(&(k % s)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateBudget {
    pub mode: CandidateMode,
    pub seed: u64,
    pub exhaustive_ceiling: u64,
    pub scope: CandidateScope,
}

impl Default for CandidateBudget {
    fn default() -> Self {
        Self {
            mode: CandidateMode::Exhaustive,
            seed: 0,
            exhaustive_ceiling: DEFAULT_EXHAUSTIVE_CEILING,
            scope: CandidateScope::AllZeros,
        }
    }
}

/// Lazily produced completions of a base matrix.
#[derive(Debug)]
pub struct CandidateStream {
    base: AdjacencyMatrix,
    free: Vec<usize>,
    source: Source,
}

#[derive(Debug)]
enum Source {
    Counter { next: u64, end: u64 },
    Sampled { remaining: usize, seen: HashSet<Vec<u64>>, rng: rng::StreamRng },
}

impl CandidateStream {
    /// Number of flippable positions.
    pub fn zero_positions(&self) -> usize {
        self.free.len()
    }

    fn build(&self, pattern: impl Fn(usize) -> bool) -> AdjacencyMatrix {
        let mut m = self.base.clone();
        let bits = m.bits_mut();
        for (k, &pos) in self.free.iter().enumerate() {
            bits[pos] = pattern(k);
        }
        m
    }
}

impl Iterator for CandidateStream {
    type Item = AdjacencyMatrix;

    fn next(&mut self) -> Option<AdjacencyMatrix> {
        let z = self.free.len();
        match &mut self.source {
            Source::Counter { next, end } => {
                if *next >= *end {
                    return None;
                }
                let code = *next;
                *next += 1;
                Some(self.build(|k| code >> k & 1 == 1))
            }
            Source::Sampled { remaining, seen, rng } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                let words = z.div_ceil(64);
                let pattern = loop {
                    let mut p: Vec<u64> = (0..words).map(|_| rng.random()).collect();
                    if !z.is_multiple_of(64) {
                        p[words - 1] &= (1u64 << (z % 64)) - 1;
                    }
                    if seen.insert(p.clone()) {
                        break p;
                    }
                };
                Some(self.build(|k| pattern[k / 64] >> (k % 64) & 1 == 1))
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = match &self.source {
            Source::Counter { next, end } => (end - next) as usize,
            Source::Sampled { remaining, .. } => *remaining,
        };
        (n, Some(n))
    }
}

/// Exhaustive mode yields all `2^z` assignments (including the unchanged
/// matrix); sampled mode yields distinct assignments drawn uniformly without
/// replacement, or all of them when the budget covers the whole space.
pub fn enumerate_candidates(g_new: &AdjacencyMatrix, budget: &CandidateBudget) -> Result<CandidateStream, PipelineError> {
    let free = budget.scope.free_positions(g_new);
    let z = free.len();
    let space = (z < 64).then(|| 1u64 << z);
    let source = match budget.mode {
        CandidateMode::Exhaustive => match space {
            Some(n) if n <= budget.exhaustive_ceiling => Source::Counter { next: 0, end: n },
            _ => {
                return Err(PipelineError::BudgetExceeded {
                    zero_positions: z,
                    ceiling: budget.exhaustive_ceiling,
                })
            }
        },
        CandidateMode::Sampled { max_candidates } => match space {
            Some(n) if max_candidates as u64 >= n => Source::Counter { next: 0, end: n },
            _ => Source::Sampled {
                remaining: max_candidates,
                seen: HashSet::with_capacity(max_candidates),
                rng: rng::seeded(budget.seed),
            },
        },
    };
    Ok(CandidateStream {
        base: g_new.clone(),
        free,
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedCandidate {
    pub matrix: AdjacencyMatrix,
    /// Valid-class probability.
    pub probability: f64,
}

impl AcceptedCandidate {
    /// Links present here but absent from `base`, row-major.
    pub fn added_links(&self, base: &AdjacencyMatrix) -> Vec<(usize, usize)> {
        self.matrix.ones().filter(|&(i, j)| !base.get(i, j)).collect()
    }

    /// For each listed node, whether it has at least one incident link.
    pub fn recovered(&self, nodes: &[usize]) -> Vec<bool> {
        let s = self.matrix.size();
        nodes
            .iter()
            .map(|&v| (0..s).any(|u| self.matrix.get(v, u) || self.matrix.get(u, v)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    /// Sorted by descending probability, then by bit pattern.
    pub accepted: Vec<AcceptedCandidate>,
    pub rejected_count: usize,
    pub zero_positions: usize,
    pub mode: CandidateMode,
    pub threshold: f64,
    /// Padded node indices whose recovery is reported.
    pub missing_nodes: Vec<usize>,
}

const SCORE_CHUNK: usize = 4096;

/// Scores candidates with the discriminator and keeps strict supersets of
/// `g_new` whose valid-class probability exceeds `threshold`.
pub fn filter_candidates(
    ann2: &MlpModel,
    candidates: impl IntoIterator<Item = AdjacencyMatrix>,
    g_new: &AdjacencyMatrix,
    threshold: f64,
) -> Result<(Vec<AcceptedCandidate>, usize), PipelineError> {
    if ann2.output_size() != 2 {
        return Err(PipelineError::ShapeMismatch(format!(
            "discriminator has {} outputs, expected 2",
            ann2.output_size()
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(PipelineError::InvalidConfig(format!("threshold {threshold} outside (0, 1)")));
    }
    check_input(ann2, g_new)?;
    let width = g_new.size() * g_new.size();

    let mut accepted = Vec::new();
    let mut rejected = 0usize;
    let mut iter = candidates.into_iter().peekable();
    while iter.peek().is_some() {
        let chunk: Vec<AdjacencyMatrix> = iter.by_ref().take(SCORE_CHUNK).collect();
        let mut x = ndarray::Array2::zeros((chunk.len(), width));
        for (mut row, c) in x.rows_mut().into_iter().zip(&chunk) {
            if c.size() != g_new.size() {
                return Err(PipelineError::ShapeMismatch("candidate side differs from G_new".into()));
            }
            c.write_input_into(row.as_slice_mut().expect("standard layout"));
        }
        let probs = ann2.predict_batch(x.view())?;
        for (c, p) in chunk.into_iter().zip(probs.column(VALID_CLASS as usize)) {
            if *p > threshold && c.contains(g_new) && c != *g_new {
                accepted.push(AcceptedCandidate {
                    matrix: c,
                    probability: *p,
                });
            } else {
                rejected += 1;
            }
        }
    }
    accepted.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then_with(|| a.matrix.bits().cmp(b.matrix.bits()))
    });
    Ok((accepted, rejected))
}

/// Where a stage's network comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    Train(TrainConfig),
    Load(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelOrigin {
    Trained,
    Loaded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSpace {
    /// Every zero entry of `G_new`.
    #[default]
    AllZeros,
    /// Zero entries in the rows and columns of the padded nodes.
    MissingNodes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Exponent cells the subtype corpus covers; also the pool of invalid subtypes.
    pub subtypes: Vec<SubtypeLabel>,
    pub infeasible: InfeasiblePolicy,
    /// Samples per subtype; `None` means the padded side `N + m`.
    pub per_group: Option<usize>,
    /// Samples per discriminator class; `None` means `50 (N + m)`.
    pub per_class: Option<usize>,
    pub ann1: ModelSource,
    pub ann2: ModelSource,
    pub mode: CandidateMode,
    pub space: CandidateSpace,
    pub exhaustive_ceiling: u64,
    pub threshold: f64,
    /// Every stage seed (corpora, initialisation, shuffling, sampling) derives from this.
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            subtypes: dataset::all_subtypes(),
            infeasible: InfeasiblePolicy::Skip,
            per_group: None,
            per_class: None,
            ann1: ModelSource::Train(TrainConfig::default()),
            ann2: ModelSource::Train(TrainConfig::default()),
            mode: CandidateMode::Exhaustive,
            space: CandidateSpace::AllZeros,
            exhaustive_ceiling: DEFAULT_EXHAUSTIVE_CEILING,
            threshold: DEFAULT_THRESHOLD,
            seed: 0,
            output_dir: None,
        }
    }
}

/// Seeds derived from the master seed, one per stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageSeeds {
    pub ann1_corpus: u64,
    pub ann1_init: u64,
    pub ann1_train: u64,
    pub ann2_corpus: u64,
    pub ann2_init: u64,
    pub ann2_train: u64,
    pub candidates: u64,
}

impl StageSeeds {
    pub fn from_master(seed: u64) -> Self {
        Self {
            ann1_corpus: derive_seed(seed, 1),
            ann1_init: derive_seed(seed, 2),
            ann1_train: derive_seed(seed, 3),
            ann2_corpus: derive_seed(seed, 4),
            ann2_init: derive_seed(seed, 5),
            ann2_train: derive_seed(seed, 6),
            candidates: derive_seed(seed, 7),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub g_new: AdjacencyMatrix,
    pub prediction: SubtypePrediction,
    pub report: PredictionReport,
    pub seeds: StageSeeds,
    pub ann1_origin: ModelOrigin,
    pub ann2_origin: ModelOrigin,
    pub ann1_history: Vec<EpochStats>,
    pub ann2_history: Vec<EpochStats>,
    pub ann2: MlpModel,
    /// Files written under `output_dir`, keyed by role.
    pub artifacts: Vec<(String, PathBuf)>,
}

pub fn run_pipeline(g: &AdjacencyMatrix, m: usize, cfg: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    if !(cfg.threshold > 0.0 && cfg.threshold < 1.0) {
        return Err(PipelineError::InvalidConfig(format!("threshold {} outside (0, 1)", cfg.threshold)));
    }
    let g_new = g.add_unconnected_nodes(m);
    let side = g_new.size();
    if side < 2 {
        return Err(PipelineError::InvalidConfig("padded network needs at least 2 nodes".into()));
    }
    let seeds = StageSeeds::from_master(cfg.seed);
    let missing_nodes: Vec<usize> = (g.size()..side).collect();
    let budget = CandidateBudget {
        mode: cfg.mode,
        seed: seeds.candidates,
        exhaustive_ceiling: cfg.exhaustive_ceiling,
        scope: match cfg.space {
            CandidateSpace::AllZeros => CandidateScope::AllZeros,
            CandidateSpace::MissingNodes => CandidateScope::IncidentTo(missing_nodes.clone()),
        },
    };
    // Fail on an oversized candidate space before any training.
    enumerate_candidates(&g_new, &budget)?;
    let mut artifacts = Vec::new();
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir)?;
    }
    let out = |name: &str| cfg.output_dir.as_ref().map(|d| d.join(name));

    // Stage 1: subtype classifier.
    let (ann1, ann1_origin, ann1_history) = match &cfg.ann1 {
        ModelSource::Load(path) => (mlp::load_model(path)?, ModelOrigin::Loaded, Vec::new()),
        ModelSource::Train(train_cfg) => {
            let corpus = build_subtype_dataset(&SubtypeCorpusSpec {
                side,
                per_group: cfg.per_group.unwrap_or(side),
                seed: seeds.ann1_corpus,
                subtypes: cfg.subtypes.clone(),
                infeasible: cfg.infeasible,
            })?;
            if let Some(p) = out("ann1_dataset.bin") {
                dataset::save_dataset(&corpus, &p)?;
                artifacts.push(("ann1_dataset".into(), p));
            }
            let mut model = mlp::build_ann1(side, seeds.ann1_init);
            let (x, y) = corpus.to_arrays();
            let history = mlp::train(
                &mut model,
                x.view(),
                &y,
                &TrainConfig {
                    seed: seeds.ann1_train,
                    ..train_cfg.clone()
                },
            )?;
            (model, ModelOrigin::Trained, history)
        }
    };
    if let Some(p) = out("ann1.model") {
        mlp::save_model(&ann1, &p)?;
        artifacts.push(("ann1_model".into(), p));
    }
    let prediction = predict_subtype(&ann1, &g_new)?;
    if !prediction.label.is_feasible() {
        return Err(PipelineError::EmptyFeasibleSet(prediction.label));
    }

    // Stage 2: discriminator for the predicted subtype.
    let (ann2, ann2_origin, ann2_history) = match &cfg.ann2 {
        ModelSource::Load(path) => (mlp::load_model(path)?, ModelOrigin::Loaded, Vec::new()),
        ModelSource::Train(train_cfg) => {
            let corpus = build_discriminator_dataset(
                side,
                prediction.label,
                &cfg.subtypes,
                cfg.per_class.unwrap_or(50 * side),
                seeds.ann2_corpus,
            )?;
            if let Some(p) = out("ann2_dataset.bin") {
                dataset::save_dataset(&corpus, &p)?;
                artifacts.push(("ann2_dataset".into(), p));
            }
            let mut model = mlp::build_ann2(side, seeds.ann2_init);
            let (x, y) = corpus.to_arrays();
            let history = mlp::train(
                &mut model,
                x.view(),
                &y,
                &TrainConfig {
                    seed: seeds.ann2_train,
                    ..train_cfg.clone()
                },
            )?;
            (model, ModelOrigin::Trained, history)
        }
    };
    if let Some(p) = out("ann2.model") {
        mlp::save_model(&ann2, &p)?;
        artifacts.push(("ann2_model".into(), p));
    }

    // Stage 3: candidate completions.
    let stream = enumerate_candidates(&g_new, &budget)?;
    let zero_positions = stream.zero_positions();
    let (accepted, rejected_count) = filter_candidates(&ann2, stream, &g_new, cfg.threshold)?;
    let report = PredictionReport {
        accepted,
        rejected_count,
        zero_positions,
        mode: cfg.mode,
        threshold: cfg.threshold,
        missing_nodes,
    };
    if let Some(p) = out("report.txt") {
        fs::write(&p, render_report(&report, &g_new))?;
        artifacts.push(("report".into(), p));
    }
    if let Some(p) = out("accepted.bin") {
        write_matrices(&p, report.accepted.iter().map(|a| &a.matrix))?;
        artifacts.push(("accepted_matrices".into(), p));
    }

    Ok(PipelineOutcome {
        g_new,
        prediction,
        report,
        seeds,
        ann1_origin,
        ann2_origin,
        ann1_history,
        ann2_history,
        ann2,
        artifacts,
    })
}

/// Concatenated binary matrix records.
pub fn write_matrices<'a>(path: &Path, matrices: impl IntoIterator<Item = &'a AdjacencyMatrix>) -> std::io::Result<()> {
    let mut buf = Vec::new();
    for m in matrices {
        m.write_to(&mut buf)?;
    }
    fs::write(path, buf)
}

/// Plain-text report: a header block, then one record per accepted candidate.
pub fn render_report(report: &PredictionReport, g_new: &AdjacencyMatrix) -> String {
    let mode = match report.mode {
        CandidateMode::Exhaustive => "exhaustive".to_string(),
        CandidateMode::Sampled { max_candidates } => format!("sampled (max {max_candidates})"),
    };
    let mut s = String::new();
    let _ = writeln!(s, "matrix_side: {}", g_new.size());
    let _ = writeln!(s, "existing_links: {}", g_new.count_ones());
    let _ = writeln!(s, "zero_positions: {}", report.zero_positions);
    let _ = writeln!(s, "mode: {mode}");
    let _ = writeln!(s, "threshold: {}", report.threshold);
    let _ = writeln!(s, "missing_nodes: {:?}", report.missing_nodes);
    let _ = writeln!(s, "accepted: {}", report.accepted.len());
    let _ = writeln!(s, "rejected: {}", report.rejected_count);
    for (i, a) in report.accepted.iter().enumerate() {
        let _ = writeln!(s);
        let _ = writeln!(s, "[candidate {i}]");
        let _ = writeln!(s, "probability: {:.12}", a.probability);
        let links: Vec<String> = a
            .added_links(g_new)
            .iter()
            .map(|(u, v)| format!("{u}->{v}"))
            .collect();
        let _ = writeln!(s, "added_links: {}", links.join(" "));
        let flags: Vec<String> = report
            .missing_nodes
            .iter()
            .zip(a.recovered(&report.missing_nodes))
            .map(|(n, r)| format!("{n}:{}", if r { "recovered" } else { "isolated" }))
            .collect();
        let _ = writeln!(s, "missing_nodes: {}", flags.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_count_small() {
        let g = AdjacencyMatrix::from_rows(&[&[0, 1, 0], &[0, 0, 0], &[1, 0, 0]]);
        let stream = enumerate_candidates(&g, &CandidateBudget::default()).unwrap();
        assert_eq!(stream.zero_positions(), 7);
        let all: Vec<_> = stream.collect();
        assert_eq!(all.len(), 128);
        assert!(all.iter().all(|c| c.contains(&g)));
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 128);
        assert_eq!(all[0], g);
    }

    #[test]
    fn full_matrix_has_one_candidate() {
        let g = AdjacencyMatrix::from_rows(&[&[1, 1], &[1, 1]]);
        let all: Vec<_> = enumerate_candidates(&g, &CandidateBudget::default()).unwrap().collect();
        assert_eq!(all, vec![g]);
    }

    #[test]
    fn exhaustive_over_ceiling() {
        let g = AdjacencyMatrix::zeros(5);
        assert!(matches!(
            enumerate_candidates(&g, &CandidateBudget::default()),
            Err(PipelineError::BudgetExceeded { zero_positions: 25, .. })
        ));
    }

    #[test]
    fn sampled_distinct_and_reproducible() {
        let mut g = AdjacencyMatrix::zeros(6);
        for k in 0..6 {
            g.set(k, (k + 1) % 6, true);
        }
        let budget = CandidateBudget {
            mode: CandidateMode::Sampled { max_candidates: 100 },
            seed: 4,
            ..CandidateBudget::default()
        };
        let a: Vec<_> = enumerate_candidates(&g, &budget).unwrap().collect();
        let b: Vec<_> = enumerate_candidates(&g, &budget).unwrap().collect();
        assert_eq!(a.len(), 100);
        assert_eq!(a, b);
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), 100);
        assert!(a.iter().all(|c| c.contains(&g)));
    }

    #[test]
    fn sampled_budget_covering_space_is_exhaustive() {
        let g = AdjacencyMatrix::from_rows(&[&[1, 0], &[1, 1]]);
        let budget = CandidateBudget {
            mode: CandidateMode::Sampled { max_candidates: 10 },
            ..CandidateBudget::default()
        };
        assert_eq!(enumerate_candidates(&g, &budget).unwrap().count(), 2);
    }

    #[test]
    fn incident_scope() {
        let g = AdjacencyMatrix::from_rows(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let budget = CandidateBudget {
            scope: CandidateScope::IncidentTo(vec![2]),
            ..CandidateBudget::default()
        };
        let stream = enumerate_candidates(&g, &budget).unwrap();
        assert_eq!(stream.zero_positions(), 5);
        let all: Vec<_> = stream.collect();
        assert_eq!(all.len(), 32);
        for c in &all {
            assert!(!c.get(0, 0) && c.get(0, 1) && !c.get(1, 0) && !c.get(1, 1));
        }
    }

    #[test]
    fn identity_candidate_rejected() {
        let g = AdjacencyMatrix::from_rows(&[&[0, 1], &[0, 0]]);
        // Bias the valid class so every input scores ~1.
        let mut m = MlpModel::zeros(&[4, 2, 2]);
        m.biases_mut()[1][0] = 20.0;
        let (acc, rej) = filter_candidates(&m, vec![g.clone()], &g, 0.8).unwrap();
        assert!(acc.is_empty());
        assert_eq!(rej, 1);
    }

    #[test]
    fn balanced_model_accepts_nothing_near_one() {
        let g = AdjacencyMatrix::from_rows(&[&[0, 1], &[0, 0]]);
        let m = MlpModel::zeros(&[4, 3, 2]);
        let stream = enumerate_candidates(&g, &CandidateBudget::default()).unwrap();
        let (acc, rej) = filter_candidates(&m, stream, &g, 0.999999).unwrap();
        assert!(acc.is_empty());
        assert_eq!(rej, 8);
    }

    #[test]
    fn zero_model_predicts_group_zero() {
        let g = AdjacencyMatrix::zeros(3);
        let p = predict_subtype(&MlpModel::zeros(&[9, 5, 100]), &g).unwrap();
        assert_eq!(p.group.index(), 0);
        assert!((p.probability - 0.01).abs() < 1e-15);
        assert!((p.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(matches!(
            predict_subtype(&MlpModel::zeros(&[16, 5, 100]), &g),
            Err(PipelineError::ShapeMismatch(_))
        ));
        assert!(matches!(
            predict_subtype(&MlpModel::zeros(&[9, 5, 4]), &g),
            Err(PipelineError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn accepted_sorted_and_flagged() {
        let g = AdjacencyMatrix::from_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]]);
        // Valid-class logit grows with the number of ones.
        let mut m = MlpModel::zeros(&[9, 1, 2]);
        m.weights_mut()[0].fill(1.0);
        m.weights_mut()[1][[0, 0]] = 1.0;
        let stream = enumerate_candidates(&g, &CandidateBudget::default()).unwrap();
        let (acc, _) = filter_candidates(&m, stream, &g, 0.9).unwrap();
        assert!(!acc.is_empty());
        assert!(acc.windows(2).all(|w| w[0].probability >= w[1].probability));
        assert!(acc.windows(2).all(|w| w[0].probability > w[1].probability
            || w[0].matrix.bits() < w[1].matrix.bits()));
        let full = &acc[0];
        assert_eq!(full.matrix.count_ones(), 9);
        assert_eq!(full.recovered(&[2]), vec![true]);
        assert_eq!(full.added_links(&g).len(), 7);
    }
}

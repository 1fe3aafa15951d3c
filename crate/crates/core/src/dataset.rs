//! Labelled corpora of generated adjacency matrices.
//!
//! Subtypes are cells of the 10 x 10 grid `(X_in, X_out) in {2.1, ..., 3.0}^2`,
//! numbered row-major: `group = 10 * i_in + i_out`.

use std::fmt::{self, Write as _};
use std::fs;
use std::io;
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{feasible_triples, generate, GeneratorError, GeneratorParams};
use crate::graph::{AdjacencyMatrix, GraphError};
use crate::rng::{self, derive_seed};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("({x_in}, {x_out}) is not on the 0.1-spaced exponent grid 2.1..=3.0")]
    OffGridLabel { x_in: f64, x_out: f64 },
    #[error("group index {0} outside 0..100")]
    OffGridGroup(usize),
    #[error("subtype {0} has no feasible (alpha, beta, gamma) grid triple")]
    EmptyFeasibleSet(SubtypeLabel),
    #[error("corpus needs at least one {0}")]
    EmptyRequest(&'static str),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("corrupt dataset: {0}")]
    CorruptDataset(String),
    #[error("dataset version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub const GRID_SIZE: usize = 10;
pub const GROUP_COUNT: usize = GRID_SIZE * GRID_SIZE;

/// Output arity and class indices of the valid/invalid discriminator corpus.
pub const BINARY_ARITY: u16 = 2;
pub const VALID_CLASS: u16 = 0;
pub const INVALID_CLASS: u16 = 1;

/// A cell of the exponent grid, stored as grid indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubtypeLabel {
    in_index: u8,
    out_index: u8,
}

fn grid_index(x: f64) -> Option<u8> {
    let pos = (x - 2.1) / 0.1;
    let idx = pos.round();
    ((0.0..GRID_SIZE as f64).contains(&idx) && (x - grid_value(idx as u8)).abs() <= 1e-9)
        .then_some(idx as u8)
}

fn grid_value(index: u8) -> f64 {
    (21 + index as u32) as f64 / 10.0
}

impl SubtypeLabel {
    pub fn new(x_in: f64, x_out: f64) -> Result<Self, DatasetError> {
        match (grid_index(x_in), grid_index(x_out)) {
            (Some(in_index), Some(out_index)) => Ok(Self { in_index, out_index }),
            _ => Err(DatasetError::OffGridLabel { x_in, x_out }),
        }
    }

    pub fn x_in(&self) -> f64 {
        grid_value(self.in_index)
    }

    pub fn x_out(&self) -> f64 {
        grid_value(self.out_index)
    }

    pub fn group(&self) -> GroupId {
        group_of(*self)
    }

    pub fn feasible_params(&self) -> Result<Vec<GeneratorParams>, DatasetError> {
        feasible_triples(self.x_in(), self.x_out()).map_err(|e| match e {
            GeneratorError::EmptyFeasibleSet { .. } => DatasetError::EmptyFeasibleSet(*self),
            other => other.into(),
        })
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_params().is_ok()
    }
}

impl fmt::Display for SubtypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(X_in={:.1}, X_out={:.1})", self.x_in(), self.x_out())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupId(u8);

impl GroupId {
    pub fn new(index: usize) -> Result<Self, DatasetError> {
        if index < GROUP_COUNT {
            Ok(Self(index as u8))
        } else {
            Err(DatasetError::OffGridGroup(index))
        }
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

pub fn group_of(label: SubtypeLabel) -> GroupId {
    GroupId(label.in_index * GRID_SIZE as u8 + label.out_index)
}

pub fn label_of(group: GroupId) -> SubtypeLabel {
    SubtypeLabel {
        in_index: group.0 / GRID_SIZE as u8,
        out_index: group.0 % GRID_SIZE as u8,
    }
}

/// All 100 subtypes in group order.
pub fn all_subtypes() -> Vec<SubtypeLabel> {
    (0..GROUP_COUNT).map(|i| label_of(GroupId(i as u8))).collect()
}

/// Subtypes that at least one grid triple can generate.
pub fn feasible_subtypes() -> Vec<SubtypeLabel> {
    all_subtypes().into_iter().filter(SubtypeLabel::is_feasible).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Generator seed; replaying `generate(params, side, seed)` reproduces the sample.
    pub seed: u64,
    pub params: GeneratorParams,
    pub subtype: SubtypeLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub matrix: AdjacencyMatrix,
    pub label: u16,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    matrix_side: usize,
    label_arity: u16,
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(matrix_side: usize, label_arity: u16, samples: Vec<Sample>) -> Result<Self, DatasetError> {
        for (i, s) in samples.iter().enumerate() {
            if s.matrix.size() != matrix_side {
                return Err(DatasetError::CorruptDataset(format!(
                    "sample {i} has side {} in a side-{matrix_side} corpus",
                    s.matrix.size()
                )));
            }
            if s.label >= label_arity {
                return Err(DatasetError::CorruptDataset(format!(
                    "sample {i} label {} outside arity {label_arity}",
                    s.label
                )));
            }
        }
        Ok(Self {
            matrix_side,
            label_arity,
            samples,
        })
    }

    pub fn matrix_side(&self) -> usize {
        self.matrix_side
    }

    pub fn label_arity(&self) -> u16 {
        self.label_arity
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Row-major 0/1 inputs and class labels, ready for training.
    pub fn to_arrays(&self) -> (Array2<f64>, Vec<usize>) {
        let width = self.matrix_side * self.matrix_side;
        let mut x = Array2::zeros((self.samples.len(), width));
        for (mut row, s) in x.rows_mut().into_iter().zip(&self.samples) {
            s.matrix
                .write_input_into(row.as_slice_mut().expect("standard layout"));
        }
        (x, self.samples.iter().map(|s| s.label as usize).collect())
    }

    /// Seeded shuffle, then the last `test_fraction` of samples form the second half.
    pub fn split(&self, test_fraction: f64, seed: u64) -> (Dataset, Dataset) {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..self.samples.len()).collect();
        order.shuffle(&mut rng::seeded(seed));
        let test = ((self.samples.len() as f64) * test_fraction).round() as usize;
        let cut = self.samples.len() - test.min(self.samples.len());
        let pick = |idx: &[usize]| Dataset {
            matrix_side: self.matrix_side,
            label_arity: self.label_arity,
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
        };
        (pick(&order[..cut]), pick(&order[cut..]))
    }

    /// One comma-separated line per sample, with a header.
    pub fn manifest(&self) -> String {
        let mut out = String::from("index,label,x_in,x_out,alpha,beta,gamma,delta_in,delta_out,seed\n");
        for (i, s) in self.samples.iter().enumerate() {
            let p = &s.provenance;
            let _ = writeln!(
                out,
                "{i},{},{:.1},{:.1},{},{},{},{},{},{}",
                s.label,
                p.subtype.x_in(),
                p.subtype.x_out(),
                p.params.alpha,
                p.params.beta,
                p.params.gamma,
                p.params.delta_in,
                p.params.delta_out,
                p.seed
            );
        }
        out
    }
}

/// Regenerates the matrix recorded by a provenance block.
pub fn replay(provenance: &Provenance, side: usize) -> Result<AdjacencyMatrix, DatasetError> {
    Ok(generate(&provenance.params, side, provenance.seed)?.to_adjacency())
}

/// What to do with grid cells no triple can generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfeasiblePolicy {
    /// Abort with [`DatasetError::EmptyFeasibleSet`] naming the first such cell.
    #[default]
    Fail,
    /// Leave such cells out of the corpus.
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubtypeCorpusSpec {
    pub side: usize,
    pub per_group: usize,
    pub seed: u64,
    pub subtypes: Vec<SubtypeLabel>,
    pub infeasible: InfeasiblePolicy,
}

impl SubtypeCorpusSpec {
    /// All 100 groups; fails on infeasible cells.
    pub fn full_grid(side: usize, per_group: usize, seed: u64) -> Self {
        Self {
            side,
            per_group,
            seed,
            subtypes: all_subtypes(),
            infeasible: InfeasiblePolicy::Fail,
        }
    }
}

struct Job {
    subtype: SubtypeLabel,
    label: u16,
}

fn generate_jobs(side: usize, seed: u64, jobs: &[Job], pools: &[Vec<GeneratorParams>]) -> Result<Vec<Sample>, DatasetError> {
    jobs.par_iter()
        .zip(pools.par_iter())
        .enumerate()
        .map(|(i, (job, pool))| {
            let sample_seed = derive_seed(seed, i as u64);
            let mut pick = rng::seeded(derive_seed(sample_seed, 1));
            let params = pool[rng::uniform_index(&mut pick, pool.len())];
            let matrix = generate(&params, side, sample_seed)?.to_adjacency();
            Ok(Sample {
                matrix,
                label: job.label,
                provenance: Provenance {
                    seed: sample_seed,
                    params,
                    subtype: job.subtype,
                },
            })
        })
        .collect()
}

/// `per_group` graphs for each requested subtype, labelled with its group id.
/// The `(alpha, beta, gamma)` triple of every sample is drawn uniformly from the
/// subtype's feasible set.
pub fn build_subtype_dataset(spec: &SubtypeCorpusSpec) -> Result<Dataset, DatasetError> {
    if spec.per_group == 0 {
        return Err(DatasetError::EmptyRequest("sample per group"));
    }
    if spec.side == 0 {
        return Err(DatasetError::EmptyRequest("node"));
    }
    let mut jobs = Vec::new();
    let mut pools = Vec::new();
    for &subtype in &spec.subtypes {
        let pool = match subtype.feasible_params() {
            Ok(p) => p,
            Err(DatasetError::EmptyFeasibleSet(_)) if spec.infeasible == InfeasiblePolicy::Skip => continue,
            Err(e) => return Err(e),
        };
        for _ in 0..spec.per_group {
            jobs.push(Job {
                subtype,
                label: subtype.group().index() as u16,
            });
            pools.push(pool.clone());
        }
    }
    if jobs.is_empty() {
        return Err(DatasetError::EmptyRequest("feasible subtype"));
    }
    let samples = generate_jobs(spec.side, spec.seed, &jobs, &pools)?;
    Dataset::new(spec.side, GROUP_COUNT as u16, samples)
}

/// The 100-group corpus: `per_group` samples for every grid cell.
pub fn build_ann1_dataset(side: usize, per_group: usize, seed: u64) -> Result<Dataset, DatasetError> {
    build_subtype_dataset(&SubtypeCorpusSpec::full_grid(side, per_group, seed))
}

/// Balanced valid/invalid corpus for one subtype. Invalid samples come from
/// subtypes drawn uniformly from `invalid_pool` minus `predicted`.
pub fn build_discriminator_dataset(
    side: usize,
    predicted: SubtypeLabel,
    invalid_pool: &[SubtypeLabel],
    per_class: usize,
    seed: u64,
) -> Result<Dataset, DatasetError> {
    if per_class == 0 {
        return Err(DatasetError::EmptyRequest("sample per class"));
    }
    let valid_pool = predicted.feasible_params()?;
    let others: Vec<(SubtypeLabel, Vec<GeneratorParams>)> = invalid_pool
        .iter()
        .filter(|&&s| s != predicted)
        .filter_map(|&s| s.feasible_params().ok().map(|p| (s, p)))
        .collect();
    if others.is_empty() {
        return Err(DatasetError::EmptyRequest("feasible invalid subtype"));
    }
    let mut jobs = Vec::with_capacity(2 * per_class);
    let mut pools = Vec::with_capacity(2 * per_class);
    for _ in 0..per_class {
        jobs.push(Job {
            subtype: predicted,
            label: VALID_CLASS,
        });
        pools.push(valid_pool.clone());
    }
    let mut chooser = rng::seeded(derive_seed(seed, u64::MAX));
    for _ in 0..per_class {
        let (subtype, pool) = &others[rng::uniform_index(&mut chooser, others.len())];
        jobs.push(Job {
            subtype: *subtype,
            label: INVALID_CLASS,
        });
        pools.push(pool.clone());
    }
    let samples = generate_jobs(side, seed, &jobs, &pools)?;
    Dataset::new(side, BINARY_ARITY, samples)
}

/// Discriminator corpus with invalid subtypes drawn from every other feasible cell.
pub fn build_ann2_dataset(
    side: usize,
    predicted: SubtypeLabel,
    per_class: usize,
    seed: u64,
) -> Result<Dataset, DatasetError> {
    build_discriminator_dataset(side, predicted, &all_subtypes(), per_class, seed)
}

// Binary layout, little-endian:
//   magic "SFNETDS\0", version u32, side u32, count u64, arity u16,
//   then per sample: label u16, seed u64, alpha beta gamma delta_in delta_out f64,
//   x_in index u8, x_out index u8, ceil(side^2/8) packed matrix bytes (MSB-first).
pub const DATASET_MAGIC: &[u8; 8] = b"SFNETDS\0";
pub const DATASET_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 4 + 8 + 2;

pub fn encode_dataset(ds: &Dataset) -> Vec<u8> {
    let packed_len = (ds.matrix_side * ds.matrix_side).div_ceil(8);
    let mut buf = Vec::with_capacity(26 + ds.samples.len() * (60 + packed_len));
    buf.extend_from_slice(DATASET_MAGIC);
    buf.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    buf.extend_from_slice(&(ds.matrix_side as u32).to_le_bytes());
    buf.extend_from_slice(&(ds.samples.len() as u64).to_le_bytes());
    buf.extend_from_slice(&ds.label_arity.to_le_bytes());
    for s in &ds.samples {
        let p = &s.provenance;
        buf.extend_from_slice(&s.label.to_le_bytes());
        buf.extend_from_slice(&p.seed.to_le_bytes());
        for v in [p.params.alpha, p.params.beta, p.params.gamma, p.params.delta_in, p.params.delta_out] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf.push(p.subtype.in_index);
        buf.push(p.subtype.out_index);
        buf.extend_from_slice(&s.matrix.packed_bits());
    }
    buf
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Dataset, DatasetError> {
    let corrupt = |m: &str| DatasetError::CorruptDataset(m.to_string());
    let mut rest = bytes;
    let mut take = |n: usize| -> Result<&[u8], DatasetError> {
        if rest.len() < n {
            return Err(corrupt("truncated"));
        }
        let (head, tail) = rest.split_at(n);
        rest = tail;
        Ok(head)
    };
    if take(8)? != DATASET_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes"));
    if version != DATASET_VERSION {
        return Err(DatasetError::VersionMismatch {
            found: version,
            expected: DATASET_VERSION,
        });
    }
    let side = u32::from_le_bytes(take(4)?.try_into().expect("4 bytes")) as usize;
    let count = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
    let arity = u16::from_le_bytes(take(2)?.try_into().expect("2 bytes"));
    let packed_len = side
        .checked_mul(side)
        .ok_or_else(|| corrupt("side overflow"))?
        .div_ceil(8);
    let record = 2 + 8 + 40 + 2 + packed_len;
    let remaining = bytes.len() - HEADER_LEN;
    if (remaining as u64) != count.saturating_mul(record as u64) {
        return Err(DatasetError::CorruptDataset(format!(
            "header declares {count} samples but {remaining} bytes hold {} records of {record} bytes",
            remaining as f64 / record as f64
        )));
    }
    let mut samples = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let r = take(record)?;
        let f = |o: usize| f64::from_le_bytes(r[o..o + 8].try_into().expect("8 bytes"));
        let label = u16::from_le_bytes([r[0], r[1]]);
        let seed = u64::from_le_bytes(r[2..10].try_into().expect("8 bytes"));
        let params = GeneratorParams {
            alpha: f(10),
            beta: f(18),
            gamma: f(26),
            delta_in: f(34),
            delta_out: f(42),
        };
        let (in_index, out_index) = (r[50], r[51]);
        if in_index as usize >= GRID_SIZE || out_index as usize >= GRID_SIZE {
            return Err(corrupt("subtype index off the grid"));
        }
        let matrix = AdjacencyMatrix::from_packed_bits(side, &r[52..])
            .map_err(|e: GraphError| DatasetError::CorruptDataset(e.to_string()))?;
        samples.push(Sample {
            matrix,
            label,
            provenance: Provenance {
                seed,
                params,
                subtype: SubtypeLabel { in_index, out_index },
            },
        });
    }
    Dataset::new(side, arity, samples)
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    fs::write(path, encode_dataset(ds))?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    decode_dataset(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_mapping_examples() {
        assert_eq!(group_of(SubtypeLabel::new(2.1, 2.1).unwrap()).index(), 0);
        assert_eq!(group_of(SubtypeLabel::new(3.0, 3.0).unwrap()).index(), 99);
        assert_eq!(group_of(SubtypeLabel::new(2.3, 2.6).unwrap()).index(), 25);
        let l = label_of(GroupId::new(25).unwrap());
        assert_eq!((l.x_in(), l.x_out()), (2.3, 2.6));
    }

    #[test]
    fn label_bijection_over_grid() {
        for (i, l) in all_subtypes().into_iter().enumerate() {
            assert_eq!(group_of(l).index(), i);
            assert_eq!(label_of(group_of(l)), l);
            assert_eq!(SubtypeLabel::new(l.x_in(), l.x_out()).unwrap(), l);
        }
    }

    #[test]
    fn off_grid_rejected() {
        assert!(matches!(SubtypeLabel::new(2.15, 2.5), Err(DatasetError::OffGridLabel { .. })));
        assert!(SubtypeLabel::new(2.0, 2.5).is_err());
        assert!(SubtypeLabel::new(3.1, 2.5).is_err());
        assert!(SubtypeLabel::new(2.5 + 1e-12, 2.5).is_ok());
        assert!(GroupId::new(100).is_err());
    }

    #[test]
    fn feasible_cells_exclude_lowest_exponent() {
        let f = feasible_subtypes();
        assert_eq!(f.len(), 81);
        assert!(f.iter().all(|s| s.x_in() > 2.15 && s.x_out() > 2.15));
    }

    #[test]
    fn full_grid_fails_on_first_infeasible_group() {
        let err = build_ann1_dataset(6, 1, 3).unwrap_err();
        match err {
            DatasetError::EmptyFeasibleSet(s) => assert_eq!(s.group().index(), 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn skip_policy_covers_feasible_groups() {
        let mut spec = SubtypeCorpusSpec::full_grid(6, 1, 3);
        spec.infeasible = InfeasiblePolicy::Skip;
        let ds = build_subtype_dataset(&spec).unwrap();
        assert_eq!(ds.len(), 81);
        assert_eq!(ds.label_arity(), 100);
    }

    #[test]
    fn padded_side_budget_per_group() {
        // per_group = side, as in the 100(N+M) recipe, over the feasible cells
        let mut spec = SubtypeCorpusSpec::full_grid(12, 12, 5);
        spec.infeasible = InfeasiblePolicy::Skip;
        let ds = build_subtype_dataset(&spec).unwrap();
        assert_eq!(ds.len(), 81 * 12);
        let mut counts = [0usize; GROUP_COUNT];
        for s in ds.samples() {
            counts[s.label as usize] += 1;
            assert_eq!(s.matrix.size(), 12);
            assert_eq!(s.label as usize, s.provenance.subtype.group().index());
        }
        assert!(counts.iter().all(|&c| c == 0 || c == 12));
    }

    #[test]
    fn discriminator_corpus_balance_and_labels() {
        let predicted = SubtypeLabel::new(2.5, 2.7).unwrap();
        let ds = build_ann2_dataset(8, predicted, 40, 11).unwrap();
        assert_eq!(ds.len(), 80);
        let valid: Vec<_> = ds.samples().iter().filter(|s| s.label == VALID_CLASS).collect();
        assert_eq!(valid.len(), 40);
        assert!(valid.iter().all(|s| s.provenance.subtype == predicted));
        assert!(ds
            .samples()
            .iter()
            .filter(|s| s.label == INVALID_CLASS)
            .all(|s| s.provenance.subtype != predicted && s.provenance.subtype.is_feasible()));
    }

    #[test]
    fn infeasible_prediction_rejected() {
        let predicted = SubtypeLabel::new(2.1, 2.7).unwrap();
        assert!(matches!(
            build_ann2_dataset(8, predicted, 4, 1),
            Err(DatasetError::EmptyFeasibleSet(_))
        ));
    }

    #[test]
    fn count_mismatch_is_corrupt() {
        let spec = SubtypeCorpusSpec {
            side: 5,
            per_group: 2,
            seed: 1,
            subtypes: vec![SubtypeLabel::new(2.5, 2.5).unwrap()],
            infeasible: InfeasiblePolicy::Fail,
        };
        let ds = build_subtype_dataset(&spec).unwrap();
        let mut bytes = encode_dataset(&ds);
        bytes[16] = 3;
        assert!(matches!(decode_dataset(&bytes), Err(DatasetError::CorruptDataset(_))));
        let bytes = encode_dataset(&ds);
        assert!(matches!(
            decode_dataset(&bytes[..bytes.len() - 1]),
            Err(DatasetError::CorruptDataset(_))
        ));
        let mut wrong_version = bytes.clone();
        wrong_version[8] = 2;
        assert!(matches!(
            decode_dataset(&wrong_version),
            Err(DatasetError::VersionMismatch { found: 2, .. })
        ));
    }

    #[test]
    fn manifest_has_one_line_per_sample() {
        let spec = SubtypeCorpusSpec {
            side: 5,
            per_group: 3,
            seed: 1,
            subtypes: vec![SubtypeLabel::new(2.4, 2.9).unwrap()],
            infeasible: InfeasiblePolicy::Fail,
        };
        let ds = build_subtype_dataset(&spec).unwrap();
        let m = ds.manifest();
        let lines: Vec<_> = m.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,38,2.4,2.9,"));
    }
}

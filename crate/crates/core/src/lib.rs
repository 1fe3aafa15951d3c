//! Hidden-link and missing-node prediction for directed scale-free networks.
//!
//! * [`graph`]: multigraphs, 0/1 adjacency matrices, degree statistics, tail
//!   exponent estimation, matrix serialization.
//! * [`generator`]: the α/β/γ preferential-attachment process and the
//!   offset/exponent algebra.
//! * [`mlp`]: dense ReLU/softmax classifiers trained by backpropagation.
//! * [`dataset`]: labelled corpora over the exponent grid and their file format.
//! * [`pipeline`]: subtype prediction, discriminator training and candidate
//!   filtering.

pub mod dataset;
pub mod generator;
pub mod graph;
pub mod mlp;
pub mod pipeline;
pub mod rng;

pub use dataset::{Dataset, GroupId, SubtypeLabel};
pub use generator::{generate, GeneratorParams};
pub use graph::{AdjacencyMatrix, DirectedGraph};
pub use mlp::{MlpModel, TrainConfig};
pub use pipeline::{run_pipeline, PipelineConfig, PredictionReport};

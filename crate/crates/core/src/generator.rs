//! Bollobás–Borgs–Chayes–Riordan directed scale-free graph process and the
//! algebra linking its offsets `delta_in`/`delta_out` to the in/out tail
//! exponents.
//!
//! Each step adds exactly one edge:
//!
//! * with probability `alpha` a new node `v` and an edge `v -> w`, `w` drawn
//!   with weight `D_in(w) + delta_in`;
//! * with probability `beta` an edge `v -> w` between existing nodes, `v`
//!   drawn with weight `D_out(v) + delta_out` and `w` independently with
//!   weight `D_in(w) + delta_in`;
//! * with probability `gamma` a new node `v` and an edge `w -> v`, `w` drawn
//!   with weight `D_out(w) + delta_out`.
//!
//! The process starts from a single node carrying one self-loop.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::DirectedGraph;
use crate::rng::{self, StreamRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("degenerate parameters: {0}")]
    DegenerateParams(&'static str),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("no (alpha, beta, gamma) grid triple yields delta_in and delta_out in [0, 4] for X_in={x_in}, X_out={x_out}")]
    EmptyFeasibleSet { x_in: f64, x_out: f64 },
    #[error("attachment weights are all zero")]
    DegenerateDistribution,
    #[error("target node count must be at least 1")]
    NoNodes,
}

/// Tolerance on `alpha + beta + gamma = 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Largest offset accepted when building parameters from exponent targets.
pub const DELTA_MAX: f64 = 4.0;

/// Offsets within this distance of 0 or [`DELTA_MAX`] are snapped onto the bound.
const DELTA_SNAP: f64 = 1e-12;

/// Smallest and largest grid exponents, inclusive.
pub const EXPONENT_MIN: f64 = 2.1;
pub const EXPONENT_MAX: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_in: f64,
    pub delta_out: f64,
}

impl GeneratorParams {
    pub fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta_in: f64,
        delta_out: f64,
    ) -> Result<Self, GeneratorError> {
        let p = Self {
            alpha,
            beta,
            gamma,
            delta_in,
            delta_out,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters hitting the exponent target from a given `(alpha, beta, gamma)`.
    /// Fails when either offset falls outside `[0, 4]`.
    pub fn for_target(
        alpha: f64,
        beta: f64,
        gamma: f64,
        target: ExponentTarget,
    ) -> Result<Self, GeneratorError> {
        let delta_in = delta_in_from_x(alpha, beta, gamma, target.x_in)?;
        let delta_out = delta_out_from_x(alpha, beta, gamma, target.x_out)?;
        let (Some(delta_in), Some(delta_out)) = (snap_delta(delta_in), snap_delta(delta_out))
        else {
            return Err(GeneratorError::InvalidParams(format!(
                "delta_in = (X_in(a+b) - a - b - 1)/(a+g) = {delta_in:.6} and \
                 delta_out = (X_out(g+b) - g - b - 1)/(a+g) = {delta_out:.6} must both lie in [0, {DELTA_MAX}]"
            )));
        };
        Self::new(alpha, beta, gamma, delta_in, delta_out)
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let Self {
            alpha,
            beta,
            gamma,
            delta_in,
            delta_out,
        } = *self;
        let all = [alpha, beta, gamma, delta_in, delta_out];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(GeneratorError::InvalidParams("non-finite value".into()));
        }
        if alpha < 0.0 || beta < 0.0 || gamma < 0.0 {
            return Err(GeneratorError::InvalidParams(format!(
                "probabilities must be non-negative, got ({alpha}, {beta}, {gamma})"
            )));
        }
        if (alpha + beta + gamma - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(GeneratorError::InvalidParams(format!(
                "alpha + beta + gamma = {} != 1",
                alpha + beta + gamma
            )));
        }
        if delta_in < 0.0 || delta_out < 0.0 {
            return Err(GeneratorError::InvalidParams(format!(
                "offsets must be non-negative, got delta_in={delta_in}, delta_out={delta_out}"
            )));
        }
        if alpha + gamma <= 0.0 {
            return Err(GeneratorError::InvalidParams(
                "alpha + gamma must be positive or no node is ever added".into(),
            ));
        }
        Ok(())
    }

    /// Conditions under which the in/out tails are power laws.
    pub fn has_power_law_tails(&self) -> bool {
        self.alpha * self.delta_in + self.gamma > 0.0
            && self.gamma * self.delta_out + self.alpha > 0.0
    }
}

fn snap_delta(delta: f64) -> Option<f64> {
    if (-DELTA_SNAP..0.0).contains(&delta) {
        Some(0.0)
    } else if (DELTA_MAX..=DELTA_MAX + DELTA_SNAP).contains(&delta) {
        Some(DELTA_MAX)
    } else if (0.0..=DELTA_MAX).contains(&delta) {
        Some(delta)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTarget {
    pub x_in: f64,
    pub x_out: f64,
}

impl ExponentTarget {
    pub fn new(x_in: f64, x_out: f64) -> Result<Self, GeneratorError> {
        let ok = |x: f64| (EXPONENT_MIN - 1e-9..=EXPONENT_MAX + 1e-9).contains(&x);
        if !ok(x_in) || !ok(x_out) {
            return Err(GeneratorError::InvalidParams(format!(
                "exponents must lie in [{EXPONENT_MIN}, {EXPONENT_MAX}], got ({x_in}, {x_out})"
            )));
        }
        Ok(Self { x_in, x_out })
    }
}

/// In-degree tail exponent `(a + b + 1 + delta_in (a + g)) / (a + b)`.
pub fn x_in_from_delta(p: &GeneratorParams) -> Result<f64, GeneratorError> {
    let ab = p.alpha + p.beta;
    if ab == 0.0 {
        return Err(GeneratorError::DegenerateParams("alpha + beta = 0"));
    }
    Ok((ab + 1.0 + p.delta_in * (p.alpha + p.gamma)) / ab)
}

/// Offset producing in-exponent `x_in`. The sign is not checked.
pub fn delta_in_from_x(alpha: f64, beta: f64, gamma: f64, x_in: f64) -> Result<f64, GeneratorError> {
    let ag = alpha + gamma;
    if ag == 0.0 {
        return Err(GeneratorError::DegenerateParams("alpha + gamma = 0"));
    }
    Ok((x_in * (alpha + beta) - alpha - beta - 1.0) / ag)
}

/// Out-degree tail exponent `(g + b + 1 + delta_out (a + g)) / (g + b)`.
pub fn x_out_from_delta(p: &GeneratorParams) -> Result<f64, GeneratorError> {
    let gb = p.gamma + p.beta;
    if gb == 0.0 {
        return Err(GeneratorError::DegenerateParams("gamma + beta = 0"));
    }
    Ok((gb + 1.0 + p.delta_out * (p.alpha + p.gamma)) / gb)
}

/// Offset producing out-exponent `x_out`. The sign is not checked.
pub fn delta_out_from_x(
    alpha: f64,
    beta: f64,
    gamma: f64,
    x_out: f64,
) -> Result<f64, GeneratorError> {
    let ag = alpha + gamma;
    if ag == 0.0 {
        return Err(GeneratorError::DegenerateParams("alpha + gamma = 0"));
    }
    Ok((x_out * (gamma + beta) - gamma - beta - 1.0) / ag)
}

/// The `(alpha, beta, gamma)` grid: alpha and gamma in {0.1, ..., 0.5}, beta
/// in {0.1, ..., 0.8}, restricted to the simplex. Ordered by alpha then gamma.
pub fn simplex_triples() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for a in 1..=5u32 {
        for g in 1..=5u32 {
            let b = 10 - a - g;
            if (1..=8).contains(&b) {
                out.push((tenths(a), tenths(b), tenths(g)));
            }
        }
    }
    out
}

fn tenths(k: u32) -> f64 {
    k as f64 / 10.0
}

/// Grid triples whose offsets for the target both lie in `[0, 4]`.
pub fn feasible_triples(x_in: f64, x_out: f64) -> Result<Vec<GeneratorParams>, GeneratorError> {
    let target = ExponentTarget { x_in, x_out };
    let out: Vec<_> = simplex_triples()
        .into_iter()
        .filter_map(|(a, b, g)| GeneratorParams::for_target(a, b, g, target).ok())
        .collect();
    if out.is_empty() {
        return Err(GeneratorError::EmptyFeasibleSet { x_in, x_out });
    }
    Ok(out)
}

/// In-attachment probabilities `(D_in(w) + delta_in) / (n + delta_in N)` on the
/// current graph.
pub fn attachment_distribution_in(
    g: &DirectedGraph,
    delta_in: f64,
) -> Result<Vec<f64>, GeneratorError> {
    normalized(g.in_degrees(), delta_in)
}

/// Out-attachment probabilities `(D_out(w) + delta_out) / (n + delta_out N)`.
pub fn attachment_distribution_out(
    g: &DirectedGraph,
    delta_out: f64,
) -> Result<Vec<f64>, GeneratorError> {
    normalized(g.out_degrees(), delta_out)
}

fn normalized(degrees: Vec<usize>, delta: f64) -> Result<Vec<f64>, GeneratorError> {
    let total: f64 = degrees.iter().sum::<usize>() as f64 + delta * degrees.len() as f64;
    if total <= 0.0 {
        return Err(GeneratorError::DegenerateDistribution);
    }
    Ok(degrees
        .into_iter()
        .map(|d| (d as f64 + delta) / total)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// New node with an out-edge to an existing node.
    Alpha,
    /// Edge between existing nodes.
    Beta,
    /// New node with an in-edge from an existing node.
    Gamma,
}

/// Stepwise driver for the generative process.
#[derive(Debug, Clone)]
pub struct BollobasProcess {
    params: GeneratorParams,
    graph: DirectedGraph,
    in_degree: Vec<usize>,
    out_degree: Vec<usize>,
    rng: StreamRng,
}

impl BollobasProcess {
    pub fn new(params: GeneratorParams, seed: u64) -> Result<Self, GeneratorError> {
        params.validate()?;
        let mut graph = DirectedGraph::with_nodes(1);
        graph.push_edge(0, 0);
        Ok(Self {
            params,
            graph,
            in_degree: vec![1],
            out_degree: vec![1],
            rng: rng::seeded(seed),
        })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> DirectedGraph {
        self.graph
    }

    pub fn step(&mut self) -> StepKind {
        let GeneratorParams {
            alpha,
            beta,
            delta_in,
            delta_out,
            ..
        } = self.params;
        let u: f64 = self.rng.random();
        if u < alpha {
            let w = self.pick_by_in_degree(delta_in);
            let v = self.add_node();
            self.add_edge(v, w);
            StepKind::Alpha
        } else if u < alpha + beta {
            let v = self.pick_by_out_degree(delta_out);
            let w = self.pick_by_in_degree(delta_in);
            self.add_edge(v, w);
            StepKind::Beta
        } else {
            let w = self.pick_by_out_degree(delta_out);
            let v = self.add_node();
            self.add_edge(w, v);
            StepKind::Gamma
        }
    }

    fn add_node(&mut self) -> usize {
        self.in_degree.push(0);
        self.out_degree.push(0);
        self.graph.push_node()
    }

    fn add_edge(&mut self, v: usize, w: usize) {
        self.out_degree[v] += 1;
        self.in_degree[w] += 1;
        self.graph.push_edge(v, w);
    }

    // Inversion over a layout of total mass n + delta N: the first n units are
    // the edges (one unit per edge endpoint, so node w owns D(w) of them) and the
    // remaining delta N units split evenly across the nodes.
    fn pick_by_in_degree(&mut self, delta: f64) -> usize {
        self.pick(delta, |(_, t)| t)
    }

    fn pick_by_out_degree(&mut self, delta: f64) -> usize {
        self.pick(delta, |(s, _)| s)
    }

    fn pick(&mut self, delta: f64, endpoint: fn((usize, usize)) -> usize) -> usize {
        let n = self.graph.edge_count();
        let nodes = self.graph.node_count();
        let r = self.rng.random::<f64>() * (n as f64 + delta * nodes as f64);
        if r < n as f64 {
            endpoint(self.graph.edges()[(r as usize).min(n - 1)])
        } else {
            (((r - n as f64) / delta) as usize).min(nodes - 1)
        }
    }

    /// Current in-degrees, maintained incrementally.
    pub fn in_degrees(&self) -> &[usize] {
        &self.in_degree
    }

    pub fn out_degrees(&self) -> &[usize] {
        &self.out_degree
    }
}

/// Runs the process until the graph has `target_nodes` nodes.
pub fn generate(
    params: &GeneratorParams,
    target_nodes: usize,
    seed: u64,
) -> Result<DirectedGraph, GeneratorError> {
    if target_nodes == 0 {
        return Err(GeneratorError::NoNodes);
    }
    let mut process = BollobasProcess::new(*params, seed)?;
    while process.graph().node_count() < target_nodes {
        process.step();
    }
    Ok(process.into_graph())
}

//! Directed multigraphs, their 0/1 adjacency projection, degree statistics and
//! a discrete power-law tail estimator.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Read, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge {from}->{target} references a node outside 0..{node_count}")]
    EdgeOutOfRange {
        from: usize,
        target: usize,
        node_count: usize,
    },
    #[error("only {found} observations at or above x_min={x_min}, need at least {needed}")]
    InsufficientTail {
        found: usize,
        needed: usize,
        x_min: usize,
    },
    #[error("all {count} tail observations have degree {degree}; exponent is not identifiable")]
    DegenerateTail { count: usize, degree: usize },
    #[error("x_min must be at least 1")]
    InvalidCutoff,
    #[error("malformed matrix record: {0}")]
    CorruptMatrix(String),
    #[error("malformed edge list at line {line}: {reason}")]
    EdgeListParse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Minimum number of tail observations accepted by [`estimate_tail_exponent`].
pub const MIN_TAIL_OBSERVATIONS: usize = 10;

/// Default lower degree cutoff for tail estimation.
pub const DEFAULT_X_MIN: usize = 5;

/// A directed multigraph. Self-loops and parallel edges are kept; node
/// indices are dense and assigned in creation order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectedGraph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    pub fn with_nodes(node_count: usize) -> Self {
        Self {
            node_count,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(node_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if let Some(&(from, target)) = edges
            .iter()
            .find(|&&(s, t)| s >= node_count || t >= node_count)
        {
            return Err(GraphError::EdgeOutOfRange {
                from,
                target,
                node_count,
            });
        }
        Ok(Self { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Appends a node and returns its index.
    pub(crate) fn push_node(&mut self) -> usize {
        self.node_count += 1;
        self.node_count - 1
    }

    pub(crate) fn push_edge(&mut self, source: usize, target: usize) {
        debug_assert!(source < self.node_count && target < self.node_count);
        self.edges.push((source, target));
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(_, t) in &self.edges {
            deg[t] += 1;
        }
        deg
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(s, _) in &self.edges {
            deg[s] += 1;
        }
        deg
    }

    /// Collapses parallel edges into a simple 0/1 matrix; loops land on the diagonal.
    pub fn to_adjacency(&self) -> AdjacencyMatrix {
        let mut m = AdjacencyMatrix::zeros(self.node_count);
        for &(s, t) in &self.edges {
            m.set(s, t, true);
        }
        m
    }
}

/// Square 0/1 matrix; `get(i, j)` is true iff a directed edge i->j exists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacencyMatrix {
    size: usize,
    bits: Vec<bool>,
}

impl AdjacencyMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            bits: vec![false; size * size],
        }
    }

    /// Builds a matrix from row-major entries. Panics if the length is not `size * size`.
    pub fn from_row_major(size: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), size * size, "row-major length must be size^2");
        Self { size, bits }
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let size = rows.len();
        let mut bits = Vec::with_capacity(size * size);
        for row in rows {
            assert_eq!(row.len(), size, "matrix must be square");
            bits.extend(row.iter().map(|&b| b != 0));
        }
        Self { size, bits }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[i * self.size + j] = value;
    }

    /// Row-major entries.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Row-major flat indices of zero entries.
    pub fn zero_positions(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| (!b).then_some(k))
            .collect()
    }

    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let s = self.size;
        self.bits
            .iter()
            .enumerate()
            .filter_map(move |(k, &b)| b.then_some((k / s, k % s)))
    }

    /// True iff every 1 of `other` is also a 1 here.
    pub fn contains(&self, other: &AdjacencyMatrix) -> bool {
        self.size == other.size
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(&mine, &theirs)| mine || !theirs)
    }

    /// Flattened row-major 0.0/1.0 vector used as network input.
    pub fn to_input(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn write_input_into(&self, out: &mut [f64]) {
        for (o, &b) in out.iter_mut().zip(&self.bits) {
            *o = if b { 1.0 } else { 0.0 };
        }
    }

    /// Embeds the matrix in a larger one with `m` extra isolated nodes.
    pub fn add_unconnected_nodes(&self, m: usize) -> AdjacencyMatrix {
        let size = self.size + m;
        let mut out = AdjacencyMatrix::zeros(size);
        for i in 0..self.size {
            out.bits[i * size..i * size + self.size]
                .copy_from_slice(&self.bits[i * self.size..(i + 1) * self.size]);
        }
        out
    }

    /// Row-major bits packed MSB-first, `ceil(S^2 / 8)` bytes.
    pub fn packed_bits(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bits.len().div_ceil(8)];
        for (k, &b) in self.bits.iter().enumerate() {
            if b {
                out[k / 8] |= 0x80 >> (k % 8);
            }
        }
        out
    }

    pub fn from_packed_bits(size: usize, packed: &[u8]) -> Result<Self, GraphError> {
        let n = size * size;
        if packed.len() != n.div_ceil(8) {
            return Err(GraphError::CorruptMatrix(format!(
                "expected {} packed bytes for side {size}, got {}",
                n.div_ceil(8),
                packed.len()
            )));
        }
        let bits = (0..n)
            .map(|k| packed[k / 8] & (0x80 >> (k % 8)) != 0)
            .collect();
        Ok(Self { size, bits })
    }

    /// Binary record: little-endian u32 side, then the packed bits.
    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let size = u32::try_from(self.size)
            .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "matrix side exceeds u32"))?;
        w.write_all(&size.to_le_bytes())?;
        w.write_all(&self.packed_bits())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, GraphError> {
        let mut head = [0u8; 4];
        r.read_exact(&mut head).map_err(truncated)?;
        let size = u32::from_le_bytes(head) as usize;
        let mut packed = vec![0u8; (size * size).div_ceil(8)];
        r.read_exact(&mut packed).map_err(truncated)?;
        Self::from_packed_bits(size, &packed)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(4 + self.bits.len().div_ceil(8));
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    /// Parses a single matrix record; trailing bytes are rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GraphError> {
        let mut cursor = bytes;
        let m = Self::read_from(&mut cursor)?;
        if !cursor.is_empty() {
            return Err(GraphError::CorruptMatrix(format!(
                "{} trailing bytes after matrix record",
                cursor.len()
            )));
        }
        Ok(m)
    }

    /// One `src dst` line per edge, row-major order.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (i, j) in self.ones() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Parses `src dst` lines into a matrix of the declared side. Blank lines
    /// and lines starting with `#` are skipped.
    pub fn from_edge_list(size: usize, text: &str) -> Result<Self, GraphError> {
        let mut m = AdjacencyMatrix::zeros(size);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| GraphError::EdgeListParse {
                line: lineno + 1,
                reason,
            };
            let mut fields = line.split_whitespace();
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(bad("expected exactly two node indices".into()));
            };
            let src: usize = a.parse().map_err(|e| bad(format!("{a:?}: {e}")))?;
            let dst: usize = b.parse().map_err(|e| bad(format!("{b:?}: {e}")))?;
            if src >= size || dst >= size {
                return Err(bad(format!(
                    "edge {src} {dst} outside declared node count {size}"
                )));
            }
            m.set(src, dst, true);
        }
        Ok(m)
    }
}

fn truncated(e: io::Error) -> GraphError {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        GraphError::CorruptMatrix("truncated record".into())
    } else {
        GraphError::Io(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStatistics {
    pub in_degrees: Vec<usize>,
    pub out_degrees: Vec<usize>,
    pub in_histogram: BTreeMap<usize, usize>,
    pub out_histogram: BTreeMap<usize, usize>,
    /// `p_i`: fraction of nodes with in-degree `i`.
    pub in_proportions: BTreeMap<usize, f64>,
    /// `q_j`: fraction of nodes with out-degree `j`.
    pub out_proportions: BTreeMap<usize, f64>,
}

/// A loop counts once toward both the in- and out-degree of its node;
/// parallel edges count with multiplicity.
pub fn degree_statistics(g: &DirectedGraph) -> DegreeStatistics {
    let in_degrees = g.in_degrees();
    let out_degrees = g.out_degrees();
    let in_histogram = histogram(&in_degrees);
    let out_histogram = histogram(&out_degrees);
    let n = g.node_count() as f64;
    let proportions = |h: &BTreeMap<usize, usize>| {
        h.iter()
            .map(|(&d, &c)| (d, c as f64 / n))
            .collect::<BTreeMap<_, _>>()
    };
    DegreeStatistics {
        in_proportions: proportions(&in_histogram),
        out_proportions: proportions(&out_histogram),
        in_degrees,
        out_degrees,
        in_histogram,
        out_histogram,
    }
}

pub fn histogram(values: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

/// Discrete power-law exponent by the continuity-corrected maximum-likelihood
/// approximation `1 + n / sum(ln(d / (x_min - 1/2)))` over degrees `d >= x_min`.
pub fn estimate_tail_exponent(
    histogram: &BTreeMap<usize, usize>,
    x_min: usize,
) -> Result<f64, GraphError> {
    if x_min == 0 {
        return Err(GraphError::InvalidCutoff);
    }
    let shift = x_min as f64 - 0.5;
    let mut count = 0usize;
    let mut log_sum = 0.0;
    let mut distinct = 0usize;
    let mut seen_degree = 0;
    for (&d, &c) in histogram.range(x_min..) {
        if c == 0 {
            continue;
        }
        count += c;
        log_sum += c as f64 * (d as f64 / shift).ln();
        distinct += 1;
        seen_degree = d;
    }
    if count < MIN_TAIL_OBSERVATIONS {
        return Err(GraphError::InsufficientTail {
            found: count,
            needed: MIN_TAIL_OBSERVATIONS,
            x_min,
        });
    }
    if distinct == 1 {
        return Err(GraphError::DegenerateTail {
            count,
            degree: seen_degree,
        });
    }
    Ok(1.0 + count as f64 / log_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_small_matrix() {
        let g = AdjacencyMatrix::from_rows(&[&[0, 1], &[0, 0]]);
        let padded = g.add_unconnected_nodes(1);
        assert_eq!(
            padded,
            AdjacencyMatrix::from_rows(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]])
        );
        assert_eq!(g.add_unconnected_nodes(0), g);
    }

    #[test]
    fn padding_keeps_positions() {
        let mut g = AdjacencyMatrix::zeros(5);
        let ones = [(0, 0), (0, 4), (1, 2), (2, 3), (3, 1), (4, 0), (4, 4)];
        for &(i, j) in &ones {
            g.set(i, j, true);
        }
        let padded = g.add_unconnected_nodes(3);
        assert_eq!(padded.size(), 8);
        let got: Vec<_> = padded.ones().collect();
        assert_eq!(got, ones.to_vec());
    }

    #[test]
    fn degrees_with_loops_and_parallel_edges() {
        let g = DirectedGraph::from_edges(2, vec![(0, 1), (0, 1), (1, 1)]).unwrap();
        let s = degree_statistics(&g);
        assert_eq!(s.out_degrees, vec![2, 1]);
        assert_eq!(s.in_degrees, vec![0, 3]);
        let m = g.to_adjacency();
        assert_eq!(m, AdjacencyMatrix::from_rows(&[&[0, 1], &[0, 1]]));
    }

    #[test]
    fn empty_graph_statistics() {
        let s = degree_statistics(&DirectedGraph::with_nodes(3));
        assert_eq!(s.in_degrees, vec![0, 0, 0]);
        assert_eq!(s.in_proportions.get(&0), Some(&1.0));
        assert_eq!(s.out_proportions.get(&0), Some(&1.0));
    }

    #[test]
    fn three_cycle_is_regular() {
        let g = DirectedGraph::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        let s = degree_statistics(&g);
        assert!(s.in_degrees.iter().all(|&d| d == 1));
        assert!(s.out_degrees.iter().all(|&d| d == 1));
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(matches!(
            DirectedGraph::from_edges(2, vec![(0, 2)]),
            Err(GraphError::EdgeOutOfRange { .. })
        ));
    }

    #[test]
    fn degenerate_tails() {
        let mut h = BTreeMap::new();
        h.insert(1, 500);
        assert!(matches!(
            estimate_tail_exponent(&h, 5),
            Err(GraphError::InsufficientTail { found: 0, .. })
        ));
        h.insert(7, 50);
        assert!(matches!(
            estimate_tail_exponent(&h, 5),
            Err(GraphError::DegenerateTail { degree: 7, .. })
        ));
        assert!(matches!(
            estimate_tail_exponent(&h, 0),
            Err(GraphError::InvalidCutoff)
        ));
    }

    #[test]
    fn packed_layout_is_msb_first() {
        let m = AdjacencyMatrix::from_rows(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 1]]);
        assert_eq!(m.to_bytes(), vec![3, 0, 0, 0, 0b1000_0000, 0b1000_0000]);
    }

    #[test]
    fn truncated_matrix_record() {
        let bytes = AdjacencyMatrix::zeros(5).to_bytes();
        assert!(matches!(
            AdjacencyMatrix::from_bytes(&bytes[..bytes.len() - 1]),
            Err(GraphError::CorruptMatrix(_))
        ));
        let mut long = bytes.clone();
        long.push(0);
        assert!(AdjacencyMatrix::from_bytes(&long).is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let m = AdjacencyMatrix::from_edge_list(4, "# comment\n0 1\n\n3 3\n0 1\n").unwrap();
        assert_eq!(m.count_ones(), 2);
        assert!(m.get(0, 1) && m.get(3, 3));
        assert_eq!(m.to_edge_list(), "0 1\n3 3\n");
        assert!(matches!(
            AdjacencyMatrix::from_edge_list(3, "0 3\n"),
            Err(GraphError::EdgeListParse { line: 1, .. })
        ));
        assert!(AdjacencyMatrix::from_edge_list(3, "0 1 2\n").is_err());
    }
}

use proptest::prelude::*;
use scalefree::dataset::{
    self, all_subtypes, group_of, label_of, Dataset, GroupId, Provenance, Sample, SubtypeLabel,
};
use scalefree::generator::{
    delta_in_from_x, delta_out_from_x, generate, simplex_triples, x_in_from_delta, x_out_from_delta,
    GeneratorParams,
};
use scalefree::graph::AdjacencyMatrix;
use scalefree::mlp::{self, softmax, MlpModel, TrainConfig};
use scalefree::pipeline::{enumerate_candidates, filter_candidates, CandidateBudget, CandidateMode};

fn matrix(max_side: usize) -> impl Strategy<Value = AdjacencyMatrix> {
    (1..=max_side).prop_flat_map(|s| {
        prop::collection::vec(any::<bool>(), s * s).prop_map(move |bits| AdjacencyMatrix::from_row_major(s, bits))
    })
}

fn triple() -> impl Strategy<Value = (f64, f64, f64)> {
    (0..24usize).prop_map(|i| simplex_triples()[i])
}

fn params() -> impl Strategy<Value = GeneratorParams> {
    (triple(), 0.0..4.0f64, 0.0..4.0f64).prop_map(|((a, b, g), di, dout)| GeneratorParams::new(a, b, g, di, dout).unwrap())
}

proptest! {
    #[test]
    fn exponent_projection_is_idempotent(p in params()) {
        let x_in = x_in_from_delta(&p).unwrap();
        let x_out = x_out_from_delta(&p).unwrap();
        let di = delta_in_from_x(p.alpha, p.beta, p.gamma, x_in).unwrap();
        let dout = delta_out_from_x(p.alpha, p.beta, p.gamma, x_out).unwrap();
        prop_assert!((di - p.delta_in).abs() < 1e-12);
        prop_assert!((dout - p.delta_out).abs() < 1e-12);
        let q = GeneratorParams { delta_in: di, delta_out: dout, ..p };
        prop_assert!((x_in_from_delta(&q).unwrap() - x_in).abs() < 1e-12);
    }

    #[test]
    fn padding_preserves_links(m in matrix(6), extra in 0..4usize) {
        let padded = m.add_unconnected_nodes(extra);
        prop_assert_eq!(padded.size(), m.size() + extra);
        prop_assert_eq!(padded.count_ones(), m.count_ones());
        for (i, j) in m.ones() {
            prop_assert!(padded.get(i, j));
        }
    }

    #[test]
    fn matrix_encoding_round_trips(m in matrix(12)) {
        prop_assert_eq!(AdjacencyMatrix::from_bytes(&m.to_bytes()).unwrap(), m.clone());
        prop_assert_eq!(AdjacencyMatrix::from_edge_list(m.size(), &m.to_edge_list()).unwrap(), m);
    }

    #[test]
    fn softmax_ignores_constant_shift(z in prop::collection::vec(-30.0..30.0f64, 1..12), c in -100.0..100.0f64) {
        let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
        let (p, q) = (softmax(&z), softmax(&shifted));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn candidate_count_is_two_to_the_zeros(m in matrix(4)) {
        let zeros = m.zero_positions().len();
        prop_assume!(zeros <= 12);
        let stream = enumerate_candidates(&m, &CandidateBudget::default()).unwrap();
        prop_assert_eq!(stream.zero_positions(), zeros);
        let all: std::collections::BTreeSet<AdjacencyMatrix> = stream.collect();
        prop_assert_eq!(all.len(), 1usize << zeros);
        prop_assert!(all.iter().all(|c| c.contains(&m)));
    }

    #[test]
    fn sampled_candidates_are_distinct_supersets(m in matrix(5), max in 1..200usize, seed in any::<u64>()) {
        let budget = CandidateBudget { mode: CandidateMode::Sampled { max_candidates: max }, seed, ..CandidateBudget::default() };
        let got: Vec<AdjacencyMatrix> = enumerate_candidates(&m, &budget).unwrap().collect();
        let space = 1u128.checked_shl(m.zero_positions().len() as u32).unwrap_or(u128::MAX);
        prop_assert_eq!(got.len() as u128, (max as u128).min(space));
        let distinct: std::collections::BTreeSet<_> = got.iter().collect();
        prop_assert_eq!(distinct.len(), got.len());
        prop_assert!(got.iter().all(|c| c.contains(&m)));
    }

    #[test]
    fn label_mapping_is_a_bijection(i in 0..100usize) {
        let g = GroupId::new(i).unwrap();
        prop_assert_eq!(group_of(label_of(g)), g);
        let l = all_subtypes()[i];
        prop_assert_eq!(label_of(group_of(l)), l);
        prop_assert_eq!(SubtypeLabel::new(l.x_in(), l.x_out()).unwrap(), l);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generator_conserves_degree(p in params(), nodes in 1..120usize, seed in any::<u64>()) {
        let g = generate(&p, nodes, seed).unwrap();
        prop_assert_eq!(g.node_count(), nodes);
        let e = g.edge_count();
        prop_assert_eq!(g.in_degrees().iter().sum::<usize>(), e);
        prop_assert_eq!(g.out_degrees().iter().sum::<usize>(), e);
        prop_assert!(e >= nodes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generation_is_deterministic(p in params(), nodes in 1..300usize, seed in any::<u64>()) {
        let a = generate(&p, nodes, seed).unwrap();
        let b = generate(&p, nodes, seed).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn dataset_encoding_round_trips(
        side in 1..7usize,
        labels in prop::collection::vec((0..100u16, any::<u64>()), 0..10),
        p in params(),
    ) {
        let samples = labels
            .iter()
            .map(|&(label, seed)| Sample {
                matrix: generate(&p, side, seed).unwrap().to_adjacency(),
                label,
                provenance: Provenance { seed, params: p, subtype: all_subtypes()[label as usize] },
            })
            .collect();
        let ds = Dataset::new(side, 100, samples).unwrap();
        let bytes = dataset::encode_dataset(&ds);
        prop_assert_eq!(dataset::decode_dataset(&bytes).unwrap(), ds);
    }

    #[test]
    fn acceptance_shrinks_as_threshold_rises(m in matrix(3), seed in any::<u64>(), lo in 0.05..0.9f64, gap in 0.0..0.09f64) {
        prop_assume!(m.zero_positions().len() <= 9);
        let ann2 = mlp::build_ann2(m.size(), seed);
        let all = || enumerate_candidates(&m, &CandidateBudget::default()).unwrap();
        let (low, _) = filter_candidates(&ann2, all(), &m, lo).unwrap();
        let (high, _) = filter_candidates(&ann2, all(), &m, lo + gap).unwrap();
        prop_assert!(high.len() <= low.len());
        prop_assert!(high.iter().all(|h| low.iter().any(|l| l.matrix == h.matrix)));
    }

    #[test]
    fn training_is_deterministic(seed in any::<u64>(), rows in 4..20usize) {
        let x = ndarray::Array2::from_shape_fn((rows, 9), |(i, j)| ((i * 7 + j * 3 + seed as usize) % 5) as f64 / 4.0);
        let y: Vec<usize> = (0..rows).map(|i| i % 2).collect();
        let cfg = TrainConfig { epochs: 3, batch_size: 4, seed, ..TrainConfig::default() };
        let mut a = MlpModel::new(&[9, 5, 2], seed);
        let mut b = a.clone();
        let ha = mlp::train(&mut a, x.view(), &y, &cfg).unwrap();
        let hb = mlp::train(&mut b, x.view(), &y, &cfg).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(ha, hb);
    }
}

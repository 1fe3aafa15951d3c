#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use scalefree::rng::StreamRng;

/// Inverse-CDF sampler for the discrete law P(k) ∝ k^-exponent on 1..=k_max.
/// Mass beyond k_max (about k_max^(1-exponent)) is dropped.
pub struct DiscretePowerLaw {
    cdf: Vec<f64>,
}

impl DiscretePowerLaw {
    pub fn new(exponent: f64, k_max: usize) -> Self {
        let weights: Vec<f64> = (1..=k_max).map(|k| (k as f64).powf(-exponent)).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Self { cdf }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> usize {
        let u: f64 = rng.random();
        (self.cdf.partition_point(|&c| c < u) + 1).min(self.cdf.len())
    }

    pub fn histogram(&self, rng: &mut StreamRng, draws: usize) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for _ in 0..draws {
            *h.entry(self.sample(rng)).or_insert(0) += 1;
        }
        h
    }
}

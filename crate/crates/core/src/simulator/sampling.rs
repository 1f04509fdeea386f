use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::StateVector;
use crate::graphs::CutAssignment;

/// `n_samples` i.i.d. basis-state indices drawn from `probs` (which need
/// not be normalized).
pub fn sample_from_probabilities<R: Rng + ?Sized>(
    probs: &[f64],
    n_samples: usize,
    rng: &mut R,
) -> Vec<usize> {
    let dist = WeightedIndex::new(probs).expect("probabilities are finite with positive mass");
    (0..n_samples).map(|_| dist.sample(rng)).collect()
}

/// Computational-basis measurement outcomes of `s`, as basis indices.
pub fn measure_samples<R: Rng + ?Sized>(s: &StateVector, n_samples: usize, rng: &mut R) -> Vec<usize> {
    sample_from_probabilities(&s.probabilities(), n_samples, rng)
}

pub fn histogram(samples: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &x in samples {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// Probability of measuring one of `optima`.
pub fn overlap_with_optima(s: &StateVector, optima: &[CutAssignment]) -> f64 {
    let mut idx: Vec<usize> = optima.iter().map(CutAssignment::index).collect();
    idx.sort_unstable();
    idx.dedup();
    idx.iter().map(|&i| s.amplitudes()[i].norm_sqr()).sum()
}

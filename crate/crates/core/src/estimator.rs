//! Objective estimates from measurement samples or amplitudes.

use serde::{Deserialize, Serialize};

use crate::graphs::{brute_force_maxcut, Graph, GraphError};
use crate::simulator::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleEstimate {
    pub mean_cut: f64,
    pub n_samples: usize,
    /// Sample standard deviation over `√n_samples`.
    pub std_error: f64,
}

/// Mean cut over measured basis indices.
pub fn estimate_cut(samples: &[usize], g: &Graph) -> SampleEstimate {
    let n = samples.len();
    if n == 0 {
        return SampleEstimate {
            mean_cut: 0.0,
            n_samples: 0,
            std_error: 0.0,
        };
    }
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for &s in samples {
        let v = g.cut_of_index(s) as f64;
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / n as f64;
    let var = if n > 1 {
        ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0)
    } else {
        0.0
    };
    SampleEstimate {
        mean_cut: mean,
        n_samples: n,
        std_error: (var / n as f64).sqrt(),
    }
}

/// `Σ_(i,j) (1 − ⟨Z_i Z_j⟩)/2` from the amplitudes.
pub fn exact_cut_expectation(s: &StateVector, g: &Graph) -> f64 {
    let probs = s.probabilities();
    g.edges()
        .iter()
        .map(|&(i, j)| {
            let zz: f64 = probs
                .iter()
                .enumerate()
                .map(|(k, p)| if ((k >> i) ^ (k >> j)) & 1 == 0 { *p } else { -*p })
                .sum();
            (1.0 - zz) / 2.0
        })
        .sum()
}

/// `est / k_max`, solving Max-Cut by enumeration.
pub fn approximation_ratio(est: f64, g: &Graph) -> Result<f64, GraphError> {
    let k_max = brute_force_maxcut(g)?.k_max;
    Ok(if k_max == 0 { 1.0 } else { est / k_max as f64 })
}

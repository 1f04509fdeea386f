//! Projected hardware wall-clock time of running the QAOA loop.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimizer::InstanceSolveResult;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("hardware times must be positive and finite")]
    BadTimes,
    #[error("no costs to aggregate")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Seconds. Preparation and measurement only enter through their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareTimes {
    pub prep_plus_measure: f64,
    pub gate_time: f64,
}

impl Default for HardwareTimes {
    fn default() -> Self {
        Self {
            prep_plus_measure: 1e-6,
            gate_time: 10e-9,
        }
    }
}

impl HardwareTimes {
    pub fn new(prep_plus_measure: f64, gate_time: f64) -> Result<Self, CostError> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !ok(prep_plus_measure) || !ok(gate_time) {
            return Err(CostError::BadTimes);
        }
        Ok(Self {
            prep_plus_measure,
            gate_time,
        })
    }
}

/// One coherent shot: preparation, `depth` gate cycles, measurement.
pub fn single_repetition_time(depth: usize, hw: &HardwareTimes) -> f64 {
    hw.prep_plus_measure + depth as f64 * hw.gate_time
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceCost {
    pub depth: usize,
    pub total_repetitions: u64,
    pub wall_time: f64,
}

pub fn repetition_cost(total_evals: u64, n_samples: u64, depth: usize, hw: &HardwareTimes) -> InstanceCost {
    let total_repetitions = total_evals * n_samples;
    InstanceCost {
        depth,
        total_repetitions,
        wall_time: total_repetitions as f64 * single_repetition_time(depth, hw),
    }
}

/// Every function evaluation of every restart costs `n_samples` shots.
pub fn instance_wall_time(solve: &InstanceSolveResult, depth: usize, hw: &HardwareTimes) -> InstanceCost {
    repetition_cost(solve.total_evals as u64, solve.n_samples as u64, depth, hw)
}

/// Evaluations per run that would produce `wall_time` seconds.
pub fn evals_per_run_for(wall_time: f64, runs: usize, n_samples: usize, depth: usize, hw: &HardwareTimes) -> f64 {
    wall_time / (runs as f64 * n_samples as f64 * single_repetition_time(depth, hw))
}

/// Mean and standard deviation of the mean (sample variance with `n − 1`).
pub fn aggregate(wall_times: &[f64]) -> Result<(f64, f64), CostError> {
    let n = wall_times.len();
    if n == 0 {
        return Err(CostError::Empty);
    }
    let mean = wall_times.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Ok((mean, 0.0));
    }
    let var = wall_times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, (var / n as f64).sqrt()))
}

/// One line of the timing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: usize,
    pub mean_seconds: f64,
    pub sdom_seconds: f64,
    pub n_instances: usize,
}

impl CostRow {
    pub fn from_costs(n: usize, p: usize, costs: &[InstanceCost]) -> Result<Self, CostError> {
        let times: Vec<f64> = costs.iter().map(|c| c.wall_time).collect();
        let (mean_seconds, sdom_seconds) = aggregate(&times)?;
        Ok(Self {
            n,
            p,
            mean_seconds,
            sdom_seconds,
            n_instances: costs.len(),
        })
    }
}

/// CSV with header `N,p,mean_seconds,sdom_seconds,n_instances`.
pub fn write_cost_csv(rows: &[CostRow]) -> Result<String, CostError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CostError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_cost_csv(text: &str) -> Result<Vec<CostRow>, CostError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_times() {
        let hw = HardwareTimes::default();
        assert!((single_repetition_time(31, &hw) - 1.31e-6).abs() < 1e-18);
        assert_eq!(single_repetition_time(0, &hw), 1e-6);
        assert!((single_repetition_time(100, &hw) - 2e-6).abs() < 1e-18);
    }

    #[test]
    fn wall_time_arithmetic() {
        let hw = HardwareTimes::default();
        let c = repetition_cost(20 * 300, 10_000, 31, &hw);
        assert_eq!(c.total_repetitions, 60_000_000);
        assert!((c.wall_time - 78.6).abs() < 1e-9);
        let one = repetition_cost(1, 1, 31, &hw);
        assert_eq!(one.wall_time, single_repetition_time(31, &hw));
    }

    #[test]
    fn back_solve() {
        let e = evals_per_run_for(100.6, 20, 10_000, 31, &HardwareTimes::default());
        assert!((e - 383.969_465_648_854_9).abs() < 1e-9, "{e}");
    }

    #[test]
    fn aggregation() {
        assert_eq!(aggregate(&[3.0, 3.0, 3.0]).unwrap(), (3.0, 0.0));
        let (m, s) = aggregate(&[1.0, 4.0]).unwrap();
        assert_eq!(m, 2.5);
        assert!((s - 1.5).abs() < 1e-15);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            CostRow { n: 8, p: 4, mean_seconds: 100.6, sdom_seconds: 0.7, n_instances: 40 },
            CostRow { n: 10, p: 4, mean_seconds: 102.8, sdom_seconds: 0.6, n_instances: 40 },
        ];
        let text = write_cost_csv(&rows).unwrap();
        assert!(text.starts_with("N,p,mean_seconds,sdom_seconds,n_instances\n8,4,100.6,0.7,40\n"));
        assert_eq!(read_cost_csv(&text).unwrap(), rows);
    }
}

//! Batch drivers: size sweeps with cost projection, and the noise
//! realization convergence study.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::QaoaParams;
use crate::costmodel::{instance_wall_time, CostError, CostRow, HardwareTimes};
use crate::graphs::{brute_force_maxcut, gen_random_3regular, Graph, GraphError};
use crate::optimizer::{solve_instance, Instance, NmConfig, Pipeline, SolveError, SolveOptions};
use crate::seed::derive_seed;
use crate::simulator::{run_compiled_ensemble, CompiledSchedule, NoiseParams, Register, SimError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

/// Everything a sweep needs. Defaults are the hardware and optimizer
/// constants of the benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub sizes: Vec<usize>,
    pub p: usize,
    pub n_instances: usize,
    pub nm: NmConfig,
    pub pipeline: Pipeline,
    /// `None` simulates an ideal device.
    pub noise: Option<NoiseParams>,
    pub realizations: usize,
    pub hardware: HardwareTimes,
    pub master_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sizes: vec![8, 10, 12, 14, 16, 20],
            p: 4,
            n_instances: 40,
            nm: NmConfig::default(),
            pipeline: Pipeline::Sampled,
            noise: Some(NoiseParams::default_hardware()),
            realizations: 384,
            hardware: HardwareTimes::default(),
            master_seed: 0,
        }
    }
}

/// Keys accepted by [`PipelineConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "sizes",
    "p",
    "instances",
    "restarts",
    "samples",
    "max_updates",
    "stall_per_layer",
    "reflection",
    "expansion",
    "contraction",
    "shrink",
    "initial_step",
    "pipeline",
    "noise",
    "t1",
    "t2",
    "gate_time",
    "prep_measure",
    "realizations",
    "seed",
];

impl PipelineConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let bad = || PipelineError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        fn num<T: std::str::FromStr>(v: &str, bad: impl Fn() -> PipelineError) -> Result<T, PipelineError> {
            v.trim().parse().map_err(|_| bad())
        }
        let noise = |c: &mut Self| *c.noise.get_or_insert_with(NoiseParams::default_hardware);
        match key {
            "sizes" => {
                self.sizes = value
                    .split(',')
                    .map(|s| num(s, bad))
                    .collect::<Result<_, _>>()?;
            }
            "p" => self.p = num(value, bad)?,
            "instances" => self.n_instances = num(value, bad)?,
            "restarts" => self.nm.n_restarts = num(value, bad)?,
            "samples" => self.nm.n_samples = num(value, bad)?,
            "max_updates" => self.nm.max_updates = num(value, bad)?,
            "stall_per_layer" => self.nm.stall_per_layer = num(value, bad)?,
            "reflection" => self.nm.reflection = num(value, bad)?,
            "expansion" => self.nm.expansion = num(value, bad)?,
            "contraction" => self.nm.contraction = num(value, bad)?,
            "shrink" => self.nm.shrink = num(value, bad)?,
            "initial_step" => self.nm.initial_step = num(value, bad)?,
            "pipeline" => {
                self.pipeline = match value.trim() {
                    "exact" => Pipeline::Exact,
                    "sampled" => Pipeline::Sampled,
                    _ => return Err(bad()),
                }
            }
            "noise" => match value.trim() {
                "on" | "true" => self.noise = Some(noise(self)),
                "off" | "false" => self.noise = None,
                _ => return Err(bad()),
            },
            "t1" => {
                let mut np = noise(self);
                np.t1 = num(value, bad)?;
                self.noise = Some(np);
            }
            "t2" => {
                let mut np = noise(self);
                np.t2 = num(value, bad)?;
                self.noise = Some(np);
            }
            "gate_time" => {
                let t: f64 = num(value, bad)?;
                self.hardware.gate_time = t;
                if let Some(np) = self.noise.as_mut() {
                    np.gate_time = t;
                }
            }
            "prep_measure" => self.hardware.prep_plus_measure = num(value, bad)?,
            "realizations" => self.realizations = num(value, bad)?,
            "seed" => self.master_seed = num(value, bad)?,
            _ => return Err(PipelineError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), PipelineError> {
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PipelineError::Config {
                    line: k + 1,
                    msg: "expected key = value".into(),
                });
            };
            self.set(key.trim(), value.trim()).map_err(|e| PipelineError::Config {
                line: k + 1,
                msg: e.to_string(),
            })?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::Config { line: 0, msg });
        self.nm.validate().map_err(|e| PipelineError::Config {
            line: 0,
            msg: e.to_string(),
        })?;
        if let Some(np) = self.noise {
            NoiseParams::new(np.t1, np.t2, np.gate_time)?;
        }
        HardwareTimes::new(self.hardware.prep_plus_measure, self.hardware.gate_time)?;
        if self.p == 0 || self.n_instances == 0 || self.realizations == 0 {
            return fail("p, instances and realizations must be positive".into());
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 4 || n % 2 == 1) {
            return fail(format!("size {n} admits no cubic graph"));
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            pipeline: self.pipeline,
            noise: self.noise,
            realizations: self.realizations,
            grid: None,
        }
    }

    /// `key = value` text that reproduces this configuration.
    pub fn to_text(&self) -> String {
        let sizes: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
        let mut out = format!(
            "sizes = {}\np = {}\ninstances = {}\nrestarts = {}\nsamples = {}\nmax_updates = {}\n\
             stall_per_layer = {}\nreflection = {}\nexpansion = {}\ncontraction = {}\nshrink = {}\n\
             initial_step = {}\npipeline = {}\n",
            sizes.join(","),
            self.p,
            self.n_instances,
            self.nm.n_restarts,
            self.nm.n_samples,
            self.nm.max_updates,
            self.nm.stall_per_layer,
            self.nm.reflection,
            self.nm.expansion,
            self.nm.contraction,
            self.nm.shrink,
            self.nm.initial_step,
            match self.pipeline {
                Pipeline::Exact => "exact",
                Pipeline::Sampled => "sampled",
            },
        );
        match self.noise {
            Some(np) => out.push_str(&format!("noise = on\nt1 = {}\nt2 = {}\n", np.t1, np.t2)),
            None => out.push_str("noise = off\n"),
        }
        out.push_str(&format!(
            "gate_time = {}\nprep_measure = {}\nrealizations = {}\nseed = {}\n",
            self.hardware.gate_time, self.hardware.prep_plus_measure, self.realizations, self.master_seed
        ));
        out
    }
}

/// Instance `index` of size `n` in a sweep.
pub fn sweep_instance(master_seed: u64, n: usize, index: usize) -> Result<Graph, GraphError> {
    gen_random_3regular(n, derive_seed(master_seed, &[0x67, n as u64, index as u64]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub index: usize,
    pub depth: usize,
    pub total_evals: usize,
    pub wall_time: f64,
    pub approximation_ratio: f64,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub rows: Vec<CostRow>,
    pub instances: Vec<InstanceRecord>,
}

/// Solves `n_instances` random cubic graphs per size and projects each
/// solve to hardware wall time. Instances run in parallel and are merged
/// in instance order.
pub fn bench(cfg: &PipelineConfig) -> Result<BenchResult, PipelineError> {
    cfg.validate()?;
    let opts = cfg.solve_options();
    let mut rows = Vec::new();
    let mut instances = Vec::new();
    for &n in &cfg.sizes {
        let records: Vec<InstanceRecord> = (0..cfg.n_instances)
            .into_par_iter()
            .map(|i| {
                let g = sweep_instance(cfg.master_seed, n, i)?;
                let seed = derive_seed(cfg.master_seed, &[0x73, n as u64, i as u64]);
                let r = solve_instance(&g, cfg.p, &cfg.nm, &opts, seed)?;
                let cost = instance_wall_time(&r, r.depth, &cfg.hardware);
                Ok(InstanceRecord {
                    n,
                    index: i,
                    depth: r.depth,
                    total_evals: r.total_evals,
                    wall_time: cost.wall_time,
                    approximation_ratio: r.approximation_ratio,
                    overlap: r.overlap,
                })
            })
            .collect::<Result<_, PipelineError>>()?;
        let times: Vec<f64> = records.iter().map(|r| r.wall_time).collect();
        let (mean_seconds, sdom_seconds) = crate::costmodel::aggregate(&times)?;
        rows.push(CostRow {
            n,
            p: cfg.p,
            mean_seconds,
            sdom_seconds,
            n_instances: records.len(),
        });
        instances.extend(records);
    }
    Ok(BenchResult { rows, instances })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCurve {
    /// T2 / T_G.
    pub coherence_ratio: f64,
    pub seed: u64,
    /// Approximation ratio averaged over the first `r + 1` realizations.
    pub running_mean: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub coherence_ratio: f64,
    /// Final running mean of each seed.
    pub finals: Vec<f64>,
    /// Largest minus smallest final value.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub realizations: usize,
    pub curves: Vec<ConvergenceCurve>,
    pub plateaus: Vec<Plateau>,
}

impl ConvergenceReport {
    /// Columns `coherence_ratio,seed,R,running_mean_ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("coherence_ratio,seed,R,running_mean_ratio\n");
        for c in &self.curves {
            for (r, v) in c.running_mean.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", c.coherence_ratio, c.seed, r + 1, v));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Running mean of the per-realization approximation ratio at fixed
/// parameters, for each coherence ratio `T2/T_G` (with `T1 = 2·T2`) and
/// each seed.
pub fn convergence_study(
    g: &Graph,
    params: &QaoaParams,
    coherence_ratios: &[f64],
    seeds: &[u64],
    realizations: usize,
    gate_time: f64,
) -> Result<ConvergenceReport, PipelineError> {
    let k_max = brute_force_maxcut(g)?.k_max.max(1) as f64;
    let inst = Instance::new(g, params.p(), None, 0)?;
    let c = crate::circuit::build_qaoa_circuit(g, params);
    let compiled = CompiledSchedule::new(&inst.schedule, &c, Register::Logical)?;
    let mut curves = Vec::new();
    let mut plateaus = Vec::new();
    for &ratio in coherence_ratios {
        let np = NoiseParams::from_coherence_ratio(ratio, gate_time)?;
        let mut finals = Vec::new();
        for &seed in seeds {
            let e = run_compiled_ensemble(&compiled, Some(&np), realizations, seed, Some(&inst.cut_table))?;
            let mut sum = 0.0;
            let running_mean: Vec<f64> = e
                .per_realization
                .iter()
                .enumerate()
                .map(|(r, v)| {
                    sum += v / k_max;
                    sum / (r + 1) as f64
                })
                .collect();
            finals.push(*running_mean.last().expect("at least one realization"));
            curves.push(ConvergenceCurve {
                coherence_ratio: ratio,
                seed,
                running_mean,
            });
        }
        let spread = finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - finals.iter().cloned().fold(f64::INFINITY, f64::min);
        plateaus.push(Plateau {
            coherence_ratio: ratio,
            finals,
            spread,
        });
    }
    Ok(ConvergenceReport {
        realizations,
        curves,
        plateaus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_hardware_constants() {
        let c = PipelineConfig::default();
        assert_eq!(c.n_instances, 40);
        assert_eq!(c.realizations, 384);
        assert_eq!(c.nm.n_restarts, 20);
        assert_eq!(c.nm.n_samples, 10_000);
        let np = c.noise.unwrap();
        assert_eq!((np.t1, np.t2, np.gate_time), (200e-6, 100e-6, 10e-9));
        assert_eq!(c.hardware.prep_plus_measure, 1e-6);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn config_text_round_trip() {
        let mut c = PipelineConfig::default();
        c.apply_text("# sweep\nsizes = 8, 10\np = 2 # layers\nnoise = off\nseed = 17\npipeline = exact\n")
            .unwrap();
        assert_eq!(c.sizes, vec![8, 10]);
        assert_eq!(c.p, 2);
        assert_eq!(c.noise, None);
        assert_eq!(c.pipeline, Pipeline::Exact);
        let mut d = PipelineConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn config_errors() {
        let mut c = PipelineConfig::default();
        assert!(matches!(c.apply_text("bogus = 1"), Err(PipelineError::Config { line: 1, .. })));
        assert!(c.apply_text("p = x").is_err());
        assert!(c.apply_text("just words").is_err());
        assert!(PipelineConfig::default().apply_text("sizes = 7").is_err());
        assert!(PipelineConfig::default().apply_text("t2 = 1.0\nt1 = 0.1").is_err());
        for key in CONFIG_KEYS {
            // every advertised key is accepted by set()
            let mut c = PipelineConfig::default();
            let v = match *key {
                "sizes" => "8",
                "pipeline" => "exact",
                "noise" => "on",
                _ => "1",
            };
            assert!(c.set(key, v).is_ok(), "{key}");
        }
    }

    #[test]
    fn sweep_instances_are_cubic_and_stable() {
        let a = sweep_instance(3, 10, 4).unwrap();
        assert!(a.is_regular(3));
        assert_eq!(a, sweep_instance(3, 10, 4).unwrap());
        assert_ne!(a, sweep_instance(3, 10, 5).unwrap());
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{nelder_mead, random_initial_simplex, NmConfig, NmError, RunRecord};
use crate::circuit::{build_qaoa_circuit, QaoaParams};
use crate::estimator::estimate_cut;
use crate::graphs::{brute_force_maxcut, Graph, GraphError};
use crate::scheduler::{choose_grid, schedule, scheduled_depth, GridTopology, Schedule, ScheduleError};
use crate::seed::derive_seed;
use crate::simulator::{
    run_compiled_ensemble, sample_from_probabilities, CompiledSchedule, NoiseParams, Register,
    SimError,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Optimizer(#[from] NmError),
    #[error("p must be at least 1")]
    ZeroLayers,
}

/// How the optimizer sees the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Exact `⟨cut⟩` of the (ensemble-averaged) final state.
    Exact,
    /// Mean cut over `n_samples` measurement shots, as on hardware.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub pipeline: Pipeline,
    /// `None` for an ideal device.
    pub noise: Option<NoiseParams>,
    /// Noise realizations per objective evaluation.
    pub realizations: usize,
    /// Defaults to the smallest square grid holding the instance.
    pub grid: Option<GridTopology>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            pipeline: Pipeline::Sampled,
            noise: Some(NoiseParams::default_hardware()),
            realizations: 384,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSolveResult {
    pub n: usize,
    pub p: usize,
    pub k_max: usize,
    pub depth: usize,
    pub n_samples: usize,
    pub best_run: usize,
    pub best_params: QaoaParams,
    /// Objective value of the best vertex as the optimizer saw it.
    pub best_value: f64,
    /// Exact `⟨cut⟩` of the final noisy state at the best parameters.
    pub final_cut: f64,
    pub approximation_ratio: f64,
    /// Probability of measuring an optimal cut at the best parameters.
    pub overlap: f64,
    /// Function evaluations summed over all restarts.
    pub total_evals: usize,
    pub runs: Vec<RunRecord>,
}

impl InstanceSolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }
}

/// The circuit-independent part of an instance: its schedule and the
/// diagonal of the cost operator.
pub struct Instance<'a> {
    pub graph: &'a Graph,
    pub p: usize,
    pub schedule: Schedule,
    pub cut_table: Vec<f64>,
}

impl<'a> Instance<'a> {
    pub fn new(g: &'a Graph, p: usize, grid: Option<GridTopology>, seed: u64) -> Result<Self, SolveError> {
        if p == 0 {
            return Err(SolveError::ZeroLayers);
        }
        let t = grid.unwrap_or_else(|| choose_grid(g.n()));
        // gate ids and dependencies do not depend on the angles
        let shape = build_qaoa_circuit(g, &QaoaParams::zeros(p));
        let schedule = schedule(&shape, t, seed)?;
        Ok(Self {
            graph: g,
            p,
            schedule,
            cut_table: g.cut_table(),
        })
    }

    /// Ensemble-averaged outcome distribution at `params`.
    pub fn distribution(
        &self,
        params: &QaoaParams,
        noise: Option<&NoiseParams>,
        realizations: usize,
        seed: u64,
    ) -> Result<Vec<f64>, SolveError> {
        let c = build_qaoa_circuit(self.graph, params);
        let compiled = CompiledSchedule::new(&self.schedule, &c, Register::Logical)?;
        let r = if noise.is_some() { realizations } else { 1 };
        Ok(run_compiled_ensemble(&compiled, noise, r, seed, None)?.probabilities)
    }

    pub fn expected_cut(&self, probs: &[f64]) -> f64 {
        probs.iter().zip(&self.cut_table).map(|(p, c)| p * c).sum()
    }
}

/// Multi-start Nelder–Mead on one instance. Run `k` uses seeds derived from
/// `(master_seed, k)` only, so runs can execute in any order.
pub fn solve_instance(
    g: &Graph,
    p: usize,
    cfg: &NmConfig,
    opts: &SolveOptions,
    master_seed: u64,
) -> Result<InstanceSolveResult, SolveError> {
    cfg.validate()?;
    let sol = brute_force_maxcut(g)?;
    let inst = Instance::new(g, p, opts.grid, derive_seed(master_seed, &[0]))?;
    let noise = opts.noise.filter(|np| !np.is_noiseless());

    let runs: Vec<RunRecord> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|k| {
            let run_seed = derive_seed(master_seed, &[1, k as u64]);
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
            let simplex = random_initial_simplex(p, cfg.initial_step, &mut rng);
            let mut n_eval = 0u64;
            let mut failure = None;
            let record = nelder_mead(
                |x| {
                    let eval_seed = derive_seed(run_seed, &[n_eval]);
                    n_eval += 1;
                    let params = QaoaParams::from_flat(x).expect("simplex vertices are finite");
                    match evaluate(&inst, &params, noise.as_ref(), opts, cfg.n_samples, eval_seed) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NEG_INFINITY
                        }
                    }
                },
                simplex,
                cfg,
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok(record),
            }
        })
        .collect::<Result<_, SolveError>>()?;

    let best_run = (0..runs.len())
        .max_by(|&a, &b| runs[a].best_value.total_cmp(&runs[b].best_value).then(b.cmp(&a)))
        .expect("at least one restart");
    let best_params = QaoaParams::from_flat(&runs[best_run].best_point).expect("finite");
    let probs = inst.distribution(
        &best_params,
        noise.as_ref(),
        opts.realizations,
        derive_seed(master_seed, &[2]),
    )?;
    let final_cut = inst.expected_cut(&probs);
    let overlap = sol.optimal_indices().iter().map(|&i| probs[i]).sum();
    Ok(InstanceSolveResult {
        n: g.n(),
        p,
        k_max: sol.k_max,
        depth: scheduled_depth(&inst.schedule),
        n_samples: cfg.n_samples,
        best_run,
        best_value: runs[best_run].best_value,
        best_params,
        final_cut,
        approximation_ratio: if sol.k_max == 0 { 1.0 } else { final_cut / sol.k_max as f64 },
        overlap,
        total_evals: runs.iter().map(|r| r.n_function_evals).sum(),
        runs,
    })
}

fn evaluate(
    inst: &Instance,
    params: &QaoaParams,
    noise: Option<&NoiseParams>,
    opts: &SolveOptions,
    n_samples: usize,
    seed: u64,
) -> Result<f64, SolveError> {
    let probs = inst.distribution(params, noise, opts.realizations, seed)?;
    Ok(match opts.pipeline {
        Pipeline::Exact => inst.expected_cut(&probs),
        Pipeline::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[u64::MAX]));
            let shots = sample_from_probabilities(&probs, n_samples, &mut rng);
            estimate_cut(&shots, inst.graph).mean_cut
        }
    })
}

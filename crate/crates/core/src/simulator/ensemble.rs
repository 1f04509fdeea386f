use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_noise_op, NoiseParams, SimError, StateVector};
use crate::circuit::{Gate, LogicalCircuit};
use crate::scheduler::{Entry, Schedule};

/// Which qubits the replay keeps in the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Register {
    /// One slot per logical qubit. SWAPs touching an empty site only move
    /// the slot; the state has `2^N` amplitudes whatever the grid size.
    Logical,
    /// One qubit per physical site, empty sites start in `|0⟩`.
    FullGrid,
}

#[derive(Debug, Clone)]
struct Cycle {
    gates: Vec<Gate>,
    /// Register qubits receiving a noise step after the cycle.
    noisy: Vec<usize>,
}

/// A schedule lowered to register operations, reusable across
/// realizations.
#[derive(Debug, Clone)]
pub struct CompiledSchedule {
    n_logical: usize,
    width: usize,
    plus: Vec<usize>,
    cycles: Vec<Cycle>,
    /// Register qubit holding each logical qubit at the end.
    final_qubit: Vec<usize>,
}

impl CompiledSchedule {
    /// Lowers `s`, checking that each gate runs on the sites that hold
    /// its logical qubits. Adjacency is not checked here.
    pub fn new(s: &Schedule, c: &LogicalCircuit, register: Register) -> Result<Self, SimError> {
        let invalid = |msg: String| Err(SimError::InvalidSchedule(msg));
        let n = c.n_qubits();
        let m = s.sites();
        let site_of = s
            .placement
            .logical_to_site(n)
            .map_err(|e| SimError::InvalidSchedule(e.to_string()))?;
        let body = c.body();

        // logical occupant of every site, and register qubit for every site
        let mut occupant = s.placement.0.clone();
        let mut qubit_at: Vec<Option<usize>> = match register {
            Register::Logical => occupant.clone(),
            Register::FullGrid => (0..m).map(Some).collect(),
        };
        let width = match register {
            Register::Logical => n,
            Register::FullGrid => m,
        };
        let plus = match register {
            Register::Logical => (0..n).collect(),
            Register::FullGrid => site_of.clone(),
        };

        let mut cycles = Vec::with_capacity(s.cycles.len());
        for (k, ops) in s.cycles.iter().enumerate() {
            let mut gates = Vec::new();
            let mut used = vec![false; m];
            let mut swaps = Vec::new();
            for op in ops {
                for &site in &op.sites {
                    if site >= m || used[site] {
                        return invalid(format!("cycle {k}: site {site} out of range or reused"));
                    }
                    used[site] = true;
                }
                match op.entry {
                    Entry::Alg(id) => {
                        let Some(gate) = (id as usize).checked_sub(1).and_then(|i| body.get(i))
                        else {
                            return invalid(format!("cycle {k}: unknown gate {id}"));
                        };
                        let mut want = gate.qubits();
                        want.sort_unstable();
                        let mut have: Vec<usize> =
                            op.sites.iter().filter_map(|&s| occupant[s]).collect();
                        have.sort_unstable();
                        if have != want || op.sites.len() != want.len() {
                            return invalid(format!(
                                "cycle {k}: gate {id} does not sit on its qubits"
                            ));
                        }
                        let map: Vec<usize> = (0..n)
                            .map(|q| {
                                op.sites
                                    .iter()
                                    .find(|&&s| occupant[s] == Some(q))
                                    .and_then(|&s| qubit_at[s])
                                    .unwrap_or(usize::MAX)
                            })
                            .collect();
                        gates.push(gate.relabeled(|q| map[q]));
                    }
                    Entry::Swap(id) => {
                        let [a, b] = op.sites[..] else {
                            return invalid(format!("cycle {k}: swap {id} needs two sites"));
                        };
                        swaps.push((a, b));
                    }
                }
            }
            for (a, b) in swaps {
                match (qubit_at[a], qubit_at[b]) {
                    (Some(x), Some(y)) => gates.push(Gate::Swap { qubits: [x, y] }),
                    _ => qubit_at.swap(a, b),
                }
                occupant.swap(a, b);
            }
            let noisy = (0..m)
                .filter(|&site| register == Register::FullGrid || occupant[site].is_some())
                .filter_map(|site| qubit_at[site])
                .collect();
            cycles.push(Cycle { gates, noisy });
        }

        let mut final_qubit = vec![0; n];
        for (site, occ) in occupant.iter().enumerate() {
            if let Some(q) = *occ {
                final_qubit[q] = qubit_at[site].expect("occupied sites have a register qubit");
            }
        }
        Ok(Self {
            n_logical: n,
            width,
            plus,
            cycles,
            final_qubit,
        })
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    /// Register size; `n_logical` unless replaying the full grid.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cycles(&self) -> usize {
        self.cycles.len()
    }

    /// Runs one realization from the prepared `|+…+⟩` state. With `noise`
    /// set, every occupied site gets one noise step of one gate time after
    /// each cycle.
    pub fn run<R: rand::Rng + ?Sized>(
        &self,
        noise: Option<&NoiseParams>,
        rng: &mut R,
    ) -> Trajectory {
        let mut state = StateVector::zero(self.width);
        for &q in &self.plus {
            state.apply_h(q);
        }
        for cycle in &self.cycles {
            for g in &cycle.gates {
                state.apply_gate(g).expect("compiled gates are in range");
            }
            if let Some(np) = noise {
                for &q in &cycle.noisy {
                    let kick = sample_noise_op(np, np.gate_time, rng);
                    kick.apply(&mut state, q);
                }
            }
        }
        Trajectory {
            state,
            logical_qubit: self.final_qubit.clone(),
        }
    }
}

/// Final register state of one realization.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub state: StateVector,
    /// Register qubit holding logical qubit `q`.
    pub logical_qubit: Vec<usize>,
}

impl Trajectory {
    /// The state in logical qubit order. Only for the logical register.
    pub fn logical_state(&self) -> StateVector {
        assert_eq!(self.state.n_qubits(), self.logical_qubit.len());
        self.state.permuted(&self.logical_qubit)
    }

    /// Outcome distribution over logical basis states, marginalizing any
    /// ancilla qubits.
    pub fn logical_probabilities(&self) -> Vec<f64> {
        let n = self.logical_qubit.len();
        let mut out = vec![0.0; 1 << n];
        for (i, a) in self.state.amplitudes().iter().enumerate() {
            let j = self
                .logical_qubit
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &q)| acc | (((i >> q) & 1) << k));
            out[j] += a.norm_sqr();
        }
        out
    }
}

/// Independent stream for realization `r`.
pub fn realization_rng(master_seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(r);
    rng
}

/// Realizations summed per block before the fixed-order reduction.
const BLOCK: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEnsemble {
    pub realizations: usize,
    pub master_seed: u64,
    /// Ensemble-averaged outcome distribution in logical order.
    pub probabilities: Vec<f64>,
    /// `⟨O⟩` of each realization for the diagonal observable passed in,
    /// empty if none was.
    pub per_realization: Vec<f64>,
}

impl TrajectoryEnsemble {
    pub fn expectation(&self, diag: &[f64]) -> f64 {
        self.probabilities.iter().zip(diag).map(|(p, d)| p * d).sum()
    }

    pub fn overlap(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.probabilities[i]).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ensembles serialize")
    }
}

/// Runs `realizations` noisy trajectories of `s` with the logical
/// register. Realization `r` draws from stream `r` of `master_seed`, and
/// the average is reduced in a fixed order, so the result does not depend
/// on the thread count.
pub fn run_noisy_ensemble(
    s: &Schedule,
    c: &LogicalCircuit,
    noise: Option<&NoiseParams>,
    realizations: usize,
    master_seed: u64,
    observable: Option<&[f64]>,
) -> Result<TrajectoryEnsemble, SimError> {
    let compiled = CompiledSchedule::new(s, c, Register::Logical)?;
    run_compiled_ensemble(&compiled, noise, realizations, master_seed, observable)
}

pub fn run_compiled_ensemble(
    compiled: &CompiledSchedule,
    noise: Option<&NoiseParams>,
    realizations: usize,
    master_seed: u64,
    observable: Option<&[f64]>,
) -> Result<TrajectoryEnsemble, SimError> {
    if realizations == 0 {
        return Err(SimError::NoRealizations);
    }
    let dim = 1usize << compiled.n_logical();
    if let Some(obs) = observable {
        if obs.len() != dim {
            return Err(SimError::ObservableLength {
                expected: dim,
                got: obs.len(),
            });
        }
    }
    let blocks: Vec<(Vec<f64>, Vec<f64>)> = (0..realizations.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut sum = vec![0.0; dim];
            let mut values = Vec::new();
            for r in b * BLOCK..((b + 1) * BLOCK).min(realizations) {
                let mut rng = realization_rng(master_seed, r as u64);
                let probs = compiled.run(noise, &mut rng).logical_probabilities();
                if let Some(obs) = observable {
                    values.push(probs.iter().zip(obs).map(|(p, o)| p * o).sum());
                }
                sum.iter_mut().zip(&probs).for_each(|(s, p)| *s += p);
            }
            (sum, values)
        })
        .collect();

    let mut probabilities = vec![0.0; dim];
    let mut per_realization = Vec::new();
    for (sum, values) in blocks {
        probabilities.iter_mut().zip(&sum).for_each(|(a, s)| *a += s);
        per_realization.extend(values);
    }
    let scale = (realizations as f64).recip();
    probabilities.iter_mut().for_each(|p| *p *= scale);
    Ok(TrajectoryEnsemble {
        realizations,
        master_seed,
        probabilities,
        per_realization,
    })
}

/// Noiseless final state of a schedule in logical qubit order.
pub fn simulate_schedule(s: &Schedule, c: &LogicalCircuit) -> Result<StateVector, SimError> {
    let compiled = CompiledSchedule::new(s, c, Register::Logical)?;
    let mut rng = realization_rng(0, 0);
    Ok(compiled.run(None, &mut rng).logical_state())
}

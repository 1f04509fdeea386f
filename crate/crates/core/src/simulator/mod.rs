//! Dense state-vector simulation of logical and scheduled circuits, with
//! stochastic noise trajectories averaged over an ensemble.

mod ensemble;
mod noise;
mod sampling;
mod state;

pub use ensemble::{
    realization_rng, run_compiled_ensemble, run_noisy_ensemble, simulate_schedule,
    CompiledSchedule, Register, Trajectory, TrajectoryEnsemble,
};
pub use noise::{sample_noise_op, NoiseKick, NoiseParams};
pub use sampling::{histogram, measure_samples, overlap_with_optima, sample_from_probabilities};
pub use state::{init_plus_state, simulate_circuit, StateVector, MAX_QUBITS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid noise parameters: {0}")]
    BadNoise(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("an ensemble needs at least one realization")]
    NoRealizations,
    #[error("observable has {got} entries, expected {expected}")]
    ObservableLength { expected: usize, got: usize },
}

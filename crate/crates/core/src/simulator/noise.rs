use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{SimError, StateVector};

/// Coherence times and gate duration, all in the same unit (seconds in
/// the CLI). Infinite times switch the corresponding process off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub t1: f64,
    pub t2: f64,
    pub gate_time: f64,
}

impl NoiseParams {
    pub fn new(t1: f64, t2: f64, gate_time: f64) -> Result<Self, SimError> {
        let bad = |msg: &str| Err(SimError::BadNoise(msg.to_string()));
        if t1.is_nan() || t1 <= 0.0 || t2.is_nan() || t2 <= 0.0 {
            return bad("T1 and T2 must be positive");
        }
        if !(gate_time > 0.0 && gate_time.is_finite()) {
            return bad("gate time must be positive and finite");
        }
        if t2 > 2.0 * t1 {
            return bad("T2 must not exceed 2*T1");
        }
        Ok(Self { t1, t2, gate_time })
    }

    /// T1 = 200 μs, T2 = 100 μs, T_G = 10 ns.
    pub fn default_hardware() -> Self {
        Self {
            t1: 200e-6,
            t2: 100e-6,
            gate_time: 10e-9,
        }
    }

    /// T2 = `ratio`·T_G and T1 = 2·T2.
    pub fn from_coherence_ratio(ratio: f64, gate_time: f64) -> Result<Self, SimError> {
        let t2 = ratio * gate_time;
        Self::new(2.0 * t2, t2, gate_time)
    }

    pub fn noiseless(gate_time: f64) -> Self {
        Self {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            gate_time,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.t1.is_infinite() && self.t2.is_infinite()
    }

    /// `1/T_φ = 1/T2 − 1/(2·T1)`.
    pub fn dephasing_rate(&self) -> f64 {
        (self.t2.recip() - 0.5 * self.t1.recip()).max(0.0)
    }

    pub fn damping_probability(&self, dt: f64) -> f64 {
        -(-dt / self.t1).exp_m1()
    }

    /// Variance of the Z-rotation angle over a step of length `dt`.
    pub fn dephasing_variance(&self, dt: f64) -> f64 {
        2.0 * dt * self.dephasing_rate()
    }
}

/// One stochastic single-qubit noise step: a Z rotation by `phase`
/// followed by an amplitude-damping branch with probability `damping`
/// decided by `jump_draw`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseKick {
    pub phase: f64,
    pub damping: f64,
    pub jump_draw: f64,
}

impl NoiseKick {
    pub fn is_identity(&self) -> bool {
        self.phase == 0.0 && self.damping == 0.0
    }

    pub fn apply(&self, s: &mut StateVector, q: usize) {
        s.apply_noise_step(q, self.phase, self.damping, self.jump_draw);
    }
}

/// Draws one noise step. Averaged over draws this is pure dephasing at
/// rate `1/T_φ` composed with amplitude damping `1 − e^{−dt/T1}`. Always
/// consumes one normal and one uniform variate so that streams stay
/// aligned across noise settings.
pub fn sample_noise_op<R: Rng + ?Sized>(np: &NoiseParams, dt: f64, rng: &mut R) -> NoiseKick {
    let z: f64 = rng.sample(StandardNormal);
    let jump_draw: f64 = rng.random();
    NoiseKick {
        phase: z * np.dephasing_variance(dt).sqrt(),
        damping: np.damping_probability(dt),
        jump_draw,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation() {
        assert!(NoiseParams::new(1.0, 2.0, 0.1).is_ok());
        assert!(NoiseParams::new(1.0, 2.1, 0.1).is_err());
        assert!(NoiseParams::new(0.0, 0.0, 0.1).is_err());
        assert!(NoiseParams::new(1.0, 1.0, 0.0).is_err());
        assert!(NoiseParams::new(f64::INFINITY, f64::INFINITY, 1.0).is_ok());
        let np = NoiseParams::from_coherence_ratio(500.0, 1e-8).unwrap();
        assert!((np.t2 - 5e-6).abs() < 1e-18 && (np.t1 - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn dephasing_rate_with_t1_twice_t2() {
        let np = NoiseParams::default_hardware();
        assert!((np.dephasing_rate() - 0.75 / 100e-6).abs() < 1e-6);
    }

    #[test]
    fn zero_noise_is_identity() {
        let np = NoiseParams::noiseless(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert!(sample_noise_op(&np, 1.0, &mut rng).is_identity());
        }
    }
}

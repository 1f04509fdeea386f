use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::SimError;
use crate::circuit::{Gate, LogicalCircuit};

/// Pure state of `n` qubits; amplitude index bit `q` is qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

/// Largest register the dense simulator allocates.
pub const MAX_QUBITS: usize = 30;

impl StateVector {
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        assert!(n <= MAX_QUBITS, "{n} qubits exceeds the dense limit");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// `|+…+⟩`: all amplitudes `2^{-n/2}`.
    pub fn plus(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "{n} qubits exceeds the dense limit");
        let a = (1u64 << n) as f64;
        Self {
            n,
            amps: vec![Complex64::new(a.sqrt().recip(), 0.0); 1 << n],
        }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if !amps.len().is_power_of_two() {
            return Err(SimError::NotPowerOfTwo(amps.len()));
        }
        Ok(Self {
            n: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt().recip();
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// `⟨ψ|D|ψ⟩` for a diagonal observable given by its `2^n` eigenvalues.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> f64 {
        self.amps
            .iter()
            .zip(diag)
            .map(|(a, d)| a.norm_sqr() * d)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Probability of reading `1` on qubit `q`.
    pub fn population_one(&self, q: usize) -> f64 {
        let mask = 1 << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Relabels qubits: qubit `k` of the result is qubit `source[k]` of
    /// `self`.
    pub fn permuted(&self, source: &[usize]) -> StateVector {
        assert_eq!(source.len(), self.n);
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let j = source
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &q)| acc | (((i >> q) & 1) << k));
            amps[j] = *a;
        }
        StateVector { n: self.n, amps }
    }

    fn check(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n {
            return Err(SimError::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    /// Applies the 2x2 matrix `[[m00, m01], [m10, m11]]` to qubit `q`.
    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let stride = 1 << q;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    pub fn apply_h(&mut self, q: usize) {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        self.apply_1q(q, [[h, h], [h, -h]]);
    }

    /// `exp(−i·angle·X)`.
    pub fn apply_rx(&mut self, q: usize, angle: f64) {
        let c = Complex64::new(angle.cos(), 0.0);
        let s = Complex64::new(0.0, -angle.sin());
        self.apply_1q(q, [[c, s], [s, c]]);
    }

    /// `exp(−i·angle·Z/2)`.
    pub fn apply_rz(&mut self, q: usize, angle: f64) {
        let down = Complex64::from_polar(1.0, -angle / 2.0);
        let up = down.conj();
        let stride = 1 << q;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.iter_mut().for_each(|a| *a *= down);
            hi.iter_mut().for_each(|a| *a *= up);
        }
    }

    /// `exp(−i·angle·Z⊗Z/2)`: phase `e^{−i·angle/2}` on equal bits,
    /// `e^{+i·angle/2}` on different bits.
    pub fn apply_zz(&mut self, a: usize, b: usize, angle: f64) {
        let same = Complex64::from_polar(1.0, -angle / 2.0);
        let diff = same.conj();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if ((i >> a) ^ (i >> b)) & 1 == 0 { same } else { diff };
        }
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), SimError> {
        let qs = g.qubits();
        for &q in &qs {
            self.check(q)?;
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(SimError::QubitOutOfRange { qubit: qs[0], n: self.n });
        }
        match *g {
            Gate::H { qubit } => self.apply_h(qubit),
            Gate::Rx { qubit, angle } => self.apply_rx(qubit, angle),
            Gate::ZzPhase { qubits: [a, b], angle } => self.apply_zz(a, b, angle),
            Gate::Swap { qubits: [a, b] } => self.apply_swap(a, b),
        }
        Ok(())
    }

    /// Amplitude damping step on qubit `q` for one quantum-jump
    /// trajectory: with probability `damping·P(1)` the qubit decays to
    /// `|0⟩`, otherwise the `|1⟩` branch is attenuated by `√(1−damping)`.
    /// The result is renormalized. `draw` is a uniform variate in `[0, 1)`.
    pub fn apply_damping(&mut self, q: usize, damping: f64, draw: f64) {
        self.apply_noise_step(q, 0.0, damping, draw);
    }

    /// `apply_rz(q, phase)` followed by `apply_damping(q, damping, draw)`
    /// in a single write pass.
    pub fn apply_noise_step(&mut self, q: usize, phase: f64, damping: f64, draw: f64) {
        if damping <= 0.0 {
            if phase != 0.0 {
                self.apply_rz(q, phase);
            }
            return;
        }
        let p1 = self.population_one(q);
        let down = Complex64::from_polar(1.0, -phase / 2.0);
        let up = down.conj();
        let stride = 1 << q;
        if draw < damping * p1 {
            let s = up * p1.sqrt().recip();
            for block in self.amps.chunks_exact_mut(stride << 1) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    *a0 = *a1 * s;
                    *a1 = Complex64::new(0.0, 0.0);
                }
            }
        } else {
            let norm = (1.0 - damping * p1).sqrt().recip();
            let s0 = down * norm;
            let s1 = up * ((1.0 - damping).sqrt() * norm);
            for block in self.amps.chunks_exact_mut(stride << 1) {
                let (lo, hi) = block.split_at_mut(stride);
                lo.iter_mut().for_each(|a| *a *= s0);
                hi.iter_mut().for_each(|a| *a *= s1);
            }
        }
    }
}

/// Noiseless state of a logical circuit applied to `|0…0⟩`. QAOA circuits
/// carry their own Hadamard layer.
pub fn simulate_circuit(c: &LogicalCircuit) -> Result<StateVector, SimError> {
    let mut s = StateVector::zero(c.n_qubits());
    for g in c.gates() {
        s.apply_gate(g)?;
    }
    Ok(s)
}

/// `|+…+⟩` on `n` qubits.
pub fn init_plus_state(n: usize) -> StateVector {
    StateVector::plus(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.normalize();
        s
    }

    fn distance(a: &StateVector, b: &StateVector) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn plus_state() {
        let s = init_plus_state(1);
        assert_relative_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        let s = init_plus_state(2);
        assert!(s.amplitudes().iter().all(|a| (a.re - 0.5).abs() < 1e-15 && a.im == 0.0));
        for n in 0..10 {
            assert_relative_eq!(init_plus_state(n).norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hadamard_is_involution() {
        let s0 = random_state(4, 3);
        let mut s = s0.clone();
        s.apply_h(2);
        s.apply_h(2);
        assert!(distance(&s, &s0) < 1e-12);
    }

    #[test]
    fn zz_phase_diagonal_action() {
        let g = 0.7;
        let mut s = StateVector::basis(2, 0b00);
        s.apply_zz(0, 1, g);
        assert!((s.amplitudes()[0] - Complex64::from_polar(1.0, -g / 2.0)).norm() < 1e-15);
        let mut s = StateVector::basis(2, 0b10);
        s.apply_zz(0, 1, g);
        assert!((s.amplitudes()[2] - Complex64::from_polar(1.0, g / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn zz_phase_is_symmetric() {
        let s0 = random_state(3, 9);
        let (mut a, mut b) = (s0.clone(), s0);
        a.apply_zz(0, 2, 1.3);
        b.apply_zz(2, 0, 1.3);
        assert!(distance(&a, &b) < 1e-15);
    }

    #[test]
    fn rx_full_period() {
        // exp(-iπX) = -I
        let s0 = random_state(3, 1);
        let mut s = s0.clone();
        s.apply_rx(1, std::f64::consts::PI);
        for (x, y) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((x + y).norm() < 1e-12);
        }
    }

    #[test]
    fn swap_and_permute_agree() {
        let s0 = random_state(3, 5);
        let mut s = s0.clone();
        s.apply_swap(0, 2);
        assert!(distance(&s, &s0.permuted(&[2, 1, 0])) < 1e-15);
    }

    #[test]
    fn damping_branches_stay_normalized() {
        let mut s = random_state(3, 11);
        s.apply_damping(1, 0.3, 0.999);
        assert_relative_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        s.apply_damping(1, 0.3, 0.0);
        assert_relative_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.population_one(1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fused_noise_step_matches_two_passes() {
        let s0 = random_state(4, 13);
        for draw in [0.0, 0.5, 0.999] {
            let mut a = s0.clone();
            a.apply_rz(2, 0.37);
            a.apply_damping(2, 0.2, draw);
            let mut b = s0.clone();
            b.apply_noise_step(2, 0.37, 0.2, draw);
            assert!(distance(&a, &b) < 1e-14);
        }
    }

    #[test]
    fn gate_index_errors() {
        let mut s = StateVector::zero(2);
        assert!(matches!(
            s.apply_gate(&Gate::H { qubit: 2 }),
            Err(SimError::QubitOutOfRange { qubit: 2, n: 2 })
        ));
        assert!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]).is_err());
    }
}

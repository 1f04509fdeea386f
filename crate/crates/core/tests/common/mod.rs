//! Independent oracles built from explicit matrices.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use qaoa_core::circuit::{build_qaoa_circuit, Gate, LogicalCircuit, QaoaParams};
use qaoa_core::graphs::Graph;
use qaoa_core::scheduler::{schedule_with_placement, Entry, GridTopology, Placement, Schedule};
use qaoa_core::simulator::{realization_rng, CompiledSchedule, NoiseParams, Register, StateVector};

pub type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn hadamard() -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_row_slice(2, 2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)])
}

/// `op` on qubit `q` of `n`, where qubit `q` is bit `q` of the basis index,
/// so the highest qubit is the leftmost Kronecker factor.
pub fn embed(op: &CMat, q: usize, n: usize) -> CMat {
    let id = eye(2);
    let mut m = eye(1);
    for k in (0..n).rev() {
        m = m.kronecker(if k == q { op } else { &id });
    }
    m
}

/// `exp(−iγ Z_a Z_b / 2) = cos(γ/2) I − i sin(γ/2) Z_a Z_b`.
pub fn zz_unitary(a: usize, b: usize, gamma: f64, n: usize) -> CMat {
    let zz = embed(&pauli_z(), a, n) * embed(&pauli_z(), b, n);
    eye(1 << n) * c((gamma / 2.0).cos(), 0.0) - zz * c(0.0, (gamma / 2.0).sin())
}

/// `exp(−iβX_q) = cos β I − i sin β X_q`.
pub fn rx_unitary(q: usize, beta: f64, n: usize) -> CMat {
    eye(1 << n) * c(beta.cos(), 0.0) - embed(&pauli_x(), q, n) * c(0.0, beta.sin())
}

/// QAOA state from dense matrix products applied to `|0…0⟩`.
pub fn dense_qaoa_state(g: &Graph, gammas: &[f64], betas: &[f64]) -> DVector<Complex64> {
    let n = g.n();
    let mut psi = DVector::from_element(1 << n, c(0., 0.));
    psi[0] = c(1., 0.);
    for q in 0..n {
        psi = embed(&hadamard(), q, n) * psi;
    }
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        for &(i, j) in g.edges() {
            psi = zz_unitary(i, j, gamma, n) * psi;
        }
        for q in 0..n {
            psi = rx_unitary(q, beta, n) * psi;
        }
    }
    psi
}

/// Amplitude damping with probability `p` on qubit `q`, as Kraus operators.
pub fn damping_channel(rho: &CMat, q: usize, n: usize, p: f64) -> CMat {
    let k0 = CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c((1.0 - p).sqrt(), 0.)]);
    let k1 = CMat::from_row_slice(2, 2, &[c(0., 0.), c(p.sqrt(), 0.), c(0., 0.), c(0., 0.)]);
    [k0, k1]
        .iter()
        .map(|k| {
            let e = embed(k, q, n);
            &e * rho * e.adjoint()
        })
        .fold(CMat::zeros(1 << n, 1 << n), |acc, x| acc + x)
}

/// Phase flip channel shrinking coherences of qubit `q` by `lambda`.
pub fn dephasing_channel(rho: &CMat, q: usize, n: usize, lambda: f64) -> CMat {
    let z = embed(&pauli_z(), q, n);
    rho * c((1.0 + lambda) / 2.0, 0.0) + &z * rho * &z * c((1.0 - lambda) / 2.0, 0.0)
}

pub fn unitary_step(rho: &CMat, u: &CMat) -> CMat {
    u * rho * u.adjoint()
}

pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    let d = a - b;
    let eig = nalgebra::SymmetricEigen::new(d);
    0.5 * eig.eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

pub fn outer(psi: &[Complex64]) -> CMat {
    let v = DVector::from_column_slice(psi);
    &v * v.adjoint()
}

/// Mean and standard error of a sample.
pub fn mean_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn gate_unitary(g: &Gate, n: usize) -> CMat {
    match *g {
        Gate::H { qubit } => embed(&hadamard(), qubit, n),
        Gate::Rx { qubit, angle } => rx_unitary(qubit, angle, n),
        Gate::ZzPhase { qubits: [a, b], angle } => zz_unitary(a, b, angle, n),
        Gate::Swap { .. } => unreachable!("logical circuits here carry no swaps"),
    }
}

/// Density matrix of the scheduled circuit under the per-cycle channel,
/// tracked in the logical frame (routing SWAPs only move data).
pub fn density_oracle(s: &Schedule, c: &LogicalCircuit, np: &NoiseParams) -> CMat {
    let n = c.n_qubits();
    let plus = StateVector::plus(n);
    let mut rho = outer(plus.amplitudes());
    let dt = np.gate_time;
    let lambda = (-dt * np.dephasing_rate()).exp();
    let p = np.damping_probability(dt);
    for ops in &s.cycles {
        for op in ops {
            if let Entry::Alg(id) = op.entry {
                rho = unitary_step(&rho, &gate_unitary(&c.body()[id as usize - 1], n));
            }
        }
        for q in 0..n {
            rho = dephasing_channel(&rho, q, n, lambda);
            rho = damping_channel(&rho, q, n, p);
        }
    }
    rho
}

pub fn ensemble_density(s: &Schedule, c: &LogicalCircuit, np: &NoiseParams, r: usize, seed: u64) -> CMat {
    let compiled = CompiledSchedule::new(s, c, Register::Logical).unwrap();
    let d = 1 << c.n_qubits();
    let mut rho = CMat::zeros(d, d);
    for k in 0..r {
        let t = compiled.run(Some(np), &mut realization_rng(seed, k as u64));
        rho += outer(t.logical_state().amplitudes());
    }
    rho / Complex64::new(r as f64, 0.0)
}

pub fn two_qubit_line() -> (LogicalCircuit, Schedule) {
    let g = Graph::new(2, vec![(0, 1)]).unwrap();
    let c = build_qaoa_circuit(&g, &QaoaParams::new(vec![0.9, 1.7], vec![0.4, 0.3]).unwrap());
    let t = GridTopology::new(1, 3);
    let s = schedule_with_placement(&c, t, Placement(vec![Some(0), None, Some(1)])).unwrap();
    (c, s)
}

//! QAOA circuits over logical qubits.
//!
//! Angle conventions are literal, no half-angle rescaling:
//! `ZzPhase(γ) = exp(−iγ Z⊗Z / 2)` and `Rx(β) = exp(−iβ X)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::Graph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("gammas ({gammas}) and betas ({betas}) must have equal, non-zero length")]
    ParamLength { gammas: usize, betas: usize },
    #[error("parameter vector of length {0} cannot be split into gammas and betas")]
    OddParamVector(usize),
    #[error("non-finite angle {0}")]
    NonFinite(f64),
    #[error("gate {index} touches qubit {qubit} outside a {n}-qubit register")]
    QubitOutOfRange { index: usize, qubit: usize, n: usize },
    #[error("gate {index} repeats qubit {qubit}")]
    RepeatedQubit { index: usize, qubit: usize },
}

/// Variational angles, one `(γ_l, β_l)` pair per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, CircuitError> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(CircuitError::ParamLength {
                gammas: gammas.len(),
                betas: betas.len(),
            });
        }
        if let Some(&bad) = gammas.iter().chain(&betas).find(|x| !x.is_finite()) {
            return Err(CircuitError::NonFinite(bad));
        }
        Ok(Self { gammas, betas })
    }

    /// Splits `[γ_1..γ_p, β_1..β_p]`.
    pub fn from_flat(x: &[f64]) -> Result<Self, CircuitError> {
        if !x.len().is_multiple_of(2) {
            return Err(CircuitError::OddParamVector(x.len()));
        }
        let (g, b) = x.split_at(x.len() / 2);
        Self::new(g.to_vec(), b.to_vec())
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            gammas: vec![0.0; p],
            betas: vec![0.0; p],
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gate {
    H { qubit: usize },
    ZzPhase { qubits: [usize; 2], angle: f64 },
    Rx { qubit: usize, angle: f64 },
    Swap { qubits: [usize; 2] },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { qubit } | Gate::Rx { qubit, .. } => vec![qubit],
            Gate::ZzPhase { qubits, .. } | Gate::Swap { qubits } => qubits.to_vec(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::H { .. } | Gate::Rx { .. } => 1,
            Gate::ZzPhase { .. } | Gate::Swap { .. } => 2,
        }
    }

    /// Whether the two gates can be executed in either order. Diagonal
    /// phase gates commute with each other, and so do X rotations; gates on
    /// disjoint qubits always commute.
    pub fn commutes_with(&self, other: &Gate) -> bool {
        let shared = self.qubits().iter().any(|q| other.qubits().contains(q));
        if !shared {
            return true;
        }
        matches!(
            (self, other),
            (Gate::ZzPhase { .. }, Gate::ZzPhase { .. }) | (Gate::Rx { .. }, Gate::Rx { .. })
        )
    }

    /// Same gate acting on other qubits.
    pub fn relabeled(&self, map: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::H { qubit } => Gate::H { qubit: map(qubit) },
            Gate::Rx { qubit, angle } => Gate::Rx {
                qubit: map(qubit),
                angle,
            },
            Gate::ZzPhase { qubits, angle } => Gate::ZzPhase {
                qubits: qubits.map(&map),
                angle,
            },
            Gate::Swap { qubits } => Gate::Swap {
                qubits: qubits.map(&map),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl LogicalCircuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        for (index, g) in gates.iter().enumerate() {
            let qs = g.qubits();
            for (k, &q) in qs.iter().enumerate() {
                if q >= n_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index,
                        qubit: q,
                        n: n_qubits,
                    });
                }
                if qs[..k].contains(&q) {
                    return Err(CircuitError::RepeatedQubit { index, qubit: q });
                }
            }
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Length of the leading state-preparation layer: the initial run of
    /// Hadamards, each on a distinct qubit.
    pub fn preparation_len(&self) -> usize {
        let mut seen = vec![false; self.n_qubits];
        self.gates
            .iter()
            .take_while(|g| match g {
                Gate::H { qubit } if !seen[*qubit] => {
                    seen[*qubit] = true;
                    true
                }
                _ => false,
            })
            .count()
    }

    /// Gates after the preparation layer. Scheduled gate ids are 1-based
    /// positions in this slice.
    pub fn body(&self) -> &[Gate] {
        &self.gates[self.preparation_len()..]
    }

    /// For each body gate, the earlier body gates it must follow: those that
    /// share a qubit and do not commute with it.
    pub fn body_dependencies(&self) -> Vec<Vec<usize>> {
        let body = self.body();
        let mut last_on: Vec<Vec<usize>> = vec![Vec::new(); self.n_qubits];
        let mut deps = Vec::with_capacity(body.len());
        for (j, g) in body.iter().enumerate() {
            let mut preds: Vec<usize> = Vec::new();
            for q in g.qubits() {
                for &i in &last_on[q] {
                    if !body[i].commutes_with(g) && !preds.contains(&i) {
                        preds.push(i);
                    }
                }
            }
            for q in g.qubits() {
                last_on[q].push(j);
            }
            preds.sort_unstable();
            deps.push(preds);
        }
        deps
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuits serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let raw: LogicalCircuit = serde_json::from_str(text)?;
        Self::new(raw.n_qubits, raw.gates).map_err(serde::de::Error::custom)
    }
}

/// `[H on every qubit]`, then for each layer a phase gate per edge (edge-list
/// order) followed by an X rotation on every qubit.
pub fn build_qaoa_circuit(g: &Graph, params: &QaoaParams) -> LogicalCircuit {
    let n = g.n();
    let mut gates = Vec::with_capacity(n + params.p() * (g.num_edges() + n));
    gates.extend((0..n).map(|qubit| Gate::H { qubit }));
    for (&gamma, &beta) in params.gammas().iter().zip(params.betas()) {
        gates.extend(g.edges().iter().map(|&(i, j)| Gate::ZzPhase {
            qubits: [i, j],
            angle: gamma,
        }));
        gates.extend((0..n).map(|qubit| Gate::Rx { qubit, angle: beta }));
    }
    LogicalCircuit { n_qubits: n, gates }
}

/// ASAP layering under qubit exclusivity only, in circuit order.
pub fn logical_depth(c: &LogicalCircuit) -> usize {
    let mut level = vec![0usize; c.n_qubits()];
    let mut depth = 0;
    for g in c.gates() {
        let qs = g.qubits();
        let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for q in qs {
            level[q] = l;
        }
        depth = depth.max(l);
    }
    depth
}

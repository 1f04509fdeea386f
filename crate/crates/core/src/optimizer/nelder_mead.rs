use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NmError {
    #[error("simplex in {dim} dimensions needs {} vertices, got {got}", dim + 1)]
    VertexCount { dim: usize, got: usize },
    #[error("simplex vertices do not all have dimension {0}")]
    Ragged(usize),
    #[error("simplex vertices are affinely dependent")]
    Degenerate,
    #[error("invalid optimizer settings: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_updates: usize,
    /// Stall window in updates per QAOA layer (the window is this times
    /// half the search dimension).
    pub stall_per_layer: usize,
    pub n_restarts: usize,
    pub n_samples: usize,
    /// Offset of the extra simplex vertices from the random base point.
    pub initial_step: f64,
}

impl Default for NmConfig {
    fn default() -> Self {
        Self {
            reflection: 1.1,
            expansion: 1.5,
            contraction: 0.6,
            shrink: 0.4,
            max_updates: 300,
            stall_per_layer: 10,
            n_restarts: 20,
            n_samples: 10_000,
            initial_step: 0.25,
        }
    }
}

impl NmConfig {
    pub fn validate(&self) -> Result<(), NmError> {
        let bad = |m: &str| Err(NmError::Config(m.to_string()));
        if !(self.reflection > 0.0) {
            return bad("reflection must be positive");
        }
        if !(self.expansion > self.reflection) {
            return bad("expansion must exceed reflection");
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return bad("contraction must lie in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        if self.max_updates == 0 || self.stall_per_layer == 0 || self.n_restarts == 0 || self.n_samples == 0 {
            return bad("counts must be positive");
        }
        if !(self.initial_step > 0.0) {
            return bad("initial step must be positive");
        }
        Ok(())
    }

    /// Consecutive updates without a better best vertex before stopping.
    pub fn stall_window(&self, dim: usize) -> usize {
        self.stall_per_layer * dim.div_ceil(2).max(1)
    }

    /// Most evaluations a single run can make: the initial simplex plus a
    /// reflection, a contraction and a full shrink at every update.
    pub fn max_evals_per_run(&self, dim: usize) -> usize {
        (dim + 1) + self.max_updates * (2 + dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxUpdates,
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub n_function_evals: usize,
    pub n_updates: usize,
    pub termination: Termination,
    /// Best value after initialization and after every update.
    pub trace: Vec<f64>,
}

/// Base point with `γ_l ~ U[0, 2π)` and `β_l ~ U[0, π)` (layout
/// `[γ_1..γ_p, β_1..β_p]`), plus one vertex offset by `step` along each
/// axis.
pub fn random_initial_simplex<R: Rng + ?Sized>(p: usize, step: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let mut base: Vec<f64> = (0..p).map(|_| rng.random::<f64>() * TAU).collect();
    base.extend((0..p).map(|_| rng.random::<f64>() * PI));
    let mut simplex = vec![base.clone()];
    for k in 0..2 * p {
        let mut v = base.clone();
        v[k] += step;
        simplex.push(v);
    }
    simplex
}

/// Rank test on the edge vectors by Gaussian elimination with partial
/// pivoting.
fn check_simplex(simplex: &[Vec<f64>]) -> Result<usize, NmError> {
    let dim = simplex.first().map_or(0, Vec::len);
    if simplex.len() != dim + 1 || dim == 0 {
        return Err(NmError::VertexCount {
            dim,
            got: simplex.len(),
        });
    }
    if simplex.iter().any(|v| v.len() != dim) {
        return Err(NmError::Ragged(dim));
    }
    let mut rows: Vec<Vec<f64>> = simplex[1..]
        .iter()
        .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| a - b).collect())
        .collect();
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(NmError::Degenerate);
    }
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
            .expect("non-empty range");
        if rows[pivot][col].abs() <= 1e-12 * scale {
            return Err(NmError::Degenerate);
        }
        rows.swap(col, pivot);
        for r in col + 1..dim {
            let f = rows[r][col] / rows[col][col];
            for c in col..dim {
                rows[r][c] -= f * rows[col][c];
            }
        }
    }
    Ok(dim)
}

fn affine(c: &[f64], d: &[f64], t: f64) -> Vec<f64> {
    // c + t·(d − c)
    c.iter().zip(d).map(|(a, b)| a + t * (b - a)).collect()
}

/// Maximizes `objective` from `simplex`. Every call to `objective` is
/// counted, including the initial vertices. One pass through the main loop
/// (ending in a reflection, expansion, contraction or shrink) is one
/// update. Stops after `max_updates` updates or once the best value has
/// not strictly improved for `stall_window` consecutive updates.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut objective: F,
    simplex: Vec<Vec<f64>>,
    cfg: &NmConfig,
) -> Result<RunRecord, NmError> {
    cfg.validate()?;
    let dim = check_simplex(&simplex)?;
    let window = cfg.stall_window(dim);
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let mut verts: Vec<(Vec<f64>, f64)> = simplex
        .into_iter()
        .map(|x| {
            let v = eval(&x);
            (x, v)
        })
        .collect();
    let sort = |verts: &mut Vec<(Vec<f64>, f64)>| verts.sort_by(|a, b| b.1.total_cmp(&a.1));
    sort(&mut verts);
    let mut trace = vec![verts[0].1];
    let mut stall = 0usize;
    let mut updates = 0usize;

    let termination = loop {
        let best = verts[0].1;
        let worst = verts[dim].1;
        let second_worst = verts[dim - 1].1;
        let xw = verts[dim].0.clone();
        let mut centroid = vec![0.0; dim];
        for (x, _) in &verts[..dim] {
            centroid.iter_mut().zip(x).for_each(|(c, xi)| *c += xi / dim as f64);
        }

        let xr = affine(&centroid, &xw, -cfg.reflection);
        let fr = eval(&xr);
        let mut shrink = false;
        if fr > best {
            let xe = affine(&centroid, &xw, -cfg.expansion);
            let fe = eval(&xe);
            verts[dim] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > second_worst {
            verts[dim] = (xr, fr);
        } else if fr > worst {
            let xc = affine(&centroid, &xr, cfg.contraction);
            let fc = eval(&xc);
            if fc >= fr {
                verts[dim] = (xc, fc);
            } else {
                shrink = true;
            }
        } else {
            let xc = affine(&centroid, &xw, cfg.contraction);
            let fc = eval(&xc);
            if fc > worst {
                verts[dim] = (xc, fc);
            } else {
                shrink = true;
            }
        }
        if shrink {
            let xb = verts[0].0.clone();
            for v in verts.iter_mut().skip(1) {
                v.0 = affine(&xb, &v.0, cfg.shrink);
                v.1 = eval(&v.0);
            }
        }
        sort(&mut verts);
        updates += 1;
        trace.push(verts[0].1);
        if verts[0].1 > best {
            stall = 0;
        } else {
            stall += 1;
        }
        if stall >= window {
            break Termination::Stalled;
        }
        if updates >= cfg.max_updates {
            break Termination::MaxUpdates;
        }
    };

    let (best_point, best_value) = verts.swap_remove(0);
    Ok(RunRecord {
        best_point,
        best_value,
        n_function_evals: evals,
        n_updates: updates,
        termination,
        trace,
    })
}

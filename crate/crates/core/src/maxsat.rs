//! Max-Cut to Max-2-SAT reduction and DIMACS WCNF interchange.
//!
//! Each vertex `v` becomes the SAT variable `v + 1`; each edge `(i, j)`
//! becomes the clause pair `(x_i ∨ x_j)` and `(¬x_i ∨ ¬x_j)`. At least one
//! clause of each pair is always satisfied and both are satisfied exactly
//! when the edge is cut, so the Max-2-SAT optimum is `|E| + k_max`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{Graph, BRUTE_FORCE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaxSatError {
    #[error("literal {literal} out of range for {n_vars} variables")]
    LiteralOutOfRange { literal: i64, n_vars: usize },
    #[error("exhaustive search is limited to {limit} variables, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, MaxSatError> {
        for &lit in clauses.iter().flatten() {
            if lit == 0 || lit.unsigned_abs() as usize > n_vars {
                return Err(MaxSatError::LiteralOutOfRange {
                    literal: lit,
                    n_vars,
                });
            }
        }
        Ok(Self { n_vars, clauses })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    /// Number of clauses satisfied by the assignment in the low bits of
    /// `index` (bit `v` is variable `v + 1`).
    pub fn satisfied_by_index(&self, index: usize) -> usize {
        self.clauses
            .iter()
            .filter(|c| {
                c.iter().any(|&lit| {
                    let bit = (index >> (lit.unsigned_abs() - 1)) & 1 == 1;
                    bit == (lit > 0)
                })
            })
            .count()
    }
}

pub fn reduce_to_max2sat(g: &Graph) -> CnfFormula {
    let clauses = g
        .edges()
        .iter()
        .flat_map(|&(i, j)| {
            let (a, b) = (i as i64 + 1, j as i64 + 1);
            [vec![a, b], vec![-a, -b]]
        })
        .collect();
    CnfFormula {
        n_vars: g.n(),
        clauses,
    }
}

/// Maximum number of simultaneously satisfiable clauses over all `2^n`
/// assignments.
pub fn brute_force_max2sat(f: &CnfFormula) -> Result<usize, MaxSatError> {
    if f.n_vars > BRUTE_FORCE_LIMIT {
        return Err(MaxSatError::TooLarge {
            n: f.n_vars,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // (positive-literal mask, negative-literal mask) per clause
    let masks: Vec<(u64, u64)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u64, 0u64), |(pos, neg), &lit| {
                let bit = 1u64 << (lit.unsigned_abs() - 1);
                if lit > 0 {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let best = (0u64..1u64 << f.n_vars)
        .map(|x| {
            masks
                .iter()
                .filter(|&&(pos, neg)| x & pos != 0 || !x & neg != 0)
                .count()
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// DIMACS WCNF with unit soft weights and `top = n_clauses + 1`.
pub fn emit_wcnf(f: &CnfFormula) -> String {
    let n_clauses = f.clauses.len();
    let mut out = format!("p wcnf {} {} {}\n", f.n_vars, n_clauses, n_clauses + 1);
    for c in &f.clauses {
        out.push('1');
        for lit in c {
            let _ = write!(out, " {lit}");
        }
        out.push_str(" 0\n");
    }
    out
}

/// A WCNF file: formula, per-clause weights and the hard-clause weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedFormula {
    pub formula: CnfFormula,
    pub weights: Vec<u64>,
    pub top: u64,
}

pub fn parse_wcnf(text: &str) -> Result<WeightedFormula, MaxSatError> {
    let err = |line: usize, msg: String| MaxSatError::Parse { line, msg };
    let mut header: Option<(usize, usize, u64)> = None;
    let mut clauses = Vec::new();
    let mut weights = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('c') {
            continue;
        }
        if let Some(rest) = l.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            match f.as_slice() {
                ["wcnf", n, m, top] => {
                    let parse = |s: &str| s.parse::<u64>().map_err(|e| err(line, e.to_string()));
                    header = Some((parse(n)? as usize, parse(m)? as usize, parse(top)?));
                }
                _ => return Err(err(line, format!("bad problem line {l:?}"))),
            }
            continue;
        }
        if header.is_none() {
            return Err(err(line, "clause before problem line".into()));
        }
        let nums: Vec<i64> = l
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|e| err(line, format!("{t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        match nums.split_last() {
            Some((0, body)) if !body.is_empty() && body[0] > 0 => {
                weights.push(body[0] as u64);
                clauses.push(body[1..].to_vec());
            }
            _ => return Err(err(line, format!("malformed clause {l:?}"))),
        }
    }
    let (n_vars, n_clauses, top) = header.ok_or_else(|| err(1, "missing problem line".into()))?;
    if clauses.len() != n_clauses {
        return Err(err(
            1,
            format!("header declares {n_clauses} clauses, found {}", clauses.len()),
        ));
    }
    Ok(WeightedFormula {
        formula: CnfFormula::new(n_vars, clauses)?,
        weights,
        top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{brute_force_maxcut, reference_instance};

    fn single_edge() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    #[test]
    fn single_edge_reduction() {
        let f = reduce_to_max2sat(&single_edge());
        assert_eq!(f.clauses(), &[vec![1, 2], vec![-1, -2]]);
        assert_eq!(brute_force_max2sat(&f).unwrap(), 2);
        assert_eq!(emit_wcnf(&f), "p wcnf 2 2 3\n1 1 2 0\n1 -1 -2 0\n");
    }

    #[test]
    fn triangle_reduction() {
        let f = reduce_to_max2sat(&Graph::complete(3));
        assert_eq!(f.clauses().len(), 6);
        // 8 assignments by hand: the 6 non-constant ones satisfy 5 clauses
        assert_eq!(brute_force_max2sat(&f).unwrap(), 5);
        assert!(emit_wcnf(&f).starts_with("p wcnf 3 6 7\n"));
    }

    #[test]
    fn reference_instance_reduction() {
        let g = reference_instance();
        let f = reduce_to_max2sat(&g);
        assert_eq!(f.n_vars(), 8);
        assert_eq!(f.clauses().len(), 24);
        let k = brute_force_maxcut(&g).unwrap().k_max;
        assert_eq!(brute_force_max2sat(&f).unwrap(), 12 + k);
    }

    #[test]
    fn each_edge_pair_is_half_satisfied_at_least() {
        let g = reference_instance();
        let f = reduce_to_max2sat(&g);
        for z in 0..256usize {
            for (e, pair) in f.clauses().chunks(2).enumerate() {
                let sub = CnfFormula::new(8, pair.to_vec()).unwrap();
                let sat = sub.satisfied_by_index(z);
                let (i, j) = g.edges()[e];
                let cut = ((z >> i) ^ (z >> j)) & 1 == 1;
                assert!(sat >= 1);
                assert_eq!(sat == 2, cut);
            }
        }
    }

    #[test]
    fn wcnf_round_trip() {
        let f = reduce_to_max2sat(&reference_instance());
        let parsed = parse_wcnf(&emit_wcnf(&f)).unwrap();
        assert_eq!(parsed.formula, f);
        assert!(parsed.weights.iter().all(|&w| w == 1));
        assert_eq!(parsed.top, 25);
    }

    #[test]
    fn wcnf_parse_errors() {
        assert!(parse_wcnf("1 1 2 0\n").is_err());
        assert!(parse_wcnf("p wcnf 2 1 2\n1 1 3 0\n").is_err());
        assert!(parse_wcnf("p wcnf 2 1 2\n1 1 2\n").is_err());
        assert!(parse_wcnf("p wcnf 2 2 3\n1 1 2 0\n").is_err());
        assert!(parse_wcnf("p cnf 2 2\n").is_err());
    }

    #[test]
    fn literal_validation() {
        assert!(CnfFormula::new(2, vec![vec![0, 1]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![-3]]).is_err());
    }

    #[test]
    fn exhaustive_limit() {
        let f = CnfFormula::new(29, vec![]).unwrap();
        assert!(matches!(brute_force_max2sat(&f), Err(MaxSatError::TooLarge { .. })));
    }
}

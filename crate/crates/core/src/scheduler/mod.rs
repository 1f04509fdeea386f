//! Mapping logical circuits onto a square grid of physical qubits.
//!
//! A [`Schedule`] is a sequence of clock cycles. Each cycle holds a set of
//! operations, either a circuit gate (by 1-based body id) or a routing SWAP
//! (by 1-based pair id), each pinned to the physical sites it occupies. The
//! PDPT matrix view (`0` idle, `+id` gate, `-id` SWAP) is derived from it.

mod pdpt;
mod route;
mod validate;

pub use pdpt::{emit_pdpt, parse_pdpt, PdptError};
pub use route::{initial_placement, schedule, schedule_with_placement};
pub use validate::{validate_schedule, Violation};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("{rows}x{cols} grid has fewer sites than the {n} logical qubits")]
    GridTooSmall { rows: usize, cols: usize, n: usize },
    #[error("placement invalid: {0}")]
    BadPlacement(String),
}

/// Rectangular grid with 4-neighbor coupling. Site `r * cols + c` sits at
/// row `r`, column `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridTopology {
    pub rows: usize,
    pub cols: usize,
}

impl GridTopology {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }

    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site / self.cols, site % self.cols)
    }

    pub fn site(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        ra.abs_diff(rb) + ca.abs_diff(cb)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.distance(a, b) == 1
    }

    pub fn neighbors(&self, site: usize) -> Vec<usize> {
        let (r, c) = self.coords(site);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(self.site(r - 1, c));
        }
        if c > 0 {
            out.push(self.site(r, c - 1));
        }
        if c + 1 < self.cols {
            out.push(self.site(r, c + 1));
        }
        if r + 1 < self.rows {
            out.push(self.site(r + 1, c));
        }
        out
    }

    /// All coupled site pairs `(a, b)` with `a < b`, in ascending order.
    pub fn couplings(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.sites() {
            for b in self.neighbors(a) {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Next site on a shortest path from `from` to `to`, moving along rows
    /// first.
    pub fn step_toward(&self, from: usize, to: usize) -> usize {
        let (r, c) = self.coords(from);
        let (rt, ct) = self.coords(to);
        if r < rt {
            self.site(r + 1, c)
        } else if r > rt {
            self.site(r - 1, c)
        } else if c < ct {
            self.site(r, c + 1)
        } else if c > ct {
            self.site(r, c - 1)
        } else {
            from
        }
    }
}

/// Smallest square grid holding `n` qubits.
pub fn choose_grid(n: usize) -> GridTopology {
    let mut side = 1;
    while side * side < n.max(1) {
        side += 1;
    }
    GridTopology::new(side, side)
}

/// Physical site → logical qubit (`None` for an unused site).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement(pub Vec<Option<usize>>);

impl Placement {
    pub fn sites(&self) -> usize {
        self.0.len()
    }

    /// Logical → physical map, checking that the placement is a bijection
    /// between `0..n_logical` and the used sites.
    pub fn logical_to_site(&self, n_logical: usize) -> Result<Vec<usize>, ScheduleError> {
        let mut site_of = vec![usize::MAX; n_logical];
        for (site, slot) in self.0.iter().enumerate() {
            if let Some(q) = *slot {
                if q >= n_logical {
                    return Err(ScheduleError::BadPlacement(format!(
                        "site {site} holds logical {q} >= {n_logical}"
                    )));
                }
                if site_of[q] != usize::MAX {
                    return Err(ScheduleError::BadPlacement(format!(
                        "logical {q} placed on sites {} and {site}",
                        site_of[q]
                    )));
                }
                site_of[q] = site;
            }
        }
        if let Some(q) = site_of.iter().position(|&s| s == usize::MAX) {
            return Err(ScheduleError::BadPlacement(format!("logical {q} not placed")));
        }
        Ok(site_of)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entry {
    /// Circuit body gate, 1-based.
    Alg(u32),
    /// Routing SWAP pair, 1-based.
    Swap(u32),
}

impl Entry {
    pub fn code(self) -> i64 {
        match self {
            Entry::Alg(id) => i64::from(id),
            Entry::Swap(id) => -i64::from(id),
        }
    }

    pub fn from_code(code: i64) -> Option<Self> {
        match code {
            0 => None,
            c if c > 0 => Some(Entry::Alg(u32::try_from(c).ok()?)),
            c => Some(Entry::Swap(u32::try_from(-c).ok()?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub entry: Entry,
    pub sites: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub placement: Placement,
    pub cycles: Vec<Vec<Operation>>,
}

impl Schedule {
    pub fn sites(&self) -> usize {
        self.placement.sites()
    }

    /// Cycles × sites matrix (`0` idle, `+id` gate, `-id` SWAP). If two
    /// operations claim a site in one cycle the later one wins; such a
    /// schedule fails validation anyway.
    pub fn table(&self) -> Vec<Vec<i64>> {
        self.cycles
            .iter()
            .map(|ops| {
                let mut row = vec![0i64; self.sites()];
                for op in ops {
                    for &s in &op.sites {
                        if s < row.len() {
                            row[s] = op.entry.code();
                        }
                    }
                }
                row
            })
            .collect()
    }

    pub fn swap_count(&self) -> usize {
        self.cycles
            .iter()
            .flatten()
            .filter(|op| matches!(op.entry, Entry::Swap(_)))
            .count()
    }

    /// Site → logical occupancy after all SWAPs have been replayed.
    pub fn final_placement(&self) -> Placement {
        let mut occ = self.placement.0.clone();
        for op in self.cycles.iter().flatten() {
            if let (Entry::Swap(_), [a, b]) = (op.entry, op.sites.as_slice()) {
                if *a < occ.len() && *b < occ.len() {
                    occ.swap(*a, *b);
                }
            }
        }
        Placement(occ)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedules serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Number of clock cycles. The preparation layer is not part of the table.
pub fn scheduled_depth(s: &Schedule) -> usize {
    s.cycles.len()
}

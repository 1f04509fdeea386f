use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Entry, GridTopology, Operation, Placement, Schedule, ScheduleError};
use crate::circuit::LogicalCircuit;

/// Graph-aware greedy placement. The most connected logical qubit goes to
/// the grid center; each following qubit is the one with the most already
/// placed interaction partners, put on the free site closest to them.
/// Remaining ties are broken by per-seed random keys.
pub fn initial_placement(
    c: &LogicalCircuit,
    t: GridTopology,
    seed: u64,
) -> Result<Placement, ScheduleError> {
    let n = c.n_qubits();
    check_fits(c, t)?;
    let m = t.sites();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qubit_key: Vec<u64> = (0..n).map(|_| rng.random()).collect();
    let site_key: Vec<u64> = (0..m).map(|_| rng.random()).collect();

    // interaction multiplicities between logical qubits
    let mut weight = vec![vec![0usize; n]; n];
    for g in c.body() {
        if let [a, b] = g.qubits()[..] {
            weight[a][b] += 1;
            weight[b][a] += 1;
        }
    }
    let degree: Vec<usize> = weight
        .iter()
        .map(|row| row.iter().filter(|&&w| w > 0).count())
        .collect();
    let center = t.site(t.rows / 2, t.cols / 2);

    let mut occupant: Vec<Option<usize>> = vec![None; m];
    let mut site_of: Vec<Option<usize>> = vec![None; n];
    for _ in 0..n {
        let q = (0..n)
            .filter(|&q| site_of[q].is_none())
            .max_by_key(|&q| {
                let placed = (0..n)
                    .filter(|&r| weight[q][r] > 0 && site_of[r].is_some())
                    .count();
                (placed, degree[q], qubit_key[q])
            })
            .expect("an unplaced qubit remains");
        let site = (0..m)
            .filter(|&s| occupant[s].is_none())
            .min_by_key(|&s| {
                let pull: usize = (0..n)
                    .filter_map(|r| site_of[r].map(|rs| weight[q][r] * t.distance(s, rs)))
                    .sum();
                (pull, t.distance(s, center), site_key[s])
            })
            .expect("grid has a free site");
        occupant[site] = Some(q);
        site_of[q] = Some(site);
    }
    Ok(Placement(occupant))
}

pub fn schedule(c: &LogicalCircuit, t: GridTopology, seed: u64) -> Result<Schedule, ScheduleError> {
    let placement = initial_placement(c, t, seed)?;
    schedule_with_placement(c, t, placement)
}

fn check_fits(c: &LogicalCircuit, t: GridTopology) -> Result<(), ScheduleError> {
    if t.sites() < c.n_qubits() {
        return Err(ScheduleError::GridTooSmall {
            rows: t.rows,
            cols: t.cols,
            n: c.n_qubits(),
        });
    }
    Ok(())
}

struct Router<'a> {
    t: GridTopology,
    couplings: Vec<(usize, usize)>,
    body: &'a [crate::circuit::Gate],
    site_of: Vec<usize>,
    occupant: Vec<Option<usize>>,
    busy: Vec<bool>,
    ops: Vec<Operation>,
    next_swap: u32,
}

impl Router<'_> {
    fn sites_of(&self, g: usize) -> Vec<usize> {
        self.body[g].qubits().iter().map(|&q| self.site_of[q]).collect()
    }

    fn pair_sites(&self, g: usize) -> (usize, usize) {
        let s = self.sites_of(g);
        (s[0], s[1])
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        self.occupant.swap(a, b);
        for s in [a, b] {
            if let Some(q) = self.occupant[s] {
                self.site_of[q] = s;
            }
        }
        self.busy[a] = true;
        self.busy[b] = true;
        self.ops.push(Operation {
            entry: Entry::Swap(self.next_swap),
            sites: vec![a, b],
        });
        self.next_swap += 1;
    }

    /// One SWAP along a shortest path for gate `g`, from whichever end is
    /// free this cycle.
    fn step(&mut self, g: usize) -> bool {
        let (sa, sb) = self.pair_sites(g);
        if self.t.adjacent(sa, sb) {
            return false;
        }
        for (from, to) in [(sa, sb), (sb, sa)] {
            let next = self.t.step_toward(from, to);
            if !self.busy[from] && !self.busy[next] {
                self.apply_swap(from, next);
                return true;
            }
        }
        false
    }

    /// Best free coupling to swap by reduction of the summed distance of
    /// the pending two-qubit gates; ties go to the swap serving the lowest
    /// gate id, then the lowest site pair.
    fn best_swap(&self, pending: &[usize], protected: &[usize]) -> Option<(usize, usize)> {
        let mut best: Option<(i64, usize, (usize, usize))> = None;
        for &(a, b) in &self.couplings {
            if self.busy[a] || self.busy[b] || protected.contains(&a) || protected.contains(&b) {
                continue;
            }
            if self.occupant[a].is_none() && self.occupant[b].is_none() {
                continue;
            }
            let moved = |s: usize| match s {
                s if s == a => b,
                s if s == b => a,
                s => s,
            };
            let mut gain = 0i64;
            let mut first_id = usize::MAX;
            for &g in pending {
                let (sa, sb) = self.pair_sites(g);
                let (na, nb) = (moved(sa), moved(sb));
                if (na, nb) != (sa, sb) {
                    gain += self.t.distance(sa, sb) as i64 - self.t.distance(na, nb) as i64;
                    first_id = first_id.min(g);
                }
            }
            if gain <= 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bg, bid, _)) => gain > bg || (gain == bg && first_id < bid),
            };
            if better {
                best = Some((gain, first_id, (a, b)));
            }
        }
        best.map(|(_, _, pair)| pair)
    }
}

/// Greedy list scheduling with SWAP insertion from a given placement.
///
/// Every cycle first issues all ready gates whose qubits are free and, for
/// two-qubit gates, adjacent, in ascending gate id. Remaining free sites are
/// then used for SWAPs that shorten the pending two-qubit gates. When a
/// cycle would otherwise make no progress, the lowest pending gate is
/// pinned and walked along a shortest path until it executes.
pub fn schedule_with_placement(
    c: &LogicalCircuit,
    t: GridTopology,
    placement: Placement,
) -> Result<Schedule, ScheduleError> {
    check_fits(c, t)?;
    if placement.sites() != t.sites() {
        return Err(ScheduleError::BadPlacement(format!(
            "placement covers {} sites, grid has {}",
            placement.sites(),
            t.sites()
        )));
    }
    let site_of = placement.logical_to_site(c.n_qubits())?;
    let body = c.body();
    let deps = c.body_dependencies();
    let mut successors = vec![Vec::new(); body.len()];
    let mut waiting: Vec<usize> = deps.iter().map(Vec::len).collect();
    for (j, preds) in deps.iter().enumerate() {
        for &i in preds {
            successors[i].push(j);
        }
    }
    let mut ready: BTreeSet<usize> = (0..body.len()).filter(|&g| waiting[g] == 0).collect();

    let mut r = Router {
        t,
        couplings: t.couplings(),
        body,
        site_of,
        occupant: placement.0.clone(),
        busy: vec![false; t.sites()],
        ops: Vec::new(),
        next_swap: 1,
    };
    let mut cycles = Vec::new();
    let mut pinned: Option<usize> = None;

    while !ready.is_empty() {
        r.busy.iter_mut().for_each(|b| *b = false);
        r.ops.clear();

        let mut executed = Vec::new();
        for &g in &ready {
            let sites = r.sites_of(g);
            if sites.iter().any(|&s| r.busy[s]) {
                continue;
            }
            if sites.len() == 2 && !t.adjacent(sites[0], sites[1]) {
                continue;
            }
            for &s in &sites {
                r.busy[s] = true;
            }
            r.ops.push(Operation {
                entry: Entry::Alg(g as u32 + 1),
                sites,
            });
            executed.push(g);
        }
        for g in &executed {
            ready.remove(g);
        }
        if pinned.is_some_and(|p| executed.contains(&p)) {
            pinned = None;
        }

        let pending: Vec<usize> = ready
            .iter()
            .copied()
            .filter(|&g| body[g].arity() == 2)
            .collect();
        let mut progress = !executed.is_empty();
        if let Some(p) = pinned {
            progress |= r.step(p);
        }
        loop {
            let protected = pinned.map(|p| r.sites_of(p)).unwrap_or_default();
            match r.best_swap(&pending, &protected) {
                Some((a, b)) => {
                    r.apply_swap(a, b);
                    progress = true;
                }
                None => break,
            }
        }
        if !progress {
            // nothing executed and no improving swap: every ready gate is a
            // non-adjacent pair and the whole grid is free
            let p = pending[0];
            pinned = Some(p);
            let moved = r.step(p);
            debug_assert!(moved);
        }

        cycles.push(std::mem::take(&mut r.ops));
        for g in executed {
            for &s in &successors[g] {
                waiting[s] -= 1;
                if waiting[s] == 0 {
                    ready.insert(s);
                }
            }
        }
    }

    Ok(Schedule { placement, cycles })
}

use std::collections::HashMap;
use std::fmt;

use super::{Entry, GridTopology, Schedule};
use crate::circuit::LogicalCircuit;

/// One broken schedule constraint. Cycle indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    SiteOutOfRange { cycle: usize, site: usize },
    /// A site is claimed by more than one operation in a cycle.
    Exclusivity { cycle: usize, site: usize },
    UnknownGate { cycle: usize, id: u32 },
    Arity { cycle: usize, entry: Entry, expected: usize, found: usize },
    NotAdjacent { cycle: usize, entry: Entry, sites: Vec<usize> },
    /// The sites of a gate do not hold the gate's logical qubits.
    WrongQubits { cycle: usize, id: u32, expected: Vec<usize>, found: Vec<Option<usize>> },
    Duplicate { cycle: usize, entry: Entry, first_cycle: usize },
    MissingGate { id: u32 },
    /// Gate `after` ran no later than gate `before` although they share a
    /// qubit and do not commute.
    Order { before: u32, after: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(msg) => write!(f, "malformed schedule: {msg}"),
            Violation::SiteOutOfRange { cycle, site } => {
                write!(f, "cycle {cycle}: site {site} outside the grid")
            }
            Violation::Exclusivity { cycle, site } => {
                write!(f, "cycle {cycle}: site {site} used by more than one operation")
            }
            Violation::UnknownGate { cycle, id } => write!(f, "cycle {cycle}: unknown gate {id}"),
            Violation::Arity { cycle, entry, expected, found } => write!(
                f,
                "cycle {cycle}: {entry:?} spans {found} sites, expected {expected}"
            ),
            Violation::NotAdjacent { cycle, entry, sites } => {
                write!(f, "cycle {cycle}: {entry:?} on non-adjacent sites {sites:?}")
            }
            Violation::WrongQubits { cycle, id, expected, found } => write!(
                f,
                "cycle {cycle}: gate {id} acts on logical {expected:?} but its sites hold {found:?}"
            ),
            Violation::Duplicate { cycle, entry, first_cycle } => write!(
                f,
                "cycle {cycle}: {entry:?} already scheduled in cycle {first_cycle}"
            ),
            Violation::MissingGate { id } => write!(f, "gate {id} never scheduled"),
            Violation::Order { before, after } => {
                write!(f, "gate {after} must run after gate {before}")
            }
        }
    }
}

/// Checks exclusive site use, coupling of two-site operations, that every
/// gate runs exactly once on the sites currently holding its logical
/// qubits (tracking SWAPs), and that non-commuting gates keep circuit order.
/// An empty result means the schedule is valid.
pub fn validate_schedule(s: &Schedule, c: &LogicalCircuit, t: GridTopology) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = t.sites();
    if s.placement.sites() != m {
        out.push(Violation::Shape(format!(
            "placement covers {} sites, grid has {m}",
            s.placement.sites()
        )));
        return out;
    }
    if let Err(e) = s.placement.logical_to_site(c.n_qubits()) {
        out.push(Violation::Shape(e.to_string()));
        return out;
    }

    let body = c.body();
    let mut occupant = s.placement.0.clone();
    let mut ran_at: Vec<Option<usize>> = vec![None; body.len()];
    let mut swap_at: HashMap<u32, usize> = HashMap::new();

    for (cycle, ops) in s.cycles.iter().enumerate() {
        let mut used = vec![false; m];
        let mut swaps = Vec::new();
        for op in ops {
            let mut in_range = true;
            for &site in &op.sites {
                if site >= m {
                    out.push(Violation::SiteOutOfRange { cycle, site });
                    in_range = false;
                } else if used[site] {
                    out.push(Violation::Exclusivity { cycle, site });
                } else {
                    used[site] = true;
                }
            }
            if !in_range {
                continue;
            }
            let expected = match op.entry {
                Entry::Alg(id) if id == 0 || id as usize > body.len() => {
                    out.push(Violation::UnknownGate { cycle, id });
                    continue;
                }
                Entry::Alg(id) => body[id as usize - 1].arity(),
                Entry::Swap(_) => 2,
            };
            if op.sites.len() != expected {
                out.push(Violation::Arity {
                    cycle,
                    entry: op.entry,
                    expected,
                    found: op.sites.len(),
                });
                continue;
            }
            if expected == 2 && !t.adjacent(op.sites[0], op.sites[1]) {
                out.push(Violation::NotAdjacent {
                    cycle,
                    entry: op.entry,
                    sites: op.sites.clone(),
                });
            }
            match op.entry {
                Entry::Alg(id) => {
                    let gate = &body[id as usize - 1];
                    let mut want = gate.qubits();
                    want.sort_unstable();
                    let found: Vec<Option<usize>> = op.sites.iter().map(|&s| occupant[s]).collect();
                    let mut have: Vec<usize> = found.iter().flatten().copied().collect();
                    have.sort_unstable();
                    if have != want {
                        out.push(Violation::WrongQubits {
                            cycle,
                            id,
                            expected: gate.qubits(),
                            found,
                        });
                    }
                    let slot = &mut ran_at[id as usize - 1];
                    match *slot {
                        Some(first_cycle) => out.push(Violation::Duplicate {
                            cycle,
                            entry: op.entry,
                            first_cycle,
                        }),
                        None => *slot = Some(cycle),
                    }
                }
                Entry::Swap(id) => {
                    if let Some(&first_cycle) = swap_at.get(&id) {
                        out.push(Violation::Duplicate {
                            cycle,
                            entry: op.entry,
                            first_cycle,
                        });
                    } else {
                        swap_at.insert(id, cycle);
                    }
                    swaps.push((op.sites[0], op.sites[1]));
                }
            }
        }
        for (a, b) in swaps {
            occupant.swap(a, b);
        }
    }

    for (g, at) in ran_at.iter().enumerate() {
        if at.is_none() {
            out.push(Violation::MissingGate { id: g as u32 + 1 });
        }
    }
    for (j, preds) in c.body_dependencies().iter().enumerate() {
        for &i in preds {
            if let (Some(ci), Some(cj)) = (ran_at[i], ran_at[j]) {
                if ci >= cj {
                    out.push(Violation::Order {
                        before: i as u32 + 1,
                        after: j as u32 + 1,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_qaoa_circuit, Gate, QaoaParams};
    use crate::graphs::Graph;
    use crate::scheduler::{Operation, Placement};

    // single edge on a 1x3 line: qubits at sites 0 and 2
    fn setup() -> (LogicalCircuit, GridTopology, Placement) {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let c = build_qaoa_circuit(&g, &QaoaParams::zeros(1));
        (c, GridTopology::new(1, 3), Placement(vec![Some(0), None, Some(1)]))
    }

    fn op(entry: Entry, sites: &[usize]) -> Operation {
        Operation {
            entry,
            sites: sites.to_vec(),
        }
    }

    #[test]
    fn hand_built_valid_schedule() {
        let (c, t, placement) = setup();
        // body: 1 = zz(0,1), 2 = rx(0), 3 = rx(1)
        let s = Schedule {
            placement,
            cycles: vec![
                vec![op(Entry::Swap(1), &[0, 1])],
                vec![op(Entry::Alg(1), &[1, 2])],
                vec![op(Entry::Alg(2), &[1]), op(Entry::Alg(3), &[2])],
            ],
        };
        assert_eq!(validate_schedule(&s, &c, t), vec![]);
    }

    #[test]
    fn exclusivity_violation() {
        let (c, t, placement) = setup();
        let s = Schedule {
            placement,
            cycles: vec![
                vec![op(Entry::Swap(1), &[0, 1])],
                vec![op(Entry::Alg(1), &[1, 2])],
                vec![op(Entry::Alg(2), &[1]), op(Entry::Alg(3), &[1])],
            ],
        };
        let v = validate_schedule(&s, &c, t);
        assert!(v.contains(&Violation::Exclusivity { cycle: 2, site: 1 }), "{v:?}");
    }

    #[test]
    fn adjacency_violation() {
        let (c, t, placement) = setup();
        let s = Schedule {
            placement,
            cycles: vec![
                vec![op(Entry::Alg(1), &[0, 2])],
                vec![op(Entry::Alg(2), &[0]), op(Entry::Alg(3), &[2])],
            ],
        };
        let v = validate_schedule(&s, &c, t);
        assert_eq!(
            v,
            vec![Violation::NotAdjacent {
                cycle: 0,
                entry: Entry::Alg(1),
                sites: vec![0, 2]
            }]
        );
    }

    #[test]
    fn order_wrong_qubits_and_missing() {
        let (c, t, placement) = setup();
        let s = Schedule {
            placement,
            cycles: vec![
                vec![op(Entry::Alg(2), &[2]), op(Entry::Swap(1), &[0, 1])],
                vec![op(Entry::Alg(1), &[1, 2])],
            ],
        };
        let v = validate_schedule(&s, &c, t);
        assert!(v.iter().any(|x| matches!(x, Violation::WrongQubits { id: 2, .. })));
        assert!(v.contains(&Violation::MissingGate { id: 3 }));
        assert!(v.contains(&Violation::Order { before: 1, after: 2 }));
    }

    #[test]
    fn arity_duplicates_and_unknown() {
        let c = LogicalCircuit::new(1, vec![Gate::Rx { qubit: 0, angle: 0.1 }]).unwrap();
        let t = GridTopology::new(1, 2);
        let s = Schedule {
            placement: Placement(vec![Some(0), None]),
            cycles: vec![
                vec![op(Entry::Alg(1), &[0, 1])],
                vec![op(Entry::Alg(1), &[0])],
                vec![op(Entry::Alg(9), &[0]), op(Entry::Swap(1), &[1])],
            ],
        };
        let v = validate_schedule(&s, &c, t);
        assert!(v.iter().any(|x| matches!(x, Violation::Arity { cycle: 0, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::UnknownGate { id: 9, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::Arity { cycle: 2, entry: Entry::Swap(1), .. })));
    }

    #[test]
    fn shape_checks() {
        let (c, t, _) = setup();
        let s = Schedule {
            placement: Placement(vec![Some(0), Some(1)]),
            cycles: vec![],
        };
        assert!(matches!(validate_schedule(&s, &c, t)[0], Violation::Shape(_)));
    }
}

//! PDPT text format: one column per physical qubit, one row per clock cycle.
//!
//! ```text
//! # PDPT: each column is associated to a physical qubit , each row to a clock-cycle
//! ## physical qubit indices ##################################################
//!         0       1       2
//! ## logical qubit indices ###################################################
//!         1       0       *
//! ############################################################################
//!         1       1       0
//!         -1      -1      2
//! ############################################################################
//! ```
//!
//! Lines starting with `#` are comments. Values sit on 8-column tab stops
//! (the layout of a tab-separated file with tabs expanded). `*` marks an
//! unused site, `0` an idle site, a positive value a circuit gate and a
//! negative value a routing SWAP.

use thiserror::Error;

use super::{Entry, Operation, Placement, Schedule};

const TITLE: &str =
    "# PDPT: each column is associated to a physical qubit , each row to a clock-cycle";
const PHYSICAL: &str =
    "## physical qubit indices ##################################################";
const LOGICAL: &str =
    "## logical qubit indices ###################################################";
const RULE: &str =
    "############################################################################";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdptError {
    #[error("line {line}: expected {expected} columns, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("line {line}: unrecognized token {token:?}")]
    Token { line: usize, token: String },
    #[error("line {line}: value {code} appears on {count} sites in one cycle")]
    TooManySites { line: usize, code: i64, count: usize },
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: String },
    #[error("missing {0} row")]
    Missing(&'static str),
}

fn tab_row<I: IntoIterator<Item = String>>(tokens: I) -> String {
    let mut line = String::new();
    for tok in tokens {
        let target = (line.len() / 8 + 1) * 8;
        line.extend(std::iter::repeat_n(' ', target - line.len()));
        line.push_str(&tok);
    }
    line
}

pub fn emit_pdpt(s: &Schedule) -> String {
    let mut out = String::new();
    for line in [
        TITLE.to_string(),
        PHYSICAL.to_string(),
        tab_row((0..s.sites()).map(|i| i.to_string())),
        LOGICAL.to_string(),
        tab_row(s.placement.0.iter().map(|q| match q {
            Some(q) => q.to_string(),
            None => "*".to_string(),
        })),
        RULE.to_string(),
    ] {
        out.push_str(&line);
        out.push('\n');
    }
    for row in s.table() {
        out.push_str(&tab_row(row.iter().map(i64::to_string)));
        out.push('\n');
    }
    out.push_str(RULE);
    out.push('\n');
    out
}

pub fn parse_pdpt(text: &str) -> Result<Schedule, PdptError> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, physical) = rows.next().ok_or(PdptError::Missing("physical index"))?;
    let columns: Vec<usize> = physical
        .split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| PdptError::Token {
                line,
                token: t.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    let m = columns.len();
    let mut sorted = columns.clone();
    sorted.sort_unstable();
    if sorted != (0..m).collect::<Vec<_>>() {
        return Err(PdptError::Header {
            line,
            msg: "physical indices must be a permutation of 0..M".into(),
        });
    }

    let (line, logical) = rows.next().ok_or(PdptError::Missing("logical index"))?;
    let tokens: Vec<&str> = logical.split_whitespace().collect();
    if tokens.len() != m {
        return Err(PdptError::Ragged {
            line,
            expected: m,
            found: tokens.len(),
        });
    }
    let mut placement = vec![None; m];
    for (col, tok) in tokens.iter().enumerate() {
        placement[columns[col]] = match *tok {
            "*" => None,
            t => Some(t.parse().map_err(|_| PdptError::Token {
                line,
                token: t.to_string(),
            })?),
        };
    }

    let mut cycles = Vec::new();
    for (line, row) in rows {
        let codes: Vec<i64> = row
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| PdptError::Token {
                    line,
                    token: t.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        if codes.len() != m {
            return Err(PdptError::Ragged {
                line,
                expected: m,
                found: codes.len(),
            });
        }
        let mut ops: Vec<Operation> = Vec::new();
        for (col, &code) in codes.iter().enumerate() {
            let Some(entry) = Entry::from_code(code) else {
                continue;
            };
            let site = columns[col];
            match ops.iter_mut().find(|op| op.entry == entry) {
                Some(op) => {
                    op.sites.push(site);
                    if op.sites.len() > 2 {
                        return Err(PdptError::TooManySites {
                            line,
                            code,
                            count: op.sites.len(),
                        });
                    }
                }
                None => ops.push(Operation {
                    entry,
                    sites: vec![site],
                }),
            }
        }
        cycles.push(ops);
    }

    Ok(Schedule {
        placement: Placement(placement),
        cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# PDPT: each column is associated to a physical qubit , each row to a clock-cycle
## physical qubit indices ##################################################
        0       1       2
## logical qubit indices ###################################################
        0       *       1
############################################################################
        -1      -1      0
        0       1       1
        0       2       3
############################################################################
";

    #[test]
    fn small_round_trip() {
        let s = parse_pdpt(SMALL).unwrap();
        assert_eq!(s.placement, Placement(vec![Some(0), None, Some(1)]));
        assert_eq!(s.cycles.len(), 3);
        assert_eq!(emit_pdpt(&s), SMALL);
    }

    #[test]
    fn tab_stops() {
        assert_eq!(tab_row(["-3".into(), "9".into()]), "        -3      9");
        assert_eq!(tab_row(["-1234567".into(), "1".into()]), "        -1234567        1");
    }

    #[test]
    fn rejects_malformed() {
        let ragged = SMALL.replace("        0       2       3\n", "        0       2\n");
        assert!(matches!(parse_pdpt(&ragged), Err(PdptError::Ragged { line: 9, .. })));
        let token = SMALL.replace("        0       2       3\n", "        0       x       3\n");
        assert!(matches!(parse_pdpt(&token), Err(PdptError::Token { .. })));
        let triple = SMALL.replace("        0       2       3\n", "        4       4       4\n");
        assert!(matches!(parse_pdpt(&triple), Err(PdptError::TooManySites { code: 4, .. })));
        assert!(matches!(parse_pdpt("# only comments\n"), Err(PdptError::Missing(_))));
        let header = SMALL.replace("        0       1       2\n", "        0       1       5\n");
        assert!(matches!(parse_pdpt(&header), Err(PdptError::Header { .. })));
    }

    #[test]
    fn tabs_are_accepted() {
        let tabbed = "0\t1\n\t1\t0\n\t1\t1\n";
        let s = parse_pdpt(tabbed).unwrap();
        assert_eq!(s.cycles[0][0].sites, vec![0, 1]);
    }
}

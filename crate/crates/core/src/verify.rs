//! Independent checker for packing colorings. Every coloring the library
//! emits goes through here before it is returned.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::graph::Graph;
use crate::packing::{PackingColoring, PackingSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("coloring uses classes {used} which do not fit the sequence {budget}")]
    BudgetExceeded { used: String, budget: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Two members of one class are within its distance parameter.
    TooClose {
        class_index: usize,
        parameter: u32,
        u: usize,
        v: usize,
        distance: usize,
    },
    Uncolored {
        vertex: usize,
    },
    /// Vertex listed in more than one class.
    Repeated {
        vertex: usize,
    },
    OutOfRange {
        vertex: usize,
    },
}

/// Checks `col` against `seq` on `g`, returning every violation found (an
/// empty list means the coloring is valid).
pub fn verify(
    g: &Graph,
    seq: &PackingSequence,
    col: &PackingColoring,
) -> Result<Vec<Violation>, VerifyError> {
    let used = col.sequence();
    if !used.fits_within(seq) {
        return Err(VerifyError::BudgetExceeded {
            used: used.to_string(),
            budget: seq.to_string(),
        });
    }
    let n = g.n();
    let mut violations = Vec::new();
    let mut seen = vec![false; n];
    for class in &col.classes {
        for &v in &class.vertices {
            if v >= n {
                violations.push(Violation::OutOfRange { vertex: v });
            } else if seen[v] {
                violations.push(Violation::Repeated { vertex: v });
            } else {
                seen[v] = true;
            }
        }
    }
    for &v in &col.uncolored {
        if v >= n {
            violations.push(Violation::OutOfRange { vertex: v });
        }
    }
    violations.extend(
        (0..n)
            .filter(|&v| !seen[v])
            .map(|vertex| Violation::Uncolored { vertex }),
    );

    for (class_index, class) in col.classes.iter().enumerate() {
        let members: Vec<usize> = class.vertices.iter().copied().filter(|&v| v < n).collect();
        let mask = BitSet::from_iter_with_len(n, members.iter().copied());
        for &u in &members {
            let dist = g.bfs_bounded(u, class.parameter as usize);
            for v in mask.iter().filter(|&v| v > u) {
                if let Some(d) = dist[v] {
                    violations.push(Violation::TooClose {
                        class_index,
                        parameter: class.parameter,
                        u,
                        v,
                        distance: d,
                    });
                }
            }
        }
    }
    Ok(violations)
}

/// Convenience wrapper: `true` iff the budget fits and nothing is violated.
pub fn is_valid(g: &Graph, seq: &PackingSequence, col: &PackingColoring) -> bool {
    matches!(verify(g, seq, col), Ok(v) if v.is_empty())
}

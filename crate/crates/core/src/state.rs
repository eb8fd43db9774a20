use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pmf::Level;

/// One joint capacity assignment for a plan: `x` per branch and `y` per
/// compute node, both in path order.
///
/// The derived ordering is lexicographic over the concatenation `(x, y)`,
/// which is the canonical order used everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateVector {
    pub x: Vec<Level>,
    pub y: Vec<Level>,
}

impl StateVector {
    pub fn new(x: Vec<Level>, y: Vec<Level>) -> Self {
        Self { x, y }
    }

    /// Splits a flat `(x, y)` vector after `branches` components.
    pub fn from_flat(flat: &[Level], branches: usize) -> Self {
        Self {
            x: flat[..branches].to_vec(),
            y: flat[branches..].to_vec(),
        }
    }

    pub fn flat(&self) -> Vec<Level> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn components(&self) -> impl Iterator<Item = Level> + '_ {
        self.x.iter().chain(&self.y).copied()
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &StateVector) -> bool {
        self.x.len() == other.x.len()
            && self.y.len() == other.y.len()
            && self
                .components()
                .zip(other.components())
                .all(|(a, b)| a <= b)
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &StateVector) -> StateVector {
        let max = |a: &[Level], b: &[Level]| a.iter().zip(b).map(|(&p, &q)| p.max(q)).collect();
        StateVector {
            x: max(&self.x, &other.x),
            y: max(&self.y, &other.y),
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Level]| {
            v.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "X=({}) Y=({})", list(&self.x), list(&self.y))
    }
}

/// Componentwise `a <= b` on flat vectors.
pub(crate) fn le(a: &[Level], b: &[Level]) -> bool {
    a.iter().zip(b).all(|(p, q)| p <= q)
}

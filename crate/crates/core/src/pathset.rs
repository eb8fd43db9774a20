//! Feasible state vectors of a plan and their minimal elements.
//!
//! Completion time is antitone in every capacity, so the feasible set is an
//! upper set of the state lattice and is fully described by its minimal
//! elements (minimal status vectors). Enumeration walks one dimension at a
//! time from the highest level down: the best case for the remaining
//! dimensions bounds the time from below, and once a level is infeasible
//! every lower level of that dimension is too, so the walk stops there.

use serde::{Deserialize, Serialize};

use crate::error::GuardError;
use crate::pmf::Level;
use crate::scenario::Chain;
use crate::state::{le, StateVector};
use crate::timing::{TimeModel, TIME_TOLERANCE};

/// Default cap on state vectors visited by an exact enumeration.
pub const DEFAULT_SEARCH_GUARD: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_visited: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_visited: DEFAULT_SEARCH_GUARD,
        }
    }
}

/// Every state vector of a plan meeting the deadline, canonically ordered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub plan: String,
    pub input_size: f64,
    pub deadline: f64,
    pub vectors: Vec<StateVector>,
}

/// Minimal elements of a [`SolutionSet`]: an antichain whose upward closure
/// is the feasible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsvSet {
    pub plan: String,
    pub input_size: f64,
    pub deadline: f64,
    pub vectors: Vec<StateVector>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl MsvSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Levels of every dimension (branches, then compute nodes) with positive
/// probability, ascending.
pub(crate) fn supports(chain: &Chain<'_>) -> Vec<Vec<Level>> {
    chain
        .marginals()
        .into_iter()
        .map(|pmf| pmf.support().collect())
        .collect()
}

/// Enumerates the feasible set of `chain` by pruned implicit enumeration.
pub fn feasible_vectors(
    chain: &Chain<'_>,
    input_size: f64,
    deadline: f64,
    limits: SearchLimits,
) -> Result<SolutionSet, GuardError> {
    let model = TimeModel::new(chain, input_size);
    let levels = supports(chain);
    let mut walk = Walk {
        model: &model,
        levels: &levels,
        best_rest: best_suffix(&model, &levels),
        budget: deadline + TIME_TOLERANCE,
        limit: limits.max_visited,
        visited: 0,
        prefix: Vec::with_capacity(levels.len()),
        found: Vec::new(),
    };
    walk.descend(model.lead())?;
    let mut flat = walk.found;
    flat.sort_unstable();
    Ok(SolutionSet {
        plan: chain.name.to_owned(),
        input_size,
        deadline,
        vectors: flat
            .iter()
            .map(|v| StateVector::from_flat(v, chain.branch_count()))
            .collect(),
    })
}

/// `best_rest[d]` is the smallest time dimensions `d..` can contribute
/// (`None` if one of them can never be bounded).
fn best_suffix(model: &TimeModel, levels: &[Vec<Level>]) -> Vec<Option<f64>> {
    let mut out = vec![Some(0.0); levels.len() + 1];
    for d in (0..levels.len()).rev() {
        let best = levels[d]
            .iter()
            .filter_map(|&l| model.term(d, l))
            .fold(None, |acc: Option<f64>, t| {
                Some(acc.map_or(t, |a| a.min(t)))
            });
        out[d] = match (best, out[d + 1]) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
    }
    out
}

struct Walk<'a> {
    model: &'a TimeModel,
    levels: &'a [Vec<Level>],
    best_rest: Vec<Option<f64>>,
    budget: f64,
    limit: u64,
    visited: u64,
    prefix: Vec<Level>,
    found: Vec<Vec<Level>>,
}

impl Walk<'_> {
    fn descend(&mut self, elapsed: f64) -> Result<(), GuardError> {
        let d = self.prefix.len();
        if d == self.levels.len() {
            self.found.push(self.prefix.clone());
            return Ok(());
        }
        let Some(rest) = self.best_rest[d + 1] else {
            return Ok(());
        };
        for &level in self.levels[d].iter().rev() {
            self.visited += 1;
            if self.visited > self.limit {
                return Err(GuardError::SearchSpace { limit: self.limit });
            }
            let Some(term) = self.model.term(d, level) else {
                break;
            };
            let t = elapsed + term;
            if t + rest > self.budget {
                break;
            }
            self.prefix.push(level);
            self.descend(t)?;
            self.prefix.pop();
        }
        Ok(())
    }
}

/// Reduces a solution set to its minimal elements under componentwise `<=`.
pub fn minimal_vectors(solutions: &SolutionSet) -> MsvSet {
    MsvSet {
        plan: solutions.plan.clone(),
        input_size: solutions.input_size,
        deadline: solutions.deadline,
        vectors: minimal_antichain(&solutions.vectors),
    }
}

/// Minimal elements of `vectors`, deduplicated and canonically ordered.
///
/// In lexicographic order any strict dominator of `v` comes before `v`, so a
/// single pass that compares each vector against the minima kept so far is
/// enough.
pub fn minimal_antichain(vectors: &[StateVector]) -> Vec<StateVector> {
    let mut sorted = vectors.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<StateVector> = Vec::new();
    for v in sorted {
        if !kept.iter().any(|m| m.dominated_by(&v)) {
            kept.push(v);
        }
    }
    kept
}

/// Flat-vector variant of [`minimal_antichain`].
pub(crate) fn minimize_flat(mut vectors: Vec<Vec<Level>>) -> Vec<Vec<Level>> {
    vectors.sort_unstable();
    vectors.dedup();
    let mut kept: Vec<Vec<Level>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if !kept.iter().any(|m| le(m, &v)) {
            kept.push(v);
        }
    }
    kept
}

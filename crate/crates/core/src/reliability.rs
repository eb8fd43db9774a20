//! Probability that a plan meets its deadline.
//!
//! A plan succeeds when the realized state dominates at least one minimal
//! status vector. With independent marginals the probability of dominating a
//! single vector `d` is `Π Pr(X_i >= d_i)`; the union over all minimal vectors
//! is computed with a recursive sum of disjoint products:
//!
//! ```text
//! R({})          = 0
//! R({d})         = Pr(state >= d)
//! R({d_1..d_m})  = R({d_1..d_{m-1}}) + Pr(state >= d_m) - R(min{d_j ∨ d_m : j < m})
//! ```
//!
//! where `∨` is the componentwise maximum and `min` keeps minimal elements.
//! Two independent oracles check it: direct summation of the joint pmf over
//! the feasible region, and plain inclusion-exclusion.

use std::collections::HashMap;

use crate::error::GuardError;
use crate::pathset::{minimize_flat, supports, MsvSet, SearchLimits};
use crate::pmf::{Level, PROB_TOLERANCE};
use crate::scenario::Chain;
use crate::state::StateVector;
use crate::timing::{TimeModel, TIME_TOLERANCE};

/// Largest antichain accepted by [`inclusion_exclusion_reliability`].
pub const MAX_INCLUSION_EXCLUSION: usize = 25;

/// Survival tables of every dimension of a plan, in state-vector order.
#[derive(Clone, Debug)]
pub struct Marginals {
    /// `tails[d][l] = Pr(X_d >= l)` for `l` in `0..=max_level + 1`.
    tails: Vec<Vec<f64>>,
}

impl Marginals {
    pub fn new(chain: &Chain<'_>) -> Self {
        let tails = chain
            .marginals()
            .into_iter()
            .map(|pmf| (0..=pmf.max_level() + 1).map(|l| pmf.survival(l)).collect())
            .collect();
        Self { tails }
    }

    pub fn dims(&self) -> usize {
        self.tails.len()
    }

    pub fn survival(&self, d: usize, level: Level) -> f64 {
        let tail = &self.tails[d];
        tail.get(level as usize).copied().unwrap_or(0.0)
    }

    /// `Pr(state >= v)` for a flat vector.
    pub fn dominance(&self, flat: &[Level]) -> f64 {
        flat.iter()
            .enumerate()
            .map(|(d, &l)| self.survival(d, l))
            .product()
    }
}

/// Probability that the realized state of `chain` dominates `v`.
pub fn event_probability(v: &StateVector, chain: &Chain<'_>) -> f64 {
    Marginals::new(chain).dominance(&v.flat())
}

/// Union probability of the dominance events of `msvs` by recursive sum of
/// disjoint products.
pub fn rsdp_reliability(msvs: &MsvSet, chain: &Chain<'_>) -> f64 {
    let marginals = Marginals::new(chain);
    let set = minimize_flat(msvs.vectors.iter().map(StateVector::flat).collect());
    Rsdp {
        marginals: &marginals,
        memo: HashMap::new(),
    }
    .union(&set)
    .clamp(0.0, 1.0)
}

struct Rsdp<'a> {
    marginals: &'a Marginals,
    memo: HashMap<Vec<Vec<Level>>, f64>,
}

impl Rsdp<'_> {
    /// `set` must be a canonically ordered antichain.
    fn union(&mut self, set: &[Vec<Level>]) -> f64 {
        match set {
            [] => return 0.0,
            [only] => return self.marginals.dominance(only),
            _ => {}
        }
        if let Some(&r) = self.memo.get(set) {
            return r;
        }
        let (last, head) = set.split_last().expect("non-empty");
        let overlap = minimize_flat(
            head.iter()
                .map(|d| d.iter().zip(last).map(|(&a, &b)| a.max(b)).collect())
                .collect(),
        );
        let r = self.union(head) + self.marginals.dominance(last) - self.union(&overlap);
        self.memo.insert(set.to_vec(), r);
        r
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Sums the joint pmf over every state (positive-probability levels) that
/// meets the deadline. Does not use minimal vectors.
pub fn exact_reliability(
    chain: &Chain<'_>,
    input_size: f64,
    deadline: f64,
    limits: SearchLimits,
) -> Result<f64, GuardError> {
    let model = TimeModel::new(chain, input_size);
    let pmfs = chain.marginals();
    let levels = supports(chain);
    let total = levels
        .iter()
        .try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64))
        .filter(|&n| n <= limits.max_visited);
    if total.is_none() {
        return Err(GuardError::SearchSpace {
            limit: limits.max_visited,
        });
    }

    let dims = levels.len();
    let mut index = vec![0usize; dims];
    let mut state: Vec<Level> = levels.iter().map(|l| l[0]).collect();
    let mut acc = CompensatedSum::default();
    'odometer: loop {
        if let Some(t) = model.total_flat(&state) {
            if t <= deadline + TIME_TOLERANCE {
                let p: f64 = state
                    .iter()
                    .zip(&pmfs)
                    .map(|(&l, pmf)| pmf.prob(l))
                    .product();
                acc.add(p);
            }
        }
        for d in (0..dims).rev() {
            index[d] += 1;
            if index[d] < levels[d].len() {
                state[d] = levels[d][index[d]];
                continue 'odometer;
            }
            index[d] = 0;
            state[d] = levels[d][0];
        }
        break;
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

/// `Σ_{S ≠ ∅} (-1)^{|S|+1} Pr(state >= ∨S)` over subsets of `msvs`.
pub fn inclusion_exclusion_reliability(
    msvs: &MsvSet,
    chain: &Chain<'_>,
) -> Result<f64, GuardError> {
    if msvs.len() > MAX_INCLUSION_EXCLUSION {
        return Err(GuardError::SubsetCount {
            count: msvs.len(),
            limit: MAX_INCLUSION_EXCLUSION,
        });
    }
    let marginals = Marginals::new(chain);
    let vectors: Vec<Vec<Level>> = msvs.vectors.iter().map(StateVector::flat).collect();
    let mut acc = CompensatedSum::default();
    if let Some(first) = vectors.first() {
        let floor = vec![0; first.len()];
        expand(&marginals, &vectors, 0, &floor, false, &mut acc);
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

fn expand(
    marginals: &Marginals,
    vectors: &[Vec<Level>],
    start: usize,
    joined: &[Level],
    negative: bool,
    acc: &mut CompensatedSum,
) {
    for i in start..vectors.len() {
        let next: Vec<Level> = joined
            .iter()
            .zip(&vectors[i])
            .map(|(&a, &b)| a.max(b))
            .collect();
        let p = marginals.dominance(&next);
        // Odd-sized subsets add, even-sized subtract.
        acc.add(if negative { -p } else { p });
        if p > 0.0 {
            expand(marginals, vectors, i + 1, &next, !negative, acc);
        }
    }
}

/// Probability that at least one of several independent plans succeeds.
///
/// Evaluates the telescoped form `R_1 + R_2(1-R_1) + R_3(1-R_1)(1-R_2) + ...`
/// and checks it against `1 - Π(1 - R_k)`.
pub fn union_reliability(per_plan: &[f64]) -> f64 {
    let mut miss = 1.0;
    let mut total = 0.0;
    for &r in per_plan {
        total += r * miss;
        miss *= 1.0 - r;
    }
    let product_form = 1.0 - per_plan.iter().map(|r| 1.0 - r).product::<f64>();
    assert!(
        (total - product_form).abs() <= 1e-12,
        "union forms disagree: {total} vs {product_form}"
    );
    total
}

/// Sanity bounds every plan reliability satisfies:
/// `max_j Pr(>= d_j) <= R <= min(1, Σ_j Pr(>= d_j))`.
pub fn within_bounds(msvs: &MsvSet, chain: &Chain<'_>, r: f64) -> bool {
    let marginals = Marginals::new(chain);
    let events: Vec<f64> = msvs
        .vectors
        .iter()
        .map(|v| marginals.dominance(&v.flat()))
        .collect();
    let lower = events.iter().copied().fold(0.0, f64::max);
    let upper = events.iter().sum::<f64>().min(1.0);
    r >= lower - PROB_TOLERANCE && r <= upper + PROB_TOLERANCE
}

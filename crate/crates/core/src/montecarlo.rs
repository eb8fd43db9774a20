//! Monte Carlo estimate of deadline-hit probability.
//!
//! Each trial draws one capacity state per plan (capacities stay fixed for
//! the duration of a task), evaluates every plan's completion time and counts
//! a success when any plan meets the deadline.
//!
//! Sampling is inverse-CDF over ascending levels driven by ChaCha8. Trials
//! are split into fixed blocks of [`BLOCK_TRIALS`]; block `b` uses the
//! generator seeded with `seed` on stream `b`. Blocks are independent of the
//! number of worker threads, so results depend only on `(seed, trials)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pmf::{Level, Pmf};
use crate::scenario::{Chain, Scenario};
use crate::state::StateVector;
use crate::timing::{TimeModel, TIME_TOLERANCE};

/// Trials per logical block.
pub const BLOCK_TRIALS: u64 = 1 << 16;

pub const DEFAULT_SEED: u64 = 0x5EED_2021;
pub const DEFAULT_CONFIDENCE_Z: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub confidence_z: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            seed: DEFAULT_SEED,
            confidence_z: DEFAULT_CONFIDENCE_Z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanEstimate {
    pub plan: String,
    pub estimate: f64,
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub estimate: f64,
    /// `z * sqrt(p (1 - p) / N)`.
    pub half_width: f64,
    pub trials: u64,
    pub seed: u64,
    pub per_plan: Vec<PlanEstimate>,
}

impl SimResult {
    /// Whether `value` lies inside `estimate ± half_width`.
    pub fn brackets(&self, value: f64) -> bool {
        (self.estimate - value).abs() <= self.half_width
    }
}

/// Inverse-CDF sampler for one pmf.
#[derive(Clone, Debug)]
struct LevelSampler {
    levels: Vec<Level>,
    cdf: Vec<f64>,
}

impl LevelSampler {
    fn new(pmf: &Pmf) -> Self {
        Self {
            levels: pmf.support().collect(),
            cdf: pmf.cumulative(),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Level {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|&c| c <= u);
        self.levels[i.min(self.levels.len() - 1)]
    }
}

/// Draws every component of `chain`'s state independently from its pmf.
pub fn sample_state<R: Rng>(chain: &Chain<'_>, rng: &mut R) -> StateVector {
    let flat: Vec<Level> = chain
        .marginals()
        .into_iter()
        .map(|pmf| LevelSampler::new(pmf).draw(rng))
        .collect();
    StateVector::from_flat(&flat, chain.branch_count())
}

struct PlanSim {
    model: TimeModel,
    samplers: Vec<LevelSampler>,
}

impl PlanSim {
    fn hit<R: Rng>(&self, rng: &mut R, scratch: &mut Vec<Level>, deadline: f64) -> bool {
        scratch.clear();
        scratch.extend(self.samplers.iter().map(|s| s.draw(rng)));
        matches!(self.model.total_flat(scratch), Some(t) if t <= deadline + TIME_TOLERANCE)
    }
}

/// Estimates global and per-plan reliability by sampling.
pub fn simulate(scenario: &Scenario, input_size: f64, deadline: f64, cfg: &SimConfig) -> SimResult {
    let chains = scenario.chains();
    let plans: Vec<PlanSim> = chains
        .iter()
        .map(|chain| PlanSim {
            model: TimeModel::new(chain, input_size),
            samplers: chain
                .marginals()
                .into_iter()
                .map(LevelSampler::new)
                .collect(),
        })
        .collect();

    let blocks = cfg.trials.div_ceil(BLOCK_TRIALS);
    let (successes, plan_hits) = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK_TRIALS.min(cfg.trials - b * BLOCK_TRIALS);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let mut scratch = Vec::new();
            let mut hits = vec![0u64; plans.len()];
            let mut any = 0u64;
            for _ in 0..n {
                let mut ok = false;
                for (plan, count) in plans.iter().zip(hits.iter_mut()) {
                    if plan.hit(&mut rng, &mut scratch, deadline) {
                        *count += 1;
                        ok = true;
                    }
                }
                any += u64::from(ok);
            }
            (any, hits)
        })
        .reduce(
            || (0, vec![0; plans.len()]),
            |(a, mut ha), (b, hb)| {
                ha.iter_mut().zip(&hb).for_each(|(x, y)| *x += y);
                (a + b, ha)
            },
        );

    let interval = |hits: u64| {
        let n = cfg.trials.max(1) as f64;
        let p = hits as f64 / n;
        (p, cfg.confidence_z * (p * (1.0 - p) / n).sqrt())
    };
    let (estimate, half_width) = interval(successes);
    SimResult {
        estimate,
        half_width,
        trials: cfg.trials,
        seed: cfg.seed,
        per_plan: chains
            .iter()
            .zip(plan_hits)
            .map(|(chain, hits)| {
                let (estimate, half_width) = interval(hits);
                PlanEstimate {
                    plan: chain.name.to_owned(),
                    estimate,
                    half_width,
                }
            })
            .collect(),
    }
}

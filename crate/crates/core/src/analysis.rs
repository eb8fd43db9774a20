//! End-to-end evaluation: enumerate, reduce, RSDP per plan, union across plans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GuardError;
use crate::montecarlo::{simulate, SimConfig, SimResult};
use crate::pathset::{feasible_vectors, minimal_vectors, MsvSet, SearchLimits};
use crate::reliability::{
    exact_reliability, inclusion_exclusion_reliability, rsdp_reliability, union_reliability,
    MAX_INCLUSION_EXCLUSION,
};
use crate::scenario::{Chain, Scenario};
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rsdp,
    Exact,
    InclusionExclusion,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub input_size: f64,
    pub deadline: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReliability {
    pub plan: String,
    pub feasible_count: usize,
    pub msv_count: usize,
    pub reliability: f64,
    #[serde(default)]
    pub msvs: Vec<StateVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleDelta {
    pub plan: String,
    pub exact: f64,
    pub exact_delta: f64,
    /// Absent when the antichain is too large for inclusion-exclusion.
    pub inclusion_exclusion: Option<f64>,
    pub inclusion_exclusion_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub per_plan: Vec<OracleDelta>,
    pub monte_carlo: Option<SimResult>,
    /// Simulated minus analytic global reliability.
    pub monte_carlo_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub parameters: Parameters,
    pub method: Method,
    pub per_plan: Vec<PlanReliability>,
    pub global: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<CrossCheck>,
}

/// Feasible set, minimal vectors and RSDP reliability of one plan.
pub fn analyze_plan(
    chain: &Chain<'_>,
    input_size: f64,
    deadline: f64,
    limits: SearchLimits,
) -> Result<(PlanReliability, MsvSet), GuardError> {
    let solutions = feasible_vectors(chain, input_size, deadline, limits)?;
    let msvs = minimal_vectors(&solutions);
    let reliability = rsdp_reliability(&msvs, chain);
    Ok((
        PlanReliability {
            plan: chain.name.to_owned(),
            feasible_count: solutions.len(),
            msv_count: msvs.len(),
            reliability,
            msvs: msvs.vectors.clone(),
        },
        msvs,
    ))
}

/// Evaluates every plan of `scenario` and their union.
pub fn evaluate(
    scenario: &Scenario,
    input_size: f64,
    deadline: f64,
    limits: SearchLimits,
) -> Result<ReliabilityReport, GuardError> {
    let per_plan = scenario
        .chains()
        .par_iter()
        .map(|chain| analyze_plan(chain, input_size, deadline, limits).map(|(p, _)| p))
        .collect::<Result<Vec<_>, _>>()?;
    let global = union_reliability(&per_plan.iter().map(|p| p.reliability).collect::<Vec<_>>());
    Ok(ReliabilityReport {
        parameters: Parameters {
            input_size,
            deadline,
        },
        method: Method::Rsdp,
        per_plan,
        global,
        diagnostics: None,
    })
}

/// Runs the exact and inclusion-exclusion oracles per plan and, when `sim`
/// is given, the Monte Carlo oracle on the whole scenario.
pub fn cross_check(
    scenario: &Scenario,
    report: &ReliabilityReport,
    limits: SearchLimits,
    sim: Option<&SimConfig>,
) -> Result<CrossCheck, GuardError> {
    let Parameters {
        input_size,
        deadline,
    } = report.parameters;
    let per_plan = scenario
        .chains()
        .par_iter()
        .zip(report.per_plan.par_iter())
        .map(|(chain, plan)| {
            let exact = exact_reliability(chain, input_size, deadline, limits)?;
            let msvs = MsvSet {
                plan: plan.plan.clone(),
                input_size,
                deadline,
                vectors: plan.msvs.clone(),
            };
            let ie = if msvs.len() <= MAX_INCLUSION_EXCLUSION {
                Some(inclusion_exclusion_reliability(&msvs, chain)?)
            } else {
                None
            };
            Ok(OracleDelta {
                plan: plan.plan.clone(),
                exact,
                exact_delta: exact - plan.reliability,
                inclusion_exclusion: ie,
                inclusion_exclusion_delta: ie.map(|v| v - plan.reliability),
            })
        })
        .collect::<Result<Vec<_>, GuardError>>()?;
    let monte_carlo = sim.map(|cfg| simulate(scenario, input_size, deadline, cfg));
    let monte_carlo_delta = monte_carlo.as_ref().map(|r| r.estimate - report.global);
    Ok(CrossCheck {
        per_plan,
        monte_carlo,
        monte_carlo_delta,
    })
}

/// Smallest achievable completion time of a plan (every capacity at its
/// highest level), or `None` when some required capacity is always zero.
pub fn min_completion_time(chain: &Chain<'_>, input_size: f64) -> Option<f64> {
    let model = crate::timing::TimeModel::new(chain, input_size);
    let best: Vec<_> = chain
        .marginals()
        .iter()
        .map(|pmf| pmf.max_level())
        .collect();
    model.total_flat(&best)
}

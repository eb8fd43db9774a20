use thiserror::Error;

use crate::pmf::Level;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PmfError {
    #[error("level {level} has invalid probability {prob}")]
    InvalidProbability { level: Level, prob: f64 },
    #[error("level {0} listed more than once")]
    DuplicateLevel(Level),
    #[error("`{0}` is not a non-negative integer level")]
    InvalidLevel(String),
    #[error("probabilities sum to {0}, expected 1 within 1e-9")]
    Sum(f64),
}

/// Reasons a scenario file is rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("pmf of `{owner}`: probabilities sum to {sum}, expected 1 within 1e-9")]
    PmfSum { owner: String, sum: f64 },
    #[error("pmf of `{owner}`: {source}")]
    InvalidPmf { owner: String, source: PmfError },
    #[error("`{owner}`: {reason}")]
    InvalidValue { owner: String, reason: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("plan `{plan}` references unknown {expected} `{id}`")]
    DanglingReference {
        plan: String,
        id: String,
        expected: &'static str,
    },
    #[error("plan `{plan}`: {reason}")]
    Structure { plan: String, reason: String },
    #[error("scenario defines no deployment plans")]
    NoPlans,
}

impl ScenarioError {
    pub(crate) fn pmf(owner: &str, err: PmfError) -> Self {
        match err {
            PmfError::Sum(sum) => ScenarioError::PmfSum {
                owner: owner.to_owned(),
                sum,
            },
            source => ScenarioError::InvalidPmf {
                owner: owner.to_owned(),
                source,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("state vector has {got_x} bandwidth and {got_y} resource components, plan needs {want_x} and {want_y}")]
pub struct DimensionError {
    pub want_x: usize,
    pub want_y: usize,
    pub got_x: usize,
    pub got_y: usize,
}

/// Exact evaluation refused because the state space is too large.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("search space guard exceeded: more than {limit} state vectors")]
    SearchSpace { limit: u64 },
    #[error("inclusion-exclusion over {count} vectors exceeds the limit of {limit}")]
    SubsetCount { count: usize, limit: usize },
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace is not readable: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace has no records for machine `{0}`")]
    NoRecords(String),
    #[error("record {row}: cpu usage {usage} outside [0, 1]")]
    UsageOutOfRange { row: usize, usage: f64 },
    #[error(
        "record {row}: timestamp {timestamp} precedes an earlier record of machine `{machine}`"
    )]
    TimestampOrder {
        row: usize,
        machine: String,
        timestamp: f64,
    },
    #[error("record {row}: malformed {field}")]
    Malformed { row: usize, field: &'static str },
    #[error("invalid discretization policy: {0}")]
    Policy(String),
}

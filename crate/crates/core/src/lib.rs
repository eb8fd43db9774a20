//! Reliability of staged tasks on dynamic edge computing networks.
//!
//! A task enters at a source device, passes through compute and transit
//! nodes over branches with random bandwidth, and must reach the sink before
//! a deadline. Node computing resources are random too and every compute node
//! rescales the data it forwards. This crate computes, per deployment plan,
//! the probability of finishing in time:
//!
//! 1. [`pathset::feasible_vectors`] enumerates capacity states that meet the
//!    deadline, pruning with the monotonicity of the completion time.
//! 2. [`pathset::minimal_vectors`] keeps the minimal ones.
//! 3. [`reliability::rsdp_reliability`] turns them into a probability.
//! 4. [`reliability::union_reliability`] combines independent plans.
//!
//! [`reliability::exact_reliability`], [`reliability::inclusion_exclusion_reliability`]
//! and [`montecarlo::simulate`] are independent checks of the same quantity.

pub mod analysis;
pub mod error;
pub mod montecarlo;
pub mod pathset;
pub mod pmf;
pub mod reliability;
pub mod scenario;
pub mod state;
pub mod timing;
pub mod trace;

pub use analysis::{evaluate, ReliabilityReport};
pub use error::{DimensionError, GuardError, PmfError, ScenarioError, TraceError};
pub use pmf::{survival, Level, Pmf};
pub use scenario::{parse_scenario, render_scenario, Chain, Scenario};
pub use state::StateVector;

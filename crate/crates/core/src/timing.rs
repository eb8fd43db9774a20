//! Completion time of a plan for one state vector.
//!
//! The total is `lead + transmission + computation` where
//!
//! * lead is the sum of branch lead times,
//! * transmission is `Σ ⌈carried_i / x_i⌉` over branches,
//! * computation is `Σ input_j / y_j` over compute nodes (not rounded).
//!
//! Transit nodes forward data unchanged and add no computation term.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DimensionError;
use crate::pmf::Level;
use crate::scenario::{Chain, NodeKind};
use crate::state::StateVector;

/// Slack allowed when comparing a completion time against a deadline and
/// when deciding whether a quotient is integral before rounding up.
pub const TIME_TOLERANCE: f64 = 1e-9;

/// Seconds, or unbounded when a required capacity is zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum Latency {
    Finite(f64),
    Unbounded,
}

impl Latency {
    pub fn finite(self) -> Option<f64> {
        match self {
            Latency::Finite(t) => Some(t),
            Latency::Unbounded => None,
        }
    }

    pub fn meets(self, deadline: f64) -> bool {
        matches!(self, Latency::Finite(t) if t <= deadline + TIME_TOLERANCE)
    }

    fn plus(self, other: Latency) -> Latency {
        match (self, other) {
            (Latency::Finite(a), Latency::Finite(b)) => Latency::Finite(a + b),
            _ => Latency::Unbounded,
        }
    }
}

impl From<Option<f64>> for Latency {
    fn from(t: Option<f64>) -> Self {
        t.map_or(Latency::Unbounded, Latency::Finite)
    }
}

impl fmt::Display for Latency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Latency::Finite(t) => write!(f, "{t:.5}"),
            Latency::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletionTime {
    pub total: Latency,
    pub lead: f64,
    pub transmission: Latency,
    pub computation: Latency,
}

/// Data sizes along a plan.
#[derive(Clone, Debug, PartialEq)]
pub struct StageSizes {
    pub input: f64,
    /// `outputs[i]` is the data leaving node `i`, which branch `i + 1` carries.
    pub outputs: Vec<f64>,
}

impl StageSizes {
    /// Data carried by the branch at 0-based position `i` in the plan.
    pub fn carried(&self, i: usize) -> f64 {
        self.outputs[i]
    }

    /// Data arriving at node `i` (0-based; node 0 receives the task input).
    pub fn input_to(&self, i: usize) -> f64 {
        if i == 0 {
            self.input
        } else {
            self.outputs[i - 1]
        }
    }
}

/// Sizes of data leaving every non-sink node of `chain`.
pub fn data_sizes(chain: &Chain<'_>, input_size: f64) -> StageSizes {
    let mut size = input_size;
    let outputs = chain
        .nodes()
        .take(chain.branch_count())
        .map(|node| {
            if let NodeKind::Compute(c) = &node.kind {
                size = c.output_size(size);
            }
            size
        })
        .collect();
    StageSizes {
        input: input_size,
        outputs,
    }
}

/// Evaluates the completion time of `chain` for state `v`.
pub fn total_time(
    chain: &Chain<'_>,
    input_size: f64,
    v: &StateVector,
) -> Result<CompletionTime, DimensionError> {
    TimeModel::new(chain, input_size).completion(v)
}

/// Per-plan constants of the completion time, precomputed for repeated
/// evaluation over many state vectors.
#[derive(Clone, Debug)]
pub struct TimeModel {
    lead: f64,
    carried: Vec<f64>,
    compute_inputs: Vec<f64>,
}

impl TimeModel {
    pub fn new(chain: &Chain<'_>, input_size: f64) -> Self {
        let sizes = data_sizes(chain, input_size);
        Self {
            lead: chain.lead_time(),
            carried: sizes.outputs.clone(),
            compute_inputs: chain
                .compute_nodes()
                .map(|(i, _, _)| sizes.input_to(i))
                .collect(),
        }
    }

    pub fn branch_count(&self) -> usize {
        self.carried.len()
    }

    pub fn compute_count(&self) -> usize {
        self.compute_inputs.len()
    }

    pub fn dims(&self) -> usize {
        self.carried.len() + self.compute_inputs.len()
    }

    pub fn lead(&self) -> f64 {
        self.lead
    }

    /// Transmission seconds on branch `i` at bandwidth `x`.
    pub fn branch_term(&self, i: usize, x: Level) -> Option<f64> {
        let data = self.carried[i];
        if data == 0.0 {
            return Some(0.0);
        }
        if x == 0 {
            return None;
        }
        Some(ceil_tolerant(data / f64::from(x)))
    }

    /// Computation seconds at the `j`-th compute node with resource `y`.
    pub fn node_term(&self, j: usize, y: Level) -> Option<f64> {
        let data = self.compute_inputs[j];
        if y == 0 {
            return None;
        }
        Some(data / f64::from(y))
    }

    /// Term of flat dimension `d` (branches first, then compute nodes).
    pub fn term(&self, d: usize, level: Level) -> Option<f64> {
        let b = self.carried.len();
        if d < b {
            self.branch_term(d, level)
        } else {
            self.node_term(d - b, level)
        }
    }

    /// Total seconds for a flat `(x, y)` vector; `None` when unbounded.
    pub fn total_flat(&self, flat: &[Level]) -> Option<f64> {
        debug_assert_eq!(flat.len(), self.dims());
        let mut t = self.lead;
        for (d, &level) in flat.iter().enumerate() {
            t += self.term(d, level)?;
        }
        Some(t)
    }

    pub fn completion(&self, v: &StateVector) -> Result<CompletionTime, DimensionError> {
        if v.x.len() != self.carried.len() || v.y.len() != self.compute_inputs.len() {
            return Err(DimensionError {
                want_x: self.carried.len(),
                want_y: self.compute_inputs.len(),
                got_x: v.x.len(),
                got_y: v.y.len(),
            });
        }
        let transmission: Latency =
            v.x.iter()
                .enumerate()
                .map(|(i, &x)| self.branch_term(i, x))
                .sum::<Option<f64>>()
                .into();
        let computation: Latency =
            v.y.iter()
                .enumerate()
                .map(|(j, &y)| self.node_term(j, y))
                .sum::<Option<f64>>()
                .into();
        Ok(CompletionTime {
            total: Latency::Finite(self.lead)
                .plus(transmission)
                .plus(computation),
            lead: self.lead,
            transmission,
            computation,
        })
    }
}

/// `⌈q⌉`, except that quotients within tolerance of an integer snap to it so
/// that `12.000000000000002 / 4` rounds to 3.
fn ceil_tolerant(q: f64) -> f64 {
    let nearest = q.round();
    if (q - nearest).abs() <= TIME_TOLERANCE * nearest.abs().max(1.0) {
        nearest
    } else {
        q.ceil()
    }
}

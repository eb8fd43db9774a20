//! Available-resource distributions from cluster CPU-usage traces.
//!
//! The native input is CSV with the header `timestamp,machine_id,cpu_usage`,
//! where `cpu_usage` is the busy fraction of the machine in `[0, 1]`. Each
//! sample becomes available capacity `capacity * (1 - usage)` and is binned to
//! level `round(available / capacity * K)` with halves rounded up. Samples are
//! weighted equally.
//!
//! [`parse_google_task_usage`] reads the Google cluster-trace `task_usage`
//! table (headerless CSV; column 0 start time in microseconds, column 4
//! machine id, column 5 mean CPU rate) by summing per-task CPU rates per
//! machine and start time and capping the total at 1.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::TraceError;
use crate::pmf::{Level, Pmf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub timestamp: f64,
    pub machine_id: String,
    #[serde(rename = "cpu_usage")]
    pub usage: f64,
}

/// Validated usage samples: usage in `[0, 1]`, timestamps non-decreasing per
/// machine.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraceSeries {
    records: Vec<TraceRecord>,
}

impl TraceSeries {
    pub fn new(records: Vec<TraceRecord>) -> Result<Self, TraceError> {
        let mut last: HashMap<&str, f64> = HashMap::new();
        for (row, r) in records.iter().enumerate() {
            if !(0.0..=1.0).contains(&r.usage) {
                return Err(TraceError::UsageOutOfRange {
                    row: row + 1,
                    usage: r.usage,
                });
            }
            let prev = last.entry(r.machine_id.as_str()).or_insert(r.timestamp);
            if r.timestamp < *prev || r.timestamp.is_nan() {
                return Err(TraceError::TimestampOrder {
                    row: row + 1,
                    machine: r.machine_id.clone(),
                    timestamp: r.timestamp,
                });
            }
            *prev = r.timestamp;
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscretizationPolicy {
    /// Highest level `K`; available capacity maps onto `0..=K`.
    pub levels: Level,
    /// Compute units available when the machine is idle.
    pub machine_capacity: f64,
}

impl Default for DiscretizationPolicy {
    fn default() -> Self {
        Self {
            levels: 6,
            machine_capacity: 6.0,
        }
    }
}

impl DiscretizationPolicy {
    fn check(&self) -> Result<(), TraceError> {
        if self.levels < 1 {
            return Err(TraceError::Policy("levels must be at least 1".into()));
        }
        if !(self.machine_capacity.is_finite() && self.machine_capacity > 0.0) {
            return Err(TraceError::Policy(format!(
                "machine capacity {} must be positive",
                self.machine_capacity
            )));
        }
        Ok(())
    }

    /// Level of one usage sample.
    pub fn level(&self, usage: f64) -> Level {
        let available = self.machine_capacity * (1.0 - usage);
        let scaled = available / self.machine_capacity * f64::from(self.levels);
        // Half-up, nudged by 1e-9 at exact halves.
        let level = (scaled + 0.5 + 1e-9).floor();
        level.clamp(0.0, f64::from(self.levels)) as Level
    }
}

/// Reads a trace in the native `timestamp,machine_id,cpu_usage` layout.
pub fn parse_trace<R: Read>(reader: R) -> Result<TraceSeries, TraceError> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let records = csv
        .deserialize::<TraceRecord>()
        .collect::<Result<Vec<_>, _>>()?;
    TraceSeries::new(records)
}

/// Reads a Google cluster-trace `task_usage` table into a usage series.
pub fn parse_google_task_usage<R: Read>(reader: R) -> Result<TraceSeries, TraceError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    // (machine, start time in microseconds) -> summed CPU rate
    let mut usage: BTreeMap<(String, u64), f64> = BTreeMap::new();
    for (row, rec) in csv.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let (start, machine, cpu) = (field(0), field(4), field(5));
        if machine.is_empty() || cpu.is_empty() {
            continue;
        }
        let parse_err = |field| TraceError::Malformed {
            row: row + 1,
            field,
        };
        let start: u64 = start.parse().map_err(|_| parse_err("start time"))?;
        let cpu: f64 = cpu.parse().map_err(|_| parse_err("cpu rate"))?;
        if !(cpu.is_finite() && cpu >= 0.0) {
            return Err(TraceError::UsageOutOfRange {
                row: row + 1,
                usage: cpu,
            });
        }
        *usage.entry((machine.to_owned(), start)).or_default() += cpu;
    }
    let mut records: Vec<TraceRecord> = usage
        .into_iter()
        .map(|((machine_id, start), cpu)| TraceRecord {
            timestamp: start as f64 / 1e6,
            machine_id,
            usage: cpu.min(1.0),
        })
        .collect();
    records.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    TraceSeries::new(records)
}

/// Distinct machine ids in order of first appearance.
pub fn machines_in(series: &TraceSeries) -> Vec<String> {
    let mut seen = HashSet::new();
    series
        .records
        .iter()
        .filter(|r| seen.insert(r.machine_id.as_str()))
        .map(|r| r.machine_id.clone())
        .collect()
}

/// Empirical available-capacity pmf of one machine.
pub fn ingest_trace(
    series: &TraceSeries,
    machine: &str,
    policy: &DiscretizationPolicy,
) -> Result<Pmf, TraceError> {
    policy.check()?;
    let mut counts: BTreeMap<Level, u64> = BTreeMap::new();
    let mut n = 0u64;
    for r in series.records.iter().filter(|r| r.machine_id == machine) {
        *counts.entry(policy.level(r.usage)).or_default() += 1;
        n += 1;
    }
    if n == 0 {
        return Err(TraceError::NoRecords(machine.to_owned()));
    }
    let pmf = Pmf::new(
        counts
            .into_iter()
            .map(|(level, c)| (level, c as f64 / n as f64)),
    )
    .expect("empirical frequencies form a pmf");
    Ok(pmf)
}

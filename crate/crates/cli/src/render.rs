//! Text, CSV and JSON renderings of command results.

use std::fmt::Write;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use remr_core::analysis::ReliabilityReport;
use remr_core::montecarlo::SimResult;
use remr_core::scenario::ScenarioSummary;
use remr_core::Pmf;

use crate::Format;

#[derive(Debug, Serialize)]
pub struct SweepGrid {
    pub input_sizes: Vec<f64>,
    pub deadlines: Vec<f64>,
    /// One row per deadline, one column per input size.
    pub reliability: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct PlanSummary {
    pub name: String,
    pub branches: usize,
    pub compute_nodes: usize,
    pub min_time: Option<f64>,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn delta(v: f64) -> String {
    format!("{v:+.2e}")
}

pub fn report(r: &ReliabilityReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Structured => return json(r),
        Format::Csv => {
            out.push_str("plan,feasible_count,msv_count,reliability\n");
            for p in &r.per_plan {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.5}",
                    p.plan, p.feasible_count, p.msv_count, p.reliability
                );
            }
            let _ = writeln!(out, "global,,,{:.5}", r.global);
            if let Some(cc) = &r.diagnostics {
                out.push_str(
                    "\nplan,exact,exact_delta,inclusion_exclusion,inclusion_exclusion_delta\n",
                );
                for d in &cc.per_plan {
                    let _ = writeln!(
                        out,
                        "{},{:.5},{},{},{}",
                        d.plan,
                        d.exact,
                        delta(d.exact_delta),
                        d.inclusion_exclusion
                            .map(|v| format!("{v:.5}"))
                            .unwrap_or_default(),
                        d.inclusion_exclusion_delta.map(delta).unwrap_or_default(),
                    );
                }
                if let (Some(mc), Some(dm)) = (&cc.monte_carlo, cc.monte_carlo_delta) {
                    out.push_str("\nmonte_carlo_estimate,half_width,trials,seed,delta\n");
                    let _ = writeln!(
                        out,
                        "{:.5},{:.5},{},{},{}",
                        mc.estimate,
                        mc.half_width,
                        mc.trials,
                        mc.seed,
                        delta(dm)
                    );
                }
            }
            return out;
        }
        Format::Table => {}
    }

    let _ = writeln!(
        out,
        "C = {}, T = {}",
        r.parameters.input_size, r.parameters.deadline
    );
    let _ = writeln!(
        out,
        "{:<12} {:>10} {:>6} {:>12}",
        "plan", "feasible", "msvs", "reliability"
    );
    for p in &r.per_plan {
        let _ = writeln!(
            out,
            "{:<12} {:>10} {:>6} {:>12.5}",
            p.plan, p.feasible_count, p.msv_count, p.reliability
        );
    }
    let _ = writeln!(out, "global reliability: {:.5}", r.global);
    if let Some(cc) = &r.diagnostics {
        out.push('\n');
        let _ = writeln!(
            out,
            "{:<12} {:>10} {:>10} {:>10} {:>10}",
            "plan", "exact", "delta", "incl-excl", "delta"
        );
        for d in &cc.per_plan {
            let (ie, ied) = match (d.inclusion_exclusion, d.inclusion_exclusion_delta) {
                (Some(v), Some(dv)) => (format!("{v:.5}"), delta(dv)),
                _ => ("skipped".to_owned(), "-".to_owned()),
            };
            let _ = writeln!(
                out,
                "{:<12} {:>10.5} {:>10} {:>10} {:>10}",
                d.plan,
                d.exact,
                delta(d.exact_delta),
                ie,
                ied
            );
        }
        if let (Some(mc), Some(dm)) = (&cc.monte_carlo, cc.monte_carlo_delta) {
            let _ = writeln!(
                out,
                "monte carlo: {:.5} ± {:.5} (N = {}, seed = {}), delta {}, {}",
                mc.estimate,
                mc.half_width,
                mc.trials,
                mc.seed,
                delta(dm),
                if mc.brackets(r.global) {
                    "within interval"
                } else {
                    "OUTSIDE interval"
                }
            );
        }
    }
    out
}

pub fn sweep(grid: &SweepGrid, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Structured => return json(grid),
        Format::Csv => {
            out.push('T');
            for c in &grid.input_sizes {
                let _ = write!(out, ",C={c}");
            }
            out.push('\n');
            for (t, row) in grid.deadlines.iter().zip(&grid.reliability) {
                let _ = write!(out, "{t}");
                for v in row {
                    let _ = write!(out, ",{v:.5}");
                }
                out.push('\n');
            }
        }
        Format::Table => {
            let _ = write!(out, "{:<8}", "T \\ C");
            for c in &grid.input_sizes {
                let _ = write!(out, " {:>9}", c);
            }
            out.push('\n');
            for (t, row) in grid.deadlines.iter().zip(&grid.reliability) {
                let _ = write!(out, "{:<8}", t);
                for v in row {
                    let _ = write!(out, " {v:>9.5}");
                }
                out.push('\n');
            }
        }
    }
    out
}

#[derive(Serialize)]
struct SimulationOutput<'a> {
    input_size: f64,
    deadline: f64,
    #[serde(flatten)]
    result: &'a SimResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
}

pub fn simulation(
    r: &SimResult,
    input_size: f64,
    deadline: f64,
    analytic: Option<&ReliabilityReport>,
    format: Format,
) -> String {
    let exact = analytic.map(|a| a.global);
    let mut out = String::new();
    match format {
        Format::Structured => {
            return json(&SimulationOutput {
                input_size,
                deadline,
                result: r,
                analytic: exact,
                delta: exact.map(|a| r.estimate - a),
            })
        }
        Format::Csv => {
            out.push_str("plan,estimate,half_width,trials,seed\n");
            for p in &r.per_plan {
                let _ = writeln!(
                    out,
                    "{},{:.5},{:.5},{},{}",
                    p.plan, p.estimate, p.half_width, r.trials, r.seed
                );
            }
            let _ = writeln!(
                out,
                "global,{:.5},{:.5},{},{}",
                r.estimate, r.half_width, r.trials, r.seed
            );
            if let Some(a) = exact {
                let _ = writeln!(out, "analytic,{a:.5},,,");
                let _ = writeln!(out, "delta,{},,,", delta(r.estimate - a));
            }
        }
        Format::Table => {
            let _ = writeln!(
                out,
                "C = {input_size}, T = {deadline}, N = {}, seed = {}",
                r.trials, r.seed
            );
            let _ = writeln!(
                out,
                "{:<12} {:>10} {:>11}",
                "plan", "estimate", "half-width"
            );
            for p in &r.per_plan {
                let _ = writeln!(
                    out,
                    "{:<12} {:>10.5} {:>11.5}",
                    p.plan, p.estimate, p.half_width
                );
            }
            let _ = writeln!(
                out,
                "global estimate: {:.5} ± {:.5}",
                r.estimate, r.half_width
            );
            if let Some(a) = exact {
                let _ = writeln!(
                    out,
                    "analytic: {a:.5}, delta {}, {}",
                    delta(r.estimate - a),
                    if r.brackets(a) {
                        "within interval"
                    } else {
                        "OUTSIDE interval"
                    }
                );
            }
        }
    }
    out
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    #[serde(flatten)]
    summary: &'a ScenarioSummary,
    input_size: Option<f64>,
    per_plan: &'a [PlanSummary],
}

pub fn check(
    summary: &ScenarioSummary,
    plans: &[PlanSummary],
    input_size: Option<f64>,
    format: Format,
) -> String {
    let mut out = String::new();
    let time = |p: &PlanSummary| match (input_size, p.min_time) {
        (None, _) => String::new(),
        (Some(_), Some(t)) => format!("{t:.5}"),
        (Some(_), None) => "inf".to_owned(),
    };
    match format {
        Format::Structured => {
            return json(&CheckOutput {
                summary,
                input_size,
                per_plan: plans,
            })
        }
        Format::Csv => {
            out.push_str("plan,branches,compute_nodes,min_time\n");
            for p in plans {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    p.name,
                    p.branches,
                    p.compute_nodes,
                    time(p)
                );
            }
        }
        Format::Table => {
            let _ = writeln!(
                out,
                "{} plans, {} branches, {} nodes",
                summary.plans, summary.branches, summary.nodes
            );
            for p in plans {
                let _ = write!(
                    out,
                    "plan {}: {} branches, {} compute nodes",
                    p.name, p.branches, p.compute_nodes
                );
                match input_size {
                    Some(c) => {
                        let _ = writeln!(out, ", min time {} at C = {c}", time(p));
                    }
                    None => out.push('\n'),
                }
            }
        }
    }
    out
}

struct Fragments<'a>(&'a [(String, Pmf)]);

impl Serialize for Fragments<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (machine, pmf) in self.0 {
            map.serialize_entry(machine, pmf)?;
        }
        map.end()
    }
}

/// Machine id to pmf, in trace order.
pub fn fragments(pmfs: &[(String, Pmf)]) -> String {
    json(&Fragments(pmfs))
}

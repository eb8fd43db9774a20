#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use remr_core::analysis::min_completion_time;
use remr_core::scenario::{BranchSpec, ComputeSpec, DeploymentPlan, NodeKind, NodeSpec};
use remr_core::{parse_scenario, Level, Pmf, Scenario};

pub const GOLDEN: &str = include_str!("../../../../scenarios/remr-paper.scenario");

pub fn golden() -> Scenario {
    parse_scenario(GOLDEN).expect("golden scenario parses")
}

/// Random pmf over at most `max_levels` distinct levels drawn from `0..=max_level`.
pub fn random_pmf<R: Rng>(rng: &mut R, max_levels: usize, max_level: Level) -> Pmf {
    let mut levels: Vec<Level> = (0..=max_level).collect();
    levels.shuffle(rng);
    let k = rng.gen_range(1..=max_levels.min(levels.len()));
    levels.truncate(k);
    let weights: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=10)).collect();
    let total: u32 = weights.iter().sum();
    Pmf::new(
        levels
            .into_iter()
            .zip(weights)
            .map(|(l, w)| (l, f64::from(w) / f64::from(total))),
    )
    .expect("normalized weights")
}

/// A random instance small enough for every oracle: at most 3 branches,
/// 3 compute nodes and 4 levels per component, with `plans` independent
/// plans sharing nothing.
pub struct Instance {
    pub scenario: Scenario,
    pub input_size: f64,
    pub deadline: f64,
}

pub fn random_instance<R: Rng>(rng: &mut R, plans: usize) -> Instance {
    let mut branches = Vec::new();
    let mut nodes = Vec::new();
    let mut paths = Vec::new();
    for p in 0..plans {
        let n = rng.gen_range(1..=3usize);
        let mut path = Vec::new();
        for i in 0..n {
            let id = format!("p{p}n{i}");
            let kind = if i == 0 || rng.gen_bool(0.75) {
                NodeKind::Compute(ComputeSpec {
                    ratio: *[0.5, 0.8, 1.0, 1.2, 2.0].choose(rng).unwrap(),
                    resource: random_pmf(rng, 4, 4),
                    output_override: None,
                })
            } else {
                NodeKind::Transit
            };
            nodes.push(NodeSpec {
                id: id.clone(),
                kind,
            });
            path.push(id);
            let bid = format!("p{p}b{i}");
            branches.push(BranchSpec {
                id: bid.clone(),
                lead_time: f64::from(rng.gen_range(0..=2u32)),
                bandwidth: random_pmf(rng, 4, 4),
            });
            path.push(bid);
        }
        path.push("sink".to_owned());
        paths.push(DeploymentPlan {
            name: format!("plan{p}"),
            path,
        });
    }
    nodes.push(NodeSpec {
        id: "sink".to_owned(),
        kind: NodeKind::Sink,
    });
    let scenario =
        Scenario::new(branches, nodes, paths, None).expect("generated scenario is valid");
    let input_size = f64::from(rng.gen_range(1..=12u32));
    let best = scenario
        .chains()
        .iter()
        .filter_map(|c| min_completion_time(c, input_size))
        .fold(f64::INFINITY, f64::min);
    let deadline = if best.is_finite() {
        (best * rng.gen_range(1.0..2.5)).round().max(1.0)
    } else {
        f64::from(rng.gen_range(1..=30u32))
    };
    Instance {
        scenario,
        input_size,
        deadline,
    }
}

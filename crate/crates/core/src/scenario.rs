//! Scenario model: branches, nodes, deployment plans and the JSON file schema.
//!
//! A scenario file is a JSON object with the keys `branches`, `nodes`,
//! `plans` and optionally `defaults`:
//!
//! ```json
//! {
//!   "branches": [{"id": "i1", "lead_time": 2, "bandwidth": {"0": 0.04, "5": 0.96}}],
//!   "nodes": [
//!     {"id": "s0", "kind": "compute", "ratio": 0.8, "resource": {"3": 0.5, "6": 0.5}},
//!     {"id": "cloud", "kind": "sink"}
//!   ],
//!   "plans": [{"name": "a", "path": ["s0", "i1", "cloud"]}],
//!   "defaults": {"input_size": 15, "deadline": 25}
//! }
//! ```
//!
//! Parsing either yields a fully validated [`Scenario`] or an error; nothing
//! partially built escapes.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::pmf::{Pmf, RawPmf};

#[derive(Clone, Debug, PartialEq)]
pub struct BranchSpec {
    pub id: String,
    /// Fixed store-and-forward overhead, seconds.
    pub lead_time: f64,
    pub bandwidth: Pmf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComputeSpec {
    /// Output size divided by input size.
    pub ratio: f64,
    pub resource: Pmf,
    /// Literal output size, replacing `input * ratio` when present.
    pub output_override: Option<f64>,
}

impl ComputeSpec {
    pub fn output_size(&self, input: f64) -> f64 {
        self.output_override.unwrap_or(input * self.ratio)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Compute(ComputeSpec),
    /// Forwards data unchanged, no computation.
    Transit,
    /// Terminal of every plan.
    Sink,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeSpec {
    pub id: String,
    pub kind: NodeKind,
}

impl NodeSpec {
    pub fn compute(&self) -> Option<&ComputeSpec> {
        match &self.kind {
            NodeKind::Compute(spec) => Some(spec),
            _ => None,
        }
    }

    pub fn is_sink(&self) -> bool {
        matches!(self.kind, NodeKind::Sink)
    }
}

/// Alternating node/branch chain `node_0, branch_1, node_1, ..., branch_n, node_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeploymentPlan {
    pub name: String,
    pub path: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub input_size: f64,
    pub deadline: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    branches: Vec<BranchSpec>,
    nodes: Vec<NodeSpec>,
    plans: Vec<DeploymentPlan>,
    defaults: Option<Defaults>,
}

/// A plan with every id resolved against its scenario.
#[derive(Clone, Debug)]
pub struct Chain<'a> {
    pub name: &'a str,
    pub source: &'a NodeSpec,
    /// `(branch_i, node_i)` for i = 1..=n, in path order.
    pub hops: Vec<(&'a BranchSpec, &'a NodeSpec)>,
}

impl<'a> Chain<'a> {
    pub fn branch_count(&self) -> usize {
        self.hops.len()
    }

    /// Nodes `node_0 .. node_n` in path order.
    pub fn nodes(&self) -> impl Iterator<Item = &'a NodeSpec> + '_ {
        std::iter::once(self.source).chain(self.hops.iter().map(|&(_, n)| n))
    }

    pub fn branches(&self) -> impl Iterator<Item = &'a BranchSpec> + '_ {
        self.hops.iter().map(|&(b, _)| b)
    }

    /// Compute nodes in path order with their position in the path.
    pub fn compute_nodes(
        &self,
    ) -> impl Iterator<Item = (usize, &'a NodeSpec, &'a ComputeSpec)> + '_ {
        self.nodes()
            .enumerate()
            .filter_map(|(i, n)| n.compute().map(|c| (i, n, c)))
    }

    pub fn compute_count(&self) -> usize {
        self.compute_nodes().count()
    }

    pub fn lead_time(&self) -> f64 {
        self.branches().map(|b| b.lead_time).sum()
    }

    /// Marginal distributions in state-vector order: branches, then compute nodes.
    pub fn marginals(&self) -> Vec<&'a Pmf> {
        self.branches()
            .map(|b| &b.bandwidth)
            .chain(self.compute_nodes().map(|(_, _, c)| &c.resource))
            .collect()
    }
}

impl Scenario {
    pub fn new(
        branches: Vec<BranchSpec>,
        nodes: Vec<NodeSpec>,
        plans: Vec<DeploymentPlan>,
        defaults: Option<Defaults>,
    ) -> Result<Self, ScenarioError> {
        let scenario = Self {
            branches,
            nodes,
            plans,
            defaults,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn branches(&self) -> &[BranchSpec] {
        &self.branches
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn plans(&self) -> &[DeploymentPlan] {
        &self.plans
    }

    pub fn defaults(&self) -> Option<Defaults> {
        self.defaults
    }

    pub fn branch(&self, id: &str) -> Option<&BranchSpec> {
        self.branches.iter().find(|b| b.id == id)
    }

    pub fn node(&self, id: &str) -> Option<&NodeSpec> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn plan(&self, name: &str) -> Option<&DeploymentPlan> {
        self.plans.iter().find(|p| p.name == name)
    }

    /// Resolves a plan of this scenario.
    ///
    /// # Panics
    ///
    /// If `plan` does not belong to this scenario.
    pub fn chain<'a>(&'a self, plan: &'a DeploymentPlan) -> Chain<'a> {
        resolve(self, plan).expect("plan validated against its scenario")
    }

    pub fn chains(&self) -> Vec<Chain<'_>> {
        self.plans.iter().map(|p| self.chain(p)).collect()
    }

    /// Returns a copy with `node`'s resource pmf replaced. `node` must be a
    /// compute node.
    pub fn with_resource(&self, node: &str, resource: Pmf) -> Result<Self, ScenarioError> {
        let mut next = self.clone();
        let spec = next
            .nodes
            .iter_mut()
            .find(|n| n.id == node)
            .ok_or_else(|| ScenarioError::InvalidValue {
                owner: node.to_owned(),
                reason: "no such node".into(),
            })?;
        match &mut spec.kind {
            NodeKind::Compute(c) => c.resource = resource,
            _ => {
                return Err(ScenarioError::InvalidValue {
                    owner: node.to_owned(),
                    reason: "only compute nodes carry a resource pmf".into(),
                })
            }
        }
        next.validate()?;
        Ok(next)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let mut ids = HashSet::new();
        for id in self
            .branches
            .iter()
            .map(|b| &b.id)
            .chain(self.nodes.iter().map(|n| &n.id))
        {
            if id.is_empty() {
                return Err(ScenarioError::Schema("empty id".into()));
            }
            if !ids.insert(id.as_str()) {
                return Err(ScenarioError::DuplicateId(id.clone()));
            }
        }
        for b in &self.branches {
            if !(b.lead_time.is_finite() && b.lead_time >= 0.0) {
                return Err(ScenarioError::InvalidValue {
                    owner: b.id.clone(),
                    reason: format!("lead_time {} must be a non-negative number", b.lead_time),
                });
            }
        }
        for n in &self.nodes {
            if let NodeKind::Compute(c) = &n.kind {
                if !(c.ratio.is_finite() && c.ratio > 0.0) {
                    return Err(ScenarioError::InvalidValue {
                        owner: n.id.clone(),
                        reason: format!("ratio {} must be positive", c.ratio),
                    });
                }
                if let Some(o) = c.output_override {
                    if !(o.is_finite() && o >= 0.0) {
                        return Err(ScenarioError::InvalidValue {
                            owner: n.id.clone(),
                            reason: format!("output_override {o} must be non-negative"),
                        });
                    }
                }
            }
        }
        if let Some(d) = self.defaults {
            if !(d.input_size.is_finite() && d.input_size > 0.0) {
                return Err(ScenarioError::InvalidValue {
                    owner: "defaults".into(),
                    reason: format!("input_size {} must be positive", d.input_size),
                });
            }
            if !(d.deadline.is_finite() && d.deadline > 0.0) {
                return Err(ScenarioError::InvalidValue {
                    owner: "defaults".into(),
                    reason: format!("deadline {} must be positive", d.deadline),
                });
            }
        }
        if self.plans.is_empty() {
            return Err(ScenarioError::NoPlans);
        }
        let mut names = HashSet::new();
        for plan in &self.plans {
            if !names.insert(plan.name.as_str()) {
                return Err(ScenarioError::DuplicateId(plan.name.clone()));
            }
            resolve(self, plan)?;
        }
        Ok(())
    }
}

fn resolve<'a>(
    scenario: &'a Scenario,
    plan: &'a DeploymentPlan,
) -> Result<Chain<'a>, ScenarioError> {
    let structure = |reason: String| ScenarioError::Structure {
        plan: plan.name.clone(),
        reason,
    };
    let path = &plan.path;
    if path.len() < 3 || path.len().is_multiple_of(2) {
        return Err(structure(format!(
            "path of length {} cannot alternate node, branch, ..., node with at least one branch",
            path.len()
        )));
    }
    let lookup_node = |id: &str, pos: usize| -> Result<&'a NodeSpec, ScenarioError> {
        match scenario.node(id) {
            Some(n) => Ok(n),
            None if scenario.branch(id).is_some() => Err(structure(format!(
                "position {pos} must be a node but `{id}` is a branch"
            ))),
            None => Err(ScenarioError::DanglingReference {
                plan: plan.name.clone(),
                id: id.to_owned(),
                expected: "node",
            }),
        }
    };
    let lookup_branch = |id: &str, pos: usize| -> Result<&'a BranchSpec, ScenarioError> {
        match scenario.branch(id) {
            Some(b) => Ok(b),
            None if scenario.node(id).is_some() => Err(structure(format!(
                "position {pos} must be a branch but `{id}` is a node"
            ))),
            None => Err(ScenarioError::DanglingReference {
                plan: plan.name.clone(),
                id: id.to_owned(),
                expected: "branch",
            }),
        }
    };

    let source = lookup_node(&path[0], 0)?;
    let mut hops = Vec::with_capacity(path.len() / 2);
    for (k, pair) in path[1..].chunks(2).enumerate() {
        let branch = lookup_branch(&pair[0], 2 * k + 1)?;
        let node = lookup_node(&pair[1], 2 * k + 2)?;
        hops.push((branch, node));
    }

    let mut seen = HashSet::new();
    for id in path {
        if !seen.insert(id.as_str()) {
            return Err(structure(format!("`{id}` appears more than once")));
        }
    }
    let last = hops.len() - 1;
    if source.is_sink() {
        return Err(structure(format!("source `{}` is a sink", source.id)));
    }
    for (i, (_, node)) in hops.iter().enumerate() {
        match (i == last, node.is_sink()) {
            (true, false) => {
                return Err(structure(format!("terminal `{}` is not a sink", node.id)));
            }
            (false, true) => {
                return Err(structure(format!(
                    "sink `{}` appears before the end",
                    node.id
                )));
            }
            _ => {}
        }
    }
    Ok(Chain {
        name: &plan.name,
        source,
        hops,
    })
}

// File schema.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    branches: Vec<RawBranch>,
    nodes: Vec<RawNode>,
    plans: Vec<RawPlan>,
    #[serde(default)]
    defaults: Option<Defaults>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    id: String,
    lead_time: f64,
    bandwidth: RawPmf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    kind: String,
    #[serde(default)]
    ratio: Option<f64>,
    #[serde(default)]
    resource: Option<RawPmf>,
    #[serde(default)]
    output_override: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    name: String,
    path: Vec<String>,
}

#[derive(Serialize)]
struct RenderScenario<'a> {
    branches: Vec<RenderBranch<'a>>,
    nodes: Vec<RenderNode<'a>>,
    plans: Vec<RawPlan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    defaults: Option<Defaults>,
}

#[derive(Serialize)]
struct RenderBranch<'a> {
    id: &'a str,
    lead_time: f64,
    bandwidth: &'a Pmf,
}

#[derive(Serialize)]
struct RenderNode<'a> {
    id: &'a str,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resource: Option<&'a Pmf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_override: Option<f64>,
}

impl RawNode {
    fn into_spec(self) -> Result<NodeSpec, ScenarioError> {
        let RawNode {
            id,
            kind,
            ratio,
            resource,
            output_override,
        } = self;
        let kind = match kind.as_str() {
            "compute" => {
                let ratio = ratio.ok_or_else(|| {
                    ScenarioError::Schema(format!("compute node `{id}` is missing `ratio`"))
                })?;
                let resource = resource.ok_or_else(|| {
                    ScenarioError::Schema(format!("compute node `{id}` is missing `resource`"))
                })?;
                let resource = resource
                    .validate()
                    .map_err(|e| ScenarioError::pmf(&id, e))?;
                NodeKind::Compute(ComputeSpec {
                    ratio,
                    resource,
                    output_override,
                })
            }
            "transit" | "sink" => {
                if ratio.is_some() || resource.is_some() || output_override.is_some() {
                    return Err(ScenarioError::Schema(format!(
                        "{kind} node `{id}` must not carry ratio, resource or output_override"
                    )));
                }
                if kind == "sink" {
                    NodeKind::Sink
                } else {
                    NodeKind::Transit
                }
            }
            other => {
                return Err(ScenarioError::Schema(format!(
                    "node `{id}` has unknown kind `{other}`"
                )))
            }
        };
        Ok(NodeSpec { id, kind })
    }
}

/// Parses and validates scenario-file text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario =
        serde_json::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    let branches = raw
        .branches
        .into_iter()
        .map(|b| {
            let bandwidth = b
                .bandwidth
                .validate()
                .map_err(|e| ScenarioError::pmf(&b.id, e))?;
            Ok(BranchSpec {
                id: b.id,
                lead_time: b.lead_time,
                bandwidth,
            })
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let nodes = raw
        .nodes
        .into_iter()
        .map(RawNode::into_spec)
        .collect::<Result<Vec<_>, _>>()?;
    let plans = raw
        .plans
        .into_iter()
        .map(|p| DeploymentPlan {
            name: p.name,
            path: p.path,
        })
        .collect();
    Scenario::new(branches, nodes, plans, raw.defaults)
}

/// Renders a scenario in the file format accepted by [`parse_scenario`].
pub fn render_scenario(scenario: &Scenario) -> String {
    let doc = RenderScenario {
        branches: scenario
            .branches
            .iter()
            .map(|b| RenderBranch {
                id: &b.id,
                lead_time: b.lead_time,
                bandwidth: &b.bandwidth,
            })
            .collect(),
        nodes: scenario
            .nodes
            .iter()
            .map(|n| {
                let (kind, compute) = match &n.kind {
                    NodeKind::Compute(c) => ("compute", Some(c)),
                    NodeKind::Transit => ("transit", None),
                    NodeKind::Sink => ("sink", None),
                };
                RenderNode {
                    id: &n.id,
                    kind,
                    ratio: compute.map(|c| c.ratio),
                    resource: compute.map(|c| &c.resource),
                    output_override: compute.and_then(|c| c.output_override),
                }
            })
            .collect(),
        plans: scenario
            .plans
            .iter()
            .map(|p| RawPlan {
                name: p.name.clone(),
                path: p.path.clone(),
            })
            .collect(),
        defaults: scenario.defaults,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("scenario serializes");
    out.push('\n');
    out
}

/// Structure counts reported by `remr check`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioSummary {
    pub plans: usize,
    pub branches: usize,
    /// Compute and transit nodes.
    pub nodes: usize,
    pub sinks: usize,
}

impl Scenario {
    pub fn summary(&self) -> ScenarioSummary {
        let sinks = self.nodes.iter().filter(|n| n.is_sink()).count();
        ScenarioSummary {
            plans: self.plans.len(),
            branches: self.branches.len(),
            nodes: self.nodes.len() - sinks,
            sinks,
        }
    }
}

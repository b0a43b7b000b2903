//! Enumeration of valid agent-collaboration graphs.
//!
//! A strategy graph is a DAG over the agent nodes plus a distinguished final
//! decision node. The candidate edge set contains every ordered pair of
//! distinct agents and every agent-to-final edge; nothing leaves the final
//! node and there are no self-loops. A candidate edge subset is a valid
//! strategy when:
//!
//! 1. the graph is acyclic;
//! 2. the final node has at least one incoming edge (and, by construction,
//!    no outgoing ones);
//! 3. every agent node either has no edges at all or has a directed path to
//!    the final node — no islands of interacting agents whose output cannot
//!    reach the final answer.
//!
//! Valid subsets are deduplicated by the executed sub-DAG (nodes with no
//! path to the final node execute nothing) and ordered canonically by
//! (edge count, lexicographic edge list), which makes action identifiers
//! stable across runs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One agent in the run: a contiguous index plus a display name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentId {
    pub index: u16,
    pub name: String,
}

impl AgentId {
    pub fn new(index: u16, name: impl Into<String>) -> Self {
        Self { index, name: name.into() }
    }
}

/// Build the agent list for a run; indices are assigned in order.
pub fn agent_list(names: &[&str]) -> Vec<AgentId> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| AgentId::new(i as u16, *n))
        .collect()
}

/// A graph node: one of the agents, or the final decision node.
///
/// `Agent(i)` orders before `Final`, so edge lists sort agents first; the
/// ordering is independent of how many agents exist, which keeps canonical
/// keys stable when the agent set grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Node {
    Agent(u16),
    Final,
}

/// A directed edge between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: Node,
    pub dst: Node,
}

impl Edge {
    pub fn new(src: Node, dst: Node) -> Self {
        Self { src, dst }
    }

    pub fn agent_to_final(i: u16) -> Self {
        Self::new(Node::Agent(i), Node::Final)
    }

    pub fn between(i: u16, j: u16) -> Self {
        Self::new(Node::Agent(i), Node::Agent(j))
    }
}

/// One action: a validated strategy graph with a stable identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyGraph {
    pub agents: Vec<AgentId>,
    pub edges: BTreeSet<Edge>,
    pub action_id: u32,
}

impl StrategyGraph {
    /// Agents that actually execute: degree > 0 (valid graphs guarantee
    /// such nodes reach the final node).
    pub fn executed_agents(&self) -> Vec<u16> {
        let mut touched = BTreeSet::new();
        for e in &self.edges {
            if let Node::Agent(i) = e.src {
                touched.insert(i);
            }
            if let Node::Agent(i) = e.dst {
                touched.insert(i);
            }
        }
        touched.into_iter().collect()
    }

    /// In-neighbors of a node, ascending.
    pub fn in_neighbors(&self, node: Node) -> Vec<u16> {
        self.edges
            .iter()
            .filter(|e| e.dst == node)
            .filter_map(|e| match e.src {
                Node::Agent(i) => Some(i),
                Node::Final => None,
            })
            .collect()
    }

    /// Human-readable edge list, e.g. `[["NoR","final"], ...]`.
    pub fn edge_names(&self) -> Vec<[String; 2]> {
        let name = |n: Node| match n {
            Node::Agent(i) => self
                .agents
                .iter()
                .find(|a| a.index == i)
                .map(|a| a.name.clone())
                .unwrap_or_else(|| format!("agent{i}")),
            Node::Final => "final".to_string(),
        };
        self.edges
            .iter()
            .map(|e| [name(e.src), name(e.dst)])
            .collect()
    }

    /// Short text form for reports, e.g. `{NoR->final, OneR->final}`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .edge_names()
            .iter()
            .map(|[a, b]| format!("{a}->{b}"))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Why a candidate edge set is not a valid strategy graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintViolation {
    /// The directed graph contains a cycle.
    Cycle,
    /// The final node has no incoming edge.
    FinalDegree,
    /// Some agent has edges but no directed path to the final node.
    OrphanIsland,
}

/// Validation result for a candidate edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub violations: Vec<ConstraintViolation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn has_cycle(agent_count: u16, edges: &BTreeSet<Edge>) -> bool {
    // Kahn's algorithm over the agent-agent subgraph; edges into the final
    // node cannot participate in a cycle.
    let n = agent_count as usize;
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in edges {
        if let (Node::Agent(a), Node::Agent(b)) = (e.src, e.dst) {
            indeg[b as usize] += 1;
            out[a as usize].push(b as usize);
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0usize;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    seen < n
}

/// Agents with a directed path to the final node (reverse reachability).
fn reaches_final(agent_count: u16, edges: &BTreeSet<Edge>) -> Vec<bool> {
    let n = agent_count as usize;
    let mut reach = vec![false; n];
    let mut stack: Vec<u16> = edges
        .iter()
        .filter(|e| e.dst == Node::Final)
        .filter_map(|e| match e.src {
            Node::Agent(i) => Some(i),
            Node::Final => None,
        })
        .collect();
    while let Some(v) = stack.pop() {
        if reach[v as usize] {
            continue;
        }
        reach[v as usize] = true;
        for e in edges {
            if e.dst == Node::Agent(v) {
                if let Node::Agent(u) = e.src {
                    if !reach[u as usize] {
                        stack.push(u);
                    }
                }
            }
        }
    }
    reach
}

/// Check the three strategy-graph constraints over a candidate edge set.
/// Total over arbitrary candidate sets; invalid inputs get the full list of
/// violated constraints.
pub fn validate_graph(agent_count: u16, edges: &BTreeSet<Edge>) -> Verdict {
    let mut violations = Vec::new();
    if has_cycle(agent_count, edges) {
        violations.push(ConstraintViolation::Cycle);
    }
    if !edges.iter().any(|e| e.dst == Node::Final) {
        violations.push(ConstraintViolation::FinalDegree);
    }
    let reach = reaches_final(agent_count, edges);
    let mut degree = vec![0usize; agent_count as usize];
    for e in edges {
        if let Node::Agent(i) = e.src {
            degree[i as usize] += 1;
        }
        if let Node::Agent(i) = e.dst {
            degree[i as usize] += 1;
        }
    }
    let orphan = (0..agent_count as usize).any(|i| degree[i] > 0 && !reach[i]);
    if orphan {
        violations.push(ConstraintViolation::OrphanIsland);
    }
    Verdict { violations }
}

/// Canonical key of a valid graph: the sorted edge list of the executed
/// sub-DAG (nodes with no path to the final node execute nothing and are
/// dropped). Two graphs share a key iff they run the same computation.
pub fn canonical_form(agent_count: u16, edges: &BTreeSet<Edge>) -> Vec<Edge> {
    let reach = reaches_final(agent_count, edges);
    let keep = |n: Node| match n {
        Node::Final => true,
        Node::Agent(i) => reach[i as usize],
    };
    edges
        .iter()
        .filter(|e| keep(e.src) && keep(e.dst))
        .copied()
        .collect()
}

/// Optional restrictions on the candidate edge set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnumerationConstraints {
    /// Upper bound on the number of edges per graph. `Some(1)` yields the
    /// individual-agents regime: one graph per agent, `{agent -> final}`.
    pub max_edges: Option<usize>,
    /// Candidate edges excluded outright (e.g. forbidding a direct
    /// interaction between two specific agents).
    pub blocked_edges: BTreeSet<Edge>,
}

impl EnumerationConstraints {
    pub fn single_edge() -> Self {
        Self { max_edges: Some(1), ..Self::default() }
    }
}

/// The candidate edge set over `n` agents, in canonical (sorted) order:
/// every ordered pair of distinct agents, plus every agent-to-final edge.
pub fn candidate_edges(agent_count: u16, constraints: &EnumerationConstraints) -> Vec<Edge> {
    let mut edges = BTreeSet::new();
    for i in 0..agent_count {
        for j in 0..agent_count {
            if i != j {
                edges.insert(Edge::between(i, j));
            }
        }
        edges.insert(Edge::agent_to_final(i));
    }
    edges
        .into_iter()
        .filter(|e| !constraints.blocked_edges.contains(e))
        .collect()
}

/// Enumerate every valid strategy graph over the agent set, deduplicated by
/// execution equivalence and ordered by (edge count, edge list). Action ids
/// are positions in that order.
pub fn enumerate_action_space(
    agents: &[AgentId],
    constraints: &EnumerationConstraints,
) -> Result<Vec<StrategyGraph>> {
    if agents.is_empty() {
        return Err(Error::Config("agent list must not be empty".into()));
    }
    if let Some(0) = constraints.max_edges {
        return Err(Error::Config("max_edges must be >= 1".into()));
    }
    let n = agents.len() as u16;
    let candidates = candidate_edges(n, constraints);
    let m = candidates.len();
    if m > 24 {
        return Err(Error::Config(format!(
            "candidate edge set of {m} edges is too large to enumerate exhaustively"
        )));
    }

    let max_edges = constraints.max_edges.unwrap_or(m);
    let mut by_key: BTreeMap<Vec<Edge>, BTreeSet<Edge>> = BTreeMap::new();
    for mask in 1u64..(1u64 << m) {
        if (mask.count_ones() as usize) > max_edges {
            continue;
        }
        let subset: BTreeSet<Edge> = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| candidates[i])
            .collect();
        if !validate_graph(n, &subset).is_valid() {
            continue;
        }
        let key = canonical_form(n, &subset);
        by_key.entry(key).or_insert(subset);
    }

    let mut graphs: Vec<(usize, Vec<Edge>)> = by_key
        .into_keys()
        .map(|key| (key.len(), key))
        .collect();
    graphs.sort();

    Ok(graphs
        .into_iter()
        .enumerate()
        .map(|(id, (_, edges))| StrategyGraph {
            agents: agents.to_vec(),
            edges: edges.into_iter().collect(),
            action_id: id as u32,
        })
        .collect())
}

/// An enumerated action space with id lookup.
#[derive(Debug, Clone)]
pub struct ActionSpace {
    pub agents: Vec<AgentId>,
    pub graphs: Vec<StrategyGraph>,
    by_key: BTreeMap<Vec<Edge>, u32>,
}

impl ActionSpace {
    pub fn build(agents: Vec<AgentId>, constraints: &EnumerationConstraints) -> Result<Self> {
        let graphs = enumerate_action_space(&agents, constraints)?;
        let by_key = graphs
            .iter()
            .map(|g| {
                (
                    canonical_form(agents.len() as u16, &g.edges),
                    g.action_id,
                )
            })
            .collect();
        Ok(Self { agents, graphs, by_key })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn action_ids(&self) -> Vec<u32> {
        self.graphs.iter().map(|g| g.action_id).collect()
    }

    pub fn graph(&self, action_id: u32) -> Result<&StrategyGraph> {
        self.graphs
            .get(action_id as usize)
            .ok_or(Error::UnknownAction(action_id))
    }

    /// Find the action matching a (possibly separately constructed) edge
    /// set, comparing by canonical key.
    pub fn find(&self, edges: &BTreeSet<Edge>) -> Option<u32> {
        let key = canonical_form(self.agents.len() as u16, edges);
        self.by_key.get(&key).copied()
    }

    pub fn agent(&self, index: u16) -> Result<&AgentId> {
        self.agents
            .get(index as usize)
            .ok_or_else(|| Error::Config(format!("agent index {index} out of range")))
    }
}

//! Strategy-graph execution: topological agent invocation with upstream
//! message passing, then majority-vote aggregation at the final node.
//!
//! Latency model: independent branches run concurrently, so the total is
//! the critical path — each node completes at
//! `max(completion of in-neighbors) + own latency`, and the graph completes
//! when the final node's last in-neighbor does. A pure fan-in therefore
//! costs the slowest agent; a chain costs the sum.

use std::collections::{BTreeMap, BTreeSet};

use crate::action_space::{AgentId, Node, StrategyGraph};
use crate::agents::{AgentBackend, AgentResponse, InvocationCtx};
use crate::error::{Error, Result};

/// What one strategy execution did.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    /// Responses of every executed agent, keyed by agent index. Nodes with
    /// no path to the final node are never invoked and do not appear.
    pub per_node: BTreeMap<u16, AgentResponse>,
    /// Executed agents whose backend call failed (their text is empty).
    pub failed_nodes: BTreeSet<u16>,
    /// Majority vote over the final node's in-neighbors.
    pub final_answer: String,
    /// Critical-path execution time in seconds.
    pub total_latency_s: f64,
}

/// Executed agents in deterministic topological order (Kahn's algorithm,
/// smallest index first among ready nodes).
fn topo_order(graph: &StrategyGraph) -> Vec<u16> {
    let executed: BTreeSet<u16> = graph.executed_agents().into_iter().collect();
    let mut indeg: BTreeMap<u16, usize> = executed.iter().map(|&i| (i, 0)).collect();
    for e in &graph.edges {
        if let (Node::Agent(_), Node::Agent(b)) = (e.src, e.dst) {
            *indeg.get_mut(&b).expect("edge endpoint is executed") += 1;
        }
    }
    let mut order = Vec::with_capacity(executed.len());
    let mut ready: BTreeSet<u16> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&i, _)| i)
        .collect();
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        order.push(next);
        for e in &graph.edges {
            if e.src == Node::Agent(next) {
                if let Node::Agent(b) = e.dst {
                    let d = indeg.get_mut(&b).expect("edge endpoint is executed");
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(b);
                    }
                }
            }
        }
    }
    order
}

/// Run one strategy graph for one question.
///
/// Agents are invoked in topological order; each receives the question plus
/// all of its in-neighbors' responses. A backend failure marks that node
/// failed (empty answer text, latency charged as the time spent) and
/// execution continues; the final answer is empty only if every in-neighbor
/// of the final node failed.
pub fn execute(
    graph: &StrategyGraph,
    ctx: &InvocationCtx<'_>,
    backend: &dyn AgentBackend,
) -> Result<ExecutionTrace> {
    let order = topo_order(graph);
    let mut per_node: BTreeMap<u16, AgentResponse> = BTreeMap::new();
    let mut failed_nodes = BTreeSet::new();
    let mut completion: BTreeMap<u16, f64> = BTreeMap::new();

    for index in order {
        let agent = graph
            .agents
            .iter()
            .find(|a| a.index == index)
            .ok_or_else(|| Error::Config(format!("agent index {index} missing from graph")))?;
        let preds = graph.in_neighbors(Node::Agent(index));
        let upstream: Vec<(AgentId, String)> = preds
            .iter()
            .map(|&p| {
                let resp = &per_node[&p];
                let id = graph
                    .agents
                    .iter()
                    .find(|a| a.index == p)
                    .expect("predecessor exists")
                    .clone();
                (id, resp.text.clone())
            })
            .collect();
        let response = match backend.answer(agent, ctx, &upstream) {
            Ok(r) => r,
            Err(e) => {
                failed_nodes.insert(index);
                AgentResponse {
                    text: String::new(),
                    latency_s: e.elapsed_s(),
                    upstream_inputs: upstream,
                }
            }
        };
        let start = preds
            .iter()
            .map(|p| completion[p])
            .fold(0.0f64, f64::max);
        completion.insert(index, start + response.latency_s);
        per_node.insert(index, response);
    }

    let voters = graph.in_neighbors(Node::Final);
    let votes: Vec<(u16, &str)> = voters
        .iter()
        .map(|&i| (i, per_node[&i].text.as_str()))
        .collect();
    let final_answer = majority_vote(&votes)?;
    let total_latency_s = voters
        .iter()
        .map(|i| completion[i])
        .fold(0.0f64, f64::max);

    Ok(ExecutionTrace {
        per_node,
        failed_nodes,
        final_answer,
        total_latency_s,
    })
}

fn normalize_answer(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Most frequent answer after exact-match normalization (lowercase,
/// whitespace collapse). Ties break to the answer of the smallest agent
/// index among the tied answers. Empty (failed) answers can never win
/// unless every answer is empty.
pub fn majority_vote(answers: &[(u16, &str)]) -> Result<String> {
    if answers.is_empty() {
        return Err(Error::InvalidInput("majority vote over an empty list".into()));
    }
    // (count, smallest voter index) per normalized answer.
    let mut tally: BTreeMap<String, (usize, u16)> = BTreeMap::new();
    for (index, text) in answers {
        let norm = normalize_answer(text);
        if norm.is_empty() {
            continue;
        }
        let entry = tally.entry(norm).or_insert((0, *index));
        entry.0 += 1;
        entry.1 = entry.1.min(*index);
    }
    let mut best: Option<(&String, (usize, u16))> = None;
    for (answer, &(count, min_index)) in &tally {
        best = match best {
            None => Some((answer, (count, min_index))),
            Some((_, (bc, bi))) if count > bc || (count == bc && min_index < bi) => {
                Some((answer, (count, min_index)))
            }
            other => other,
        };
    }
    Ok(best.map(|(answer, _)| answer.clone()).unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_space::{agent_list, ActionSpace, Edge, EnumerationConstraints};
    use crate::agents::SimulatorBackend;
    use crate::error::BackendError;

    /// Test backend with a fixed response (or failure) per agent index.
    struct Scripted {
        responses: BTreeMap<u16, (String, f64)>,
        fail: BTreeSet<u16>,
    }

    impl Scripted {
        fn new(entries: &[(u16, &str, f64)]) -> Self {
            Self {
                responses: entries
                    .iter()
                    .map(|(i, t, l)| (*i, (t.to_string(), *l)))
                    .collect(),
                fail: BTreeSet::new(),
            }
        }

        fn failing(mut self, index: u16) -> Self {
            self.fail.insert(index);
            self
        }
    }

    impl AgentBackend for Scripted {
        fn answer(
            &self,
            agent: &AgentId,
            _ctx: &InvocationCtx<'_>,
            upstream: &[(AgentId, String)],
        ) -> Result<AgentResponse, BackendError> {
            if self.fail.contains(&agent.index) {
                return Err(BackendError::Timeout { elapsed_s: 0.25 });
            }
            let (text, latency_s) = self
                .responses
                .get(&agent.index)
                .cloned()
                .unwrap_or_else(|| panic!("unexpected invocation of agent {}", agent.index));
            Ok(AgentResponse {
                text,
                latency_s,
                upstream_inputs: upstream.to_vec(),
            })
        }
    }

    fn ctx() -> InvocationCtx<'static> {
        InvocationCtx {
            question: "q",
            gold: "gold",
            context_label: "A",
            episode_key: 7,
        }
    }

    fn graph(edges: &[Edge]) -> StrategyGraph {
        StrategyGraph {
            agents: agent_list(&["NoR", "OneR", "IRCoT"]),
            edges: edges.iter().copied().collect(),
            action_id: 0,
        }
    }

    #[test]
    fn single_node_pipeline() {
        let mut table = crate::agents::default_profiles();
        table.get_mut("NoR").unwrap().get_mut("A").unwrap().f1_mean = 1.0;
        let sim = SimulatorBackend::new(table, 0.5).unwrap();
        let g = graph(&[Edge::agent_to_final(0)]);
        let trace = execute(&g, &ctx(), &sim).unwrap();
        assert_eq!(trace.final_answer, "gold");
        assert_eq!(trace.total_latency_s, trace.per_node[&0].latency_s);
    }

    #[test]
    fn strict_majority_wins() {
        let backend = Scripted::new(&[(0, "x", 1.0), (1, "x", 1.0), (2, "y", 1.0)]);
        let g = graph(&[
            Edge::agent_to_final(0),
            Edge::agent_to_final(1),
            Edge::agent_to_final(2),
        ]);
        let trace = execute(&g, &ctx(), &backend).unwrap();
        assert_eq!(trace.final_answer, "x");
    }

    #[test]
    fn chain_passes_upstream_and_adds_latency() {
        let backend = Scripted::new(&[(0, "hint", 0.5), (2, "final answer", 2.0)]);
        let g = graph(&[Edge::between(0, 2), Edge::agent_to_final(2)]);
        let trace = execute(&g, &ctx(), &backend).unwrap();
        let downstream = &trace.per_node[&2];
        assert_eq!(downstream.upstream_inputs.len(), 1);
        assert_eq!(downstream.upstream_inputs[0].1, "hint");
        assert_eq!(trace.total_latency_s, 2.5);
        assert_eq!(trace.final_answer, "final answer");
    }

    #[test]
    fn fan_in_latency_is_max() {
        let backend = Scripted::new(&[(0, "a", 0.5), (1, "b", 7.0), (2, "c", 2.0)]);
        let g = graph(&[
            Edge::agent_to_final(0),
            Edge::agent_to_final(1),
            Edge::agent_to_final(2),
        ]);
        let trace = execute(&g, &ctx(), &backend).unwrap();
        assert_eq!(trace.total_latency_s, 7.0);
    }

    #[test]
    fn diamond_latency_is_critical_path() {
        // 0 -> 1 -> f and 0 -> 2 -> f; path through 1 dominates.
        let backend = Scripted::new(&[(0, "s", 1.0), (1, "x", 5.0), (2, "x", 2.0)]);
        let g = graph(&[
            Edge::between(0, 1),
            Edge::between(0, 2),
            Edge::agent_to_final(1),
            Edge::agent_to_final(2),
        ]);
        let trace = execute(&g, &ctx(), &backend).unwrap();
        assert_eq!(trace.total_latency_s, 6.0);
        assert_eq!(trace.final_answer, "x");
    }

    #[test]
    fn isolated_nodes_are_never_invoked() {
        // Scripted panics on unexpected invocations; only agent 0 may run.
        let backend = Scripted::new(&[(0, "x", 1.0)]);
        let g = graph(&[Edge::agent_to_final(0)]);
        let trace = execute(&g, &ctx(), &backend).unwrap();
        assert_eq!(trace.per_node.len(), 1);
        assert!(trace.per_node.contains_key(&0));
    }

    #[test]
    fn failed_node_votes_empty_and_is_charged_time() {
        let backend = Scripted::new(&[(0, "x", 1.0), (1, "y", 1.0)]).failing(1);
        let g = graph(&[Edge::agent_to_final(0), Edge::agent_to_final(1)]);
        let trace = execute(&g, &ctx(), &backend).unwrap();
        assert_eq!(trace.final_answer, "x");
        assert!(trace.failed_nodes.contains(&1));
        assert_eq!(trace.per_node[&1].latency_s, 0.25);
    }

    #[test]
    fn all_failed_means_empty_answer() {
        let backend = Scripted::new(&[]).failing(0).failing(1);
        let g = graph(&[Edge::agent_to_final(0), Edge::agent_to_final(1)]);
        let trace = execute(&g, &ctx(), &backend).unwrap();
        assert_eq!(trace.final_answer, "");
        assert_eq!(trace.failed_nodes.len(), 2);
    }

    #[test]
    fn vote_normalizes_and_breaks_ties_by_index() {
        assert_eq!(majority_vote(&[(0, "x")]).unwrap(), "x");
        assert_eq!(
            majority_vote(&[(0, "X "), (1, "x"), (2, "y")]).unwrap(),
            "x"
        );
        // 1-1 tie: agent 0's answer wins.
        assert_eq!(majority_vote(&[(0, "x"), (1, "y")]).unwrap(), "x");
        assert_eq!(majority_vote(&[(1, "y"), (0, "x")]).unwrap(), "x");
        // Two-token answers collapse inner whitespace.
        assert_eq!(
            majority_vote(&[(0, "New  York"), (1, "new york")]).unwrap(),
            "new york"
        );
        assert!(majority_vote(&[]).is_err());
    }

    #[test]
    fn every_enumerated_graph_executes() {
        let sim = SimulatorBackend::with_defaults();
        let space = ActionSpace::build(
            agent_list(&["NoR", "OneR", "IRCoT"]),
            &EnumerationConstraints::default(),
        )
        .unwrap();
        for g in &space.graphs {
            let trace = execute(g, &ctx(), &sim).unwrap();
            assert!(trace.total_latency_s > 0.0);
            // Every executed agent reached the final node by construction.
            assert_eq!(
                trace.per_node.keys().copied().collect::<Vec<_>>(),
                g.executed_agents()
            );
        }
    }
}

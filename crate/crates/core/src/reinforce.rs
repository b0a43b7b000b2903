//! Context-blind REINFORCE baseline over independent edge probabilities.
//!
//! Each candidate edge carries an inclusion probability. Training samples a
//! graph by independent Bernoulli draws, repairs it to a valid strategy,
//! executes it, and nudges each probability by
//! `q += lr * (reward - baseline) * (1[included] - q)` with a
//! moving-average reward baseline. Deployment keeps the edges with
//! probability >= 0.5 and repairs once more. The policy never sees the
//! question context: it learns one fixed graph for all questions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;

use crate::action_space::{
    candidate_edges, validate_graph, ActionSpace, ConstraintViolation, Edge,
    EnumerationConstraints, Node, StrategyGraph,
};
use crate::error::{Error, Result};

/// Probabilities are clamped to `[EPS, 1 - EPS]` so no edge is ever
/// permanently dead or permanently certain.
pub const PROB_EPS: f64 = 1e-3;

/// Independent inclusion probabilities over the candidate edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolicy {
    probs: BTreeMap<Edge, f64>,
    learning_rate: f64,
    agent_count: u16,
    max_edges: Option<usize>,
}

impl EdgePolicy {
    /// Uniform initialization over the candidate edges of `agent_count`
    /// agents (honoring blocked edges and max_edges from `constraints`).
    pub fn uniform(
        agent_count: u16,
        constraints: &EnumerationConstraints,
        initial_prob: f64,
        learning_rate: f64,
    ) -> Result<Self> {
        if agent_count == 0 {
            return Err(Error::Config("agent count must be >= 1".into()));
        }
        if !(learning_rate > 0.0) || !learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "learning rate must be finite and > 0, got {learning_rate}"
            )));
        }
        if !(0.0..=1.0).contains(&initial_prob) {
            return Err(Error::Config(format!(
                "initial probability must be in [0,1], got {initial_prob}"
            )));
        }
        if constraints.max_edges == Some(0) {
            return Err(Error::Config("max_edges must be >= 1".into()));
        }
        let q0 = initial_prob.clamp(PROB_EPS, 1.0 - PROB_EPS);
        let probs = candidate_edges(agent_count, constraints)
            .into_iter()
            .map(|e| (e, q0))
            .collect();
        Ok(Self {
            probs,
            learning_rate,
            agent_count,
            max_edges: constraints.max_edges,
        })
    }

    pub fn probs(&self) -> &BTreeMap<Edge, f64> {
        &self.probs
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    /// Set one edge's probability directly (clamped); test and tooling hook.
    pub fn set_prob(&mut self, edge: Edge, q: f64) -> Result<()> {
        let slot = self
            .probs
            .get_mut(&edge)
            .ok_or_else(|| Error::Config(format!("edge {edge:?} not in candidate set")))?;
        *slot = q.clamp(PROB_EPS, 1.0 - PROB_EPS);
        Ok(())
    }

    /// Independent Bernoulli draw per candidate edge, before any repair.
    pub fn sample_edges_raw<R: Rng>(&self, rng: &mut R) -> BTreeSet<Edge> {
        self.probs
            .iter()
            .filter(|(_, &q)| rng.random::<f64>() < q)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Sample a graph and repair it into a valid strategy.
    pub fn sample_graph<R: Rng>(&self, rng: &mut R) -> BTreeSet<Edge> {
        let raw = self.sample_edges_raw(rng);
        self.repair(raw)
    }

    /// Sample, repair, and resolve to the enumerated action.
    pub fn sample_strategy<R: Rng>(&self, space: &ActionSpace, rng: &mut R) -> Result<StrategyGraph> {
        let edges = self.sample_graph(rng);
        let id = space.find(&edges).ok_or_else(|| {
            Error::Config("sampled graph is not part of the action space".into())
        })?;
        space.graph(id).cloned()
    }

    /// Make an arbitrary edge set a valid strategy graph:
    ///
    /// 1. while a cycle exists, drop the canonically-first edge on a cycle;
    /// 2. drop edges pointing at agents with no path to the final node;
    /// 3. if the final node has no in-edge, force the highest-probability
    ///    agent-to-final edge (ties to canonical order);
    /// 4. if a max_edges bound applies, drop the lowest-probability edge and
    ///    start over until it holds.
    pub fn repair(&self, mut edges: BTreeSet<Edge>) -> BTreeSet<Edge> {
        loop {
            while let Some(edge) = first_cycle_edge(self.agent_count, &edges) {
                edges.remove(&edge);
            }
            let reach = reach_final(&edges);
            edges.retain(|e| match e.dst {
                Node::Final => true,
                Node::Agent(i) => reach.contains(&i),
            });
            if !edges.iter().any(|e| e.dst == Node::Final) {
                if let Some(forced) = self.best_final_edge() {
                    edges.insert(forced);
                }
            }
            match self.max_edges {
                Some(limit) if edges.len() > limit => {
                    if let Some(worst) = edges
                        .iter()
                        .copied()
                        .min_by(|a, b| {
                            let qa = self.probs.get(a).copied().unwrap_or(0.0);
                            let qb = self.probs.get(b).copied().unwrap_or(0.0);
                            qa.partial_cmp(&qb).unwrap().then(b.cmp(a))
                        })
                    {
                        edges.remove(&worst);
                        continue;
                    }
                    break;
                }
                _ => break,
            }
        }
        debug_assert!(validate_graph(self.agent_count, &edges).is_valid());
        edges
    }

    fn best_final_edge(&self) -> Option<Edge> {
        let mut best: Option<(Edge, f64)> = None;
        for (&e, &q) in &self.probs {
            if e.dst != Node::Final {
                continue;
            }
            best = match best {
                None => Some((e, q)),
                Some((_, bq)) if q > bq => Some((e, q)),
                other => other,
            };
        }
        best.map(|(e, _)| e)
    }

    /// One policy-gradient step from an observed (sampled graph, reward)
    /// pair against the running baseline.
    pub fn reinforce_step(&mut self, sampled: &BTreeSet<Edge>, reward: f64, baseline: f64) {
        let advantage = reward - baseline;
        let lr = self.learning_rate;
        for (edge, q) in self.probs.iter_mut() {
            let included = if sampled.contains(edge) { 1.0 } else { 0.0 };
            *q = (*q + lr * advantage * (included - *q)).clamp(PROB_EPS, 1.0 - PROB_EPS);
        }
    }

    /// Deployment graph: keep edges with probability >= 0.5, then repair.
    pub fn prune(&self) -> BTreeSet<Edge> {
        let kept: BTreeSet<Edge> = self
            .probs
            .iter()
            .filter(|(_, &q)| q >= 0.5)
            .map(|(&e, _)| e)
            .collect();
        self.repair(kept)
    }

    /// Pruned graph resolved against the enumerated action space.
    pub fn prune_strategy(&self, space: &ActionSpace) -> Result<StrategyGraph> {
        let edges = self.prune();
        let id = space.find(&edges).ok_or_else(|| {
            Error::Config("pruned graph is not part of the action space".into())
        })?;
        space.graph(id).cloned()
    }
}

/// First edge (canonical order) that lies on some directed cycle.
fn first_cycle_edge(agent_count: u16, edges: &BTreeSet<Edge>) -> Option<Edge> {
    if !validate_graph(agent_count, edges)
        .violations
        .contains(&ConstraintViolation::Cycle)
    {
        return None;
    }
    edges
        .iter()
        .find(|e| match (e.src, e.dst) {
            (Node::Agent(u), Node::Agent(v)) => has_path(edges, v, u),
            _ => false,
        })
        .copied()
}

fn has_path(edges: &BTreeSet<Edge>, from: u16, to: u16) -> bool {
    let mut stack = vec![from];
    let mut seen = BTreeSet::new();
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if !seen.insert(v) {
            continue;
        }
        for e in edges {
            if e.src == Node::Agent(v) {
                if let Node::Agent(w) = e.dst {
                    stack.push(w);
                }
            }
        }
    }
    false
}

/// Agents with a directed path to the final node.
fn reach_final(edges: &BTreeSet<Edge>) -> BTreeSet<u16> {
    let mut reach = BTreeSet::new();
    let mut stack: Vec<u16> = edges
        .iter()
        .filter(|e| e.dst == Node::Final)
        .filter_map(|e| match e.src {
            Node::Agent(i) => Some(i),
            Node::Final => None,
        })
        .collect();
    while let Some(v) = stack.pop() {
        if !reach.insert(v) {
            continue;
        }
        for e in edges {
            if e.dst == Node::Agent(v) {
                if let Node::Agent(u) = e.src {
                    stack.push(u);
                }
            }
        }
    }
    reach
}

/// Moving-average reward baseline over a sliding window.
#[derive(Debug, Clone)]
pub struct RewardBaseline {
    window: usize,
    recent: VecDeque<f64>,
    sum: f64,
}

impl RewardBaseline {
    pub fn new(window: usize) -> Self {
        Self {
            window: window.max(1),
            recent: VecDeque::new(),
            sum: 0.0,
        }
    }

    /// Current baseline: mean of the window, 0 before any observation.
    pub fn value(&self) -> f64 {
        if self.recent.is_empty() {
            0.0
        } else {
            self.sum / self.recent.len() as f64
        }
    }

    pub fn observe(&mut self, reward: f64) {
        self.recent.push_back(reward);
        self.sum += reward;
        if self.recent.len() > self.window {
            if let Some(old) = self.recent.pop_front() {
                self.sum -= old;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_space::canonical_form;
    use crate::seeding;
    use proptest::prelude::*;

    fn policy(initial: f64) -> EdgePolicy {
        EdgePolicy::uniform(3, &EnumerationConstraints::default(), initial, 0.05).unwrap()
    }

    #[test]
    fn full_probability_on_dag_candidates_samples_full_graph() {
        // Restrict candidates to an acyclic set; with q = 1 the sample is
        // the entire candidate set and needs no repair.
        let constraints = EnumerationConstraints {
            max_edges: None,
            blocked_edges: [Edge::between(1, 0), Edge::between(2, 0), Edge::between(2, 1)]
                .into_iter()
                .collect(),
        };
        let policy = EdgePolicy::uniform(3, &constraints, 1.0, 0.05).unwrap();
        let mut rng = seeding::rng_for(0);
        let sampled = policy.sample_graph(&mut rng);
        // PROB_EPS clamping means q = 1 - eps; a miss is possible but not at
        // this seed for all six draws.
        assert_eq!(sampled.len(), 6);
        assert!(validate_graph(3, &sampled).is_valid());
    }

    #[test]
    fn empty_sample_forces_best_final_edge() {
        let mut p = policy(0.5);
        p.set_prob(Edge::agent_to_final(0), 0.2).unwrap();
        p.set_prob(Edge::agent_to_final(1), 0.7).unwrap();
        p.set_prob(Edge::agent_to_final(2), 0.3).unwrap();
        let repaired = p.repair(BTreeSet::new());
        assert_eq!(
            repaired.into_iter().collect::<Vec<_>>(),
            vec![Edge::agent_to_final(1)]
        );
        // All-equal probabilities fall back to the lowest agent index.
        let p = policy(0.5);
        let repaired = p.repair(BTreeSet::new());
        assert_eq!(
            repaired.into_iter().collect::<Vec<_>>(),
            vec![Edge::agent_to_final(0)]
        );
    }

    #[test]
    fn repair_breaks_cycles_and_removes_islands() {
        let p = policy(0.5);
        // 0 <-> 1 cycle plus a valid 2 -> final edge.
        let raw: BTreeSet<Edge> = [
            Edge::between(0, 1),
            Edge::between(1, 0),
            Edge::agent_to_final(2),
        ]
        .into_iter()
        .collect();
        let repaired = p.repair(raw);
        assert!(validate_graph(3, &repaired).is_valid());
        assert!(repaired.contains(&Edge::agent_to_final(2)));
        // The canonically-first cycle edge (0,1) is dropped; (1,0) then has
        // no path to final and goes too.
        assert!(!repaired.contains(&Edge::between(0, 1)));
        assert!(!repaired.contains(&Edge::between(1, 0)));
    }

    #[test]
    fn sampling_frequency_matches_probability_before_repair() {
        let p = policy(0.5);
        let mut counts: BTreeMap<Edge, usize> = BTreeMap::new();
        let n = 10_000;
        for k in 0..n {
            let mut rng = seeding::rng_for(k as u64);
            for e in p.sample_edges_raw(&mut rng) {
                *counts.entry(e).or_insert(0) += 1;
            }
        }
        for (&edge, &count) in &counts {
            let freq = count as f64 / n as f64;
            assert!((freq - 0.5).abs() < 0.02, "{edge:?}: {freq}");
        }
        assert_eq!(counts.len(), 9);
    }

    #[test]
    fn reinforce_step_moves_in_the_right_direction() {
        let included: BTreeSet<Edge> = [Edge::agent_to_final(0)].into_iter().collect();
        let edge = Edge::agent_to_final(0);
        let excluded_edge = Edge::agent_to_final(1);

        let mut p = policy(0.5);
        p.reinforce_step(&included, 1.0, 0.0);
        assert!(p.probs()[&edge] > 0.5);
        assert!(p.probs()[&excluded_edge] < 0.5);

        let mut p = policy(0.5);
        p.reinforce_step(&included, -1.0, 0.0);
        assert!(p.probs()[&edge] < 0.5);
        assert!(p.probs()[&excluded_edge] > 0.5);

        let mut p = policy(0.5);
        p.reinforce_step(&included, 0.3, 0.3);
        assert_eq!(p.probs()[&edge], 0.5);
    }

    #[test]
    fn prune_keeps_half_and_above_then_repairs() {
        let mut p = policy(0.1);
        p.set_prob(Edge::agent_to_final(0), 0.9).unwrap();
        p.set_prob(Edge::agent_to_final(1), 0.2).unwrap();
        p.set_prob(Edge::agent_to_final(2), 0.8).unwrap();
        let pruned = p.prune();
        let expect: BTreeSet<Edge> = [Edge::agent_to_final(0), Edge::agent_to_final(2)]
            .into_iter()
            .collect();
        assert_eq!(pruned, expect);

        // Everything below 0.5: repair forces the single best final edge.
        let mut p = policy(0.1);
        p.set_prob(Edge::agent_to_final(2), 0.4).unwrap();
        let pruned = p.prune();
        assert_eq!(
            pruned.into_iter().collect::<Vec<_>>(),
            vec![Edge::agent_to_final(2)]
        );

        // Everything at or above 0.5 on an acyclic candidate set: all kept.
        let constraints = EnumerationConstraints {
            max_edges: None,
            blocked_edges: [Edge::between(1, 0), Edge::between(2, 0), Edge::between(2, 1)]
                .into_iter()
                .collect(),
        };
        let p = EdgePolicy::uniform(3, &constraints, 0.7, 0.05).unwrap();
        assert_eq!(p.prune().len(), 6);
    }

    #[test]
    fn max_edges_bound_is_enforced_by_repair() {
        let constraints = EnumerationConstraints {
            max_edges: Some(1),
            ..Default::default()
        };
        let p = EdgePolicy::uniform(3, &constraints, 0.9, 0.05).unwrap();
        for seed in 0..50u64 {
            let mut rng = seeding::rng_for(seed);
            let g = p.sample_graph(&mut rng);
            assert_eq!(g.len(), 1);
            assert!(validate_graph(3, &g).is_valid());
        }
    }

    #[test]
    fn stationary_preference_drives_edge_above_half() {
        // Reward 1 whenever agent 2's final edge is present, else 0.
        let mut p = policy(0.5);
        let target = Edge::agent_to_final(2);
        let mut baseline = RewardBaseline::new(50);
        for step in 0..2000u64 {
            let mut rng = seeding::rng_for(step);
            let g = p.sample_graph(&mut rng);
            let reward = if g.contains(&target) { 1.0 } else { 0.0 };
            let b = baseline.value();
            p.reinforce_step(&g, reward, b);
            baseline.observe(reward);
        }
        assert!(p.probs()[&target] > 0.5, "q={}", p.probs()[&target]);
    }

    #[test]
    fn baseline_window_is_a_sliding_mean() {
        let mut b = RewardBaseline::new(3);
        assert_eq!(b.value(), 0.0);
        for r in [1.0, 2.0, 3.0, 4.0] {
            b.observe(r);
        }
        assert!((b.value() - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn probabilities_stay_clamped(
            rewards in proptest::collection::vec(-5.0f64..5.0, 0..200),
            seed in any::<u64>(),
        ) {
            let mut p = policy(0.5);
            let mut baseline = RewardBaseline::new(50);
            let mut rng = seeding::rng_for(seed);
            for r in rewards {
                let g = p.sample_graph(&mut rng);
                p.reinforce_step(&g, r, baseline.value());
                baseline.observe(r);
            }
            for &q in p.probs().values() {
                prop_assert!((PROB_EPS..=1.0 - PROB_EPS).contains(&q));
            }
        }

        #[test]
        fn sampled_and_pruned_graphs_are_always_valid(
            seed in any::<u64>(),
            qs in proptest::collection::vec(0.0f64..1.0, 9),
        ) {
            let mut p = policy(0.5);
            let cands = candidate_edges(3, &EnumerationConstraints::default());
            for (e, q) in cands.iter().zip(&qs) {
                p.set_prob(*e, *q).unwrap();
            }
            let mut rng = seeding::rng_for(seed);
            let sampled = p.sample_graph(&mut rng);
            prop_assert!(validate_graph(3, &sampled).is_valid());
            let pruned = p.prune();
            prop_assert!(validate_graph(3, &pruned).is_valid());
            // Both resolve to enumerated actions.
            let key = canonical_form(3, &sampled);
            prop_assert_eq!(key.into_iter().collect::<BTreeSet<_>>(), sampled);
        }
    }
}

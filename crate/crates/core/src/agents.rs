//! Agent abstraction and the statistical simulator backend.
//!
//! The simulator stands in for real answering services. Each (agent,
//! context) cell is calibrated by a mean token-F1 and a mean latency; an
//! invocation returns the gold answer with probability `f1_mean` (so the
//! expected F1 equals the calibration target exactly: the miss answer is
//! token-disjoint from the gold and scores 0) and a log-normal latency with
//! the configured mean.
//!
//! Upstream influence is a declared simulator assumption, not a measured
//! quantity: an agent that receives upstream answers blends its own success
//! probability with the best upstream correctness,
//! `p = (1 - w) * p_own + w * best_upstream`. A strong upstream agent lifts
//! a weak downstream one; a weak upstream drags a strong downstream one
//! down, which is what keeps single-agent strategies competitive with
//! chains, matching the calibration source's observed behaviour.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::action_space::AgentId;
use crate::error::{BackendError, Error, Result};
use crate::reward::{f1_tokens, token_f1};
use crate::seeding;

/// Calibration for one (agent, context) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileCell {
    /// Mean token-F1 in [0, 1]; also the gold-answer probability.
    pub f1_mean: f64,
    /// Std-dev of per-call jitter on the success probability.
    #[serde(default)]
    pub f1_dispersion: f64,
    /// Mean latency in seconds, > 0.
    pub latency_mean_s: f64,
    /// Coefficient of variation of the log-normal latency.
    #[serde(default = "default_latency_dispersion")]
    pub latency_dispersion: f64,
}

fn default_latency_dispersion() -> f64 {
    0.1
}

impl ProfileCell {
    pub fn new(f1_mean: f64, latency_mean_s: f64) -> Self {
        Self {
            f1_mean,
            f1_dispersion: 0.0,
            latency_mean_s,
            latency_dispersion: default_latency_dispersion(),
        }
    }

    fn validate(&self, agent: &str, label: &str) -> Result<()> {
        if !(0.0..=1.0).contains(&self.f1_mean) {
            return Err(Error::Config(format!(
                "profile {agent}/{label}: f1_mean must be in [0,1], got {}",
                self.f1_mean
            )));
        }
        if !(self.latency_mean_s > 0.0) || !self.latency_mean_s.is_finite() {
            return Err(Error::Config(format!(
                "profile {agent}/{label}: latency_mean_s must be finite and > 0"
            )));
        }
        if self.f1_dispersion < 0.0 || self.latency_dispersion < 0.0 {
            return Err(Error::Config(format!(
                "profile {agent}/{label}: dispersions must be >= 0"
            )));
        }
        Ok(())
    }
}

/// Per-context calibration for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    pub agent: AgentId,
    pub per_context: BTreeMap<String, ProfileCell>,
}

/// The profile file format: JSON map agent name -> context label -> cell.
pub type ProfileTable = BTreeMap<String, BTreeMap<String, ProfileCell>>;

/// Calibration defaults: measured per-agent means on the three-level
/// complexity split (F1, seconds).
pub fn default_profiles() -> ProfileTable {
    let rows: [(&str, [(&str, f64, f64); 3]); 3] = [
        ("NoR", [("A", 0.914, 0.66), ("B", 0.061, 0.66), ("C", 0.066, 0.67)]),
        ("OneR", [("A", 0.677, 6.46), ("B", 0.518, 7.34), ("C", 0.146, 6.41)]),
        (
            "IRCoT",
            [("A", 0.730, 189.78), ("B", 0.580, 192.30), ("C", 0.458, 184.85)],
        ),
    ];
    rows.iter()
        .map(|(agent, cells)| {
            (
                agent.to_string(),
                cells
                    .iter()
                    .map(|(label, f1, lat)| (label.to_string(), ProfileCell::new(*f1, *lat)))
                    .collect(),
            )
        })
        .collect()
}

/// One agent invocation's result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResponse {
    /// Answer text; empty means the invocation failed.
    pub text: String,
    /// Seconds spent producing the answer.
    pub latency_s: f64,
    /// Upstream answers this agent saw before answering.
    pub upstream_inputs: Vec<(AgentId, String)>,
}

/// Inputs common to every agent invocation of one episode.
#[derive(Debug, Clone, Copy)]
pub struct InvocationCtx<'a> {
    pub question: &'a str,
    /// Primary gold answer; simulator calibration target.
    pub gold: &'a str,
    pub context_label: &'a str,
    /// Derivation key for seeded backends; see [`crate::seeding`].
    pub episode_key: u64,
}

/// An answering backend: simulator or remote services.
pub trait AgentBackend {
    fn answer(
        &self,
        agent: &AgentId,
        ctx: &InvocationCtx<'_>,
        upstream: &[(AgentId, String)],
    ) -> Result<AgentResponse, BackendError>;
}

/// Statistical simulator calibrated from a [`ProfileTable`].
#[derive(Debug, Clone)]
pub struct SimulatorBackend {
    table: ProfileTable,
    /// Weight of upstream correctness in the blended success probability.
    upstream_weight: f64,
}

impl SimulatorBackend {
    pub fn new(table: ProfileTable, upstream_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&upstream_weight) {
            return Err(Error::Config(format!(
                "upstream_weight must be in [0,1], got {upstream_weight}"
            )));
        }
        for (agent, contexts) in &table {
            if contexts.is_empty() {
                return Err(Error::Config(format!("profile {agent} has no contexts")));
            }
            for (label, cell) in contexts {
                cell.validate(agent, label)?;
            }
        }
        Ok(Self { table, upstream_weight })
    }

    pub fn with_defaults() -> Self {
        Self::new(default_profiles(), 0.5).expect("default profiles are valid")
    }

    pub fn table(&self) -> &ProfileTable {
        &self.table
    }

    pub fn upstream_weight(&self) -> f64 {
        self.upstream_weight
    }

    pub fn cell(&self, agent: &str, label: &str) -> Result<&ProfileCell> {
        self.table
            .get(agent)
            .and_then(|c| c.get(label))
            .ok_or_else(|| Error::UnknownContext(format!("{agent}/{label}")))
    }

    /// Context labels covered by every agent, ascending.
    pub fn labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self
            .table
            .values()
            .next()
            .map(|c| c.keys().cloned().collect())
            .unwrap_or_default();
        labels.sort();
        labels
    }

    /// Success probability after blending in upstream correctness.
    fn effective_p(&self, own: f64, gold: &str, upstream: &[(AgentId, String)]) -> f64 {
        if upstream.is_empty() {
            return own;
        }
        let best = upstream
            .iter()
            .map(|(_, text)| token_f1(text, gold))
            .fold(0.0, f64::max);
        let w = self.upstream_weight;
        ((1.0 - w) * own + w * best).clamp(0.0, 1.0)
    }

    /// Simulate one answer. The draw order is fixed (success, then jitter,
    /// then latency) so a given rng stream always produces the same
    /// response.
    pub fn simulate_answer<R: Rng>(
        &self,
        agent: &AgentId,
        context_label: &str,
        gold: &str,
        upstream: &[(AgentId, String)],
        rng: &mut R,
    ) -> Result<AgentResponse> {
        let cell = *self.cell(&agent.name, context_label)?;
        let mut p = self.effective_p(cell.f1_mean, gold, upstream);
        let u: f64 = rng.random();
        if cell.f1_dispersion > 0.0 {
            let z: f64 = rand_distr::StandardNormal.sample(rng);
            p = (p + cell.f1_dispersion * z).clamp(0.0, 1.0);
        }
        let text = if u < p {
            gold.to_string()
        } else {
            distractor_for(&agent.name, gold)
        };
        let latency_s = draw_latency(cell.latency_mean_s, cell.latency_dispersion, rng);
        Ok(AgentResponse {
            text,
            latency_s,
            upstream_inputs: upstream.to_vec(),
        })
    }
}

/// Log-normal latency with the given mean and coefficient of variation.
/// Zero dispersion degenerates to the mean itself.
fn draw_latency<R: Rng>(mean_s: f64, cv: f64, rng: &mut R) -> f64 {
    if cv <= 0.0 {
        return mean_s;
    }
    let sigma2 = (1.0 + cv * cv).ln();
    let mu = mean_s.ln() - sigma2 / 2.0;
    let dist = LogNormal::new(mu, sigma2.sqrt()).expect("finite log-normal parameters");
    let s: f64 = dist.sample(rng);
    s.max(1e-9)
}

/// A deterministic wrong answer, token-disjoint from the gold so that its
/// token F1 against the gold is exactly zero. Distinct per agent so that
/// two wrong agents never accidentally agree in a vote.
pub fn distractor_for(agent_name: &str, gold: &str) -> String {
    let gold_tokens = f1_tokens(gold);
    let base: String = format!(
        "miss{}",
        agent_name
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase()
    );
    let mut candidate = base;
    while gold_tokens.iter().any(|t| *t == candidate) {
        candidate.push('x');
    }
    candidate
}

impl AgentBackend for SimulatorBackend {
    fn answer(
        &self,
        agent: &AgentId,
        ctx: &InvocationCtx<'_>,
        upstream: &[(AgentId, String)],
    ) -> Result<AgentResponse, BackendError> {
        let mut rng = seeding::sub_rng(ctx.episode_key, u64::from(agent.index));
        self.simulate_answer(agent, ctx.context_label, ctx.gold, upstream, &mut rng)
            .map_err(|e| BackendError::NotConfigured(e.to_string()))
    }
}

/// Mean F1 and latency over `samples` simulated calls for one cell.
pub fn calibration_run(
    sim: &SimulatorBackend,
    agent: &AgentId,
    label: &str,
    gold: &str,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut f1_sum = 0.0;
    let mut lat_sum = 0.0;
    for k in 0..samples {
        let mut rng = seeding::rng_for(seeding::mix(&[
            seed,
            u64::from(agent.index),
            seeding::fnv1a(label),
            k as u64,
        ]));
        let resp = sim.simulate_answer(agent, label, gold, &[], &mut rng)?;
        f1_sum += token_f1(&resp.text, gold);
        lat_sum += resp.latency_s;
    }
    let n = samples as f64;
    Ok((f1_sum / n, lat_sum / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_space::agent_list;
    use proptest::prelude::*;

    fn sim() -> SimulatorBackend {
        SimulatorBackend::with_defaults()
    }

    fn agents() -> Vec<AgentId> {
        agent_list(&["NoR", "OneR", "IRCoT"])
    }

    #[test]
    fn degenerate_profiles_are_exact() {
        let mut table = default_profiles();
        table.get_mut("NoR").unwrap().get_mut("A").unwrap().f1_mean = 1.0;
        table.get_mut("OneR").unwrap().get_mut("A").unwrap().f1_mean = 0.0;
        let sim = SimulatorBackend::new(table, 0.5).unwrap();
        let agents = agents();
        for k in 0..200u64 {
            let mut rng = seeding::rng_for(k);
            let always = sim
                .simulate_answer(&agents[0], "A", "gold token", &[], &mut rng)
                .unwrap();
            assert_eq!(always.text, "gold token");
            let never = sim
                .simulate_answer(&agents[1], "A", "gold token", &[], &mut rng)
                .unwrap();
            assert_eq!(token_f1(&never.text, "gold token"), 0.0);
        }
    }

    #[test]
    fn unknown_context_rejected() {
        let mut rng = seeding::rng_for(0);
        let err = sim().simulate_answer(&agents()[0], "Z", "g", &[], &mut rng);
        assert!(err.is_err());
    }

    #[test]
    fn calibration_hits_table_mean() {
        // Mean F1 over 10k draws lands within 0.02 of the cell target.
        let sim = sim();
        let agents = agents();
        let (f1, lat) = calibration_run(&sim, &agents[0], "A", "answer", 10_000, 0).unwrap();
        assert!((f1 - 0.914).abs() < 0.02, "f1={f1}");
        assert!((lat - 0.66).abs() < 0.02, "lat={lat}");
    }

    #[test]
    fn seed_determinism() {
        let sim = sim();
        let agents = agents();
        let a = {
            let mut rng = seeding::rng_for(42);
            sim.simulate_answer(&agents[2], "B", "gold", &[], &mut rng).unwrap()
        };
        let b = {
            let mut rng = seeding::rng_for(42);
            sim.simulate_answer(&agents[2], "B", "gold", &[], &mut rng).unwrap()
        };
        assert_eq!(a, b);
        assert_eq!(a.latency_s.to_bits(), b.latency_s.to_bits());
    }

    #[test]
    fn distractor_is_token_disjoint() {
        for gold in ["paris", "missnor", "missnor missnorx", "the 1 2 3"] {
            let d = distractor_for("NoR", gold);
            assert_eq!(token_f1(&d, gold), 0.0, "gold={gold} d={d}");
        }
        assert_ne!(distractor_for("NoR", "g"), distractor_for("OneR", "g"));
    }

    #[test]
    fn upstream_blend_lifts_weak_agent_and_drags_strong_one() {
        let sim = sim();
        let agents = agents();
        let upstream_right = vec![(agents[2].clone(), "gold".to_string())];
        let upstream_wrong = vec![(agents[2].clone(), "missircot".to_string())];
        // NoR on context B is weak (0.061). With a correct upstream and
        // w = 0.5 the effective p becomes ~0.53.
        let mut hits = 0;
        for k in 0..4000u64 {
            let mut rng = seeding::rng_for(k);
            let r = sim
                .simulate_answer(&agents[0], "B", "gold", &upstream_right, &mut rng)
                .unwrap();
            if r.text == "gold" {
                hits += 1;
            }
        }
        let p = hits as f64 / 4000.0;
        assert!((p - (0.5 * 0.061 + 0.5)).abs() < 0.03, "p={p}");
        // OneR on context B (0.518) with a wrong upstream drops to ~0.26.
        let mut hits = 0;
        for k in 0..4000u64 {
            let mut rng = seeding::rng_for(k);
            let r = sim
                .simulate_answer(&agents[1], "B", "gold", &upstream_wrong, &mut rng)
                .unwrap();
            if r.text == "gold" {
                hits += 1;
            }
        }
        let p = hits as f64 / 4000.0;
        assert!((p - 0.5 * 0.518).abs() < 0.03, "p={p}");
    }

    #[test]
    fn profile_validation_rejects_bad_cells() {
        let mut table = default_profiles();
        table.get_mut("NoR").unwrap().get_mut("A").unwrap().f1_mean = 1.5;
        assert!(SimulatorBackend::new(table, 0.5).is_err());
        let mut table = default_profiles();
        table.get_mut("NoR").unwrap().get_mut("A").unwrap().latency_mean_s = 0.0;
        assert!(SimulatorBackend::new(table, 0.5).is_err());
        assert!(SimulatorBackend::new(default_profiles(), 1.5).is_err());
    }

    proptest! {
        #[test]
        fn latencies_are_positive_and_finite(seed in any::<u64>(), cv in 0.0f64..1.0) {
            let mut rng = seeding::rng_for(seed);
            let s = draw_latency(6.46, cv, &mut rng);
            prop_assert!(s.is_finite());
            prop_assert!(s > 0.0);
        }

        #[test]
        fn latency_zero_dispersion_is_exact(seed in any::<u64>()) {
            let mut rng = seeding::rng_for(seed);
            prop_assert_eq!(draw_latency(7.34, 0.0, &mut rng), 7.34);
        }
    }
}

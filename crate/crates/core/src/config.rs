//! Run configuration: one JSON document covering the action space, bandit,
//! reward, training loop, and backend.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::action_space::{agent_list, ActionSpace, Edge, EnumerationConstraints, Node};
use crate::agents::{default_profiles, AgentBackend, ProfileTable, SimulatorBackend};
use crate::dataset::ContextSchema;
use crate::error::{Error, Result};
use crate::harness::BaselineOpts;
use crate::remote::RemoteBackend;
use crate::reward::{PenaltySchedule, RewardConfig};

fn default_agents() -> Vec<String> {
    vec!["NoR".into(), "OneR".into(), "IRCoT".into()]
}

fn default_labels() -> Vec<String> {
    vec!["A".into(), "B".into(), "C".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceMode {
    /// Single-edge graphs: one action per agent.
    Individual,
    /// No structural limit beyond the validity constraints.
    Collaborative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpaceConfig {
    pub mode: SpaceMode,
    #[serde(default)]
    pub max_edges: Option<usize>,
    /// Pairs of node names (agent names or "final") to exclude.
    #[serde(default)]
    pub blocked_edges: Vec<(String, String)>,
}

impl Default for ActionSpaceConfig {
    fn default() -> Self {
        Self {
            mode: SpaceMode::Individual,
            max_edges: None,
            blocked_edges: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditConfig {
    pub alpha: f64,
    pub d: usize,
}

impl Default for BanditConfig {
    fn default() -> Self {
        Self { alpha: 2.0, d: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardSection {
    pub beta: f64,
    /// "individual", "collaborative", or "none".
    pub penalty_preset: String,
}

impl Default for RewardSection {
    fn default() -> Self {
        Self {
            beta: 0.5,
            penalty_preset: "individual".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 20, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendConfig {
    Simulator {
        /// Profile file path; the built-in calibration when omitted.
        #[serde(default)]
        profiles: Option<PathBuf>,
        #[serde(default = "default_upstream_weight")]
        upstream_weight: f64,
    },
    Remote {
        /// Agent name -> endpoint URL.
        endpoints: BTreeMap<String, String>,
        #[serde(default = "default_timeout_s")]
        timeout_s: f64,
    },
}

fn default_upstream_weight() -> f64 {
    0.5
}

fn default_timeout_s() -> f64 {
    30.0
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig::Simulator {
            profiles: None,
            upstream_weight: default_upstream_weight(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub baseline_window: usize,
    pub initial_prob: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        let opts = BaselineOpts::default();
        Self {
            epochs: opts.epochs,
            learning_rate: opts.learning_rate,
            baseline_window: opts.baseline_window,
            initial_prob: opts.initial_prob,
        }
    }
}

/// The whole run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub agents: Vec<String>,
    pub labels: Vec<String>,
    pub action_space: ActionSpaceConfig,
    pub bandit: BanditConfig,
    pub reward: RewardSection,
    pub train: TrainConfig,
    pub backend: BackendConfig,
    pub baseline: BaselineConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            agents: default_agents(),
            labels: default_labels(),
            action_space: ActionSpaceConfig::default(),
            bandit: BanditConfig::default(),
            reward: RewardSection::default(),
            train: TrainConfig::default(),
            backend: BackendConfig::default(),
            baseline: BaselineConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_reader(file)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(Error::Config("agents must not be empty".into()));
        }
        let schema = self.schema()?;
        if self.bandit.d != schema.dim() {
            return Err(Error::Config(format!(
                "bandit.d = {} does not match the {}-label context schema",
                self.bandit.d,
                schema.dim()
            )));
        }
        self.reward_config()?;
        Ok(())
    }

    pub fn schema(&self) -> Result<ContextSchema> {
        ContextSchema::new(self.labels.clone())
    }

    pub fn constraints(&self) -> Result<EnumerationConstraints> {
        let max_edges = match self.action_space.mode {
            SpaceMode::Individual => Some(1),
            SpaceMode::Collaborative => self.action_space.max_edges,
        };
        let mut blocked = std::collections::BTreeSet::new();
        for (src, dst) in &self.action_space.blocked_edges {
            blocked.insert(Edge::new(self.node_by_name(src)?, self.node_by_name(dst)?));
        }
        Ok(EnumerationConstraints {
            max_edges,
            blocked_edges: blocked,
        })
    }

    fn node_by_name(&self, name: &str) -> Result<Node> {
        if name == "final" {
            return Ok(Node::Final);
        }
        self.agents
            .iter()
            .position(|a| a == name)
            .map(|i| Node::Agent(i as u16))
            .ok_or_else(|| Error::Config(format!("unknown node name {name:?}")))
    }

    pub fn action_space(&self) -> Result<ActionSpace> {
        let names: Vec<&str> = self.agents.iter().map(String::as_str).collect();
        ActionSpace::build(agent_list(&names), &self.constraints()?)
    }

    pub fn reward_config(&self) -> Result<RewardConfig> {
        RewardConfig::new(
            self.reward.beta,
            PenaltySchedule::by_name(&self.reward.penalty_preset)?,
        )
    }

    pub fn baseline_opts(&self) -> BaselineOpts {
        BaselineOpts {
            epochs: self.baseline.epochs,
            learning_rate: self.baseline.learning_rate,
            baseline_window: self.baseline.baseline_window,
            initial_prob: self.baseline.initial_prob,
        }
    }

    /// Instantiate the configured backend. The simulator checks that every
    /// configured agent has a profile for every schema label.
    pub fn backend(&self) -> Result<Box<dyn AgentBackend>> {
        match &self.backend {
            BackendConfig::Simulator { profiles, upstream_weight } => {
                let table: ProfileTable = match profiles {
                    None => default_profiles(),
                    Some(path) => {
                        let file = std::fs::File::open(path).map_err(|e| {
                            Error::Config(format!("cannot open {}: {e}", path.display()))
                        })?;
                        serde_json::from_reader(file)
                            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                    }
                };
                for agent in &self.agents {
                    let contexts = table.get(agent).ok_or_else(|| {
                        Error::Config(format!("no profile for agent {agent:?}"))
                    })?;
                    for label in &self.labels {
                        if !contexts.contains_key(label) {
                            return Err(Error::Config(format!(
                                "profile for {agent:?} is missing context {label:?}"
                            )));
                        }
                    }
                }
                Ok(Box::new(SimulatorBackend::new(table, *upstream_weight)?))
            }
            BackendConfig::Remote { endpoints, timeout_s } => {
                for agent in &self.agents {
                    if !endpoints.contains_key(agent) {
                        return Err(Error::Config(format!(
                            "no endpoint for agent {agent:?}"
                        )));
                    }
                }
                Ok(Box::new(RemoteBackend::new(endpoints.clone(), *timeout_s)?))
            }
        }
    }

    /// Simulator handle when the backend is the simulator (for analytic
    /// reference lines); `None` for remote backends.
    pub fn simulator(&self) -> Result<Option<SimulatorBackend>> {
        match &self.backend {
            BackendConfig::Simulator { profiles, upstream_weight } => {
                let table: ProfileTable = match profiles {
                    None => default_profiles(),
                    Some(path) => {
                        let file = std::fs::File::open(path).map_err(|e| {
                            Error::Config(format!("cannot open {}: {e}", path.display()))
                        })?;
                        serde_json::from_reader(file)
                            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                    }
                };
                Ok(Some(SimulatorBackend::new(table, *upstream_weight)?))
            }
            BackendConfig::Remote { .. } => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.agents, vec!["NoR", "OneR", "IRCoT"]);
        let space = cfg.action_space().unwrap();
        assert_eq!(space.len(), 3); // individual mode
    }

    #[test]
    fn collaborative_mode_unlocks_the_full_space() {
        let mut cfg = RunConfig::default();
        cfg.action_space.mode = SpaceMode::Collaborative;
        assert_eq!(cfg.action_space().unwrap().len(), 97);
    }

    #[test]
    fn parses_a_full_document() {
        let text = r#"{
            "agents": ["NoR", "OneR", "IRCoT"],
            "labels": ["A", "B", "C"],
            "action_space": {"mode": "collaborative", "max_edges": 4},
            "bandit": {"alpha": 2.0, "d": 3},
            "reward": {"beta": 0.5, "penalty_preset": "collaborative"},
            "train": {"epochs": 50, "seed": 0},
            "backend": {"simulator": {"upstream_weight": 0.5}},
            "baseline": {"epochs": 200, "learning_rate": 0.05,
                         "baseline_window": 50, "initial_prob": 0.5}
        }"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.train.epochs, 50);
        assert_eq!(cfg.constraints().unwrap().max_edges, Some(4));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut cfg = RunConfig::default();
        cfg.bandit.d = 5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn blocked_edges_resolve_names() {
        let mut cfg = RunConfig::default();
        cfg.action_space.blocked_edges = vec![("NoR".into(), "IRCoT".into())];
        let constraints = cfg.constraints().unwrap();
        assert!(constraints.blocked_edges.contains(&Edge::between(0, 2)));
        cfg.action_space.blocked_edges = vec![("nobody".into(), "final".into())];
        assert!(cfg.constraints().is_err());
    }

    #[test]
    fn unknown_penalty_preset_fails_validation() {
        let mut cfg = RunConfig::default();
        cfg.reward.penalty_preset = "quadratic".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn remote_backend_requires_all_endpoints() {
        let mut cfg = RunConfig::default();
        cfg.backend = BackendConfig::Remote {
            endpoints: [("NoR".to_string(), "http://localhost:1/x".to_string())]
                .into_iter()
                .collect(),
            timeout_s: 5.0,
        };
        assert!(cfg.backend().is_err());
    }
}

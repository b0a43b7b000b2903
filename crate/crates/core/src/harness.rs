//! Training and evaluation loops, diagnostics emission, and the
//! bandit-vs-baseline comparison protocol.
//!
//! A training run makes `epochs` shuffled passes over the dataset. Each
//! timestep encodes the question's context, selects an action by UCB score,
//! executes the strategy graph, scores the final answer by token F1 against
//! the gold answers (maximum over aliases), converts (F1, latency) into the
//! reward, and updates the chosen arm. Bandit state persists across epochs.
//!
//! Evaluation is pure exploitation: selections are `argmax theta^T x`, with
//! no exploration bonus and no updates.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action_space::{ActionSpace, Edge, Node, StrategyGraph};
use crate::agents::{AgentBackend, InvocationCtx, SimulatorBackend};
use crate::dataset::{ContextSchema, Dataset};
use crate::error::{Error, Result};
use crate::executor::execute;
use crate::linucb::{BanditModel, ContextVector};
use crate::reinforce::{EdgePolicy, RewardBaseline};
use crate::reward::{token_f1_multi, RewardConfig};
use crate::seeding::{self, Phase};

/// One timestep of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub timestep: usize,
    pub epoch: usize,
    pub question_id: String,
    pub context_label: String,
    pub context: ContextVector,
    pub action_id: u32,
    pub f1: f64,
    pub latency_s: f64,
    pub reward: f64,
    /// UCB score of every action at selection time, in canonical order.
    pub ucb_scores: Vec<f64>,
}

fn argmax_scores(scores: &[(u32, f64)]) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for &(id, s) in scores {
        best = match best {
            None => Some((id, s)),
            Some((_, bs)) if s > bs => Some((id, s)),
            other => other,
        };
    }
    best.map(|(id, _)| id)
}

/// Fresh bandit sized for an action space.
pub fn init_model_for_space(
    space: &ActionSpace,
    schema: &ContextSchema,
    alpha: f64,
) -> Result<BanditModel> {
    BanditModel::init(&space.action_ids(), schema.dim(), alpha)
}

/// Train the bandit in place and return the full episode log.
pub fn train(
    dataset: &Dataset,
    space: &ActionSpace,
    model: &mut BanditModel,
    backend: &dyn AgentBackend,
    reward_cfg: &RewardConfig,
    schema: &ContextSchema,
    epochs: usize,
    seed: u64,
) -> Result<Vec<EpisodeRecord>> {
    if epochs == 0 {
        return Err(Error::Config("epochs must be >= 1".into()));
    }
    if space.is_empty() {
        return Err(Error::Config("action space is empty".into()));
    }
    if model.action_ids() != space.action_ids() {
        return Err(Error::Config(
            "model arms do not match the action space".into(),
        ));
    }
    let mut episodes = Vec::with_capacity(epochs * dataset.len());
    let mut timestep = 0usize;
    for epoch in 0..epochs {
        for idx in dataset.epoch_order(seed, Phase::Train, epoch as u64) {
            let record = &dataset.records[idx];
            let x = schema.encode_record(record)?;
            let scores = model.scores(&x)?;
            let action_id = argmax_scores(&scores)
                .ok_or_else(|| Error::Config("no actions to select".into()))?;
            let graph = space.graph(action_id)?;
            let episode_key = seeding::episode_key(seed, Phase::Train, epoch as u64, &record.id);
            let ctx = InvocationCtx {
                question: &record.question,
                gold: &record.gold_answers[0],
                context_label: &record.complexity_label,
                episode_key,
            };
            let trace = execute(graph, &ctx, backend)?;
            let f1 = token_f1_multi(&trace.final_answer, &record.gold_answers);
            let reward = reward_cfg.reward(f1, trace.total_latency_s)?;
            model.update(action_id, &x, reward)?;
            episodes.push(EpisodeRecord {
                timestep,
                epoch,
                question_id: record.id.clone(),
                context_label: record.complexity_label.clone(),
                context: x,
                action_id,
                f1,
                latency_s: trace.total_latency_s,
                reward,
                ucb_scores: scores.into_iter().map(|(_, s)| s).collect(),
            });
            timestep += 1;
        }
    }
    Ok(episodes)
}

/// What to run at evaluation time: a trained bandit (greedy) or one fixed
/// graph for every question.
#[derive(Debug, Clone, Copy)]
pub enum EvalPolicy<'a> {
    Greedy(&'a BanditModel),
    Fixed(&'a StrategyGraph),
}

/// Mean F1 / latency aggregate for one slice of questions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub n: usize,
    pub mean_f1: f64,
    pub mean_latency_s: f64,
}

/// Evaluation output: per-context and overall aggregates plus the selection
/// counts actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_context: BTreeMap<String, CellStats>,
    pub overall: CellStats,
    /// context label -> action id -> times selected.
    pub selections: BTreeMap<String, BTreeMap<u32, usize>>,
}

/// One pass over a (test) dataset with no exploration and no updates.
pub fn evaluate(
    dataset: &Dataset,
    space: &ActionSpace,
    policy: EvalPolicy<'_>,
    backend: &dyn AgentBackend,
    schema: &ContextSchema,
    seed: u64,
) -> Result<EvalReport> {
    let mut sums: BTreeMap<String, (usize, f64, f64)> = BTreeMap::new();
    let mut selections: BTreeMap<String, BTreeMap<u32, usize>> = BTreeMap::new();
    let mut total = (0usize, 0.0f64, 0.0f64);
    for record in &dataset.records {
        let graph = match policy {
            EvalPolicy::Greedy(model) => {
                let x = schema.encode_record(record)?;
                space.graph(model.select_greedy(&x)?)?
            }
            EvalPolicy::Fixed(graph) => graph,
        };
        let episode_key = seeding::episode_key(seed, Phase::Eval, 0, &record.id);
        let ctx = InvocationCtx {
            question: &record.question,
            gold: &record.gold_answers[0],
            context_label: &record.complexity_label,
            episode_key,
        };
        let trace = execute(graph, &ctx, backend)?;
        let f1 = token_f1_multi(&trace.final_answer, &record.gold_answers);
        let slot = sums
            .entry(record.complexity_label.clone())
            .or_insert((0, 0.0, 0.0));
        slot.0 += 1;
        slot.1 += f1;
        slot.2 += trace.total_latency_s;
        total.0 += 1;
        total.1 += f1;
        total.2 += trace.total_latency_s;
        *selections
            .entry(record.complexity_label.clone())
            .or_default()
            .entry(graph.action_id)
            .or_insert(0) += 1;
    }
    let cell = |(n, f1, lat): (usize, f64, f64)| CellStats {
        n,
        mean_f1: f1 / n as f64,
        mean_latency_s: lat / n as f64,
    };
    Ok(EvalReport {
        per_context: sums.into_iter().map(|(k, v)| (k, cell(v))).collect(),
        overall: cell(total),
        selections,
    })
}

/// Most frequent action among the last `window` episodes of one context,
/// with its selection frequency. Ties break to the smaller action id.
pub fn modal_action(
    episodes: &[EpisodeRecord],
    label: &str,
    window: usize,
) -> Option<(u32, f64)> {
    let recent: Vec<&EpisodeRecord> = episodes
        .iter()
        .filter(|e| e.context_label == label)
        .collect();
    if recent.is_empty() {
        return None;
    }
    let tail = &recent[recent.len().saturating_sub(window)..];
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for e in tail {
        *counts.entry(e.action_id).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(id, c)| (id, c as f64 / tail.len() as f64))
}

// ---------------------------------------------------------------------------
// REINFORCE baseline training
// ---------------------------------------------------------------------------

/// Knobs for the context-blind baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineOpts {
    pub epochs: usize,
    pub learning_rate: f64,
    pub baseline_window: usize,
    pub initial_prob: f64,
}

impl Default for BaselineOpts {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.02,
            baseline_window: 50,
            initial_prob: 0.5,
        }
    }
}

/// One baseline training step.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineEpisode {
    pub timestep: usize,
    pub epoch: usize,
    pub question_id: String,
    pub action_id: u32,
    pub f1: f64,
    pub latency_s: f64,
    pub reward: f64,
    pub baseline: f64,
}

/// Edge probabilities after one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochProbs {
    pub epoch: usize,
    pub probs: Vec<(Edge, f64)>,
}

/// Train the edge policy with REINFORCE. The policy is context-blind: it
/// sees only rewards, never the question features.
pub fn train_baseline(
    dataset: &Dataset,
    space: &ActionSpace,
    backend: &dyn AgentBackend,
    reward_cfg: &RewardConfig,
    opts: &BaselineOpts,
    seed: u64,
) -> Result<(EdgePolicy, Vec<EpochProbs>, Vec<BaselineEpisode>)> {
    if opts.epochs == 0 {
        return Err(Error::Config("baseline epochs must be >= 1".into()));
    }
    let mut policy = EdgePolicy::uniform(
        space.agents.len() as u16,
        &crate::action_space::EnumerationConstraints::default(),
        opts.initial_prob,
        opts.learning_rate,
    )?;
    let mut baseline = RewardBaseline::new(opts.baseline_window);
    let mut history = Vec::with_capacity(opts.epochs);
    let mut episodes = Vec::with_capacity(opts.epochs * dataset.len());
    let mut timestep = 0usize;
    for epoch in 0..opts.epochs {
        for idx in dataset.epoch_order(seed, Phase::Baseline, epoch as u64) {
            let record = &dataset.records[idx];
            let episode_key =
                seeding::episode_key(seed, Phase::Baseline, epoch as u64, &record.id);
            let mut rng = seeding::sub_rng(episode_key, 0x706f_6c69);
            let sampled_edges = policy.sample_graph(&mut rng);
            let action_id = space.find(&sampled_edges).ok_or_else(|| {
                Error::Config("sampled graph is outside the action space".into())
            })?;
            let graph = space.graph(action_id)?;
            let ctx = InvocationCtx {
                question: &record.question,
                gold: &record.gold_answers[0],
                context_label: &record.complexity_label,
                episode_key,
            };
            let trace = execute(graph, &ctx, backend)?;
            let f1 = token_f1_multi(&trace.final_answer, &record.gold_answers);
            let reward = reward_cfg.reward(f1, trace.total_latency_s)?;
            let b = baseline.value();
            policy.reinforce_step(&sampled_edges, reward, b);
            baseline.observe(reward);
            episodes.push(BaselineEpisode {
                timestep,
                epoch,
                question_id: record.id.clone(),
                action_id,
                f1,
                latency_s: trace.total_latency_s,
                reward,
                baseline: b,
            });
            timestep += 1;
        }
        history.push(EpochProbs {
            epoch,
            probs: policy.probs().iter().map(|(&e, &q)| (e, q)).collect(),
        });
    }
    Ok((policy, history, episodes))
}

// ---------------------------------------------------------------------------
// Analytic references from simulator profiles
// ---------------------------------------------------------------------------

/// Exact expected F1 of a strategy graph on one context, computed by
/// enumerating the success pattern of every executed agent under the
/// simulator's correctness model (gold scores 1, a miss scores 0, upstream
/// correctness blends into downstream success probability).
pub fn analytic_f1(graph: &StrategyGraph, label: &str, sim: &SimulatorBackend) -> Result<f64> {
    let executed = graph.executed_agents();
    let k = executed.len();
    if k > 16 {
        return Err(Error::Config("graph too large for exact enumeration".into()));
    }
    let pos: BTreeMap<u16, usize> = executed.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let own_p: Vec<f64> = executed
        .iter()
        .map(|&a| {
            let agent = graph.agents.iter().find(|x| x.index == a).unwrap();
            sim.cell(&agent.name, label).map(|c| c.f1_mean)
        })
        .collect::<Result<_>>()?;
    let w = sim.upstream_weight();
    let voters = graph.in_neighbors(Node::Final);
    let mut expected = 0.0;
    for mask in 0u32..(1 << k) {
        let correct = |a: u16| mask & (1 << pos[&a]) != 0;
        let mut prob = 1.0;
        for (i, &a) in executed.iter().enumerate() {
            let preds = graph.in_neighbors(Node::Agent(a));
            let p = if preds.is_empty() {
                own_p[i]
            } else {
                let best = if preds.iter().any(|&u| correct(u)) { 1.0 } else { 0.0 };
                ((1.0 - w) * own_p[i] + w * best).clamp(0.0, 1.0)
            };
            prob *= if correct(a) { p } else { 1.0 - p };
            if prob == 0.0 {
                break;
            }
        }
        if prob == 0.0 {
            continue;
        }
        let gold_votes = voters.iter().filter(|&&v| correct(v)).count();
        let vote_correct = match gold_votes {
            0 => false,
            1 => {
                // Everyone holds a distinct answer: the tie breaks to the
                // smallest voter index, which must be the correct one.
                if voters.len() == 1 {
                    true
                } else {
                    let smallest = *voters.iter().min().unwrap();
                    correct(smallest)
                }
            }
            _ => true,
        };
        if vote_correct {
            expected += prob;
        }
    }
    Ok(expected)
}

/// Critical-path latency using the profile mean of every executed agent.
pub fn analytic_latency(
    graph: &StrategyGraph,
    label: &str,
    sim: &SimulatorBackend,
) -> Result<f64> {
    let executed = graph.executed_agents();
    let mut completion: BTreeMap<u16, f64> = BTreeMap::new();
    // Relaxation instead of an explicit topological sort: |executed| + 1
    // sweeps over a DAG reach the fixed point.
    for _ in 0..=executed.len() {
        for &a in &executed {
            let agent = graph.agents.iter().find(|x| x.index == a).unwrap();
            let mean = sim.cell(&agent.name, label)?.latency_mean_s;
            let start = graph
                .in_neighbors(Node::Agent(a))
                .iter()
                .map(|p| completion.get(p).copied().unwrap_or(0.0))
                .fold(0.0f64, f64::max);
            completion.insert(a, start + mean);
        }
    }
    Ok(graph
        .in_neighbors(Node::Final)
        .iter()
        .map(|v| completion[v])
        .fold(0.0f64, f64::max))
}

/// Approximate expected reward of a graph on a context: exact expected F1,
/// with the time penalty evaluated at the mean-latency critical path.
pub fn analytic_reward(
    graph: &StrategyGraph,
    label: &str,
    sim: &SimulatorBackend,
    reward_cfg: &RewardConfig,
) -> Result<f64> {
    let f1 = analytic_f1(graph, label, sim)?;
    let latency = analytic_latency(graph, label, sim)?;
    reward_cfg.reward(f1, latency)
}

/// The best action per context under the analytic reward, with its value.
pub fn best_true_reward(
    space: &ActionSpace,
    label: &str,
    sim: &SimulatorBackend,
    reward_cfg: &RewardConfig,
) -> Result<(u32, f64)> {
    let mut best: Option<(u32, f64)> = None;
    for g in &space.graphs {
        let r = analytic_reward(g, label, sim, reward_cfg)?;
        best = match best {
            None => Some((g.action_id, r)),
            Some((_, br)) if r > br => Some((g.action_id, r)),
            other => other,
        };
    }
    best.ok_or_else(|| Error::Config("empty action space".into()))
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

fn fmt(v: f64) -> String {
    // Shortest round-trip representation: parsing it back restores the
    // exact f64 bits, which the audit tests rely on.
    format!("{v}")
}

/// Full episode log; one row per timestep with per-action UCB columns.
pub fn write_episodes_csv<W: Write>(
    episodes: &[EpisodeRecord],
    action_ids: &[u32],
    w: W,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec![
        "timestep".to_string(),
        "epoch".to_string(),
        "question_id".to_string(),
        "context_label".to_string(),
        "action_id".to_string(),
        "f1".to_string(),
        "latency_s".to_string(),
        "reward".to_string(),
    ];
    header.extend(action_ids.iter().map(|id| format!("ucb_{id}")));
    wtr.write_record(&header)?;
    for e in episodes {
        let mut row = vec![
            e.timestep.to_string(),
            e.epoch.to_string(),
            e.question_id.clone(),
            e.context_label.clone(),
            e.action_id.to_string(),
            fmt(e.f1),
            fmt(e.latency_s),
            fmt(e.reward),
        ];
        row.extend(e.ucb_scores.iter().map(|s| fmt(*s)));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Everything `emit_diagnostics` needs besides the episodes themselves.
pub struct DiagnosticsConfig<'a> {
    pub space: &'a ActionSpace,
    pub schema: &'a ContextSchema,
    pub alpha: f64,
    pub reward_cfg: &'a RewardConfig,
    /// Source of analytic reference lines; omitted for remote backends.
    pub simulator: Option<&'a SimulatorBackend>,
    /// Trailing window for the selection-frequency curves.
    pub rolling_window: usize,
}

/// Write diagnostics next to an episode log:
///
/// * `expected_rewards.csv` — per step, per action, per context prototype:
///   the model's `theta^T x` reconstructed by replaying the episode updates,
///   plus the analytic best-action reward as a reference column;
/// * `selection_dist.csv` — rolling per-context selection frequencies;
/// * `summary.json` — modal and greedy actions per context.
pub fn emit_diagnostics(
    episodes: &[EpisodeRecord],
    cfg: &DiagnosticsConfig<'_>,
    out_dir: &Path,
) -> Result<()> {
    if episodes.is_empty() {
        return Err(Error::InvalidInput("no episodes to summarize".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    let labels = &cfg.schema.labels;
    let prototypes: Vec<(String, ContextVector)> = labels
        .iter()
        .map(|l| cfg.schema.encode(l).map(|x| (l.clone(), x)))
        .collect::<Result<_>>()?;
    let references: BTreeMap<String, (u32, f64)> = match cfg.simulator {
        Some(sim) => labels
            .iter()
            .map(|l| best_true_reward(cfg.space, l, sim, cfg.reward_cfg).map(|v| (l.clone(), v)))
            .collect::<Result<_>>()?,
        None => BTreeMap::new(),
    };

    // Expected rewards: replay the updates step by step.
    let path = out_dir.join("expected_rewards.csv");
    let mut wtr = csv::Writer::from_path(&path)?;
    wtr.write_record([
        "step",
        "context_label",
        "action_id",
        "expected_reward",
        "best_true_reward",
    ])?;
    let mut model = init_model_for_space(cfg.space, cfg.schema, cfg.alpha)?;
    for e in episodes {
        model.update(e.action_id, &e.context, e.reward)?;
        for (label, x) in &prototypes {
            let reference = references
                .get(label)
                .map(|(_, r)| fmt(*r))
                .unwrap_or_default();
            for id in cfg.space.action_ids() {
                wtr.write_record([
                    e.timestep.to_string(),
                    label.clone(),
                    id.to_string(),
                    fmt(model.expected_reward(id, x)?),
                    reference.clone(),
                ])?;
            }
        }
    }
    wtr.flush()?;

    // Rolling selection distribution per context.
    let path = out_dir.join("selection_dist.csv");
    let mut wtr = csv::Writer::from_path(&path)?;
    wtr.write_record([
        "step",
        "context_label",
        "context_step",
        "action_id",
        "frequency",
    ])?;
    let window = cfg.rolling_window.max(1);
    for label in labels {
        let in_context: Vec<&EpisodeRecord> = episodes
            .iter()
            .filter(|e| &e.context_label == label)
            .collect();
        let mut recent: std::collections::VecDeque<u32> = std::collections::VecDeque::new();
        for (k, e) in in_context.iter().enumerate() {
            recent.push_back(e.action_id);
            if recent.len() > window {
                recent.pop_front();
            }
            let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
            for &id in &recent {
                *counts.entry(id).or_insert(0) += 1;
            }
            for (id, c) in counts {
                wtr.write_record([
                    e.timestep.to_string(),
                    label.clone(),
                    k.to_string(),
                    id.to_string(),
                    fmt(c as f64 / recent.len() as f64),
                ])?;
            }
        }
    }
    wtr.flush()?;

    // Summary.
    #[derive(Serialize)]
    struct ContextSummary {
        modal_action_last_100: Option<u32>,
        modal_action_desc: Option<String>,
        modal_frequency: Option<f64>,
        greedy_action: u32,
        greedy_action_desc: String,
        best_true_action: Option<u32>,
        best_true_reward: Option<f64>,
    }
    #[derive(Serialize)]
    struct Summary {
        episodes: usize,
        actions: usize,
        contexts: Vec<String>,
        per_context: BTreeMap<String, ContextSummary>,
    }
    let mut per_context = BTreeMap::new();
    for (label, x) in &prototypes {
        let modal = modal_action(episodes, label, 100);
        let greedy = model.select_greedy(x)?;
        per_context.insert(
            label.clone(),
            ContextSummary {
                modal_action_last_100: modal.map(|(id, _)| id),
                modal_action_desc: modal
                    .map(|(id, _)| cfg.space.graph(id).map(|g| g.describe()))
                    .transpose()?,
                modal_frequency: modal.map(|(_, f)| f),
                greedy_action: greedy,
                greedy_action_desc: cfg.space.graph(greedy)?.describe(),
                best_true_action: references.get(label).map(|(id, _)| *id),
                best_true_reward: references.get(label).map(|(_, r)| *r),
            },
        );
    }
    let summary = Summary {
        episodes: episodes.len(),
        actions: cfg.space.len(),
        contexts: labels.clone(),
        per_context,
    };
    let file = std::fs::File::create(out_dir.join("summary.json"))?;
    serde_json::to_writer_pretty(file, &summary)?;
    Ok(())
}

/// Per-epoch edge probabilities of a baseline run.
pub fn write_edge_probs_csv<W: Write>(
    history: &[EpochProbs],
    space: &ActionSpace,
    w: W,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["epoch", "src", "dst", "probability"])?;
    let name = |n: Node| match n {
        Node::Agent(i) => space
            .agents
            .get(i as usize)
            .map(|a| a.name.clone())
            .unwrap_or_else(|| format!("agent{i}")),
        Node::Final => "final".to_string(),
    };
    for snapshot in history {
        for (edge, q) in &snapshot.probs {
            wtr.write_record([
                snapshot.epoch.to_string(),
                name(edge.src),
                name(edge.dst),
                fmt(*q),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Comparison protocol
// ---------------------------------------------------------------------------

/// One cell of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub f1: f64,
    pub time_s: f64,
}

/// One evaluated column (a trained system) of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonColumn {
    pub description: String,
    pub per_context: BTreeMap<String, ComparisonCell>,
    pub overall: ComparisonCell,
}

impl ComparisonColumn {
    fn from_report(description: String, report: &EvalReport) -> Self {
        let cell = |s: &CellStats| ComparisonCell {
            f1: s.mean_f1,
            time_s: s.mean_latency_s,
        };
        Self {
            description,
            per_context: report
                .per_context
                .iter()
                .map(|(k, v)| (k.clone(), cell(v)))
                .collect(),
            overall: cell(&report.overall),
        }
    }
}

/// Side-by-side evaluation of the adaptive bandit (with and without time in
/// the reward) against the pruned REINFORCE graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub aqa_time_agnostic: ComparisonColumn,
    pub aqa_time_based: ComparisonColumn,
    pub reinforce_pruned: ComparisonColumn,
}

/// Settings for [`compare`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOpts {
    pub alpha: f64,
    pub epochs: usize,
    pub time_based: RewardConfig,
    pub baseline: BaselineOpts,
    pub seed: u64,
}

/// Full comparison protocol: train the bandit twice (time-agnostic and
/// time-based rewards) and the REINFORCE baseline once (time-agnostic, as
/// the baseline cannot express a time preference per question), then
/// evaluate all three on the held-out set with paired simulator draws.
pub fn compare(
    train_ds: &Dataset,
    test_ds: &Dataset,
    space: &ActionSpace,
    backend: &dyn AgentBackend,
    schema: &ContextSchema,
    opts: &CompareOpts,
) -> Result<ComparisonReport> {
    let nt_cfg = RewardConfig::time_agnostic();
    let mut nt_model = init_model_for_space(space, schema, opts.alpha)?;
    train(
        train_ds, space, &mut nt_model, backend, &nt_cfg, schema, opts.epochs, opts.seed,
    )?;
    let nt_report = evaluate(
        test_ds,
        space,
        EvalPolicy::Greedy(&nt_model),
        backend,
        schema,
        opts.seed,
    )?;

    let mut t_model = init_model_for_space(space, schema, opts.alpha)?;
    train(
        train_ds,
        space,
        &mut t_model,
        backend,
        &opts.time_based,
        schema,
        opts.epochs,
        opts.seed,
    )?;
    let t_report = evaluate(
        test_ds,
        space,
        EvalPolicy::Greedy(&t_model),
        backend,
        schema,
        opts.seed,
    )?;

    let (policy, _, _) = train_baseline(
        train_ds,
        space,
        backend,
        &nt_cfg,
        &opts.baseline,
        opts.seed,
    )?;
    let pruned = policy.prune_strategy(space)?;
    let pruned_report = evaluate(
        test_ds,
        space,
        EvalPolicy::Fixed(&pruned),
        backend,
        schema,
        opts.seed,
    )?;

    Ok(ComparisonReport {
        aqa_time_agnostic: ComparisonColumn::from_report(
            "bandit, time-agnostic reward".into(),
            &nt_report,
        ),
        aqa_time_based: ComparisonColumn::from_report(
            "bandit, time-based reward".into(),
            &t_report,
        ),
        reinforce_pruned: ComparisonColumn::from_report(
            format!("pruned edge policy {}", pruned.describe()),
            &pruned_report,
        ),
    })
}

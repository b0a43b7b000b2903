//! Command-line harness around the routing library.
//!
//! Subcommands: `enumerate`, `train`, `eval`, `baseline-train`, `compare`,
//! `simulate-check`, `gen-dataset`. All take `--config <json>` and `--seed`;
//! failures exit nonzero with a one-line JSON error on stderr.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use routelab::action_space::StrategyGraph;
use routelab::config::RunConfig;
use routelab::dataset::{generate_dataset_slice, load_dataset_path, write_dataset};
use routelab::error::{Error, Result};
use routelab::harness::{
    self, emit_diagnostics, evaluate, modal_action, train, train_baseline, write_edge_probs_csv,
    write_episodes_csv, CompareOpts, DiagnosticsConfig, EvalPolicy,
};
use routelab::linucb::BanditModel;

#[derive(Parser)]
#[command(name = "routelab", about = "Adaptive question routing over agent-collaboration graphs")]
struct Cli {
    /// Run configuration (JSON). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override train.seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the enumerated action space as JSON lines.
    Enumerate,

    /// Train the bandit on a JSONL dataset and write the episode log,
    /// diagnostics CSVs, and a model checkpoint.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },

    /// Evaluate a trained checkpoint (greedy) or one fixed action.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        action_id: Option<u32>,
        /// Also write the report to <out>/eval.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Train the context-blind REINFORCE edge baseline; write the per-epoch
    /// edge-probability history and the pruned deployment graph.
    BaselineTrain {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },

    /// Train bandit (time-agnostic and time-based) plus baseline on the
    /// train split, evaluate all three on the test split.
    Compare {
        #[arg(long)]
        train_dataset: PathBuf,
        #[arg(long)]
        test_dataset: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },

    /// Check simulator calibration against its profile table.
    SimulateCheck {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },

    /// Write a balanced synthetic dataset (JSONL).
    GenDataset {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 70)]
        per_label: usize,
        /// Skip this many questions per label first (disjoint splits).
        #[arg(long, default_value_t = 0)]
        start_per_label: usize,
    },
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!(
            "{}",
            json!({ "error": e.kind(), "message": e.to_string() })
        );
        std::process::exit(1);
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.train.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Enumerate => enumerate(&cfg),
        Command::Train { dataset, out } => train_cmd(&cfg, dataset, out),
        Command::Eval { dataset, checkpoint, action_id, out } => {
            eval_cmd(&cfg, dataset, checkpoint.as_deref(), *action_id, out.as_deref())
        }
        Command::BaselineTrain { dataset, out } => baseline_cmd(&cfg, dataset, out),
        Command::Compare { train_dataset, test_dataset, out } => {
            compare_cmd(&cfg, train_dataset, test_dataset, out)
        }
        Command::SimulateCheck { samples } => simulate_check(&cfg, *samples),
        Command::GenDataset { out, per_label, start_per_label } => {
            gen_dataset(&cfg, out, *per_label, *start_per_label)
        }
    }
}

fn enumerate(cfg: &RunConfig) -> Result<()> {
    let space = cfg.action_space()?;
    for g in &space.graphs {
        println!(
            "{}",
            json!({ "action_id": g.action_id, "edges": g.edge_names() })
        );
    }
    Ok(())
}

fn train_cmd(cfg: &RunConfig, dataset: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let schema = cfg.schema()?;
    let space = cfg.action_space()?;
    let backend = cfg.backend()?;
    let reward_cfg = cfg.reward_config()?;
    let ds = load_dataset_path(dataset, &schema)?;
    println!("dataset: {} questions, labels {:?}", ds.len(), ds.label_counts);

    let mut model = harness::init_model_for_space(&space, &schema, cfg.bandit.alpha)?;
    let episodes = train(
        &ds,
        &space,
        &mut model,
        backend.as_ref(),
        &reward_cfg,
        &schema,
        cfg.train.epochs,
        cfg.train.seed,
    )?;

    std::fs::create_dir_all(out)?;
    let file = std::fs::File::create(out.join("episodes.csv"))?;
    write_episodes_csv(&episodes, &space.action_ids(), file)?;
    let file = std::fs::File::create(out.join("checkpoint.json"))?;
    model.save_checkpoint(file)?;

    let simulator = cfg.simulator()?;
    emit_diagnostics(
        &episodes,
        &DiagnosticsConfig {
            space: &space,
            schema: &schema,
            alpha: cfg.bandit.alpha,
            reward_cfg: &reward_cfg,
            simulator: simulator.as_ref(),
            rolling_window: 50,
        },
        out,
    )?;

    println!(
        "trained {} epochs x {} questions = {} episodes over {} actions",
        cfg.train.epochs,
        ds.len(),
        episodes.len(),
        space.len()
    );
    for label in &schema.labels {
        if let Some((id, freq)) = modal_action(&episodes, label, 100) {
            println!(
                "context {label}: modal action over last 100 steps = {} ({:.0}% of selections)",
                space.graph(id)?.describe(),
                freq * 100.0
            );
        }
    }
    println!("outputs in {}", out.display());
    Ok(())
}

fn eval_cmd(
    cfg: &RunConfig,
    dataset: &std::path::Path,
    checkpoint: Option<&std::path::Path>,
    action_id: Option<u32>,
    out: Option<&std::path::Path>,
) -> Result<()> {
    let schema = cfg.schema()?;
    let space = cfg.action_space()?;
    let backend = cfg.backend()?;
    let ds = load_dataset_path(dataset, &schema)?;

    let model;
    let fixed: StrategyGraph;
    let policy = match (checkpoint, action_id) {
        (Some(path), None) => {
            let file = std::fs::File::open(path)
                .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
            model = BanditModel::load_checkpoint(file)?;
            if model.action_ids() != space.action_ids() {
                return Err(Error::Checkpoint(
                    "checkpoint actions do not match the configured action space".into(),
                ));
            }
            EvalPolicy::Greedy(&model)
        }
        (None, Some(id)) => {
            fixed = space.graph(id)?.clone();
            EvalPolicy::Fixed(&fixed)
        }
        _ => {
            return Err(Error::Config(
                "pass exactly one of --checkpoint or --action-id".into(),
            ))
        }
    };

    let report = evaluate(&ds, &space, policy, backend.as_ref(), &schema, cfg.train.seed)?;
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("eval.json"), text)?;
    }
    Ok(())
}

fn baseline_cmd(cfg: &RunConfig, dataset: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let schema = cfg.schema()?;
    let space = cfg.action_space()?;
    let backend = cfg.backend()?;
    let reward_cfg = cfg.reward_config()?;
    let ds = load_dataset_path(dataset, &schema)?;

    let (policy, history, episodes) = train_baseline(
        &ds,
        &space,
        backend.as_ref(),
        &reward_cfg,
        &cfg.baseline_opts(),
        cfg.train.seed,
    )?;

    std::fs::create_dir_all(out)?;
    let file = std::fs::File::create(out.join("edge_probs.csv"))?;
    write_edge_probs_csv(&history, &space, file)?;

    let pruned = policy.prune_strategy(&space)?;
    let doc = json!({
        "pruned_action_id": pruned.action_id,
        "pruned_edges": pruned.edge_names(),
        "episodes": episodes.len(),
        "final_mean_reward_last_100": episodes
            .iter()
            .rev()
            .take(100)
            .map(|e| e.reward)
            .sum::<f64>()
            / episodes.len().min(100) as f64,
    });
    std::fs::write(out.join("pruned.json"), serde_json::to_string_pretty(&doc)?)?;
    println!("pruned deployment graph: {}", pruned.describe());
    println!("outputs in {}", out.display());
    Ok(())
}

fn compare_cmd(
    cfg: &RunConfig,
    train_path: &std::path::Path,
    test_path: &std::path::Path,
    out: &std::path::Path,
) -> Result<()> {
    let schema = cfg.schema()?;
    let space = cfg.action_space()?;
    let backend = cfg.backend()?;
    let train_ds = load_dataset_path(train_path, &schema)?;
    let test_ds = load_dataset_path(test_path, &schema)?;

    let opts = CompareOpts {
        alpha: cfg.bandit.alpha,
        epochs: cfg.train.epochs,
        time_based: cfg.reward_config()?,
        baseline: cfg.baseline_opts(),
        seed: cfg.train.seed,
    };
    let report = harness::compare(
        &train_ds,
        &test_ds,
        &space,
        backend.as_ref(),
        &schema,
        &opts,
    )?;

    std::fs::create_dir_all(out)?;
    std::fs::write(
        out.join("comparison.json"),
        serde_json::to_string_pretty(&report)?,
    )?;

    println!(
        "{:<10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "context", "NT F1", "NT time", "T F1", "T time", "RF F1", "RF time"
    );
    let mut rows: Vec<(&str, Option<&String>)> =
        schema.labels.iter().map(|l| (l.as_str(), None)).collect();
    rows.push(("overall", None));
    for (label, _) in rows {
        let pick = |col: &harness::ComparisonColumn| {
            if label == "overall" {
                col.overall
            } else {
                col.per_context[label]
            }
        };
        let nt = pick(&report.aqa_time_agnostic);
        let t = pick(&report.aqa_time_based);
        let rf = pick(&report.reinforce_pruned);
        println!(
            "{label:<10} {:>9.3} {:>9.2} {:>9.3} {:>9.2} {:>9.3} {:>9.2}",
            nt.f1, nt.time_s, t.f1, t.time_s, rf.f1, rf.time_s
        );
    }
    println!("baseline deployment: {}", report.reinforce_pruned.description);
    println!("outputs in {}", out.display());
    Ok(())
}

fn simulate_check(cfg: &RunConfig, samples: usize) -> Result<()> {
    let sim = cfg.simulator()?.ok_or_else(|| {
        Error::Config("simulate-check needs the simulator backend".into())
    })?;
    let space = cfg.action_space()?;
    let mut failures = 0usize;
    println!(
        "{:<8} {:<8} {:>10} {:>10} {:>12} {:>12}  {}",
        "agent", "context", "target_f1", "mean_f1", "target_s", "mean_s", "status"
    );
    for agent in &space.agents {
        for label in cfg.labels.iter() {
            let cell = *sim.cell(&agent.name, label)?;
            let (f1, lat) = routelab::agents::calibration_run(
                &sim,
                agent,
                label,
                "calibration answer",
                samples,
                cfg.train.seed,
            )?;
            let f1_ok = (f1 - cell.f1_mean).abs() < 0.02;
            let lat_ok = (lat - cell.latency_mean_s).abs() / cell.latency_mean_s < 0.05;
            if !(f1_ok && lat_ok) {
                failures += 1;
            }
            println!(
                "{:<8} {:<8} {:>10.3} {:>10.3} {:>12.2} {:>12.2}  {}",
                agent.name,
                label,
                cell.f1_mean,
                f1,
                cell.latency_mean_s,
                lat,
                if f1_ok && lat_ok { "ok" } else { "DRIFT" }
            );
        }
    }
    if failures > 0 {
        return Err(Error::InvalidInput(format!(
            "{failures} simulator cells drifted from their calibration targets"
        )));
    }
    println!("all cells within tolerance ({samples} samples each)");
    Ok(())
}

fn gen_dataset(
    cfg: &RunConfig,
    out: &std::path::Path,
    per_label: usize,
    start_per_label: usize,
) -> Result<()> {
    let schema = cfg.schema()?;
    let ds = generate_dataset_slice(per_label, start_per_label, &schema, cfg.train.seed)?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = std::fs::File::create(out)?;
    write_dataset(&ds, file)?;
    println!(
        "wrote {} questions ({} per label) to {}",
        ds.len(),
        per_label,
        out.display()
    );
    Ok(())
}

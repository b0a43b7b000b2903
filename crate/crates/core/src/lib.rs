//! Adaptive routing of questions to multi-agent answering strategies.
//!
//! The library treats "which agents should collaborate on this question,
//! and how" as a contextual bandit problem:
//!
//! * [`action_space`] enumerates every valid collaboration graph over a set
//!   of answering agents (a DAG feeding a majority-vote final node) as a
//!   finite, canonically-ordered action set;
//! * [`linucb`] learns a per-action ridge model mapping question features
//!   to rewards and selects by upper confidence bound;
//! * [`executor`] runs one graph for one question, passing upstream answers
//!   downstream and aggregating by majority vote;
//! * [`reward`] scores answers by token F1 and charges banded time
//!   penalties, combined as `beta * f1 - (1 - beta) * penalty`;
//! * [`agents`] provides simulated agents calibrated from measured
//!   per-context F1/latency tables, plus a remote HTTP adapter;
//! * [`reinforce`] is the context-blind edge-probability baseline the
//!   bandit is compared against;
//! * [`harness`] ties it together: training loops, greedy evaluation,
//!   diagnostics CSVs, and the side-by-side comparison protocol.
//!
//! Everything is deterministic given a seed: random streams derive from
//! (seed, phase, epoch, question, agent) coordinates, never from shared
//! mutable generator state.

pub mod action_space;
pub mod agents;
pub mod config;
pub mod dataset;
pub mod error;
pub mod executor;
pub mod harness;
pub mod linucb;
pub mod reinforce;
pub mod remote;
pub mod reward;
pub mod seeding;

pub use error::{BackendError, Error, Result};

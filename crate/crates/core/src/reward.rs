//! Token-level F1, latency penalties, and the combined reward signal.
//!
//! The reward for one episode is `r = beta * f1 - (1 - beta) * penalty(s)`,
//! where `s` is the execution time in seconds and the penalty is a set of
//! indicator-gated divisor bands. Two presets are shipped: `individual`
//! (`s / 1000` once `s > 1`) and `collaborative` (`s / 10000` for
//! `1 < s <= 10`, `s / 50` for `s > 10`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One penalty band: fires when `lower_s < s <= upper_s` and contributes
/// `s / divisor`. An unbounded band uses `upper_s = f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBand {
    pub lower_s: f64,
    pub upper_s: f64,
    pub divisor: f64,
}

/// A full penalty schedule: zero or more non-overlapping bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySchedule {
    pub bands: Vec<PenaltyBand>,
}

impl PenaltySchedule {
    /// No time penalty at all (time-agnostic reward).
    pub fn none() -> Self {
        Self { bands: Vec::new() }
    }

    /// Single-agent preset: `s / 1000` once `s > 1`.
    pub fn individual() -> Self {
        Self {
            bands: vec![PenaltyBand {
                lower_s: 1.0,
                upper_s: f64::INFINITY,
                divisor: 1000.0,
            }],
        }
    }

    /// Collaborative-graph preset: `s / 10000` for `1 < s <= 10`,
    /// `s / 50` for `s > 10`.
    pub fn collaborative() -> Self {
        Self {
            bands: vec![
                PenaltyBand {
                    lower_s: 1.0,
                    upper_s: 10.0,
                    divisor: 10000.0,
                },
                PenaltyBand {
                    lower_s: 10.0,
                    upper_s: f64::INFINITY,
                    divisor: 50.0,
                },
            ],
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "individual" => Ok(Self::individual()),
            "collaborative" => Ok(Self::collaborative()),
            "none" => Ok(Self::none()),
            other => Err(Error::Config(format!(
                "unknown penalty preset {other:?} (expected individual, collaborative, or none)"
            ))),
        }
    }

    /// Bands must not overlap and divisors must be positive.
    pub fn validate(&self) -> Result<()> {
        for b in &self.bands {
            if !(b.divisor > 0.0) {
                return Err(Error::Config(format!(
                    "penalty divisor must be > 0, got {}",
                    b.divisor
                )));
            }
            if !(b.lower_s < b.upper_s) {
                return Err(Error::Config(format!(
                    "penalty band bounds must satisfy lower < upper, got ({}, {})",
                    b.lower_s, b.upper_s
                )));
            }
        }
        for (i, a) in self.bands.iter().enumerate() {
            for b in self.bands.iter().skip(i + 1) {
                if a.lower_s < b.upper_s && b.lower_s < a.upper_s {
                    return Err(Error::Config("penalty bands overlap".into()));
                }
            }
        }
        Ok(())
    }

    /// Evaluate the penalty for an execution time of `s` seconds.
    pub fn penalty(&self, s: f64) -> Result<f64> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::InvalidInput(format!(
                "execution time must be finite and >= 0, got {s}"
            )));
        }
        let mut t = 0.0;
        for b in &self.bands {
            if s > b.lower_s && s <= b.upper_s {
                t += s / b.divisor;
            }
        }
        Ok(t)
    }
}

/// Reward parameters: the performance/time trade-off `beta` and the penalty
/// schedule in effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub beta: f64,
    pub schedule: PenaltySchedule,
}

impl RewardConfig {
    pub fn new(beta: f64, schedule: PenaltySchedule) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::Config(format!("beta must be in [0,1], got {beta}")));
        }
        schedule.validate()?;
        Ok(Self { beta, schedule })
    }

    /// Pure-performance reward: `r = f1`.
    pub fn time_agnostic() -> Self {
        Self {
            beta: 1.0,
            schedule: PenaltySchedule::none(),
        }
    }

    /// `r = beta * p - (1 - beta) * penalty(s)`.
    pub fn reward(&self, p: f64, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "performance must be in [0,1], got {p}"
            )));
        }
        let t = self.schedule.penalty(s)?;
        Ok(self.beta * p - (1.0 - self.beta) * t)
    }
}

/// Standalone penalty evaluation for a named preset.
pub fn time_penalty(s: f64, schedule: &PenaltySchedule) -> Result<f64> {
    schedule.penalty(s)
}

/// Lowercase and split on non-alphanumeric runs. Articles are kept: the
/// pinned reference values for this metric count them as tokens.
pub fn f1_tokens(s: &str) -> Vec<String> {
    s.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Token-overlap F1 between a prediction and a gold answer.
///
/// Overlap is counted over token multisets. Both sides empty after
/// tokenization scores 1.0; exactly one side empty scores 0.0.
pub fn token_f1(prediction: &str, gold: &str) -> f64 {
    let pred = f1_tokens(prediction);
    let gold = f1_tokens(gold);
    match (pred.is_empty(), gold.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let mut counts = std::collections::BTreeMap::new();
    for t in &gold {
        *counts.entry(t.as_str()).or_insert(0usize) += 1;
    }
    let mut overlap = 0usize;
    for t in &pred {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / pred.len() as f64;
    let recall = overlap as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// F1 against a list of acceptable answers: the maximum over golds.
pub fn token_f1_multi(prediction: &str, golds: &[String]) -> f64 {
    golds
        .iter()
        .map(|g| token_f1(prediction, g))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f1_identical() {
        assert_eq!(token_f1("paris", "paris"), 1.0);
    }

    #[test]
    fn f1_disjoint() {
        assert_eq!(token_f1("london", "paris"), 0.0);
    }

    #[test]
    fn f1_partial_overlap() {
        // pred tokens: the, capital, of, france; gold: capital, france
        // P = 2/4, R = 2/2 -> F1 = 2/3
        let f1 = token_f1("the capital of france", "capital france");
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12, "f1={f1}");
    }

    #[test]
    fn f1_empty_rules() {
        assert_eq!(token_f1("", ""), 1.0);
        assert_eq!(token_f1("", "x"), 0.0);
        assert_eq!(token_f1("x", ""), 0.0);
        // Punctuation-only strings tokenize to nothing.
        assert_eq!(token_f1("?!", "..."), 1.0);
    }

    #[test]
    fn f1_multiset_counting() {
        // pred: [a, a], gold: [a] -> overlap 1, P = 1/2, R = 1 -> 2/3
        let f1 = token_f1("w w", "w");
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f1_normalization_and_case() {
        assert_eq!(token_f1("New-York", "new york"), 1.0);
    }

    #[test]
    fn f1_multi_takes_max() {
        let golds = vec!["paris".to_string(), "the city of light".to_string()];
        assert_eq!(token_f1_multi("paris", &golds), 1.0);
    }

    #[test]
    fn penalty_individual() {
        let sched = PenaltySchedule::individual();
        assert_eq!(sched.penalty(0.66).unwrap(), 0.0);
        assert_eq!(sched.penalty(1.0).unwrap(), 0.0); // indicator is strict
        assert!((sched.penalty(6.46).unwrap() - 0.00646).abs() < 1e-15);
    }

    #[test]
    fn penalty_collaborative() {
        let sched = PenaltySchedule::collaborative();
        assert_eq!(sched.penalty(0.9).unwrap(), 0.0);
        assert!((sched.penalty(6.74).unwrap() - 0.000674).abs() < 1e-15);
        assert!((sched.penalty(188.97).unwrap() - 3.7794).abs() < 1e-12);
        // Band boundary: s = 10 sits in the low band, not the /50 band.
        assert!((sched.penalty(10.0).unwrap() - 0.001).abs() < 1e-15);
    }

    #[test]
    fn penalty_rejects_negative_time() {
        assert!(PenaltySchedule::individual().penalty(-0.1).is_err());
    }

    #[test]
    fn reward_examples() {
        let ind = RewardConfig::new(0.5, PenaltySchedule::individual()).unwrap();
        assert!((ind.reward(0.914, 0.66).unwrap() - 0.457).abs() < 1e-12);

        let collab = RewardConfig::new(0.5, PenaltySchedule::collaborative()).unwrap();
        let r = collab.reward(0.458, 184.85).unwrap();
        assert!((r - (0.5 * 0.458 - 0.5 * 3.697)).abs() < 1e-12);
        assert!((r - (-1.6195)).abs() < 1e-10);

        assert_eq!(ind.reward(0.0, 0.0).unwrap(), 0.0);
        // beta = 1 recovers pure performance.
        let nt = RewardConfig::time_agnostic();
        assert_eq!(nt.reward(0.73, 500.0).unwrap(), 0.73);
    }

    #[test]
    fn reward_rejects_bad_inputs() {
        let cfg = RewardConfig::new(0.5, PenaltySchedule::individual()).unwrap();
        assert!(cfg.reward(1.5, 0.0).is_err());
        assert!(cfg.reward(0.5, f64::NAN).is_err());
        assert!(RewardConfig::new(1.2, PenaltySchedule::none()).is_err());
    }

    #[test]
    fn overlapping_bands_rejected() {
        let sched = PenaltySchedule {
            bands: vec![
                PenaltyBand { lower_s: 0.0, upper_s: 5.0, divisor: 10.0 },
                PenaltyBand { lower_s: 4.0, upper_s: 9.0, divisor: 10.0 },
            ],
        };
        assert!(sched.validate().is_err());
    }

    proptest! {
        #[test]
        fn reward_monotone(p1 in 0.0f64..1.0, p2 in 0.0f64..1.0,
                           s1 in 0.0f64..300.0, s2 in 0.0f64..300.0,
                           beta in 0.0f64..1.0) {
            let cfg = RewardConfig::new(beta, PenaltySchedule::collaborative()).unwrap();
            let (plo, phi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let (slo, shi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            // Non-decreasing in performance at fixed time.
            prop_assert!(cfg.reward(plo, s1).unwrap() <= cfg.reward(phi, s1).unwrap());
            // Non-increasing in time at fixed performance.
            prop_assert!(cfg.reward(p1, slo).unwrap() >= cfg.reward(p1, shi).unwrap());
        }

        #[test]
        fn f1_is_symmetric(a in "[a-c ]{0,12}", b in "[a-c ]{0,12}") {
            prop_assert_eq!(token_f1(&a, &b), token_f1(&b, &a));
        }

        #[test]
        fn f1_in_unit_interval(a in ".{0,20}", b in ".{0,20}") {
            let f1 = token_f1(&a, &b);
            prop_assert!((0.0..=1.0).contains(&f1));
        }
    }
}

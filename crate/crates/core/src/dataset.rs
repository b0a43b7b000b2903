//! Question datasets: JSONL ingestion, context encoding, and a synthetic
//! generator for desk-scale experiments.
//!
//! One JSONL line per question:
//! `{"id": "...", "question": "...", "gold_answers": ["..."], "complexity_label": "A"}`

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linucb::ContextVector;
use crate::seeding;

/// One labelled question with its acceptable answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub id: String,
    pub question: String,
    pub gold_answers: Vec<String>,
    pub complexity_label: String,
}

/// The run's context feature schema: an ordered list of complexity labels,
/// one-hot encoded in that order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSchema {
    pub labels: Vec<String>,
}

impl ContextSchema {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Config("context schema needs at least one label".into()));
        }
        let mut dedup = labels.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != labels.len() {
            return Err(Error::Config("context schema labels must be unique".into()));
        }
        Ok(Self { labels })
    }

    /// The default three-level complexity schema.
    pub fn abc() -> Self {
        Self {
            labels: vec!["A".into(), "B".into(), "C".into()],
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownContext(label.to_string()))
    }

    /// One-hot encoding of a label.
    pub fn encode(&self, label: &str) -> Result<ContextVector> {
        ContextVector::one_hot(self.index(label)?, self.dim())
    }

    pub fn encode_record(&self, record: &QuestionRecord) -> Result<ContextVector> {
        self.encode(&record.complexity_label)
    }
}

/// A validated dataset plus its label distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<QuestionRecord>,
    pub label_counts: BTreeMap<String, usize>,
}

impl Dataset {
    pub fn from_records(records: Vec<QuestionRecord>, schema: &ContextSchema) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Dataset {
                line: 0,
                message: "dataset is empty".into(),
            });
        }
        let mut label_counts: BTreeMap<String, usize> =
            schema.labels.iter().map(|l| (l.clone(), 0)).collect();
        for (i, r) in records.iter().enumerate() {
            let line = i + 1;
            if r.gold_answers.is_empty() {
                return Err(Error::Dataset {
                    line,
                    message: format!("record {:?}: gold_answers must not be empty", r.id),
                });
            }
            schema.index(&r.complexity_label).map_err(|_| Error::Dataset {
                line,
                message: format!(
                    "record {:?}: complexity_label {:?} is not in the schema {:?}",
                    r.id, r.complexity_label, schema.labels
                ),
            })?;
            *label_counts.entry(r.complexity_label.clone()).or_insert(0) += 1;
        }
        let dataset = Self { records, label_counts };
        if !dataset.is_balanced() {
            log::warn!(
                "dataset labels are not equally distributed: {:?}",
                dataset.label_counts
            );
        }
        Ok(dataset)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_balanced(&self) -> bool {
        let mut counts = self.label_counts.values();
        match counts.next() {
            None => true,
            Some(first) => counts.all(|c| c == first),
        }
    }

    /// Record visit order for one epoch: indices shuffled from the seed.
    pub fn epoch_order(&self, seed: u64, phase: seeding::Phase, epoch: u64) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.records.len()).collect();
        let mut rng = seeding::rng_for(seeding::mix(&[seed, phase.tag(), 0x7368_7566, epoch]));
        order.shuffle(&mut rng);
        order
    }
}

/// Parse a JSONL dataset. Any malformed line fails with its line number.
pub fn load_dataset<R: Read>(reader: R, schema: &ContextSchema) -> Result<Dataset> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let record: QuestionRecord =
            serde_json::from_str(&text).map_err(|e| Error::Dataset {
                line: line_no,
                message: e.to_string(),
            })?;
        records.push(record);
    }
    Dataset::from_records(records, schema)
}

pub fn load_dataset_path(path: &Path, schema: &ContextSchema) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::Dataset {
        line: 0,
        message: format!("cannot open {}: {e}", path.display()),
    })?;
    load_dataset(file, schema)
}

/// Serialize a dataset back to JSONL.
pub fn write_dataset<W: std::io::Write>(dataset: &Dataset, mut w: W) -> Result<()> {
    for r in &dataset.records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Synthesize a balanced dataset: `per_label` questions per schema label,
/// single-token gold answers, shuffled deterministically from the seed.
pub fn generate_dataset(per_label: usize, schema: &ContextSchema, seed: u64) -> Result<Dataset> {
    generate_dataset_slice(per_label, 0, schema, seed)
}

/// Like [`generate_dataset`], starting `start_per_label` questions into each
/// label's sequence. Two slices with disjoint ranges form a train/test
/// split with no shared questions.
pub fn generate_dataset_slice(
    per_label: usize,
    start_per_label: usize,
    schema: &ContextSchema,
    seed: u64,
) -> Result<Dataset> {
    if per_label == 0 {
        return Err(Error::Config("per_label must be >= 1".into()));
    }
    let mut records = Vec::with_capacity(per_label * schema.dim());
    for label in &schema.labels {
        for k in start_per_label..start_per_label + per_label {
            let id = format!("{label}{k:04}");
            records.push(QuestionRecord {
                question: format!("synthetic question {k} at complexity {label}"),
                gold_answers: vec![format!("ans{}", id.to_lowercase())],
                complexity_label: label.clone(),
                id,
            });
        }
    }
    let mut rng = seeding::rng_for(seeding::mix(&[seed, 0x6765_6e64, start_per_label as u64]));
    records.shuffle(&mut rng);
    Dataset::from_records(records, schema)
}

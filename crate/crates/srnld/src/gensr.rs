//! Hybrid SFT mixture building: task-specific instruction pairs without a
//! structure block (`G_TEXT`) mixed with pairs that carry one (`G_SR`) at
//! a configurable ratio, assigned by seeded random sampling.
//!
//! Reproducibility contract, precise enough to re-implement elsewhere:
//!
//! - Records are grouped by task and sorted by id, so input file order is
//!   irrelevant.
//! - Each task draws its own RNG stream: the per-task seed is the first 8
//!   bytes, little-endian, of `SHA-256(seed_le_bytes || task_name)`.
//! - The RNG is the Knuth MMIX linear congruential generator:
//!   `state = state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
//!   each call returning the new state.
//! - The id order is shuffled by a Fisher-Yates walk from the last index
//!   down to 1, swapping index `i` with `next() % (i + 1)`.
//! - The first `round_half_up(ratio_sr * total)` shuffled records become
//!   `G_SR`, the rest `G_TEXT`; output keeps the shuffled order, tasks in
//!   name order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::nld::SrKind;
use crate::promptkit::{self, Task, TaskRecord, TemplateStore};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GensrError {
    #[error("task {task} has {available} records but the plan asks for {requested}")]
    InsufficientRecords {
        task: Task,
        available: usize,
        requested: usize,
    },
    #[error("record `{0}` was assigned to G_SR but has no sr_text")]
    MissingSr(String),
    #[error("record `{0}` has no task field")]
    MissingTask(String),
    #[error("prompt rendering: {0}")]
    Prompt(#[from] promptkit::PromptError),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}

/// Which half of the mixture a record landed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "G_TEXT")]
    Text,
    #[serde(rename = "G_SR")]
    Sr,
}

/// One SFT instruction pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSrRecord {
    pub id: String,
    pub prompt: String,
    pub completion: String,
    pub group: Group,
    pub task: Task,
    pub sr_kind: Option<SrKind>,
}

/// Mixture parameters. `per_task_counts` caps how many records each task
/// contributes; tasks not listed use everything available.
#[derive(Debug, Clone)]
pub struct MixPlan {
    pub ratio_sr: f64,
    pub seed: u64,
    pub per_task_counts: BTreeMap<Task, usize>,
}

impl MixPlan {
    pub fn new(ratio_sr: f64, seed: u64) -> Self {
        MixPlan {
            ratio_sr,
            seed,
            per_task_counts: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), GensrError> {
        if !(0.0..=1.0).contains(&self.ratio_sr) || !self.ratio_sr.is_finite() {
            return Err(GensrError::InvalidPlan(format!(
                "ratio_sr must be in [0, 1], got {}",
                self.ratio_sr
            )));
        }
        Ok(())
    }
}

/// Knuth's MMIX linear congruential generator. Documented in the module
/// header; kept hand-rolled so the mixture is reproducible outside this
/// crate.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    const MULTIPLIER: u64 = 6364136223846793005;
    const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    /// Per-task stream: seed the generator with the first 8 bytes
    /// (little-endian) of `SHA-256(seed_le_bytes || label)`.
    pub fn for_label(seed: u64, label: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update(label.as_bytes());
        let digest = hasher.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        Lcg64::new(u64::from_le_bytes(bytes))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Fisher-Yates, walking from the back, `j = next() % (i + 1)`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}

/// Split a task's total into (G_SR count, G_TEXT count) at the given
/// ratio, rounding half up.
pub fn split_counts(total: usize, ratio_sr: f64) -> (usize, usize) {
    let n_sr = (ratio_sr * total as f64 + 0.5).floor() as usize;
    let n_sr = n_sr.min(total);
    (n_sr, total - n_sr)
}

/// Build the mixture. Every record needs a `task`; records assigned to
/// `G_SR` also need `sr_text` and `sr_kind`. Output is deterministic in
/// (records-as-a-set, plan) and independent of input order.
pub fn build_mixture(
    records: &[TaskRecord],
    plan: &MixPlan,
    templates: &TemplateStore,
) -> Result<Vec<GenSrRecord>, GensrError> {
    plan.validate()?;

    let mut by_task: BTreeMap<Task, Vec<&TaskRecord>> = BTreeMap::new();
    for record in records {
        let task = record
            .task
            .ok_or_else(|| GensrError::MissingTask(record.id.clone()))?;
        by_task.entry(task).or_default().push(record);
    }

    let mut out = Vec::new();
    for (task, mut task_records) in by_task {
        task_records.sort_by(|a, b| a.id.cmp(&b.id));
        let total = match plan.per_task_counts.get(&task) {
            Some(&requested) => {
                if requested > task_records.len() {
                    return Err(GensrError::InsufficientRecords {
                        task,
                        available: task_records.len(),
                        requested,
                    });
                }
                requested
            }
            None => task_records.len(),
        };

        let mut rng = Lcg64::for_label(plan.seed, task.name());
        rng.shuffle(&mut task_records);
        let taken = &task_records[..total];
        let (n_sr, _) = split_counts(total, plan.ratio_sr);

        let completion_template = templates.completion_template(task)?;
        for (position, record) in taken.iter().enumerate() {
            let in_sr_group = position < n_sr;
            let (group, sr_kind, prompt) = if in_sr_group {
                if record.sr_text.as_deref().unwrap_or("").is_empty() {
                    return Err(GensrError::MissingSr(record.id.clone()));
                }
                let kind = record
                    .sr_kind
                    .ok_or_else(|| GensrError::MissingSr(record.id.clone()))?;
                let prompt = promptkit::render_sft_prompt(task, record, Some(kind), templates)?;
                (Group::Sr, Some(kind), prompt)
            } else {
                let prompt = promptkit::render_sft_prompt(task, record, None, templates)?;
                (Group::Text, None, prompt)
            };
            let gold = record.gold.clone().unwrap_or_default();
            let completion = completion_template.replace("{gold}", &gold);
            out.push(GenSrRecord {
                id: record.id.clone(),
                prompt,
                completion,
                group,
                task,
                sr_kind,
            });
        }
    }
    Ok(out)
}

/// Serialize a mixture as JSONL, one record per line.
pub fn to_jsonl(records: &[GenSrRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("record serializes"));
        out.push('\n');
    }
    out
}

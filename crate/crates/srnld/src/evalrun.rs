//! Batch evaluation against a chat-completion endpoint, with a disk cache
//! keyed by (model, temperature, prompt) and bounded request concurrency.
//!
//! Each row is served from the cache when its key file exists, otherwise
//! fetched through [`crate::refine::endpoint_generate`] and persisted
//! (write-to-temp, then rename, so concurrent writers never expose a
//! partial file). Row failures after retries become sentinel rows; they
//! never abort the batch and are never cached, so a rerun retries them.
//! Output order always equals input order.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::nld::SrKind;
use crate::promptkit::{Strategy, Task, Variant};
use crate::refine::{endpoint_generate, RefineMode, RefinerConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("invalid manifest: {0}")]
    ManifestInvalid(String),
    #[error("io error: {0}")]
    Io(String),
}

fn default_temperature() -> f64 {
    0.0
}

fn default_timeout() -> u64 {
    30
}

fn default_retries() -> u32 {
    3
}

fn default_backoff() -> u64 {
    1000
}

/// Everything one batch run needs, loadable from a JSON file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub task: Task,
    pub variant: Variant,
    pub strategy: Strategy,
    #[serde(default)]
    pub sr_kind: Option<SrKind>,
    pub model_name: String,
    pub endpoint_url: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    pub max_parallel: usize,
    pub cache_dir: PathBuf,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_base_ms: u64,
}

impl RunManifest {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.max_parallel < 1 {
            return Err(EvalError::ManifestInvalid(
                "max_parallel must be at least 1".into(),
            ));
        }
        if self.endpoint_url.is_empty() {
            return Err(EvalError::ManifestInvalid("endpoint_url is empty".into()));
        }
        if self.model_name.is_empty() {
            return Err(EvalError::ManifestInvalid("model_name is empty".into()));
        }
        Ok(())
    }

    fn refiner_config(&self) -> RefinerConfig {
        RefinerConfig {
            mode: RefineMode::Endpoint,
            votes: 1,
            endpoint_url: Some(self.endpoint_url.clone()),
            model_name: Some(self.model_name.clone()),
            temperature: self.temperature,
            timeout_secs: self.timeout_secs,
            max_retries: self.max_retries,
            backoff_base_ms: self.backoff_base_ms,
        }
    }
}

/// Stable cache key: hex SHA-256 of
/// `model \x1f temperature-to-6-decimals \x1f prompt`.
pub fn cache_key(prompt: &str, model: &str, temperature: f64) -> String {
    let canonical = format!("{model}\u{1f}{temperature:.6}\u{1f}{prompt}");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// One input row; extra JSONL fields are ignored on read.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptRow {
    pub id: String,
    pub prompt: String,
}

/// One output row, in input order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResponseRow {
    pub id: String,
    pub key: String,
    pub raw_output: String,
    pub from_cache: bool,
    pub error: Option<String>,
}

/// What got served from where.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub total: usize,
    pub cache_hits: usize,
    pub endpoint_calls: usize,
    pub failures: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    prompt_id: String,
    raw_output: String,
    timestamp: u64,
}

/// `ab/cd/abcd... .json` under the cache root: two-level hex fan-out so
/// ten-thousand-row runs do not pile files into one directory.
fn cache_path(root: &Path, key: &str) -> PathBuf {
    root.join(&key[0..2])
        .join(&key[2..4])
        .join(format!("{key}.json"))
}

/// Run every prompt, at most `max_parallel` requests in flight.
pub fn run_batch(
    prompts: &[PromptRow],
    manifest: &RunManifest,
) -> Result<(Vec<ResponseRow>, RunSummary), EvalError> {
    manifest.validate()?;
    std::fs::create_dir_all(&manifest.cache_dir)
        .map_err(|e| EvalError::Io(format!("cannot create cache dir: {e}")))?;

    let config = manifest.refiner_config();
    let results: Mutex<Vec<Option<ResponseRow>>> = Mutex::new(vec![None; prompts.len()]);
    let next_index = AtomicUsize::new(0);
    let cache_hits = AtomicUsize::new(0);
    let endpoint_calls = AtomicUsize::new(0);
    let failures = AtomicUsize::new(0);

    let workers = manifest.max_parallel.min(prompts.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next_index.fetch_add(1, Ordering::SeqCst);
                if i >= prompts.len() {
                    break;
                }
                let row = process_row(&prompts[i], manifest, &config);
                match (&row.error, row.from_cache) {
                    (Some(_), _) => {
                        failures.fetch_add(1, Ordering::SeqCst);
                        endpoint_calls.fetch_add(1, Ordering::SeqCst);
                    }
                    (None, true) => {
                        cache_hits.fetch_add(1, Ordering::SeqCst);
                    }
                    (None, false) => {
                        endpoint_calls.fetch_add(1, Ordering::SeqCst);
                    }
                }
                results.lock().expect("results lock")[i] = Some(row);
            });
        }
    });

    let rows: Vec<ResponseRow> = results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|slot| slot.expect("every row processed"))
        .collect();
    let summary = RunSummary {
        total: rows.len(),
        cache_hits: cache_hits.load(Ordering::SeqCst),
        endpoint_calls: endpoint_calls.load(Ordering::SeqCst),
        failures: failures.load(Ordering::SeqCst),
    };
    Ok((rows, summary))
}

fn process_row(prompt: &PromptRow, manifest: &RunManifest, config: &RefinerConfig) -> ResponseRow {
    let key = cache_key(&prompt.prompt, &manifest.model_name, manifest.temperature);
    let path = cache_path(&manifest.cache_dir, &key);

    if let Ok(content) = std::fs::read_to_string(&path) {
        if let Ok(entry) = serde_json::from_str::<CacheEntry>(&content) {
            return ResponseRow {
                id: prompt.id.clone(),
                key,
                raw_output: entry.raw_output,
                from_cache: true,
                error: None,
            };
        }
        // Unreadable entry: fall through and refetch.
    }

    match endpoint_generate(&prompt.prompt, config) {
        Ok(raw_output) => {
            let entry = CacheEntry {
                key: key.clone(),
                prompt_id: prompt.id.clone(),
                raw_output: raw_output.clone(),
                timestamp: std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            };
            if let Err(e) = persist(&path, &entry) {
                return ResponseRow {
                    id: prompt.id.clone(),
                    key,
                    raw_output,
                    from_cache: false,
                    error: Some(format!("response ok but cache write failed: {e}")),
                };
            }
            ResponseRow {
                id: prompt.id.clone(),
                key,
                raw_output,
                from_cache: false,
                error: None,
            }
        }
        Err(e) => ResponseRow {
            id: prompt.id.clone(),
            key,
            raw_output: String::new(),
            from_cache: false,
            error: Some(e.to_string()),
        },
    }
}

fn persist(path: &Path, entry: &CacheEntry) -> std::io::Result<()> {
    let parent = path.parent().expect("cache path has a parent");
    std::fs::create_dir_all(parent)?;
    // Unique temp name per writer; rename is atomic on the same filesystem.
    let tmp = parent.join(format!(
        ".{}.{:?}.tmp",
        entry.key,
        std::thread::current().id()
    ));
    std::fs::write(
        &tmp,
        serde_json::to_string(entry).expect("entry serializes"),
    )?;
    std::fs::rename(&tmp, path)
}

/// Parse a prompts JSONL stream.
pub fn read_prompts_jsonl(content: &str) -> Result<Vec<PromptRow>, EvalError> {
    content
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| EvalError::Io(format!("prompts line {}: {e}", i + 1)))
        })
        .collect()
}

/// Responses as JSONL, one row per line, input order.
pub fn responses_to_jsonl(rows: &[ResponseRow]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row).expect("row serializes"));
        out.push('\n');
    }
    out
}

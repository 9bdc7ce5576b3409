//! Run a prompt batch against an in-process mock endpoint: bounded
//! parallelism, a content-addressed response cache, and failure
//! isolation, then score the answers.
//!
//! ```bash
//! cargo run --example eval_batch
//! ```

use srnld::evalrun::{self, PromptRow, RunManifest};
use srnld::metrics;
use srnld::mockend::{MockEndpoint, MockResponse};
use srnld::promptkit::{extract_answer, LabelCatalog, Strategy, Task, Variant};

fn main() {
    // A mock model that answers sentiment prompts, with one flaky row.
    let server = MockEndpoint::spawn(|req| {
        let prompt = req.prompt().unwrap_or("");
        std::thread::sleep(std::time::Duration::from_millis(10));
        if prompt.contains("#3") {
            MockResponse::status(500)
        } else if prompt.contains("delightful") {
            MockResponse::content("The tone is warm. Answer: positive")
        } else {
            MockResponse::content("The tone is harsh. Answer: negative")
        }
    });

    let cache = tempfile::tempdir().unwrap();
    let manifest = RunManifest {
        task: Task::Sst2,
        variant: Variant::Base,
        strategy: Strategy::Cot,
        sr_kind: None,
        model_name: "mock-model".into(),
        endpoint_url: server.url(),
        temperature: 0.0,
        max_parallel: 3,
        cache_dir: cache.path().to_path_buf(),
        timeout_secs: 5,
        max_retries: 1,
        backoff_base_ms: 10,
    };

    let inputs = [
        ("r0", "a delightful film #0", "positive"),
        ("r1", "a dreary mess #1", "negative"),
        ("r2", "delightful from start to end #2", "positive"),
        ("r3", "this row always fails #3", "positive"),
        ("r4", "tedious and loud #4", "negative"),
    ];
    let prompts: Vec<PromptRow> = inputs
        .iter()
        .map(|(id, text, _)| PromptRow {
            id: id.to_string(),
            prompt: format!("Classify the sentiment: {text}\nAnswer:"),
        })
        .collect();

    let (rows, summary) = evalrun::run_batch(&prompts, &manifest).unwrap();
    println!("first run:  {}", serde_json::to_string(&summary).unwrap());
    println!(
        "peak concurrency observed by the endpoint: {}",
        server.peak_concurrency()
    );

    let (rows2, summary2) = evalrun::run_batch(&prompts, &manifest).unwrap();
    println!("second run: {}", serde_json::to_string(&summary2).unwrap());
    assert!(rows2
        .iter()
        .filter(|r| r.error.is_none())
        .all(|r| r.from_cache));

    let labels = LabelCatalog::bundled();
    let preds: Vec<String> = rows
        .iter()
        .map(|row| extract_answer(Task::Sst2, &row.raw_output, &labels))
        .collect();
    let golds: Vec<String> = inputs.iter().map(|(_, _, gold)| gold.to_string()).collect();
    let report = metrics::score_task(Task::Sst2, &preds, &golds, &labels).unwrap();
    println!("\nper-row results (the failed row scores as wrong, nothing crashes):");
    for (row, pred) in rows.iter().zip(&preds) {
        println!(
            "  {}  from_cache={}  error={:?}  pred={}",
            row.id, row.from_cache, row.error, pred
        );
    }
    println!("\nscore: {}", report.to_json());
}

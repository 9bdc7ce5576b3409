//! Score predictions with macro-F1, corpus BLEU, and normalized exact
//! match, including answer extraction from raw model output.
//!
//! ```bash
//! cargo run --example score_predictions
//! ```

use srnld::metrics;
use srnld::promptkit::{extract_answer, LabelCatalog, Task};

fn main() {
    let labels = LabelCatalog::bundled();

    // Answers rarely arrive clean; extraction pulls them out first.
    let raw_outputs = [
        "Let me think. The sentences match, so the answer is Yes.",
        "These differ in meaning. Answer: no",
        "I really cannot tell.",
        "no... wait, considering the paraphrase, yes.",
    ];
    let preds: Vec<String> = raw_outputs
        .iter()
        .map(|raw| extract_answer(Task::Paws, raw, &labels))
        .collect();
    println!("extracted: {preds:?}");

    let golds: Vec<String> = ["yes", "no", "yes", "yes"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let report = metrics::score_task(Task::Paws, &preds, &golds, &labels).unwrap();
    println!("PAWS report: {}", report.to_json());

    let hyps = vec!["das wetter ist heute schön".to_string()];
    let refs = vec!["das wetter ist schön heute".to_string()];
    println!("BLEU: {:.2}", metrics::bleu(&hyps, &refs).unwrap());

    let sql_preds = vec!["SELECT  name FROM singer;".to_string()];
    let sql_golds = vec!["select name from singer".to_string()];
    println!(
        "EM:   {:.2}",
        metrics::exact_match(&sql_preds, &sql_golds).unwrap()
    );
}

//! Scoring: macro-F1 for classification tasks, corpus BLEU-4 for
//! translation, normalized exact match for SQL. All values are
//! percentages in [0, 100] and invariant under example reordering.
//!
//! Recipe notes, since numbers are only comparable to themselves:
//! F1 is macro-averaged over the task's label set, excluding labels that
//! appear in neither golds nor predictions. BLEU is corpus-level with
//! modified n-gram precisions for n = 1..4, add-one smoothing applied to
//! a zero precision for n >= 2, and brevity penalty
//! `exp(min(0, 1 - ref_len / hyp_len))`; tokenization lowercases and
//! splits punctuation into single-character tokens. Exact match
//! lowercases, collapses whitespace runs, and strips trailing semicolons.

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::promptkit::{LabelCatalog, Task, NO_ANSWER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {preds} predictions vs {golds} golds")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("empty input: nothing to score")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MetricName {
    F1,
    BLEU,
    EM,
}

/// The metric each task is reported with.
pub fn metric_for(task: Task) -> MetricName {
    match task {
        Task::Wmt16 => MetricName::BLEU,
        Task::Spider => MetricName::EM,
        _ => MetricName::F1,
    }
}

/// One scored run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub task: Task,
    pub metric_name: MetricName,
    /// Percentage, rounded to two decimals.
    pub value: f64,
    pub n: usize,
    pub n_unparsed: usize,
}

impl ScoreReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn normalize_label(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Macro-averaged F1 over `label_set`, as a percentage.
///
/// A label participates in the average only if it occurs in the golds or
/// in the predictions; per-label F1 is the harmonic mean of one-vs-rest
/// precision and recall, zero when undefined. Sentinel predictions match
/// no label and so count against every gold they miss.
pub fn macro_f1(
    preds: &[String],
    golds: &[String],
    label_set: &[String],
) -> Result<f64, MetricsError> {
    if preds.len() != golds.len() {
        return Err(MetricsError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    if golds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let preds: Vec<String> = preds.iter().map(|p| normalize_label(p)).collect();
    let golds: Vec<String> = golds.iter().map(|g| normalize_label(g)).collect();

    let mut seen = std::collections::BTreeSet::new();
    let mut sum = 0.0;
    let mut participating = 0usize;
    for label in label_set {
        let label = normalize_label(label);
        if !seen.insert(label.clone()) {
            continue;
        }
        let occurs = golds.contains(&label) || preds.contains(&label);
        if !occurs {
            continue;
        }
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for (p, g) in preds.iter().zip(&golds) {
            match (*p == label, *g == label) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        let precision = if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            0.0
        };
        let recall = if tp + fn_ > 0 {
            tp as f64 / (tp + fn_) as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        sum += f1;
        participating += 1;
    }
    if participating == 0 {
        return Ok(0.0);
    }
    Ok(100.0 * sum / participating as f64)
}

/// Lowercase, keep alphanumeric runs as tokens, and split every other
/// non-whitespace character into its own token.
fn bleu_tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.to_lowercase().chars() {
        if c.is_alphanumeric() {
            current.push(c);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus BLEU-4, as a percentage.
pub fn bleu(hypotheses: &[String], references: &[String]) -> Result<f64, MetricsError> {
    if hypotheses.len() != references.len() {
        return Err(MetricsError::LengthMismatch {
            preds: hypotheses.len(),
            golds: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(MetricsError::EmptyInput);
    }

    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    for (hyp, reference) in hypotheses.iter().zip(references) {
        let hyp_tokens = bleu_tokenize(hyp);
        let ref_tokens = bleu_tokenize(reference);
        hyp_len += hyp_tokens.len();
        ref_len += ref_tokens.len();
        for n in 1..=4 {
            let hyp_counts = ngram_counts(&hyp_tokens, n);
            let ref_counts = ngram_counts(&ref_tokens, n);
            for (gram, &count) in &hyp_counts {
                totals[n - 1] += count;
                let clip = ref_counts.get(gram).copied().unwrap_or(0);
                matches[n - 1] += count.min(clip);
            }
        }
    }

    if hyp_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for n in 0..4 {
        let (m, t) = (matches[n], totals[n]);
        let p = if m == 0 && n >= 1 {
            // add-one smoothing, n >= 2 only
            (m as f64 + 1.0) / (t as f64 + 1.0)
        } else if t > 0 {
            m as f64 / t as f64
        } else {
            0.0
        };
        if p <= 0.0 {
            return Ok(0.0);
        }
        log_sum += p.ln();
    }
    let geometric_mean = (log_sum / 4.0).exp();
    let brevity = (1.0 - ref_len as f64 / hyp_len as f64).min(0.0).exp();
    Ok(100.0 * brevity * geometric_mean)
}

fn normalize_exact(s: &str) -> String {
    let collapsed = s
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    collapsed.trim_end_matches(';').trim_end().to_string()
}

/// Normalized string equality, as a percentage.
pub fn exact_match(preds: &[String], golds: &[String]) -> Result<f64, MetricsError> {
    if preds.len() != golds.len() {
        return Err(MetricsError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    if golds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let hits = preds
        .iter()
        .zip(golds)
        .filter(|(p, g)| normalize_exact(p) == normalize_exact(g))
        .count();
    Ok(100.0 * hits as f64 / golds.len() as f64)
}

/// Score a task with its reporting metric and wrap the result in a
/// report. The label set comes from the catalog; tasks without one (for
/// example CONLL2003's entity lists) use the distinct gold strings.
pub fn score_task(
    task: Task,
    preds: &[String],
    golds: &[String],
    labels: &LabelCatalog,
) -> Result<ScoreReport, MetricsError> {
    score_with_metric(task, metric_for(task), preds, golds, labels)
}

/// Like [`score_task`] with the metric chosen by the caller.
pub fn score_with_metric(
    task: Task,
    metric_name: MetricName,
    preds: &[String],
    golds: &[String],
    labels: &LabelCatalog,
) -> Result<ScoreReport, MetricsError> {
    let value = match metric_name {
        MetricName::BLEU => bleu(preds, golds)?,
        MetricName::EM => exact_match(preds, golds)?,
        MetricName::F1 => {
            let from_catalog = labels.get(task);
            if from_catalog.is_empty() {
                let mut set: Vec<String> = golds.iter().map(|g| normalize_label(g)).collect();
                set.sort();
                set.dedup();
                macro_f1(preds, golds, &set)?
            } else {
                macro_f1(preds, golds, from_catalog)?
            }
        }
    };
    let n_unparsed = preds.iter().filter(|p| p.as_str() == NO_ANSWER).count();
    Ok(ScoreReport {
        task,
        metric_name,
        value: (value * 100.0).round() / 100.0,
        n: golds.len(),
        n_unparsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 0.01, "{a} != {b}");
    }

    #[test]
    fn f1_perfect_predictor() {
        let golds = v(&["yes", "no", "yes"]);
        close(macro_f1(&golds, &golds, &v(&["yes", "no"])).unwrap(), 100.0);
    }

    #[test]
    fn f1_hand_computed_example() {
        let golds = v(&["yes", "yes", "no", "no"]);
        let preds = v(&["yes", "no", "no", "no"]);
        close(macro_f1(&preds, &golds, &v(&["yes", "no"])).unwrap(), 73.33);
    }

    #[test]
    fn f1_all_sentinels_scores_zero() {
        let golds = v(&["yes", "no"]);
        let preds = v(&[NO_ANSWER, NO_ANSWER]);
        close(macro_f1(&preds, &golds, &v(&["yes", "no"])).unwrap(), 0.0);
    }

    #[test]
    fn f1_unused_labels_excluded_from_average() {
        // "maybe" never occurs, so the average runs over yes and no only.
        let golds = v(&["yes", "no"]);
        let preds = v(&["yes", "no"]);
        let with_extra = macro_f1(&preds, &golds, &v(&["yes", "no", "maybe"])).unwrap();
        close(with_extra, 100.0);
    }

    #[test]
    fn f1_single_label_degenerate_case_equals_accuracy() {
        let golds = v(&["yes", "yes", "yes"]);
        close(macro_f1(&golds, &golds, &v(&["yes"])).unwrap(), 100.0);
    }

    #[test]
    fn f1_length_mismatch() {
        assert!(matches!(
            macro_f1(&v(&["yes"]), &v(&["yes", "no"]), &v(&["yes", "no"])),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn f1_case_insensitive() {
        let golds = v(&["Yes", "NO"]);
        let preds = v(&["yes", "no"]);
        close(macro_f1(&preds, &golds, &v(&["yes", "no"])).unwrap(), 100.0);
    }

    #[test]
    fn bleu_identity_is_hundred() {
        let text = v(&["The cat sat on the mat.", "Dogs bark loudly at night."]);
        close(bleu(&text, &text).unwrap(), 100.0);
    }

    #[test]
    fn bleu_empty_hypothesis_is_zero() {
        let hyp = v(&[""]);
        let re = v(&["the cat"]);
        close(bleu(&hyp, &re).unwrap(), 0.0);
    }

    #[test]
    fn bleu_clipping_and_smoothing_hand_example() {
        // hyp "the the the the", ref "the cat":
        //   p1 = clipped 1/4
        //   p2 = 0/3 -> smoothed 1/4
        //   p3 = 0/2 -> smoothed 1/3
        //   p4 = 0/1 -> smoothed 1/2
        //   BP = exp(min(0, 1 - 2/4)) = 1
        // Expected = 100 * (1/4 * 1/4 * 1/3 * 1/2)^(1/4), evaluated here
        // independently of the implementation.
        let expected = 100.0 * (0.25f64 * 0.25 * (1.0 / 3.0) * 0.5).powf(0.25);
        let got = bleu(&v(&["the the the the"]), &v(&["the cat"])).unwrap();
        close(got, expected);
    }

    #[test]
    fn bleu_brevity_penalty_applies_to_short_hypotheses() {
        let got = bleu(&v(&["the cat"]), &v(&["the cat sat on the mat"])).unwrap();
        // p_n all 1 on the two-token hypothesis; BP = exp(1 - 6/2) = e^-2.
        let expected = 100.0 * (-2.0f64).exp();
        close(got, expected);
    }

    #[test]
    fn bleu_identical_appended_pair_stays_at_hundred() {
        let one = v(&["the cat sat"]);
        let two = v(&["the cat sat", "the cat sat"]);
        close(bleu(&one, &one).unwrap(), 100.0);
        close(bleu(&two, &two).unwrap(), 100.0);
    }

    #[test]
    fn bleu_tokenization_splits_punctuation_and_lowercases() {
        assert_eq!(
            bleu_tokenize("The cat, quickly (so to speak)."),
            vec!["the", "cat", ",", "quickly", "(", "so", "to", "speak", ")", "."]
        );
    }

    #[test]
    fn em_identical_strings() {
        let s = v(&["SELECT a FROM b"]);
        close(exact_match(&s, &s).unwrap(), 100.0);
    }

    #[test]
    fn em_normalization_rules() {
        let preds = v(&["SELECT  name FROM t;"]);
        let golds = v(&["select name from t"]);
        close(exact_match(&preds, &golds).unwrap(), 100.0);
    }

    #[test]
    fn em_disjoint_strings() {
        close(
            exact_match(&v(&["a"]), &v(&["completely different"])).unwrap(),
            0.0,
        );
    }

    #[test]
    fn all_metrics_within_percentage_range() {
        let golds = v(&["yes", "no", "yes", "no"]);
        let preds = v(&["no", "yes", NO_ANSWER, "no"]);
        let f1 = macro_f1(&preds, &golds, &v(&["yes", "no"])).unwrap();
        assert!((0.0..=100.0).contains(&f1));
        let b = bleu(&v(&["some words here"]), &v(&["other words there"])).unwrap();
        assert!((0.0..=100.0).contains(&b));
        let em = exact_match(&preds, &golds).unwrap();
        assert!((0.0..=100.0).contains(&em));
    }

    #[test]
    fn metrics_permutation_invariant() {
        let golds = v(&["yes", "no", "yes", "no"]);
        let preds = v(&["yes", "no", "no", "no"]);
        let a = macro_f1(&preds, &golds, &v(&["yes", "no"])).unwrap();
        let golds_r = v(&["no", "yes", "no", "yes"]);
        let preds_r = v(&["no", "no", "no", "yes"]);
        let b = macro_f1(&preds_r, &golds_r, &v(&["yes", "no"])).unwrap();
        close(a, b);
    }

    #[test]
    fn score_task_maps_metric_and_counts_sentinels() {
        let labels = LabelCatalog::bundled();
        let golds = v(&["yes", "no"]);
        let preds = v(&["yes", NO_ANSWER]);
        let report = score_task(Task::Paws, &preds, &golds, &labels).unwrap();
        assert_eq!(report.n, 2);
        assert_eq!(report.n_unparsed, 1);
        assert!(matches!(report.metric_name, MetricName::F1));
        assert!((0.0..=100.0).contains(&report.value));

        let report = score_task(Task::Wmt16, &golds, &golds, &labels).unwrap();
        assert!(matches!(report.metric_name, MetricName::BLEU));
        let report = score_task(Task::Spider, &golds, &golds, &labels).unwrap();
        assert!(matches!(report.metric_name, MetricName::EM));
    }

    #[test]
    fn score_report_rounds_to_two_decimals() {
        let labels = LabelCatalog::bundled();
        let golds = v(&["yes", "yes", "no", "no"]);
        let preds = v(&["yes", "no", "no", "no"]);
        let report = score_task(Task::Paws, &preds, &golds, &labels).unwrap();
        assert_eq!(report.value, 73.33);
    }
}

//! Prompt assembly for the ten downstream tasks, in three variants
//! (plain input `BASE`, raw structure attached `SR`, description
//! attached `SR_NLD`) under chain-of-thought and one-shot strategies,
//! plus per-task answer extraction from raw model output.
//!
//! Prompt wording lives in editable TOML files, one per task, each with a
//! `skeleton` carrying the slots `{exemplar}`, `{instruction}`,
//! `{input}`, `{sr_block}`, `{nld_block}`, and `{cot_suffix}`. Rendering
//! is pure string substitution: identical spec, record, and templates
//! give byte-identical prompts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nld::SrKind;

/// Returned by [`extract_answer`] when no answer can be found; scored as
/// wrong by the metrics, never a crash.
pub const NO_ANSWER: &str = "<no-answer>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("no template loaded for task {0}")]
    UnknownTask(String),
    #[error("record `{id}` has no {field}, required by variant {variant}")]
    MissingField {
        id: String,
        field: &'static str,
        variant: Variant,
    },
    #[error("variant {0} requires an sr_kind")]
    MissingSrKind(Variant),
    #[error("task {0} has no exemplar, required by one-shot prompting")]
    MissingExemplar(Task),
    #[error("template for {task}: {msg}")]
    BadTemplate { task: String, msg: String },
}

/// The ten downstream tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "PAWS")]
    Paws,
    #[serde(rename = "SNLI")]
    Snli,
    #[serde(rename = "WMT16")]
    Wmt16,
    #[serde(rename = "CONLL2003")]
    Conll2003,
    #[serde(rename = "LOGIC")]
    Logic,
    #[serde(rename = "SST2")]
    Sst2,
    #[serde(rename = "PUBMED45")]
    Pubmed45,
    #[serde(rename = "WIC")]
    Wic,
    #[serde(rename = "SPIDER")]
    Spider,
    #[serde(rename = "AGNEWS")]
    Agnews,
}

impl Task {
    pub const ALL: [Task; 10] = [
        Task::Paws,
        Task::Snli,
        Task::Wmt16,
        Task::Conll2003,
        Task::Logic,
        Task::Sst2,
        Task::Pubmed45,
        Task::Wic,
        Task::Spider,
        Task::Agnews,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Task::Paws => "PAWS",
            Task::Snli => "SNLI",
            Task::Wmt16 => "WMT16",
            Task::Conll2003 => "CONLL2003",
            Task::Logic => "LOGIC",
            Task::Sst2 => "SST2",
            Task::Pubmed45 => "PUBMED45",
            Task::Wic => "WIC",
            Task::Spider => "SPIDER",
            Task::Agnews => "AGNEWS",
        }
    }

    fn file_stem(&self) -> String {
        self.name().to_ascii_lowercase()
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.to_ascii_uppercase();
        Task::ALL
            .iter()
            .find(|t| t.name() == upper)
            .copied()
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "BASE")]
    Base,
    #[serde(rename = "SR")]
    Sr,
    #[serde(rename = "SR_NLD")]
    SrNld,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Base => "BASE",
            Variant::Sr => "SR",
            Variant::SrNld => "SR_NLD",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "BASE" => Ok(Variant::Base),
            "SR" => Ok(Variant::Sr),
            "SR_NLD" | "SRNLD" => Ok(Variant::SrNld),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "COT")]
    Cot,
    #[serde(rename = "ONE_SHOT")]
    OneShot,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Cot => "COT",
            Strategy::OneShot => "ONE_SHOT",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "COT" => Ok(Strategy::Cot),
            "ONE_SHOT" | "ONESHOT" => Ok(Strategy::OneShot),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// What to render: task, variant, strategy, and (for non-BASE variants)
/// which structure kind the attached block holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptSpec {
    pub task: Task,
    pub variant: Variant,
    pub strategy: Strategy,
    pub sr_kind: Option<SrKind>,
}

impl PromptSpec {
    pub fn validate(&self) -> Result<(), PromptError> {
        if self.variant != Variant::Base && self.sr_kind.is_none() {
            return Err(PromptError::MissingSrKind(self.variant));
        }
        Ok(())
    }
}

/// One task instance. `input_text` holds the full input (both sentences
/// for pair tasks); `sr_text` is the raw structure, `nld_text` its
/// refined description, `gold` the reference answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    pub input_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_kind: Option<SrKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nld_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<String>,
}

/// A rendered prompt row, written to JSONL by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub id: String,
    pub prompt: String,
    pub variant: Variant,
    pub strategy: Strategy,
    pub sr_kind: Option<SrKind>,
}

#[derive(Debug, Clone, Deserialize)]
struct TaskTemplate {
    instruction: String,
    skeleton: String,
    #[serde(default)]
    cot_suffix: String,
    #[serde(default)]
    exemplar: Option<String>,
    #[serde(default)]
    completion: Option<String>,
    #[serde(default)]
    sr_header: Option<String>,
    #[serde(default)]
    nld_header: Option<String>,
}

const REQUIRED_SLOTS: [&str; 4] = ["{instruction}", "{input}", "{sr_block}", "{nld_block}"];

/// Per-task prompt templates, loaded from a directory of `<task>.toml`
/// files or from the bundled defaults.
pub struct TemplateStore {
    templates: BTreeMap<Task, TaskTemplate>,
}

impl TemplateStore {
    /// The templates shipped with this crate.
    pub fn bundled() -> Self {
        let files: [(Task, &str); 10] = [
            (Task::Paws, include_str!("../data/templates/paws.toml")),
            (Task::Snli, include_str!("../data/templates/snli.toml")),
            (Task::Wmt16, include_str!("../data/templates/wmt16.toml")),
            (
                Task::Conll2003,
                include_str!("../data/templates/conll2003.toml"),
            ),
            (Task::Logic, include_str!("../data/templates/logic.toml")),
            (Task::Sst2, include_str!("../data/templates/sst2.toml")),
            (
                Task::Pubmed45,
                include_str!("../data/templates/pubmed45.toml"),
            ),
            (Task::Wic, include_str!("../data/templates/wic.toml")),
            (Task::Spider, include_str!("../data/templates/spider.toml")),
            (Task::Agnews, include_str!("../data/templates/agnews.toml")),
        ];
        let mut templates = BTreeMap::new();
        for (task, content) in files {
            let template = parse_template(task, content).expect("bundled template is well-formed");
            templates.insert(task, template);
        }
        TemplateStore { templates }
    }

    /// Load `<task>.toml` files from a directory; tasks without a file
    /// are simply absent and render as [`PromptError::UnknownTask`].
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut templates = BTreeMap::new();
        for task in Task::ALL {
            let path = dir.join(format!("{}.toml", task.file_stem()));
            if !path.exists() {
                continue;
            }
            let content = std::fs::read_to_string(&path).map_err(|e| PromptError::BadTemplate {
                task: task.name().to_string(),
                msg: e.to_string(),
            })?;
            templates.insert(task, parse_template(task, &content)?);
        }
        Ok(TemplateStore { templates })
    }

    fn get(&self, task: Task) -> Result<&TaskTemplate, PromptError> {
        self.templates
            .get(&task)
            .ok_or_else(|| PromptError::UnknownTask(task.name().to_string()))
    }

    /// The completion template for SFT pairs, `{gold}` by default.
    pub fn completion_template(&self, task: Task) -> Result<String, PromptError> {
        Ok(self
            .get(task)?
            .completion
            .clone()
            .unwrap_or_else(|| "{gold}".to_string()))
    }
}

fn parse_template(task: Task, content: &str) -> Result<TaskTemplate, PromptError> {
    let template: TaskTemplate = toml::from_str(content).map_err(|e| PromptError::BadTemplate {
        task: task.name().to_string(),
        msg: e.to_string(),
    })?;
    for slot in REQUIRED_SLOTS {
        if !template.skeleton.contains(slot) {
            return Err(PromptError::BadTemplate {
                task: task.name().to_string(),
                msg: format!("skeleton is missing the {slot} slot"),
            });
        }
    }
    Ok(template)
}

/// Assemble the prompt for one record.
///
/// `BASE` renders instruction and input. `SR` adds a labeled block with
/// the raw structure, `SR_NLD` a labeled block with the description.
/// `COT` fills the reasoning-directive slot and `ONE_SHOT` fills the
/// exemplar slot. The BASE output's instruction and input appear verbatim
/// in the SR and SR_NLD outputs for the same record.
pub fn render_prompt(
    spec: &PromptSpec,
    record: &TaskRecord,
    templates: &TemplateStore,
) -> Result<String, PromptError> {
    spec.validate()?;
    let template = templates.get(spec.task)?;

    let sr_block = match spec.variant {
        Variant::Sr => {
            let text = record.sr_text.as_deref().filter(|t| !t.is_empty()).ok_or(
                PromptError::MissingField {
                    id: record.id.clone(),
                    field: "sr_text",
                    variant: spec.variant,
                },
            )?;
            let kind = spec.sr_kind.expect("validated above");
            let header = template
                .sr_header
                .clone()
                .unwrap_or_else(|| "{kind}:".to_string())
                .replace("{kind}", kind.name());
            format!("{header}\n{text}\n\n")
        }
        _ => String::new(),
    };
    let nld_block = match spec.variant {
        Variant::SrNld => {
            let text = record.nld_text.as_deref().filter(|t| !t.is_empty()).ok_or(
                PromptError::MissingField {
                    id: record.id.clone(),
                    field: "nld_text",
                    variant: spec.variant,
                },
            )?;
            let kind = spec.sr_kind.expect("validated above");
            let header = template
                .nld_header
                .clone()
                .unwrap_or_else(|| "{kind} description:".to_string())
                .replace("{kind}", kind.name());
            format!("{header}\n{text}\n\n")
        }
        _ => String::new(),
    };
    let exemplar = match spec.strategy {
        Strategy::OneShot => {
            let text = template
                .exemplar
                .as_deref()
                .filter(|t| !t.trim().is_empty())
                .ok_or(PromptError::MissingExemplar(spec.task))?;
            format!("{}\n\n", text.trim_end())
        }
        Strategy::Cot => String::new(),
    };
    let cot_suffix = match spec.strategy {
        Strategy::Cot if !template.cot_suffix.is_empty() => {
            format!("{}\n", template.cot_suffix)
        }
        _ => String::new(),
    };

    let rendered = template
        .skeleton
        .replace("{exemplar}", &exemplar)
        .replace("{instruction}", &template.instruction)
        .replace("{input}", &record.input_text)
        .replace("{sr_block}", &sr_block)
        .replace("{nld_block}", &nld_block)
        .replace("{cot_suffix}", &cot_suffix);
    Ok(rendered.trim_end().to_string())
}

/// Instruction-pair prompt for SFT data: instruction plus input, with the
/// raw structure block when `sr_kind` is given. No reasoning directive,
/// no exemplar.
pub fn render_sft_prompt(
    task: Task,
    record: &TaskRecord,
    sr_kind: Option<SrKind>,
    templates: &TemplateStore,
) -> Result<String, PromptError> {
    let spec = PromptSpec {
        task,
        variant: if sr_kind.is_some() {
            Variant::Sr
        } else {
            Variant::Base
        },
        strategy: Strategy::Cot, // no exemplar; cot_suffix suppressed below
        sr_kind,
    };
    spec.validate()?;
    let template = templates.get(task)?;
    let sr_block = match sr_kind {
        Some(kind) => {
            let text = record.sr_text.as_deref().filter(|t| !t.is_empty()).ok_or(
                PromptError::MissingField {
                    id: record.id.clone(),
                    field: "sr_text",
                    variant: Variant::Sr,
                },
            )?;
            let header = template
                .sr_header
                .clone()
                .unwrap_or_else(|| "{kind}:".to_string())
                .replace("{kind}", kind.name());
            format!("{header}\n{text}\n\n")
        }
        None => String::new(),
    };
    let rendered = template
        .skeleton
        .replace("{exemplar}", "")
        .replace("{instruction}", &template.instruction)
        .replace("{input}", &record.input_text)
        .replace("{sr_block}", &sr_block)
        .replace("{nld_block}", "")
        .replace("{cot_suffix}", "");
    Ok(rendered.trim_end().to_string())
}

/// Task label vocabularies, loaded from a `TASK<TAB>label,label,...`
/// data file.
pub struct LabelCatalog {
    labels: BTreeMap<Task, Vec<String>>,
}

impl LabelCatalog {
    pub fn bundled() -> Self {
        Self::from_str_content(include_str!("../data/labels.tsv"))
            .expect("bundled label file is well-formed")
    }

    pub fn from_str_content(content: &str) -> Result<Self, String> {
        let mut labels = BTreeMap::new();
        for line in content.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (task, list) = line
                .split_once('\t')
                .ok_or_else(|| format!("expected TASK<TAB>labels in `{line}`"))?;
            let task = Task::from_str(task.trim())?;
            let values: Vec<String> = list
                .split(',')
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect();
            labels.insert(task, values);
        }
        Ok(LabelCatalog { labels })
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let content = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        Self::from_str_content(&content)
    }

    pub fn get(&self, task: Task) -> &[String] {
        self.labels.get(&task).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Pull a normalized answer out of raw model output. Total: anything
/// unextractable becomes the [`NO_ANSWER`] sentinel.
///
/// Classification tasks take the last word-boundary occurrence of a task
/// label, case-insensitively. WMT16 takes the text after the last
/// `Translation:` marker, else the whole output. SPIDER takes the first
/// fenced code block, else the first `SELECT`-prefixed statement.
/// CONLL2003 collects `word:TYPE` pairs with TYPE in PER/LOC/ORG/MISC.
pub fn extract_answer(task: Task, raw: &str, labels: &LabelCatalog) -> String {
    let answer = match task {
        Task::Wmt16 => extract_translation(raw),
        Task::Spider => extract_sql(raw),
        Task::Conll2003 => extract_entities(raw),
        _ => extract_label(raw, labels.get(task)),
    };
    answer.unwrap_or_else(|| NO_ANSWER.to_string())
}

fn extract_translation(raw: &str) -> Option<String> {
    const MARKER: &str = "Translation:";
    let text = match raw.rfind(MARKER) {
        Some(pos) => &raw[pos + MARKER.len()..],
        None => raw,
    };
    let text = text.trim();
    if text.is_empty() {
        None
    } else {
        Some(text.to_string())
    }
}

fn extract_sql(raw: &str) -> Option<String> {
    // Fenced block first.
    if let Some(open) = raw.find("```") {
        let after = &raw[open + 3..];
        if let Some(close) = after.find("```") {
            let mut content = after[..close].trim();
            // Strip a language tag on the opening fence line.
            if let Some(rest) = content.strip_prefix("sql") {
                content = rest.trim_start();
            } else if let Some(rest) = content.strip_prefix("SQL") {
                content = rest.trim_start();
            }
            if !content.is_empty() {
                return Some(content.trim().to_string());
            }
        }
    }
    // First SELECT-prefixed statement, to the first semicolon or the end.
    let lower = raw.to_lowercase();
    let mut search_from = 0;
    while let Some(rel) = lower[search_from..].find("select") {
        let start = search_from + rel;
        let before_ok = start == 0
            || !lower[..start]
                .chars()
                .next_back()
                .is_some_and(|c| c.is_alphanumeric());
        let after = start + "select".len();
        let after_ok = !lower[after..]
            .chars()
            .next()
            .is_some_and(|c| c.is_alphanumeric());
        if before_ok && after_ok {
            let tail = &raw[start..];
            let end = tail.find(';').unwrap_or(tail.len());
            let statement: String = tail[..end].split_whitespace().collect::<Vec<_>>().join(" ");
            if !statement.is_empty() {
                return Some(statement);
            }
        }
        search_from = after;
    }
    None
}

const ENTITY_TYPES: [&str; 4] = ["PER", "LOC", "ORG", "MISC"];

fn extract_entities(raw: &str) -> Option<String> {
    let mut pairs = Vec::new();
    for token in raw.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
        let token = token.trim_matches(|c: char| !c.is_alphanumeric() && c != ':');
        let Some((word, ty)) = token.rsplit_once(':') else {
            continue;
        };
        let word = word.trim();
        let ty = ty.trim().to_uppercase();
        if word.is_empty() || !ENTITY_TYPES.contains(&ty.as_str()) {
            continue;
        }
        pairs.push(format!("{}:{}", word.to_lowercase(), ty));
    }
    if pairs.is_empty() {
        None
    } else {
        Some(pairs.join(", "))
    }
}

fn extract_label(raw: &str, labels: &[String]) -> Option<String> {
    let lower = raw.to_lowercase();
    let mut best: Option<(usize, usize, &str)> = None; // (start, len, label)
    for label in labels {
        let mut from = 0;
        while let Some(rel) = lower[from..].find(label.as_str()) {
            let start = from + rel;
            let end = start + label.len();
            let before_ok = start == 0
                || !lower[..start]
                    .chars()
                    .next_back()
                    .is_some_and(|c| c.is_alphanumeric());
            let after_ok = !lower[end..]
                .chars()
                .next()
                .is_some_and(|c| c.is_alphanumeric());
            if before_ok && after_ok {
                let better = match best {
                    None => true,
                    Some((s, l, _)) => start > s || (start == s && label.len() > l),
                };
                if better {
                    best = Some((start, label.len(), label));
                }
            }
            from = start + 1;
        }
    }
    best.map(|(_, _, label)| label.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> TemplateStore {
        TemplateStore::bundled()
    }

    fn labels() -> LabelCatalog {
        LabelCatalog::bundled()
    }

    fn record() -> TaskRecord {
        TaskRecord {
            id: "r1".into(),
            task: Some(Task::Paws),
            input_text: "Sentence 1: A cat sat.\nSentence 2: A cat was sitting.".into(),
            sr_kind: Some(SrKind::Amr),
            sr_text: Some("(s / sit-01 :ARG0 (c / cat))".into()),
            nld_text: Some("The agent of sit-01 is cat.".into()),
            gold: Some("yes".into()),
        }
    }

    #[test]
    fn base_cot_has_no_sr_block() {
        let spec = PromptSpec {
            task: Task::Snli,
            variant: Variant::Base,
            strategy: Strategy::Cot,
            sr_kind: None,
        };
        let mut rec = record();
        rec.input_text = "Premise: A man plays guitar.\nHypothesis: A man performs.".into();
        let prompt = render_prompt(&spec, &rec, &store()).unwrap();
        assert!(prompt.contains("Premise: A man plays guitar."));
        assert!(prompt.contains("Hypothesis: A man performs."));
        assert!(prompt.contains("Think step by step"));
        assert!(!prompt.contains("AMR:"));
        assert!(!prompt.contains("Example:"));
    }

    #[test]
    fn sr_one_shot_contains_exemplar_then_verbatim_sr() {
        let spec = PromptSpec {
            task: Task::Paws,
            variant: Variant::Sr,
            strategy: Strategy::OneShot,
            sr_kind: Some(SrKind::Amr),
        };
        let rec = record();
        let prompt = render_prompt(&spec, &rec, &store()).unwrap();
        assert!(prompt.starts_with("Example:"));
        assert!(prompt.contains("AMR:\n(s / sit-01 :ARG0 (c / cat))"));
        let exemplar_pos = prompt.find("Example:").unwrap();
        let instance_pos = prompt.find("Sentence 1: A cat sat.").unwrap();
        assert!(exemplar_pos < instance_pos);
    }

    #[test]
    fn missing_nld_text_is_an_error() {
        let spec = PromptSpec {
            task: Task::Paws,
            variant: Variant::SrNld,
            strategy: Strategy::Cot,
            sr_kind: Some(SrKind::Amr),
        };
        let mut rec = record();
        rec.nld_text = None;
        assert!(matches!(
            render_prompt(&spec, &rec, &store()),
            Err(PromptError::MissingField {
                field: "nld_text",
                ..
            })
        ));
    }

    #[test]
    fn non_base_variant_needs_sr_kind() {
        let spec = PromptSpec {
            task: Task::Paws,
            variant: Variant::Sr,
            strategy: Strategy::Cot,
            sr_kind: None,
        };
        assert!(matches!(
            render_prompt(&spec, &record(), &store()),
            Err(PromptError::MissingSrKind(Variant::Sr))
        ));
    }

    #[test]
    fn base_instruction_and_input_verbatim_in_all_variants() {
        let rec = record();
        let mut prompts = Vec::new();
        for variant in [Variant::Base, Variant::Sr, Variant::SrNld] {
            let spec = PromptSpec {
                task: Task::Paws,
                variant,
                strategy: Strategy::Cot,
                sr_kind: Some(SrKind::Amr),
            };
            prompts.push(render_prompt(&spec, &rec, &store()).unwrap());
        }
        for p in &prompts {
            assert!(p.contains("Determine whether the two sentences below are paraphrases"));
            assert!(p.contains(&rec.input_text));
        }
    }

    #[test]
    fn render_is_deterministic() {
        let spec = PromptSpec {
            task: Task::Paws,
            variant: Variant::SrNld,
            strategy: Strategy::OneShot,
            sr_kind: Some(SrKind::Amr),
        };
        let a = render_prompt(&spec, &record(), &store()).unwrap();
        let b = render_prompt(&spec, &record(), &store()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sft_prompt_has_no_cot_or_exemplar() {
        let prompt = render_sft_prompt(Task::Paws, &record(), None, &store()).unwrap();
        assert!(!prompt.contains("Example:"));
        assert!(!prompt.contains("Think step by step"));
        let with_sr =
            render_sft_prompt(Task::Paws, &record(), Some(SrKind::Amr), &store()).unwrap();
        assert!(with_sr.contains("AMR:\n(s / sit-01 :ARG0 (c / cat))"));
    }

    #[test]
    fn extract_label_takes_last_occurrence() {
        let out = extract_answer(
            Task::Paws,
            "No wait. Considering everything, the answer is Yes.",
            &labels(),
        );
        assert_eq!(out, "yes");
    }

    #[test]
    fn extract_label_respects_word_boundaries() {
        // "no" inside "nothing" and "notable" must not match.
        let out = extract_answer(Task::Paws, "nothing notable here", &labels());
        assert_eq!(out, NO_ANSWER);
    }

    #[test]
    fn extract_label_sentinel_when_absent() {
        let out = extract_answer(Task::Sst2, "I cannot decide.", &labels());
        assert_eq!(out, NO_ANSWER);
    }

    #[test]
    fn extract_translation_after_marker() {
        let out = extract_answer(
            Task::Wmt16,
            "Reasoning...\nTranslation: Das Wetter ist schön.",
            &labels(),
        );
        assert_eq!(out, "Das Wetter ist schön.");
        let plain = extract_answer(Task::Wmt16, "Das Wetter ist schön.", &labels());
        assert_eq!(plain, "Das Wetter ist schön.");
    }

    #[test]
    fn extract_sql_from_fence() {
        let out = extract_answer(Task::Spider, "```sql\nSELECT name FROM t\n```", &labels());
        assert_eq!(out, "SELECT name FROM t");
    }

    #[test]
    fn extract_sql_from_bare_select() {
        let out = extract_answer(
            Task::Spider,
            "The query is SELECT name\nFROM t; hope that helps",
            &labels(),
        );
        assert_eq!(out, "SELECT name FROM t");
    }

    #[test]
    fn extract_entities_pairs() {
        let out = extract_answer(
            Task::Conll2003,
            "Entities: Angela:PER, Paris:LOC and Siemens:ORG.",
            &labels(),
        );
        assert_eq!(out, "angela:PER, paris:LOC, siemens:ORG");
    }

    #[test]
    fn extract_is_total_on_junk() {
        for task in Task::ALL {
            let _ = extract_answer(task, "", &labels());
            let _ = extract_answer(task, "\u{0}\u{1}weird ((( bytes", &labels());
        }
    }

    #[test]
    fn one_shot_without_exemplar_errors() {
        let toml = r#"
instruction = "Do the thing."
skeleton = "{exemplar}{instruction}\n{input}\n{sr_block}{nld_block}{cot_suffix}"
"#;
        let mut templates = BTreeMap::new();
        templates.insert(Task::Paws, parse_template(Task::Paws, toml).unwrap());
        let store = TemplateStore { templates };
        let spec = PromptSpec {
            task: Task::Paws,
            variant: Variant::Base,
            strategy: Strategy::OneShot,
            sr_kind: None,
        };
        assert!(matches!(
            render_prompt(&spec, &record(), &store),
            Err(PromptError::MissingExemplar(Task::Paws))
        ));
    }

    #[test]
    fn unknown_task_when_template_missing() {
        let store = TemplateStore {
            templates: BTreeMap::new(),
        };
        let spec = PromptSpec {
            task: Task::Wic,
            variant: Variant::Base,
            strategy: Strategy::Cot,
            sr_kind: None,
        };
        assert!(matches!(
            render_prompt(&spec, &record(), &store),
            Err(PromptError::UnknownTask(_))
        ));
    }
}

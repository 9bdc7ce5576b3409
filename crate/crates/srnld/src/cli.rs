//! The `srnld` command line: parse structures, render descriptions,
//! build prompts and SFT mixtures, run cached endpoint batches, and score
//! predictions.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 network
//! error. Diagnostics go to standard error; data goes to standard output
//! or `--out`.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::evalrun::{self, RunManifest};
use crate::gensr::{self, MixPlan};
use crate::metrics::{self, MetricName};
use crate::nld::{self, RelationDictionary, SrKind};
use crate::promptkit::{
    self, LabelCatalog, PromptSpec, RenderedPrompt, Strategy, Task, TaskRecord, TemplateStore,
    Variant, NO_ANSWER,
};
use crate::refine::{self, RefineError, RefineMode, RefinerConfig};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Network(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Network(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Network(m) => m,
        }
    }
}

fn refine_to_cli(e: RefineError) -> CliError {
    match e {
        RefineError::Config(m) => CliError::Usage(m),
        RefineError::EmptyDoc | RefineError::AllCandidatesEmpty => CliError::Data(e.to_string()),
        _ => CliError::Network(e.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "srnld",
    version,
    about = "Structured representations to natural-language descriptions, prompts, SFT mixtures, and scored runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one structure (AMR, PST, or FOL) and emit canonical JSON.
    Parse {
        /// Structure kind: amr, pst, or fol.
        #[arg(long, value_parser = SrKind::from_str)]
        kind: SrKind,
        /// Input file; standard input when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse one structure and emit its description document as JSON.
    Nld {
        #[arg(long, value_parser = SrKind::from_str)]
        kind: SrKind,
        /// Dictionary file; the bundled dictionary when absent.
        #[arg(long)]
        dict: Option<PathBuf>,
        /// Refinement mode: offline or endpoint. No refinement when absent.
        #[arg(long)]
        refine: Option<String>,
        /// Candidate generations for endpoint voting.
        #[arg(long, default_value_t = 3)]
        votes: u32,
        #[arg(long)]
        endpoint_url: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = 0.7)]
        temperature: f64,
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        #[arg(long, default_value_t = 3)]
        max_retries: u32,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render prompts for task records (JSONL in, JSONL out).
    Prompt {
        #[arg(long, value_parser = Task::from_str)]
        task: Task,
        /// base, sr, or sr_nld.
        #[arg(long, value_parser = Variant::from_str)]
        variant: Variant,
        /// cot or one_shot.
        #[arg(long, value_parser = Strategy::from_str)]
        strategy: Strategy,
        #[arg(long = "sr-kind", value_parser = SrKind::from_str)]
        sr_kind: Option<SrKind>,
        /// Template directory; bundled templates when absent.
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a Gen-SR mixture from task records (JSONL in, JSONL out).
    Gensr {
        /// Fraction of each task's records that get a structure block.
        #[arg(long)]
        ratio: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a prompt batch against an endpoint with caching.
    Run {
        /// Manifest JSON file.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the run summary JSON here (it always goes to stderr).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Score predictions against golds and emit a report JSON.
    Score {
        #[arg(long, value_parser = Task::from_str)]
        task: Task,
        /// auto, f1, bleu, or em.
        #[arg(long, default_value = "auto")]
        metric: String,
        /// Predictions JSONL: {"id","pred"} or responses with raw_output.
        #[arg(long)]
        pred: PathBuf,
        /// Gold JSONL: records with "id" and "gold".
        #[arg(long)]
        gold: PathBuf,
        /// Label file; the bundled labels when absent.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse `std::env::args` and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Parse { kind, input, out } => cmd_parse(kind, input.as_deref(), out.as_deref()),
        Command::Nld {
            kind,
            dict,
            refine,
            votes,
            endpoint_url,
            model,
            temperature,
            timeout,
            max_retries,
            input,
            out,
        } => cmd_nld(
            kind,
            dict.as_deref(),
            refine.as_deref(),
            votes,
            endpoint_url,
            model,
            temperature,
            timeout,
            max_retries,
            input.as_deref(),
            out.as_deref(),
        ),
        Command::Prompt {
            task,
            variant,
            strategy,
            sr_kind,
            templates,
            input,
            out,
        } => cmd_prompt(
            task,
            variant,
            strategy,
            sr_kind,
            templates.as_deref(),
            input.as_deref(),
            out.as_deref(),
        ),
        Command::Gensr {
            ratio,
            seed,
            templates,
            input,
            out,
        } => cmd_gensr(
            ratio,
            seed,
            templates.as_deref(),
            input.as_deref(),
            out.as_deref(),
        ),
        Command::Run {
            manifest,
            input,
            out,
            summary,
        } => cmd_run(
            &manifest,
            input.as_deref(),
            out.as_deref(),
            summary.as_deref(),
        ),
        Command::Score {
            task,
            metric,
            pred,
            gold,
            labels,
            out,
        } => cmd_score(
            task,
            &metric,
            &pred,
            &gold,
            labels.as_deref(),
            out.as_deref(),
        ),
    }
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Data(format!("cannot read standard input: {e}")))?;
            Ok(buf)
        }
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_parse(kind: SrKind, input: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let text = read_input(input)?;
    let json = match kind {
        SrKind::Amr => crate::amr::parse_penman(&text)
            .map_err(|e| CliError::Data(format!("AMR: {e}")))?
            .to_json(),
        SrKind::Pst => crate::pst::parse_brackets(&text)
            .map_err(|e| CliError::Data(format!("PST: {e}")))?
            .to_json(),
        SrKind::Fol => crate::fol::parse_fol(&text)
            .map_err(|e| CliError::Data(format!("FOL: {e}")))?
            .to_json(),
    };
    write_output(out, &format!("{json}\n"))
}

fn load_dictionary(kind: SrKind, dict: Option<&Path>) -> Result<RelationDictionary, CliError> {
    match dict {
        Some(path) => {
            RelationDictionary::load_file(kind, path).map_err(|e| CliError::Data(e.to_string()))
        }
        None => Ok(RelationDictionary::bundled(kind)),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_nld(
    kind: SrKind,
    dict: Option<&Path>,
    refine_mode: Option<&str>,
    votes: u32,
    endpoint_url: Option<String>,
    model: Option<String>,
    temperature: f64,
    timeout: u64,
    max_retries: u32,
    input: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let text = read_input(input)?;
    let dictionary = load_dictionary(kind, dict)?;
    let mut doc =
        nld::to_nld(&text, kind, &dictionary).map_err(|e| CliError::Data(e.to_string()))?;

    match refine_mode {
        None => {}
        Some("offline") => {
            let refined = refine::refine_offline(&doc.sentences).map_err(refine_to_cli)?;
            doc.refined = Some(refined);
        }
        Some("endpoint") => {
            let config = RefinerConfig {
                mode: RefineMode::Endpoint,
                votes,
                endpoint_url,
                model_name: model,
                temperature,
                timeout_secs: timeout,
                max_retries,
                ..RefinerConfig::default()
            };
            config.validate().map_err(refine_to_cli)?;
            let template = refine::bundled_refine_template(kind);
            let prompt = refine::render_refine_prompt(template, &doc.sentences);
            let refined = refine::refine_with_votes(&doc.sentences, &config, || {
                refine::endpoint_generate(&prompt, &config)
            })
            .map_err(refine_to_cli)?;
            doc.refined = Some(refined);
        }
        Some(other) => {
            return Err(CliError::Usage(format!(
                "unknown refine mode `{other}` (expected offline or endpoint)"
            )))
        }
    }
    write_output(out, &format!("{}\n", doc.to_json()))
}

fn read_records(content: &str) -> Result<Vec<TaskRecord>, CliError> {
    content
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| CliError::Data(format!("records line {}: {e}", i + 1)))
        })
        .collect()
}

fn load_templates(dir: Option<&Path>) -> Result<TemplateStore, CliError> {
    match dir {
        Some(path) => TemplateStore::from_dir(path).map_err(|e| CliError::Data(e.to_string())),
        None => Ok(TemplateStore::bundled()),
    }
}

fn cmd_prompt(
    task: Task,
    variant: Variant,
    strategy: Strategy,
    sr_kind: Option<SrKind>,
    templates: Option<&Path>,
    input: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let store = load_templates(templates)?;
    let spec = PromptSpec {
        task,
        variant,
        strategy,
        sr_kind,
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let records = read_records(&read_input(input)?)?;
    let mut lines = String::new();
    for record in &records {
        let prompt = promptkit::render_prompt(&spec, record, &store)
            .map_err(|e| CliError::Data(e.to_string()))?;
        let row = RenderedPrompt {
            id: record.id.clone(),
            prompt,
            variant,
            strategy,
            sr_kind,
        };
        lines.push_str(&serde_json::to_string(&row).expect("row serializes"));
        lines.push('\n');
    }
    write_output(out, &lines)
}

fn cmd_gensr(
    ratio: f64,
    seed: u64,
    templates: Option<&Path>,
    input: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let store = load_templates(templates)?;
    let records = read_records(&read_input(input)?)?;
    let plan = MixPlan::new(ratio, seed);
    let mixture =
        gensr::build_mixture(&records, &plan, &store).map_err(|e| CliError::Data(e.to_string()))?;
    write_output(out, &gensr::to_jsonl(&mixture))
}

fn cmd_run(
    manifest_path: &Path,
    input: Option<&Path>,
    out: Option<&Path>,
    summary_path: Option<&Path>,
) -> Result<(), CliError> {
    let manifest_text = std::fs::read_to_string(manifest_path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", manifest_path.display())))?;
    let manifest: RunManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| CliError::Data(format!("manifest: {e}")))?;
    let prompts = evalrun::read_prompts_jsonl(&read_input(input)?)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let (rows, summary) =
        evalrun::run_batch(&prompts, &manifest).map_err(|e| CliError::Data(e.to_string()))?;

    write_output(out, &evalrun::responses_to_jsonl(&rows))?;
    let summary_json = serde_json::to_string(&summary).expect("summary serializes");
    eprintln!("{summary_json}");
    if let Some(path) = summary_path {
        std::fs::write(path, format!("{summary_json}\n"))
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    }
    // Per-row failures are isolated, but when every attempted endpoint
    // call failed the endpoint itself is down: signal that distinctly.
    if summary.endpoint_calls > 0 && summary.failures == summary.endpoint_calls {
        return Err(CliError::Network(format!(
            "all {} endpoint calls failed",
            summary.failures
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
struct PredRow {
    id: String,
    #[serde(default)]
    pred: Option<String>,
    #[serde(default)]
    raw_output: Option<String>,
}

#[derive(Deserialize)]
struct GoldRow {
    id: String,
    gold: Option<String>,
}

fn cmd_score(
    task: Task,
    metric: &str,
    pred_path: &Path,
    gold_path: &Path,
    labels_path: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let labels = match labels_path {
        Some(p) => LabelCatalog::from_file(p).map_err(CliError::Data)?,
        None => LabelCatalog::bundled(),
    };
    let metric_name = match metric.to_ascii_lowercase().as_str() {
        "auto" => metrics::metric_for(task),
        "f1" => MetricName::F1,
        "bleu" => MetricName::BLEU,
        "em" => MetricName::EM,
        other => {
            return Err(CliError::Usage(format!(
                "unknown metric `{other}` (expected auto, f1, bleu, or em)"
            )))
        }
    };

    let pred_content = std::fs::read_to_string(pred_path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", pred_path.display())))?;
    let mut pred_by_id = std::collections::BTreeMap::new();
    for (i, line) in pred_content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: PredRow = serde_json::from_str(line)
            .map_err(|e| CliError::Data(format!("predictions line {}: {e}", i + 1)))?;
        let value = match (row.pred, row.raw_output) {
            (Some(p), _) => p,
            (None, Some(raw)) => promptkit::extract_answer(task, &raw, &labels),
            (None, None) => NO_ANSWER.to_string(),
        };
        pred_by_id.insert(row.id, value);
    }

    let gold_content = std::fs::read_to_string(gold_path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", gold_path.display())))?;
    let mut preds = Vec::new();
    let mut golds = Vec::new();
    for (i, line) in gold_content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: GoldRow = serde_json::from_str(line)
            .map_err(|e| CliError::Data(format!("golds line {}: {e}", i + 1)))?;
        let gold = row
            .gold
            .ok_or_else(|| CliError::Data(format!("golds line {}: missing gold", i + 1)))?;
        preds.push(
            pred_by_id
                .get(&row.id)
                .cloned()
                .unwrap_or_else(|| NO_ANSWER.to_string()),
        );
        golds.push(gold);
    }

    let report = metrics::score_with_metric(task, metric_name, &preds, &golds, &labels)
        .map_err(|e| CliError::Data(e.to_string()))?;
    write_output(out, &format!("{}\n", report.to_json()))
}

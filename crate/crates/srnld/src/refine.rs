//! Description polishing: a deterministic offline refiner, a
//! chat-completion endpoint client, and multi-generation voting that picks
//! the medoid candidate.
//!
//! The voting rule: generate `votes` candidates, tokenize each on
//! whitespace, and return the candidate with the highest mean Jaccard
//! similarity to the others. Ties go to the earliest generation. Voting
//! with an endpoint damps per-generation hallucinations; with a
//! deterministic generator it is itself deterministic.

use std::time::Duration;

use serde_json::json;
use thiserror::Error;

use crate::nld::SrKind;

/// Bearer token read from the environment for endpoint requests.
pub const TOKEN_ENV: &str = "SRNLD_API_TOKEN";

#[derive(Debug, Clone, Error)]
pub enum RefineError {
    #[error("nothing to refine: the sentence list is empty")]
    EmptyDoc,
    #[error("generator failed after {attempts} attempts: {last}")]
    GeneratorFailure { attempts: u32, last: String },
    #[error("every candidate was empty")]
    AllCandidatesEmpty,
    #[error("request timed out")]
    Timeout,
    #[error("endpoint returned HTTP {0}")]
    HttpStatus(u16),
    #[error("malformed endpoint response: {0}")]
    MalformedResponse(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    Offline,
    Endpoint,
}

/// Settings for refinement.
///
/// `votes`, `temperature`, and the medoid selection rule are toolkit
/// defaults, not fixed constants; change them per run. The backoff for
/// endpoint retries starts at `backoff_base_ms` (default one second) and
/// doubles per attempt.
#[derive(Debug, Clone)]
pub struct RefinerConfig {
    pub mode: RefineMode,
    pub votes: u32,
    pub endpoint_url: Option<String>,
    pub model_name: Option<String>,
    pub temperature: f64,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
}

impl Default for RefinerConfig {
    fn default() -> Self {
        RefinerConfig {
            mode: RefineMode::Offline,
            votes: 3,
            endpoint_url: None,
            model_name: None,
            temperature: 0.7,
            timeout_secs: 30,
            max_retries: 3,
            backoff_base_ms: 1000,
        }
    }
}

impl RefinerConfig {
    pub fn validate(&self) -> Result<(), RefineError> {
        if self.votes < 1 {
            return Err(RefineError::Config("votes must be at least 1".into()));
        }
        if self.mode == RefineMode::Endpoint
            && (self.endpoint_url.is_none() || self.model_name.is_none())
        {
            return Err(RefineError::Config(
                "endpoint mode needs endpoint_url and model_name".into(),
            ));
        }
        Ok(())
    }
}

/// Deterministic refinement without a model.
///
/// Sentences are joined with single spaces. Consecutive sentences that
/// share a subject head word (the token right before the first "is", or
/// the first token when there is none) are merged with "and also", the
/// continuation decapitalized:
///
/// `["The agent of see-01 is person.", "The patient of see-01 is dog."]`
/// becomes `"The agent of see-01 is person and also the patient of see-01
/// is dog."`.
pub fn refine_offline(sentences: &[String]) -> Result<String, RefineError> {
    if sentences.is_empty() {
        return Err(RefineError::EmptyDoc);
    }
    let mut groups: Vec<String> = Vec::new();
    let mut previous_head: Option<String> = None;
    for sentence in sentences {
        let head = subject_head(sentence);
        let body = sentence.strip_suffix('.').unwrap_or(sentence).to_string();
        let continues = !head.is_empty() && previous_head.as_deref() == Some(head.as_str());
        match groups.last_mut() {
            Some(current) if continues => {
                current.push_str(" and also ");
                current.push_str(&decapitalize(&body));
            }
            _ => groups.push(body),
        }
        previous_head = Some(head);
    }
    Ok(groups
        .into_iter()
        .map(|g| format!("{g}."))
        .collect::<Vec<_>>()
        .join(" "))
}

fn subject_head(sentence: &str) -> String {
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    for (i, tok) in tokens.iter().enumerate() {
        if *tok == "is" && i > 0 {
            return tokens[i - 1].to_string();
        }
    }
    tokens.first().map(|t| t.to_string()).unwrap_or_default()
}

fn decapitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_ascii_lowercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

/// Run the generator `votes` times (each call retried up to
/// `max_retries`) and return the medoid candidate.
pub fn refine_with_votes<F>(
    sentences: &[String],
    config: &RefinerConfig,
    mut generator: F,
) -> Result<String, RefineError>
where
    F: FnMut() -> Result<String, RefineError>,
{
    if sentences.is_empty() {
        return Err(RefineError::EmptyDoc);
    }
    config.validate()?;

    let mut candidates = Vec::with_capacity(config.votes as usize);
    for _ in 0..config.votes {
        let attempts = config.max_retries + 1;
        let mut last = String::new();
        let mut produced = None;
        for _ in 0..attempts {
            match generator() {
                Ok(c) => {
                    produced = Some(c);
                    break;
                }
                Err(e) => last = e.to_string(),
            }
        }
        match produced {
            Some(c) => candidates.push(c),
            None => return Err(RefineError::GeneratorFailure { attempts, last }),
        }
    }
    select_medoid(&candidates)
}

/// Index and content of the medoid: the candidate maximizing mean
/// token-set Jaccard similarity to the other candidates, earliest
/// generation winning ties. Empty candidates never win; if all are empty
/// the vote fails.
fn select_medoid(candidates: &[String]) -> Result<String, RefineError> {
    let live: Vec<(usize, Vec<&str>)> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.trim().is_empty())
        .map(|(i, c)| (i, c.split_whitespace().collect()))
        .collect();
    if live.is_empty() {
        return Err(RefineError::AllCandidatesEmpty);
    }
    if live.len() == 1 {
        return Ok(candidates[live[0].0].clone());
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, tokens) in &live {
        let mut total = 0.0;
        for (j, other) in &live {
            if i != j {
                total += jaccard(tokens, other);
            }
        }
        let mean = total / (live.len() - 1) as f64;
        let better = match best {
            None => true,
            Some((_, best_mean)) => mean > best_mean,
        };
        if better {
            best = Some((*i, mean));
        }
    }
    Ok(candidates[best.expect("at least one live candidate").0].clone())
}

fn jaccard(a: &[&str], b: &[&str]) -> f64 {
    use std::collections::BTreeSet;
    let sa: BTreeSet<&str> = a.iter().copied().collect();
    let sb: BTreeSet<&str> = b.iter().copied().collect();
    if sa.is_empty() && sb.is_empty() {
        return 1.0;
    }
    let inter = sa.intersection(&sb).count() as f64;
    let union = sa.union(&sb).count() as f64;
    inter / union
}

/// The refinement prompt template shipped for the given structure kind.
/// Each template carries a `{sentences}` slot.
pub fn bundled_refine_template(kind: SrKind) -> &'static str {
    match kind {
        SrKind::Amr => include_str!("../data/templates/refine_amr.txt"),
        SrKind::Pst => include_str!("../data/templates/refine_pst.txt"),
        SrKind::Fol => include_str!("../data/templates/refine_fol.txt"),
    }
}

/// Fill `{sentences}` with the sentence list, one per line.
pub fn render_refine_prompt(template: &str, sentences: &[String]) -> String {
    template.replace("{sentences}", &sentences.join("\n"))
}

/// One chat-completion call with retry.
///
/// Sends `{model, messages, temperature}` to `endpoint_url` and extracts
/// `choices[0].message.content`. Transport failures, 429, and 5xx are
/// retried with exponential backoff (base `backoff_base_ms`, factor 2) up
/// to `max_retries`; other statuses fail immediately. A bearer token is
/// attached from `SRNLD_API_TOKEN` when set.
pub fn endpoint_generate(prompt: &str, config: &RefinerConfig) -> Result<String, RefineError> {
    let url = config
        .endpoint_url
        .as_deref()
        .ok_or_else(|| RefineError::Config("endpoint_url is not set".into()))?;
    let model = config
        .model_name
        .as_deref()
        .ok_or_else(|| RefineError::Config("model_name is not set".into()))?;

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
        .http_status_as_error(false)
        .build()
        .into();
    let body = json!({
        "model": model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": config.temperature,
    });
    let token = std::env::var(TOKEN_ENV).ok();

    let mut attempt: u32 = 0;
    loop {
        let outcome = send_once(&agent, url, &body, token.as_deref());
        match outcome {
            Ok(content) => return Ok(content),
            Err(Attempt::Fatal(e)) => return Err(e),
            Err(Attempt::Retryable(e)) => {
                if attempt >= config.max_retries {
                    return Err(e);
                }
                let delay = config.backoff_base_ms.saturating_mul(1 << attempt.min(16));
                std::thread::sleep(Duration::from_millis(delay));
                attempt += 1;
            }
        }
    }
}

enum Attempt {
    Retryable(RefineError),
    Fatal(RefineError),
}

fn send_once(
    agent: &ureq::Agent,
    url: &str,
    body: &serde_json::Value,
    token: Option<&str>,
) -> Result<String, Attempt> {
    let mut request = agent.post(url);
    if let Some(t) = token {
        request = request.header("Authorization", &format!("Bearer {t}"));
    }
    let mut response = match request.send_json(body) {
        Ok(r) => r,
        Err(ureq::Error::Timeout(_)) => return Err(Attempt::Retryable(RefineError::Timeout)),
        Err(e) => return Err(Attempt::Retryable(RefineError::Transport(e.to_string()))),
    };
    let status = response.status().as_u16();
    if status == 429 || (500..=599).contains(&status) {
        return Err(Attempt::Retryable(RefineError::HttpStatus(status)));
    }
    if !(200..=299).contains(&status) {
        return Err(Attempt::Fatal(RefineError::HttpStatus(status)));
    }
    let value: serde_json::Value = response
        .body_mut()
        .read_json()
        .map_err(|e| Attempt::Fatal(RefineError::MalformedResponse(e.to_string())))?;
    value
        .pointer("/choices/0/message/content")
        .and_then(|v| v.as_str())
        .map(|s| s.to_string())
        .ok_or_else(|| {
            Attempt::Fatal(RefineError::MalformedResponse(
                "no choices[0].message.content in response".into(),
            ))
        })
}

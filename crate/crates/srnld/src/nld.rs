//! Rule-based natural-language descriptions of structured representations.
//!
//! Each structure kind is rendered through an editable
//! [`RelationDictionary`] loaded from a tab-separated data file. The
//! dictionary file is hashed on load and the hash is stamped into every
//! [`NldDoc`], so any description can be traced back to the exact mapping
//! that produced it.
//!
//! Rendering conventions:
//!
//! - AMR: one sentence per relation triplet, in depth-first triplet order,
//!   after variables are replaced by their concepts. Inverse relations
//!   (`:R-of`) reuse the `:R` template with subject and object swapped.
//!   A single-node graph gets one sentence naming its concept.
//! - PST: one sentence per tree node, in pre-order. Internal nodes list
//!   their children ("The noun phrase consists of a determiner and a
//!   singular noun."); leaves describe their token ("The word 'dog' is a
//!   singular noun.").
//! - FOL: one composed sentence for the whole formula, plus an inventory
//!   sentence when free variables exist.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::amr::{self, Triplet};
use crate::fol::{self, FolExpr, Quantifier, Term};
use crate::pst::{self, PstLinear, PstTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NldError {
    #[error("AMR: {0}")]
    Amr(#[from] amr::AmrError),
    #[error("PST: {0}")]
    Pst(#[from] pst::PstError),
    #[error("FOL: {0}")]
    Fol(#[from] fol::FolError),
    #[error("variable `{0}` has no :instance triplet")]
    MissingInstance(String),
    #[error("dictionary is for {dict_kind} but the input is {input_kind}")]
    KindMismatch {
        dict_kind: SrKind,
        input_kind: SrKind,
    },
    #[error("dictionary line {line}: {msg}")]
    BadDictionary { line: usize, msg: String },
}

/// The three structured-representation kinds this toolkit understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SrKind {
    Amr,
    Pst,
    Fol,
}

impl SrKind {
    pub const ALL: [SrKind; 3] = [SrKind::Amr, SrKind::Pst, SrKind::Fol];

    pub fn name(&self) -> &'static str {
        match self {
            SrKind::Amr => "AMR",
            SrKind::Pst => "PST",
            SrKind::Fol => "FOL",
        }
    }
}

impl fmt::Display for SrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SrKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "amr" => Ok(SrKind::Amr),
            "pst" => Ok(SrKind::Pst),
            "fol" => Ok(SrKind::Fol),
            other => Err(format!(
                "unknown structure kind `{other}` (expected amr, pst, or fol)"
            )),
        }
    }
}

const DEFAULT_KEY: &str = "__default__";
const BUILTIN_DEFAULT: &str = "{subj} has relation '{rel}' to {obj}.";

/// Key-to-template mapping loaded from a data file.
///
/// File format: one entry per line, `"key"<TAB>"value"`, `#` comment
/// lines and blank lines ignored. The quotes around key and value are
/// optional. The reserved key `__default__` supplies the template for
/// unmapped AMR relations (placeholders `{subj}`, `{rel}`, `{obj}`).
#[derive(Debug, Clone)]
pub struct RelationDictionary {
    pub kind: SrKind,
    pub entries: BTreeMap<String, String>,
    pub default_template: String,
    hash: String,
}

impl RelationDictionary {
    pub fn load_str(kind: SrKind, content: &str) -> Result<Self, NldError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in content.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| NldError::BadDictionary {
                    line: idx + 1,
                    msg: "expected `key<TAB>value`".into(),
                })?;
            let key = unquote(key.trim());
            let value = unquote(value.trim());
            if key.is_empty() {
                return Err(NldError::BadDictionary {
                    line: idx + 1,
                    msg: "empty key".into(),
                });
            }
            entries.insert(key, value);
        }
        let default_template = entries
            .remove(DEFAULT_KEY)
            .unwrap_or_else(|| BUILTIN_DEFAULT.to_string());

        if kind == SrKind::Amr {
            for (key, value) in &entries {
                if !value.contains("{subj}") || !value.contains("{obj}") {
                    return Err(NldError::BadDictionary {
                        line: 0,
                        msg: format!("AMR template for `{key}` must mention {{subj}} and {{obj}}"),
                    });
                }
            }
            if !default_template.contains("{subj}") || !default_template.contains("{obj}") {
                return Err(NldError::BadDictionary {
                    line: 0,
                    msg: "the AMR default template must mention {subj} and {obj}".into(),
                });
            }
        }
        if kind == SrKind::Fol {
            for (key, value) in &entries {
                if !value.contains("{0}") {
                    return Err(NldError::BadDictionary {
                        line: 0,
                        msg: format!("FOL template for `{key}` must mention {{0}}"),
                    });
                }
            }
        }

        let hash = hex::encode(Sha256::digest(content.as_bytes()));
        Ok(RelationDictionary {
            kind,
            entries,
            default_template,
            hash,
        })
    }

    pub fn load_file(kind: SrKind, path: &Path) -> Result<Self, NldError> {
        let content = std::fs::read_to_string(path).map_err(|e| NldError::BadDictionary {
            line: 0,
            msg: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::load_str(kind, &content)
    }

    /// The dictionary shipped with this crate for the given kind.
    pub fn bundled(kind: SrKind) -> Self {
        let content = match kind {
            SrKind::Amr => include_str!("../data/amr_dictionary.tsv"),
            SrKind::Pst => include_str!("../data/pst_dictionary.tsv"),
            SrKind::Fol => include_str!("../data/fol_dictionary.tsv"),
        };
        Self::load_str(kind, content).expect("bundled dictionary is well-formed")
    }

    /// Hex SHA-256 of the source file, recorded in every output document.
    pub fn hash(&self) -> &str {
        &self.hash
    }
}

fn unquote(s: &str) -> String {
    if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
        s[1..s.len() - 1].to_string()
    } else {
        s.to_string()
    }
}

/// Which input keys hit a dictionary entry and which fell back to the
/// default rendering. Every relation label, tag, or predicate in the
/// input shows up in exactly one of the two maps.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoverageLog {
    pub hits: BTreeMap<String, usize>,
    pub fallbacks: BTreeMap<String, usize>,
}

impl CoverageLog {
    fn hit(&mut self, key: &str) {
        *self.hits.entry(key.to_string()).or_insert(0) += 1;
    }

    fn fallback(&mut self, key: &str) {
        *self.fallbacks.entry(key.to_string()).or_insert(0) += 1;
    }

    pub fn accounts_for(&self, key: &str) -> bool {
        self.hits.contains_key(key) || self.fallbacks.contains_key(key)
    }
}

/// Ordered description sentences for one structure, before refinement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NldDoc {
    pub kind: SrKind,
    pub sentences: Vec<String>,
    pub refined: Option<String>,
    pub dict_hash: String,
}

impl NldDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("document serializes")
    }
}

/// Replace variables with their concepts using the `:instance` triplets,
/// drop the `:instance` triplets, and keep everything else in order.
///
/// When several variables share a concept, later ones are shown as
/// `concept (2)`, `concept (3)`, ... in first-appearance order. Literal
/// objects pass through unchanged.
pub fn instantiate_identifiers(triplets: &[Triplet]) -> Result<Vec<Triplet>, NldError> {
    let mut display: BTreeMap<String, String> = BTreeMap::new();
    let mut concept_uses: BTreeMap<String, usize> = BTreeMap::new();
    for t in triplets.iter().filter(|t| t.is_instance()) {
        if display.contains_key(&t.subject) {
            continue;
        }
        let n = concept_uses.entry(t.object.clone()).or_insert(0);
        *n += 1;
        let name = if *n == 1 {
            t.object.clone()
        } else {
            format!("{} ({})", t.object, n)
        };
        display.insert(t.subject.clone(), name);
    }

    let mut out = Vec::new();
    for t in triplets.iter().filter(|t| !t.is_instance()) {
        let subject = display
            .get(&t.subject)
            .ok_or_else(|| NldError::MissingInstance(t.subject.clone()))?
            .clone();
        let object = display
            .get(&t.object)
            .cloned()
            .unwrap_or_else(|| t.object.clone());
        out.push(Triplet::new(subject, t.relation.clone(), object));
    }
    Ok(out)
}

/// One sentence per instantiated triplet, in order.
pub fn map_amr_triplets(triplets: &[Triplet], dict: &RelationDictionary) -> Vec<String> {
    let mut log = CoverageLog::default();
    map_amr_triplets_logged(triplets, dict, &mut log)
}

/// Like [`map_amr_triplets`], recording dictionary hits and fallbacks.
pub fn map_amr_triplets_logged(
    triplets: &[Triplet],
    dict: &RelationDictionary,
    log: &mut CoverageLog,
) -> Vec<String> {
    triplets
        .iter()
        .map(|t| {
            let obj = strip_literal_quotes(&t.object);
            let sentence = if let Some(template) = dict.entries.get(&t.relation) {
                log.hit(&t.relation);
                fill(template, &t.subject, &obj, &t.relation)
            } else if let Some(template) = t
                .relation
                .strip_suffix("-of")
                .and_then(|base| dict.entries.get(base))
            {
                // :R-of inverts :R, so the template slots swap.
                log.hit(&t.relation);
                fill(template, &obj, &t.subject, &t.relation)
            } else {
                log.fallback(&t.relation);
                fill(&dict.default_template, &t.subject, &obj, &t.relation)
            };
            ensure_period(sentence)
        })
        .collect()
}

fn fill(template: &str, subj: &str, obj: &str, relation: &str) -> String {
    template
        .replace("{subj}", subj)
        .replace("{obj}", obj)
        .replace("{rel}", relation.trim_start_matches(':'))
}

fn strip_literal_quotes(object: &str) -> String {
    if object.len() >= 2 && object.starts_with('"') && object.ends_with('"') {
        object[1..object.len() - 1]
            .replace("\\\"", "\"")
            .replace("\\\\", "\\")
    } else {
        object.to_string()
    }
}

fn ensure_period(mut s: String) -> String {
    if !s.ends_with('.') {
        s.push('.');
    }
    s
}

fn indefinite_article(phrase: &str) -> &'static str {
    match phrase.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a') | Some('e') | Some('i') | Some('o') | Some('u') => "an",
        _ => "a",
    }
}

fn with_article(phrase: &str) -> String {
    format!("{} {}", indefinite_article(phrase), phrase)
}

fn join_list(parts: &[String]) -> String {
    match parts {
        [] => String::new(),
        [only] => only.clone(),
        [head @ .., last] => format!("{} and {}", head.join(", "), last),
    }
}

/// One sentence per tree node, in linearization order.
pub fn pst_to_sentences(
    linear: &PstLinear,
    dict: &RelationDictionary,
) -> Result<Vec<String>, NldError> {
    let mut log = CoverageLog::default();
    pst_to_sentences_logged(linear, dict, &mut log)
}

/// Like [`pst_to_sentences`], recording dictionary hits and fallbacks.
pub fn pst_to_sentences_logged(
    linear: &PstLinear,
    dict: &RelationDictionary,
    log: &mut CoverageLog,
) -> Result<Vec<String>, NldError> {
    let tree = pst::from_linear(linear)?;
    let mut out = Vec::with_capacity(linear.sequence.len());
    describe_node(&tree, dict, log, &mut out);
    Ok(out)
}

fn describe_node(
    tree: &PstTree,
    dict: &RelationDictionary,
    log: &mut CoverageLog,
    out: &mut Vec<String>,
) {
    match tree {
        PstTree::Leaf { label, token } => {
            let desc = lookup_logged(dict, label, log);
            out.push(ensure_period(format!("The word '{token}' is {desc}")));
        }
        PstTree::Internal { label, children } => {
            let desc = lookup_logged(dict, label, log);
            let parts: Vec<String> = children
                .iter()
                .map(|child| {
                    let child_desc = dict
                        .entries
                        .get(child.label())
                        .cloned()
                        .unwrap_or_else(|| child.label().to_string());
                    match child {
                        // POS descriptions already carry their article.
                        PstTree::Leaf { .. } => child_desc,
                        PstTree::Internal { .. } => with_article(&child_desc),
                    }
                })
                .collect();
            out.push(ensure_period(format!(
                "The {desc} consists of {}",
                join_list(&parts)
            )));
            for child in children {
                describe_node(child, dict, log, out);
            }
        }
    }
}

fn lookup_logged(dict: &RelationDictionary, key: &str, log: &mut CoverageLog) -> String {
    match dict.entries.get(key) {
        Some(desc) => {
            log.hit(key);
            desc.clone()
        }
        None => {
            log.fallback(key);
            key.to_string()
        }
    }
}

/// The whole formula as one sentence, plus an inventory sentence when
/// free variables exist.
pub fn fol_to_sentences(expr: &FolExpr, dict: &RelationDictionary) -> Vec<String> {
    let mut log = CoverageLog::default();
    fol_to_sentences_logged(expr, dict, &mut log)
}

/// Like [`fol_to_sentences`], recording dictionary hits and fallbacks.
pub fn fol_to_sentences_logged(
    expr: &FolExpr,
    dict: &RelationDictionary,
    log: &mut CoverageLog,
) -> Vec<String> {
    let body = render_fol(expr, dict, log);
    let mut out = vec![ensure_period(capitalize_fixed_opening(body))];
    let free = expr.free_variables();
    if !free.is_empty() {
        let inventory = if free.len() == 1 {
            format!("The free variable is {}.", free[0])
        } else {
            format!("The free variables are {}.", join_list(&free))
        };
        out.push(inventory);
    }
    out
}

fn render_fol(expr: &FolExpr, dict: &RelationDictionary, log: &mut CoverageLog) -> String {
    match expr {
        FolExpr::Quantified {
            quantifier,
            variable,
            body,
        } => {
            let inner = render_fol(body, dict, log);
            match quantifier {
                Quantifier::Forall => format!("for every {variable}, {inner}"),
                Quantifier::Exists => format!("there exists {variable} such that {inner}"),
            }
        }
        FolExpr::Binary { op, left, right } => {
            let l = render_fol(left, dict, log);
            let r = render_fol(right, dict, log);
            match op {
                fol::BinOp::And => format!("{l} and {r}"),
                fol::BinOp::Or => format!("{l} or {r}"),
                fol::BinOp::Implies => format!("if {l} then {r}"),
            }
        }
        FolExpr::Not { inner } => {
            format!("it is not the case that {}", render_fol(inner, dict, log))
        }
        FolExpr::Atom { predicate, args } => render_atom(predicate, args, dict, log),
    }
}

fn render_atom(
    predicate: &str,
    args: &[Term],
    dict: &RelationDictionary,
    log: &mut CoverageLog,
) -> String {
    if let Some(template) = dict.entries.get(predicate) {
        log.hit(predicate);
        let mut s = template.clone();
        for (i, arg) in args.iter().enumerate() {
            s = s.replace(&format!("{{{i}}}"), arg.name());
        }
        return s;
    }
    log.fallback(predicate);
    let names: Vec<String> = args.iter().map(|a| a.name().to_string()).collect();
    if names.len() == 1 {
        format!("{} is {}", names[0], predicate)
    } else {
        format!(
            "{} holds between {} (in that order)",
            predicate,
            join_list(&names)
        )
    }
}

// Sentences opening with a connective or quantifier wording start with a
// capital; sentences opening with a term or predicate name are left alone
// so identifiers keep their spelling.
fn capitalize_fixed_opening(sentence: String) -> String {
    const FIXED: [&str; 4] = [
        "for every ",
        "there exists ",
        "it is not the case that ",
        "if ",
    ];
    if FIXED.iter().any(|p| sentence.starts_with(p)) {
        let mut chars = sentence.chars();
        match chars.next() {
            Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
            None => sentence,
        }
    } else {
        sentence
    }
}

/// Parse `sr_text` as `kind` and render its description document.
pub fn to_nld(sr_text: &str, kind: SrKind, dict: &RelationDictionary) -> Result<NldDoc, NldError> {
    to_nld_logged(sr_text, kind, dict).map(|(doc, _)| doc)
}

/// Like [`to_nld`], also returning the dictionary coverage log.
pub fn to_nld_logged(
    sr_text: &str,
    kind: SrKind,
    dict: &RelationDictionary,
) -> Result<(NldDoc, CoverageLog), NldError> {
    if dict.kind != kind {
        return Err(NldError::KindMismatch {
            dict_kind: dict.kind,
            input_kind: kind,
        });
    }
    let mut log = CoverageLog::default();
    let sentences = match kind {
        SrKind::Amr => {
            let graph = amr::parse_penman(sr_text)?;
            let triplets = amr::to_triplets(&graph);
            let relations = instantiate_identifiers(&triplets)?;
            if relations.is_empty() {
                let concept = graph
                    .nodes
                    .get(&graph.root)
                    .map(String::as_str)
                    .unwrap_or_default();
                vec![format!("The graph describes {}.", with_article(concept))]
            } else {
                map_amr_triplets_logged(&relations, dict, &mut log)
            }
        }
        SrKind::Pst => {
            let tree = pst::parse_brackets(sr_text)?;
            pst_to_sentences_logged(&pst::dfs_linearize(&tree), dict, &mut log)?
        }
        SrKind::Fol => {
            let expr = fol::parse_fol(sr_text)?;
            fol_to_sentences_logged(&expr, dict, &mut log)
        }
    };
    Ok((
        NldDoc {
            kind,
            sentences,
            refined: None,
            dict_hash: dict.hash.clone(),
        },
        log,
    ))
}

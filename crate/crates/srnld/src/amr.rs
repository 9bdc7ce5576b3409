//! PENMAN-notation AMR graphs: parsing, validation, serialization, and
//! decomposition into `(subject, relation, object)` triplets.
//!
//! The supported PENMAN subset covers node declarations `(v / concept)`,
//! relation edges `:role target`, string literals, numeric literals, bare
//! symbol constants (for example `-` as a polarity value), re-entrant
//! bare-variable references, and `#`-prefixed comment lines. Alignment
//! markers (`~e.4` and similar suffixes) are stripped silently. Inverse
//! relations such as `:ARG0-of` are kept verbatim; no de-inversion happens
//! here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Errors raised while parsing or validating PENMAN text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmrError {
    #[error("empty input: no graph found")]
    EmptyInput,
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("variable `{0}` declared with `/` more than once")]
    DuplicateVariable(String),
    #[error("variable `{0}` referenced but never declared")]
    DanglingReference(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// The target of an AMR edge.
///
/// `Text` carries the literal without its surrounding quotes; the quotes
/// are reattached by [`AmrTarget::surface`]. Numbers are kept as their
/// source spelling so that serialization is byte-stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmrTarget {
    /// Reference to a declared variable.
    Var(String),
    /// Quoted string literal, stored unquoted.
    Text(String),
    /// Numeric literal, verbatim spelling.
    Number(String),
    /// Unquoted constant that is neither a number nor a declared variable.
    Symbol(String),
}

impl AmrTarget {
    /// PENMAN surface form of the target. String literals are re-quoted.
    pub fn surface(&self) -> String {
        match self {
            AmrTarget::Var(v) => v.clone(),
            AmrTarget::Text(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
            AmrTarget::Number(n) => n.clone(),
            AmrTarget::Symbol(s) => s.clone(),
        }
    }
}

impl fmt::Display for AmrTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.surface())
    }
}

/// One labeled edge of an AMR graph, in source-text order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrEdge {
    pub source: String,
    pub relation: String,
    pub target: AmrTarget,
}

/// A rooted, labeled AMR graph.
///
/// Invariants (checked by [`AmrGraph::validate`], guaranteed for parser
/// output): `root` is a key of `nodes`, every edge source and every
/// variable target is a key of `nodes`, every node is reachable from the
/// root following edge direction, and variable names match
/// `[a-z][a-z0-9]*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrGraph {
    pub root: String,
    pub nodes: BTreeMap<String, String>,
    pub edges: Vec<AmrEdge>,
}

/// A `(subject, relation, object)` decomposition unit.
///
/// `relation` keeps its leading `:`; instance triplets use the fixed
/// relation `:instance`. Objects carry PENMAN surface form, so string
/// literals keep their quotes and are distinguishable from variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triplet {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Triplet {
    pub fn new(
        subject: impl Into<String>,
        relation: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Triplet {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
        }
    }

    pub fn is_instance(&self) -> bool {
        self.relation == ":instance"
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.relation, self.object)
    }
}

const INSTANCE: &str = ":instance";

fn is_valid_var(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

fn is_number(token: &str) -> bool {
    let rest = token.strip_prefix('-').unwrap_or(token);
    if rest.is_empty() {
        return false;
    }
    let mut seen_digit = false;
    let mut seen_dot = false;
    let mut seen_exp = false;
    let bytes = rest.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            '0'..='9' => seen_digit = true,
            '.' if !seen_dot && !seen_exp => seen_dot = true,
            'e' | 'E' if seen_digit && !seen_exp => {
                seen_exp = true;
                if i + 1 < bytes.len() && (bytes[i + 1] == b'+' || bytes[i + 1] == b'-') {
                    i += 1;
                }
                // exponent must contain at least one digit
                if i + 1 >= bytes.len() {
                    return false;
                }
                seen_digit = false;
            }
            _ => return false,
        }
        i += 1;
    }
    seen_digit
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    Slash,
    Str(String),
    Atom(String),
}

struct Lexer {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Lexer {
    fn new(text: &str) -> Result<Self, AmrError> {
        // Comment lines start with `#` as their first non-blank character.
        let cleaned: String = text
            .lines()
            .map(|line| {
                if line.trim_start().starts_with('#') {
                    ""
                } else {
                    line
                }
            })
            .collect::<Vec<_>>()
            .join("\n");

        let chars: Vec<(usize, char)> = cleaned.char_indices().collect();
        let is_delimiter = |c: char| c == '(' || c == ')' || c == '/' || c.is_whitespace();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            match c {
                c if c.is_whitespace() => i += 1,
                '(' => {
                    tokens.push((pos, Token::LParen));
                    i += 1;
                }
                ')' => {
                    tokens.push((pos, Token::RParen));
                    i += 1;
                }
                '/' => {
                    tokens.push((pos, Token::Slash));
                    i += 1;
                }
                '"' => {
                    i += 1;
                    let mut s = String::new();
                    let mut closed = false;
                    while i < chars.len() {
                        match chars[i].1 {
                            '\\' if i + 1 < chars.len() => {
                                s.push(chars[i + 1].1);
                                i += 2;
                            }
                            '"' => {
                                closed = true;
                                i += 1;
                                break;
                            }
                            ch => {
                                s.push(ch);
                                i += 1;
                            }
                        }
                    }
                    if !closed {
                        return Err(AmrError::Syntax {
                            pos,
                            msg: "unterminated string literal".into(),
                        });
                    }
                    // Alignment marker after the closing quote, e.g. "John"~e.1
                    if i < chars.len() && chars[i].1 == '~' {
                        while i < chars.len() && !is_delimiter(chars[i].1) {
                            i += 1;
                        }
                    }
                    tokens.push((pos, Token::Str(s)));
                }
                _ => {
                    while i < chars.len() && !is_delimiter(chars[i].1) && chars[i].1 != '"' {
                        i += 1;
                    }
                    let end = chars.get(i).map(|(p, _)| *p).unwrap_or(cleaned.len());
                    let mut atom = &cleaned[pos..end];
                    // Strip alignment suffix: dog~e.2 -> dog
                    if let Some(tilde) = atom.find('~') {
                        atom = &atom[..tilde];
                    }
                    if !atom.is_empty() {
                        tokens.push((pos, Token::Atom(atom.to_string())));
                    }
                }
            }
        }
        Ok(Lexer { tokens, pos: 0 })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|(p, _)| *p)
            .unwrap_or(0)
    }
}

/// Raw edge with an unclassified bare-atom target; resolved once all
/// declarations are known (re-entrant references may point forward).
enum RawTarget {
    Resolved(AmrTarget),
    Bare(String),
}

struct Parser {
    lexer: Lexer,
    nodes: BTreeMap<String, String>,
    order: Vec<String>,
    edges: Vec<(String, String, RawTarget)>,
}

impl Parser {
    fn parse_node(&mut self) -> Result<String, AmrError> {
        match self.lexer.next() {
            Some((_, Token::LParen)) => {}
            Some((pos, _)) => {
                return Err(AmrError::Syntax {
                    pos,
                    msg: "expected `(`".into(),
                })
            }
            None => return Err(AmrError::UnbalancedParens),
        }
        let (var_pos, var) = match self.lexer.next() {
            Some((p, Token::Atom(a))) => (p, a.to_lowercase()),
            Some((p, _)) => {
                return Err(AmrError::Syntax {
                    pos: p,
                    msg: "expected a variable name after `(`".into(),
                })
            }
            None => return Err(AmrError::UnbalancedParens),
        };
        if !is_valid_var(&var) {
            return Err(AmrError::Syntax {
                pos: var_pos,
                msg: format!("invalid variable name `{var}`"),
            });
        }
        match self.lexer.peek() {
            Some(Token::Slash) => {
                self.lexer.next();
            }
            // `(b)` or `(b :rel x)`: a parenthesized variable with no
            // `/ concept` declaration.
            _ => return Err(AmrError::DanglingReference(var)),
        }
        let concept = match self.lexer.next() {
            Some((_, Token::Atom(a))) => a,
            Some((p, _)) => {
                return Err(AmrError::Syntax {
                    pos: p,
                    msg: "expected a concept after `/`".into(),
                })
            }
            None => return Err(AmrError::UnbalancedParens),
        };
        if self.nodes.contains_key(&var) {
            return Err(AmrError::DuplicateVariable(var));
        }
        self.nodes.insert(var.clone(), concept);
        self.order.push(var.clone());

        loop {
            match self.lexer.peek() {
                Some(Token::RParen) => {
                    self.lexer.next();
                    return Ok(var);
                }
                Some(Token::Atom(a)) if a.starts_with(':') => {
                    let (rel_pos, rel) = match self.lexer.next() {
                        Some((p, Token::Atom(a))) => (p, a),
                        _ => unreachable!(),
                    };
                    if rel.len() < 2 {
                        return Err(AmrError::Syntax {
                            pos: rel_pos,
                            msg: "empty relation label".into(),
                        });
                    }
                    // Reserve the edge slot before recursing into the
                    // target so edges keep source-text order.
                    let slot = self.edges.len();
                    self.edges
                        .push((var.clone(), rel, RawTarget::Bare(String::new())));
                    let target = self.parse_target()?;
                    self.edges[slot].2 = target;
                }
                Some(_) => {
                    let pos = self.lexer.here();
                    return Err(AmrError::Syntax {
                        pos,
                        msg: "expected a `:role` or `)`".into(),
                    });
                }
                None => return Err(AmrError::UnbalancedParens),
            }
        }
    }

    fn parse_target(&mut self) -> Result<RawTarget, AmrError> {
        match self.lexer.peek() {
            Some(Token::LParen) => {
                let child = self.parse_node()?;
                Ok(RawTarget::Resolved(AmrTarget::Var(child)))
            }
            Some(Token::Str(_)) => match self.lexer.next() {
                Some((_, Token::Str(s))) => Ok(RawTarget::Resolved(AmrTarget::Text(s))),
                _ => unreachable!(),
            },
            Some(Token::Atom(_)) => match self.lexer.next() {
                Some((_, Token::Atom(a))) => Ok(RawTarget::Bare(a)),
                _ => unreachable!(),
            },
            Some(_) => {
                let pos = self.lexer.here();
                Err(AmrError::Syntax {
                    pos,
                    msg: "expected an edge target".into(),
                })
            }
            None => Err(AmrError::UnbalancedParens),
        }
    }
}

/// Parse PENMAN text into an [`AmrGraph`].
///
/// Bare atom targets are classified after the full text is read, so a
/// re-entrant reference may appear before its declaration. A bare atom
/// that is declared somewhere becomes a variable reference; otherwise it
/// is a numeric literal or a symbol constant.
pub fn parse_penman(text: &str) -> Result<AmrGraph, AmrError> {
    let lexer = Lexer::new(text)?;
    if lexer.tokens.is_empty() {
        return Err(AmrError::EmptyInput);
    }
    let mut parser = Parser {
        lexer,
        nodes: BTreeMap::new(),
        order: Vec::new(),
        edges: Vec::new(),
    };
    let root = parser.parse_node()?;
    if let Some((pos, tok)) = parser.lexer.next() {
        return match tok {
            Token::RParen => Err(AmrError::UnbalancedParens),
            _ => Err(AmrError::Syntax {
                pos,
                msg: "unexpected content after the closing `)`".into(),
            }),
        };
    }

    let edges = parser
        .edges
        .into_iter()
        .map(|(source, relation, raw)| {
            let target = match raw {
                RawTarget::Resolved(t) => t,
                RawTarget::Bare(a) => {
                    let lowered = a.to_lowercase();
                    if parser.nodes.contains_key(&lowered) {
                        AmrTarget::Var(lowered)
                    } else if is_number(&a) {
                        AmrTarget::Number(a)
                    } else {
                        AmrTarget::Symbol(a)
                    }
                }
            };
            AmrEdge {
                source,
                relation,
                target,
            }
        })
        .collect();

    let graph = AmrGraph {
        root,
        nodes: parser.nodes,
        edges,
    };
    debug_assert!(graph.validate().is_ok());
    Ok(graph)
}

impl AmrGraph {
    /// Check the structural invariants: declared root, declared edge
    /// endpoints, variable-name shape, and root-reachability of every node
    /// along edge direction.
    pub fn validate(&self) -> Result<(), AmrError> {
        if !self.nodes.contains_key(&self.root) {
            return Err(AmrError::DanglingReference(self.root.clone()));
        }
        for var in self.nodes.keys() {
            if !is_valid_var(var) {
                return Err(AmrError::Syntax {
                    pos: 0,
                    msg: format!("invalid variable name `{var}`"),
                });
            }
        }
        for edge in &self.edges {
            if !self.nodes.contains_key(&edge.source) {
                return Err(AmrError::DanglingReference(edge.source.clone()));
            }
            if let AmrTarget::Var(v) = &edge.target {
                if !self.nodes.contains_key(v) {
                    return Err(AmrError::DanglingReference(v.clone()));
                }
            }
            if edge.relation.len() < 2 || !edge.relation.starts_with(':') {
                return Err(AmrError::Syntax {
                    pos: 0,
                    msg: format!("invalid relation label `{}`", edge.relation),
                });
            }
        }
        let mut reached = BTreeSet::new();
        let mut stack = vec![self.root.clone()];
        while let Some(v) = stack.pop() {
            if !reached.insert(v.clone()) {
                continue;
            }
            for edge in self.edges.iter().filter(|e| e.source == v) {
                if let AmrTarget::Var(t) = &edge.target {
                    if !reached.contains(t) {
                        stack.push(t.clone());
                    }
                }
            }
        }
        if let Some(unreached) = self.nodes.keys().find(|v| !reached.contains(*v)) {
            return Err(AmrError::Syntax {
                pos: 0,
                msg: format!("node `{unreached}` is not reachable from the root"),
            });
        }
        Ok(())
    }

    fn edges_of<'a>(&'a self, var: &'a str) -> impl Iterator<Item = &'a AmrEdge> + 'a {
        self.edges.iter().filter(move |e| e.source == var)
    }

    /// Canonical JSON form: `{"root": ..., "nodes": {...}, "edges": [[s, rel, target], ...]}`.
    ///
    /// Node keys are sorted, edges keep graph order, and edge targets use
    /// PENMAN surface form (string literals keep their quotes).
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct GraphJson<'a> {
            root: &'a str,
            nodes: &'a BTreeMap<String, String>,
            edges: Vec<[String; 3]>,
        }
        let edges = self
            .edges
            .iter()
            .map(|e| [e.source.clone(), e.relation.clone(), e.target.surface()])
            .collect();
        serde_json::to_string(&GraphJson {
            root: &self.root,
            nodes: &self.nodes,
            edges,
        })
        .expect("graph serializes")
    }
}

/// Decompose a valid graph into triplets.
///
/// Depth-first from the root: each node's `:instance` triplet is emitted at
/// its first visit, edge triplets follow the edge order of the graph (which
/// for parsed graphs is source-text order). For a parsed graph the result
/// is exactly one `:instance` triplet per node plus one triplet per edge.
pub fn to_triplets(graph: &AmrGraph) -> Vec<Triplet> {
    let mut out = Vec::with_capacity(graph.nodes.len() + graph.edges.len());
    let mut visited = BTreeSet::new();
    visit(graph, &graph.root, &mut visited, &mut out);
    // Nodes unreachable from the root would be skipped above; validate()
    // rejects such graphs, so this is exhaustive for valid input.
    out
}

fn visit(graph: &AmrGraph, var: &str, visited: &mut BTreeSet<String>, out: &mut Vec<Triplet>) {
    if !visited.insert(var.to_string()) {
        return;
    }
    let concept = graph.nodes.get(var).cloned().unwrap_or_default();
    out.push(Triplet::new(var, INSTANCE, concept));
    for edge in graph.edges_of(var) {
        out.push(Triplet::new(
            &edge.source,
            &edge.relation,
            edge.target.surface(),
        ));
        if let AmrTarget::Var(t) = &edge.target {
            visit(graph, t, visited, out);
        }
    }
}

/// Serialize a valid graph back to PENMAN text.
///
/// Each edge goes on its own line indented four spaces per depth; the
/// second and later references to a variable are emitted bare. The output
/// reparses to a graph with an identical triplet set.
pub fn serialize_penman(graph: &AmrGraph) -> String {
    let mut out = String::new();
    let mut visited = BTreeSet::new();
    render(graph, &graph.root, 0, &mut visited, &mut out);
    out
}

fn render(
    graph: &AmrGraph,
    var: &str,
    depth: usize,
    visited: &mut BTreeSet<String>,
    out: &mut String,
) {
    visited.insert(var.to_string());
    let concept = graph.nodes.get(var).map(String::as_str).unwrap_or("");
    out.push('(');
    out.push_str(var);
    out.push_str(" / ");
    out.push_str(concept);
    for edge in graph.edges_of(var) {
        out.push('\n');
        for _ in 0..(depth + 1) * 4 {
            out.push(' ');
        }
        out.push_str(&edge.relation);
        out.push(' ');
        match &edge.target {
            AmrTarget::Var(t) if !visited.contains(t) => render(graph, t, depth + 1, visited, out),
            other => out.push_str(&other.surface()),
        }
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;

    fn john_saw_a_dog() -> &'static str {
        r#"(s / see-01 :ARG0 (p / person :name (n / name :op1 "John")) :ARG1 (d / dog))"#
    }

    #[test]
    fn single_node_graph() {
        let g = parse_penman("(d / dog)").unwrap();
        assert_eq!(g.root, "d");
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.nodes["d"], "dog");
        assert!(g.edges.is_empty());
    }

    #[test]
    fn john_saw_a_dog_structure() {
        let g = parse_penman(john_saw_a_dog()).unwrap();
        assert_eq!(g.root, "s");
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.nodes["s"], "see-01");
        assert_eq!(g.nodes["p"], "person");
        assert_eq!(g.nodes["n"], "name");
        assert_eq!(g.nodes["d"], "dog");
        let rels: Vec<(&str, &str, String)> = g
            .edges
            .iter()
            .map(|e| (e.source.as_str(), e.relation.as_str(), e.target.surface()))
            .collect();
        assert_eq!(
            rels,
            vec![
                ("s", ":ARG0", "p".to_string()),
                ("p", ":name", "n".to_string()),
                ("n", ":op1", "\"John\"".to_string()),
                ("s", ":ARG1", "d".to_string()),
            ]
        );
    }

    #[test]
    fn reentrancy_repeated_bare_variable() {
        let g = parse_penman("(a / and :op1 (b / boy) :op2 b)").unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.edges[1].target, AmrTarget::Var("b".into()));
    }

    #[test]
    fn forward_reentrant_reference() {
        let g = parse_penman("(a / and :op1 b :op2 (b / boy))").unwrap();
        assert_eq!(g.edges[0].target, AmrTarget::Var("b".into()));
    }

    #[test]
    fn literal_classification() {
        let g = parse_penman(
            r#"(t / temperature-quantity :quant -3.5 :unit (d / degree) :polarity - :scale 10)"#,
        )
        .unwrap();
        assert_eq!(g.edges[0].target, AmrTarget::Number("-3.5".into()));
        assert_eq!(g.edges[2].target, AmrTarget::Symbol("-".into()));
        assert_eq!(g.edges[3].target, AmrTarget::Number("10".into()));
    }

    #[test]
    fn comments_and_alignment_markers_ignored() {
        let text = "# ::snt John saw a dog\n(s / see-01~e.1\n    :ARG0~e.0 (p / person))";
        let g = parse_penman(text).unwrap();
        assert_eq!(g.nodes["s"], "see-01");
        assert_eq!(g.edges[0].relation, ":ARG0");
    }

    #[test]
    fn error_empty_input() {
        assert_eq!(parse_penman(""), Err(AmrError::EmptyInput));
        assert_eq!(parse_penman("  \n\t"), Err(AmrError::EmptyInput));
        assert_eq!(
            parse_penman("# only a comment\n"),
            Err(AmrError::EmptyInput)
        );
    }

    #[test]
    fn error_unbalanced_parens() {
        assert_eq!(parse_penman("(d / dog"), Err(AmrError::UnbalancedParens));
        assert_eq!(parse_penman("(d / dog))"), Err(AmrError::UnbalancedParens));
    }

    #[test]
    fn error_duplicate_variable() {
        assert_eq!(
            parse_penman("(d / dog :mod (d / big))"),
            Err(AmrError::DuplicateVariable("d".into()))
        );
    }

    #[test]
    fn error_dangling_reference() {
        assert_eq!(
            parse_penman("(a / and :op1 (b))"),
            Err(AmrError::DanglingReference("b".into()))
        );
    }

    #[test]
    fn undeclared_bare_atom_is_a_symbol() {
        let g = parse_penman("(s / sleep-01 :mode imperative)").unwrap();
        assert_eq!(g.edges[0].target, AmrTarget::Symbol("imperative".into()));
    }

    #[test]
    fn triplets_single_node() {
        let g = parse_penman("(d / dog)").unwrap();
        assert_eq!(to_triplets(&g), vec![Triplet::new("d", ":instance", "dog")]);
    }

    #[test]
    fn triplets_dfs_order() {
        let g = parse_penman(john_saw_a_dog()).unwrap();
        let ts = to_triplets(&g);
        let expected = vec![
            Triplet::new("s", ":instance", "see-01"),
            Triplet::new("s", ":ARG0", "p"),
            Triplet::new("p", ":instance", "person"),
            Triplet::new("p", ":name", "n"),
            Triplet::new("n", ":instance", "name"),
            Triplet::new("n", ":op1", "\"John\""),
            Triplet::new("s", ":ARG1", "d"),
            Triplet::new("d", ":instance", "dog"),
        ];
        assert_eq!(ts, expected);
        assert_eq!(ts.len(), g.nodes.len() + g.edges.len());
        assert_eq!(ts.iter().filter(|t| t.is_instance()).count(), g.nodes.len());
    }

    #[test]
    fn triplets_reentrant() {
        let g = parse_penman("(a / and :op1 (b / boy) :op2 b)").unwrap();
        assert_eq!(
            to_triplets(&g),
            vec![
                Triplet::new("a", ":instance", "and"),
                Triplet::new("a", ":op1", "b"),
                Triplet::new("b", ":instance", "boy"),
                Triplet::new("a", ":op2", "b"),
            ]
        );
    }

    #[test]
    fn serialize_single_node() {
        let g = parse_penman("(d / dog)").unwrap();
        assert_eq!(serialize_penman(&g), "(d / dog)");
    }

    #[test]
    fn serialize_indents_four_spaces_per_depth() {
        let g = parse_penman(john_saw_a_dog()).unwrap();
        let s = serialize_penman(&g);
        assert_eq!(
            s,
            "(s / see-01\n    :ARG0 (p / person\n        :name (n / name\n            :op1 \"John\"))\n    :ARG1 (d / dog))"
        );
    }

    #[test]
    fn serialize_reentrant_reference_is_bare() {
        let g = parse_penman("(a / and :op1 (b / boy) :op2 b)").unwrap();
        let s = serialize_penman(&g);
        assert!(s.contains(":op2 b"));
        assert!(!s.contains(":op2 (b"));
        let g2 = parse_penman(&s).unwrap();
        assert_eq!(to_triplets(&g2), to_triplets(&g));
    }

    #[test]
    fn roundtrip_preserves_triplet_set() {
        for text in [
            "(d / dog)",
            john_saw_a_dog(),
            "(a / and :op1 (b / boy) :op2 b)",
            r#"(s / say-01 :ARG0 (g / girl) :ARG1 (a / attractive :polarity - :degree (v / very)) :time (y / yesterday) :quant 3)"#,
        ] {
            let g = parse_penman(text).unwrap();
            let g2 = parse_penman(&serialize_penman(&g)).unwrap();
            use std::collections::BTreeSet;
            let a: BTreeSet<_> = to_triplets(&g).into_iter().map(|t| t.to_string()).collect();
            let b: BTreeSet<_> = to_triplets(&g2)
                .into_iter()
                .map(|t| t.to_string())
                .collect();
            assert_eq!(a, b, "round trip changed triplets for {text}");
        }
    }

    #[test]
    fn canonical_json_shape() {
        let g = parse_penman("(a / and :op1 (b / boy) :op2 b)").unwrap();
        assert_eq!(
            g.to_json(),
            r#"{"root":"a","nodes":{"a":"and","b":"boy"},"edges":[["a",":op1","b"],["a",":op2","b"]]}"#
        );
    }

    #[test]
    fn string_literal_with_escaped_quote() {
        let g = parse_penman(r#"(n / name :op1 "O\"Brien")"#).unwrap();
        assert_eq!(g.edges[0].target, AmrTarget::Text("O\"Brien".into()));
        let s = serialize_penman(&g);
        let g2 = parse_penman(&s).unwrap();
        assert_eq!(g2.edges[0].target, AmrTarget::Text("O\"Brien".into()));
    }

    #[test]
    fn multibyte_string_literal_roundtrip() {
        let g = parse_penman(r#"(n / name :op1 "schön, héhé")"#).unwrap();
        assert_eq!(g.edges[0].target, AmrTarget::Text("schön, héhé".into()));
        let g2 = parse_penman(&serialize_penman(&g)).unwrap();
        assert_eq!(g2.edges[0].target, AmrTarget::Text("schön, héhé".into()));
    }

    #[test]
    fn uppercase_variables_normalized() {
        let g = parse_penman("(S / see-01 :ARG0 (P / person) :ARG1 P)").unwrap();
        assert_eq!(g.root, "s");
        assert!(g.nodes.contains_key("p"));
        assert_eq!(g.edges[1].target, AmrTarget::Var("p".into()));
    }
}

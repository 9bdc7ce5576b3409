//! Penn-Treebank-style bracketed constituency trees: parsing, bracket
//! serialization, and depth-first linearization.
//!
//! The label set is open (any non-empty, whitespace-free string is
//! accepted) since machine-emitted trees routinely use nonstandard tags.
//! Tokens containing parentheses travel as `-LRB-` / `-RRB-` in bracketed
//! text and are unescaped on parse.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PstError {
    #[error("empty input: no tree found")]
    EmptyInput,
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("empty constituent{}", match .label { Some(l) => format!(" `({l})`: label with no children or token"), None => " `()`".to_string() })]
    EmptyConstituent { label: Option<String> },
    #[error("constituent `{label}` mixes tokens and subtrees")]
    MixedChildren { label: String },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// A constituency tree node: either an internal constituent with ordered
/// children, or a leaf that pairs a preterminal tag with a surface token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PstTree {
    Internal {
        label: String,
        children: Vec<PstTree>,
    },
    Leaf {
        label: String,
        token: String,
    },
}

impl PstTree {
    pub fn label(&self) -> &str {
        match self {
            PstTree::Internal { label, .. } | PstTree::Leaf { label, .. } => label,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            PstTree::Leaf { .. } => 1,
            PstTree::Internal { children, .. } => {
                1 + children.iter().map(PstTree::node_count).sum::<usize>()
            }
        }
    }

    /// Canonical JSON: `{"label": ..., "children": [...]}` for internal
    /// nodes, `{"label": ..., "token": ...}` for leaves.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tree serializes")
    }
}

/// One entry of a depth-first linearization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearEntry {
    pub depth: usize,
    pub label: String,
    pub token: Option<String>,
}

/// Pre-order linearization of a tree; entry count equals node count and
/// the first entry is the root at depth 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PstLinear {
    pub sequence: Vec<LinearEntry>,
}

fn escape_token(token: &str) -> String {
    token.replace('(', "-LRB-").replace(')', "-RRB-")
}

fn unescape_token(token: &str) -> String {
    token.replace("-LRB-", "(").replace("-RRB-", ")")
}

enum Item {
    Word(String),
    Tree(PstTree),
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn byte_pos(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or_else(|| {
                self.chars
                    .last()
                    .map(|(p, c)| p + c.len_utf8())
                    .unwrap_or(0)
            })
    }

    fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos].1;
            if c == '(' || c == ')' || c.is_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(
                self.chars[start..self.pos]
                    .iter()
                    .map(|(_, c)| *c)
                    .collect(),
            )
        }
    }

    fn node(&mut self) -> Result<PstTree, PstError> {
        match self.peek() {
            Some('(') => self.pos += 1,
            Some(_) => {
                return Err(PstError::Syntax {
                    pos: self.byte_pos(),
                    msg: "expected `(`".into(),
                })
            }
            None => return Err(PstError::UnbalancedParens),
        }
        let label = match self.peek() {
            Some(')') => {
                self.pos += 1;
                return Err(PstError::EmptyConstituent { label: None });
            }
            Some('(') => {
                return Err(PstError::Syntax {
                    pos: self.byte_pos(),
                    msg: "expected a constituent label after `(`".into(),
                })
            }
            Some(_) => self.word().expect("non-delimiter char present"),
            None => return Err(PstError::UnbalancedParens),
        };

        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some('(') => items.push(Item::Tree(self.node()?)),
                Some(_) => items.push(Item::Word(self.word().expect("non-delimiter char present"))),
                None => return Err(PstError::UnbalancedParens),
            }
        }

        if items.is_empty() {
            return Err(PstError::EmptyConstituent { label: Some(label) });
        }
        let only_trees = items.iter().all(|i| matches!(i, Item::Tree(_)));
        if only_trees {
            let children = items
                .into_iter()
                .map(|i| match i {
                    Item::Tree(t) => t,
                    Item::Word(_) => unreachable!(),
                })
                .collect();
            return Ok(PstTree::Internal { label, children });
        }
        match items.as_slice() {
            [Item::Word(w)] => Ok(PstTree::Leaf {
                label,
                token: unescape_token(w),
            }),
            _ => Err(PstError::MixedChildren { label }),
        }
    }
}

/// Parse bracketed constituency text.
///
/// A label-less outer wrapper, the PTB file convention `((S ...))`, is
/// unwrapped when it contains exactly one tree.
pub fn parse_brackets(text: &str) -> Result<PstTree, PstError> {
    let mut parser = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
    };
    parser.skip_ws();
    if parser.pos >= parser.chars.len() {
        return Err(PstError::EmptyInput);
    }

    // `( ( ... ) )` with no label: unwrap the outer pair.
    let tree = {
        let save = parser.pos;
        if parser.peek() == Some('(') {
            parser.pos += 1;
            if parser.peek() == Some('(') {
                let inner = parser.node()?;
                match parser.peek() {
                    Some(')') => parser.pos += 1,
                    Some(_) => {
                        return Err(PstError::Syntax {
                            pos: parser.byte_pos(),
                            msg: "a label-less wrapper must hold exactly one tree".into(),
                        })
                    }
                    None => return Err(PstError::UnbalancedParens),
                }
                inner
            } else {
                parser.pos = save;
                parser.node()?
            }
        } else {
            return Err(PstError::Syntax {
                pos: parser.byte_pos(),
                msg: "expected `(`".into(),
            });
        }
    };

    if parser.peek().is_some() {
        return match parser.peek() {
            Some(')') => Err(PstError::UnbalancedParens),
            _ => Err(PstError::Syntax {
                pos: parser.byte_pos(),
                msg: "unexpected content after the closing `)`".into(),
            }),
        };
    }
    Ok(tree)
}

/// Render a tree back to single-line bracketed text.
pub fn serialize_brackets(tree: &PstTree) -> String {
    match tree {
        PstTree::Leaf { label, token } => format!("({} {})", label, escape_token(token)),
        PstTree::Internal { label, children } => {
            let body: Vec<String> = children.iter().map(serialize_brackets).collect();
            format!("({} {})", label, body.join(" "))
        }
    }
}

/// Pre-order depth-first linearization. Child depth is parent depth plus
/// one; tokens appear only on leaf entries.
pub fn dfs_linearize(tree: &PstTree) -> PstLinear {
    let mut sequence = Vec::with_capacity(tree.node_count());
    walk(tree, 0, &mut sequence);
    PstLinear { sequence }
}

fn walk(tree: &PstTree, depth: usize, out: &mut Vec<LinearEntry>) {
    match tree {
        PstTree::Leaf { label, token } => out.push(LinearEntry {
            depth,
            label: label.clone(),
            token: Some(token.clone()),
        }),
        PstTree::Internal { label, children } => {
            out.push(LinearEntry {
                depth,
                label: label.clone(),
                token: None,
            });
            for child in children {
                walk(child, depth + 1, out);
            }
        }
    }
}

/// Rebuild a tree from its pre-order linearization. Inverse of
/// [`dfs_linearize`] for any sequence that came from a real tree.
pub fn from_linear(linear: &PstLinear) -> Result<PstTree, PstError> {
    let seq = &linear.sequence;
    if seq.is_empty() {
        return Err(PstError::EmptyInput);
    }
    if seq[0].depth != 0 {
        return Err(PstError::Syntax {
            pos: 0,
            msg: "first entry must have depth 0".into(),
        });
    }
    let mut idx = 0;
    let tree = build(seq, &mut idx, 0)?;
    if idx != seq.len() {
        return Err(PstError::Syntax {
            pos: idx,
            msg: "sequence continues past the root subtree".into(),
        });
    }
    Ok(tree)
}

fn build(seq: &[LinearEntry], idx: &mut usize, depth: usize) -> Result<PstTree, PstError> {
    let entry = &seq[*idx];
    if entry.depth != depth {
        return Err(PstError::Syntax {
            pos: *idx,
            msg: format!("expected depth {depth}, found {}", entry.depth),
        });
    }
    *idx += 1;
    if let Some(token) = &entry.token {
        return Ok(PstTree::Leaf {
            label: entry.label.clone(),
            token: token.clone(),
        });
    }
    let mut children = Vec::new();
    while *idx < seq.len() && seq[*idx].depth == depth + 1 {
        children.push(build(seq, idx, depth + 1)?);
    }
    if children.is_empty() {
        return Err(PstError::EmptyConstituent {
            label: Some(entry.label.clone()),
        });
    }
    Ok(PstTree::Internal {
        label: entry.label.clone(),
        children,
    })
}

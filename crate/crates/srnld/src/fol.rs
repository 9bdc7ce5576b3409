//! First-order-logic formulas over an ASCII surface grammar.
//!
//! Connectives in decreasing binding strength: `~`, `&`, `|`, `->` (the
//! arrow is right-associative). Unicode spellings `∀ ∃ ∧ ∨ ¬ →` are
//! accepted on input. A quantifier's scope extends maximally to the right
//! unless parentheses close it off, so `forall x p(x) -> q(x)` binds `x`
//! in both atoms. Terms are variables or constants only, no function
//! symbols, and whether an identifier is a variable is decided by binding
//! status, not by its case: `John` bound by a quantifier would be a
//! variable, `x` outside any quantifier is a constant.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FolError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown token at byte {pos}: `{token}`")]
    UnknownToken { pos: usize, token: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    And,
    Or,
    Implies,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::And => 3,
            BinOp::Or => 2,
            BinOp::Implies => 1,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Implies => "->",
        }
    }
}

/// A term in an atom: a quantifier-bound variable or a constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Variable(n) | Term::Constant(n) => n,
        }
    }
}

/// Formula AST.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum FolExpr {
    Quantified {
        quantifier: Quantifier,
        variable: String,
        body: Box<FolExpr>,
    },
    Binary {
        op: BinOp,
        left: Box<FolExpr>,
        right: Box<FolExpr>,
    },
    Not {
        inner: Box<FolExpr>,
    },
    Atom {
        predicate: String,
        args: Vec<Term>,
    },
}

impl FolExpr {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        FolExpr::Atom {
            predicate: predicate.into(),
            args,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: FolExpr) -> Self {
        FolExpr::Not {
            inner: Box::new(inner),
        }
    }

    pub fn binary(op: BinOp, left: FolExpr, right: FolExpr) -> Self {
        FolExpr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn quantified(quantifier: Quantifier, variable: impl Into<String>, body: FolExpr) -> Self {
        FolExpr::Quantified {
            quantifier,
            variable: variable.into(),
            body: Box::new(body),
        }
    }

    /// Canonical JSON AST.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("formula serializes")
    }

    /// Variables marked [`Term::Variable`] that are not bound by any
    /// enclosing quantifier, in first-appearance order.
    pub fn free_variables(&self) -> Vec<String> {
        let mut bound = Vec::new();
        let mut free = Vec::new();
        collect_free(self, &mut bound, &mut free);
        free
    }
}

fn collect_free(expr: &FolExpr, bound: &mut Vec<String>, free: &mut Vec<String>) {
    match expr {
        FolExpr::Quantified { variable, body, .. } => {
            bound.push(variable.clone());
            collect_free(body, bound, free);
            bound.pop();
        }
        FolExpr::Binary { left, right, .. } => {
            collect_free(left, bound, free);
            collect_free(right, bound, free);
        }
        FolExpr::Not { inner } => collect_free(inner, bound, free),
        FolExpr::Atom { args, .. } => {
            for term in args {
                if let Term::Variable(name) = term {
                    if !bound.iter().any(|b| b == name) && !free.iter().any(|f| f == name) {
                        free.push(name.clone());
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Forall,
    Exists,
    And,
    Or,
    Not,
    Implies,
    LParen,
    RParen,
    Comma,
    Ident(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, FolError> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                tokens.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((pos, Tok::RParen));
                i += 1;
            }
            ',' => {
                tokens.push((pos, Tok::Comma));
                i += 1;
            }
            '&' | '∧' => {
                tokens.push((pos, Tok::And));
                i += 1;
            }
            '|' | '∨' => {
                tokens.push((pos, Tok::Or));
                i += 1;
            }
            '~' | '¬' => {
                tokens.push((pos, Tok::Not));
                i += 1;
            }
            '→' => {
                tokens.push((pos, Tok::Implies));
                i += 1;
            }
            '∀' => {
                tokens.push((pos, Tok::Forall));
                i += 1;
            }
            '∃' => {
                tokens.push((pos, Tok::Exists));
                i += 1;
            }
            '-' => {
                if i + 1 < chars.len() && chars[i + 1].1 == '>' {
                    tokens.push((pos, Tok::Implies));
                    i += 2;
                } else {
                    return Err(FolError::UnknownToken {
                        pos,
                        token: "-".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                let tok = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word),
                };
                tokens.push((pos, tok));
            }
            other => {
                return Err(FolError::UnknownToken {
                    pos,
                    token: other.to_string(),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn advance(&mut self) -> Option<(usize, Tok)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FolError> {
        match self.advance() {
            Some((_, t)) if t == tok => Ok(()),
            Some((p, _)) => Err(FolError::Syntax {
                pos: p,
                msg: format!("expected {what}"),
            }),
            None => Err(FolError::Syntax {
                pos: self.end,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    // Precedence climbing. `min_prec` is the loosest operator this call
    // may consume; quantifiers always grab a full expression to the right.
    fn expr(&mut self, min_prec: u8) -> Result<FolExpr, FolError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::And) => BinOp::And,
                Some(Tok::Or) => BinOp::Or,
                Some(Tok::Implies) => BinOp::Implies,
                _ => break,
            };
            if op.precedence() < min_prec {
                break;
            }
            self.advance();
            // Right-associative `->` reparses at its own level; `&`/`|`
            // climb one, giving left associativity.
            let next_min = if op == BinOp::Implies {
                op.precedence()
            } else {
                op.precedence() + 1
            };
            let right = self.expr(next_min)?;
            left = FolExpr::binary(op, left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<FolExpr, FolError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.advance();
                Ok(FolExpr::not(self.unary()?))
            }
            Some(Tok::Forall) | Some(Tok::Exists) => self.quantified(),
            Some(Tok::LParen) => {
                self.advance();
                let inner = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(_)) => self.atom(),
            Some(_) => Err(FolError::Syntax {
                pos: self.here(),
                msg: "expected a formula".into(),
            }),
            None => Err(FolError::Syntax {
                pos: self.end,
                msg: "expected a formula, found end of input".into(),
            }),
        }
    }

    fn quantified(&mut self) -> Result<FolExpr, FolError> {
        let quantifier = match self.advance() {
            Some((_, Tok::Forall)) => Quantifier::Forall,
            Some((_, Tok::Exists)) => Quantifier::Exists,
            _ => unreachable!(),
        };
        let variable = match self.advance() {
            Some((_, Tok::Ident(name))) => name,
            Some((p, _)) => {
                return Err(FolError::Syntax {
                    pos: p,
                    msg: "expected a variable name after the quantifier".into(),
                })
            }
            None => {
                return Err(FolError::Syntax {
                    pos: self.end,
                    msg: "expected a variable name after the quantifier".into(),
                })
            }
        };
        // Maximal scope: the body is a whole expression.
        let body = self.expr(0)?;
        Ok(FolExpr::quantified(quantifier, variable, body))
    }

    fn atom(&mut self) -> Result<FolExpr, FolError> {
        let (pred_pos, predicate) = match self.advance() {
            Some((p, Tok::Ident(name))) => (p, name),
            _ => unreachable!(),
        };
        match self.peek() {
            Some(Tok::LParen) => {}
            _ => {
                return Err(FolError::Syntax {
                    pos: pred_pos,
                    msg: format!("predicate `{predicate}` needs an argument list"),
                })
            }
        }
        self.advance();
        let mut args = Vec::new();
        loop {
            match self.advance() {
                Some((_, Tok::Ident(name))) => args.push(name),
                Some((p, Tok::RParen)) if args.is_empty() => {
                    return Err(FolError::Syntax {
                        pos: p,
                        msg: format!("predicate `{predicate}` needs at least one argument"),
                    })
                }
                Some((p, _)) => {
                    return Err(FolError::Syntax {
                        pos: p,
                        msg: "expected a term".into(),
                    })
                }
                None => {
                    return Err(FolError::Syntax {
                        pos: self.end,
                        msg: "unterminated argument list".into(),
                    })
                }
            }
            match self.advance() {
                Some((_, Tok::Comma)) => continue,
                Some((_, Tok::RParen)) => break,
                Some((p, _)) => {
                    return Err(FolError::Syntax {
                        pos: p,
                        msg: "expected `,` or `)` in the argument list".into(),
                    })
                }
                None => {
                    return Err(FolError::Syntax {
                        pos: self.end,
                        msg: "unterminated argument list".into(),
                    })
                }
            }
        }
        // Placeholder terms; classified against bound variables afterwards.
        Ok(FolExpr::Atom {
            predicate,
            args: args.into_iter().map(Term::Constant).collect(),
        })
    }
}

/// Parse an ASCII (or mixed-Unicode) formula.
///
/// Term classification runs after parsing: an identifier argument becomes
/// [`Term::Variable`] exactly when an enclosing quantifier binds that
/// name, and [`Term::Constant`] otherwise.
pub fn parse_fol(text: &str) -> Result<FolExpr, FolError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(FolError::Syntax {
            pos: 0,
            msg: "empty input: no formula found".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let expr = parser.expr(0)?;
    if let Some(tok) = parser.peek() {
        let msg = match tok {
            Tok::RParen => "unmatched `)`".to_string(),
            _ => "unexpected content after the formula".to_string(),
        };
        return Err(FolError::Syntax {
            pos: parser.here(),
            msg,
        });
    }
    Ok(classify(expr, &mut Vec::new()))
}

fn classify(expr: FolExpr, bound: &mut Vec<String>) -> FolExpr {
    match expr {
        FolExpr::Quantified {
            quantifier,
            variable,
            body,
        } => {
            bound.push(variable.clone());
            let body = classify(*body, bound);
            bound.pop();
            FolExpr::quantified(quantifier, variable, body)
        }
        FolExpr::Binary { op, left, right } => {
            let left = classify(*left, bound);
            let right = classify(*right, bound);
            FolExpr::binary(op, left, right)
        }
        FolExpr::Not { inner } => FolExpr::not(classify(*inner, bound)),
        FolExpr::Atom { predicate, args } => FolExpr::Atom {
            predicate,
            args: args
                .into_iter()
                .map(|t| {
                    let name = t.name().to_string();
                    if bound.contains(&name) {
                        Term::Variable(name)
                    } else {
                        Term::Constant(name)
                    }
                })
                .collect(),
        },
    }
}

/// Pretty-print with minimal parentheses; `parse_fol(fol_to_string(e))`
/// is structurally equal to `e` whenever `e`'s variables are consistent
/// with its quantifiers (the parser re-derives variable/constant status
/// from binding).
pub fn fol_to_string(expr: &FolExpr) -> String {
    let mut out = String::new();
    print_expr(expr, 0, false, &mut out);
    out
}

// `min_prec` mirrors the parser's precedence-climbing argument.
// `guard_quantifier` is set where a bare quantifier would greedily consume
// operators to the right that belong to an enclosing expression.
fn print_expr(expr: &FolExpr, min_prec: u8, guard_quantifier: bool, out: &mut String) {
    match expr {
        FolExpr::Atom { predicate, args } => {
            out.push_str(predicate);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(arg.name());
            }
            out.push(')');
        }
        FolExpr::Not { inner } => {
            out.push('~');
            // `~` binds tightest; anything weaker inside takes parens.
            print_expr(inner, 4, true, out);
        }
        FolExpr::Quantified {
            quantifier,
            variable,
            body,
        } => {
            if guard_quantifier {
                out.push('(');
            }
            out.push_str(match quantifier {
                Quantifier::Forall => "forall ",
                Quantifier::Exists => "exists ",
            });
            out.push_str(variable);
            out.push(' ');
            print_expr(body, 0, false, out);
            if guard_quantifier {
                out.push(')');
            }
        }
        FolExpr::Binary { op, left, right } => {
            let prec = op.precedence();
            let parens = prec < min_prec;
            if parens {
                out.push('(');
            }
            // Left side: equal precedence recurses without parens for the
            // left-associative operators, with parens for `->`.
            let left_min = if *op == BinOp::Implies {
                prec + 1
            } else {
                prec
            };
            print_expr(left, left_min, true, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            // Right side mirrors the parser: `->` reparses at its own
            // level, `&`/`|` climb one.
            let right_min = if *op == BinOp::Implies {
                prec
            } else {
                prec + 1
            };
            let right_guard = parens_close_scope_to_the_right(parens, min_prec);
            print_expr(right, right_min, right_guard, out);
            if parens {
                out.push(')');
            }
        }
    }
}

// A quantifier printed as the rightmost child is safe only when nothing
// follows it in the final string. When this binary expression is itself
// parenthesized, the `)` closes the scope; otherwise an enclosing operator
// may still print to the right of us, so the quantifier must be guarded.
fn parens_close_scope_to_the_right(parens_here: bool, min_prec: u8) -> bool {
    !parens_here && min_prec > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use BinOp::*;
    use Quantifier::*;

    fn var(n: &str) -> Term {
        Term::Variable(n.into())
    }

    fn con(n: &str) -> Term {
        Term::Constant(n.into())
    }

    #[test]
    fn bare_atom() {
        let e = parse_fol("dog(x)").unwrap();
        assert_eq!(e, FolExpr::atom("dog", vec![con("x")]));
    }

    #[test]
    fn exists_with_conjunction() {
        let e = parse_fol("exists x (dog(x) & see(John, x))").unwrap();
        assert_eq!(
            e,
            FolExpr::quantified(
                Exists,
                "x",
                FolExpr::binary(
                    And,
                    FolExpr::atom("dog", vec![var("x")]),
                    FolExpr::atom("see", vec![con("John"), var("x")]),
                )
            )
        );
    }

    #[test]
    fn negation_binds_tighter_than_and() {
        let e = parse_fol("~p(x) & q(x)").unwrap();
        assert_eq!(
            e,
            FolExpr::binary(
                And,
                FolExpr::not(FolExpr::atom("p", vec![con("x")])),
                FolExpr::atom("q", vec![con("x")]),
            )
        );
    }

    #[test]
    fn precedence_and_over_or_over_implies() {
        let e = parse_fol("a(x) | b(x) & c(x) -> d(x)").unwrap();
        assert_eq!(
            e,
            FolExpr::binary(
                Implies,
                FolExpr::binary(
                    Or,
                    FolExpr::atom("a", vec![con("x")]),
                    FolExpr::binary(
                        And,
                        FolExpr::atom("b", vec![con("x")]),
                        FolExpr::atom("c", vec![con("x")]),
                    ),
                ),
                FolExpr::atom("d", vec![con("x")]),
            )
        );
    }

    #[test]
    fn implies_right_associative() {
        let e = parse_fol("a(x) -> b(x) -> c(x)").unwrap();
        assert_eq!(
            e,
            FolExpr::binary(
                Implies,
                FolExpr::atom("a", vec![con("x")]),
                FolExpr::binary(
                    Implies,
                    FolExpr::atom("b", vec![con("x")]),
                    FolExpr::atom("c", vec![con("x")]),
                ),
            )
        );
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let e = parse_fol("forall x p(x) -> q(x)").unwrap();
        match e {
            FolExpr::Quantified { body, .. } => match *body {
                FolExpr::Binary { op, .. } => assert_eq!(op, Implies),
                other => panic!("expected implication body, got {other:?}"),
            },
            other => panic!("expected quantified formula, got {other:?}"),
        }
    }

    #[test]
    fn parenthesized_quantifier_scope_is_closed() {
        let e = parse_fol("(forall x p(x)) -> q(y)").unwrap();
        match e {
            FolExpr::Binary {
                op: Implies, left, ..
            } => {
                assert!(matches!(*left, FolExpr::Quantified { .. }));
            }
            other => panic!("expected implication, got {other:?}"),
        }
    }

    #[test]
    fn unicode_spellings_accepted() {
        assert_eq!(
            parse_fol("∀x (p(x) ∧ ¬q(x)) ∨ r(a)").unwrap(),
            parse_fol("forall x (p(x) & ~q(x)) | r(a)").unwrap()
        );
    }

    #[test]
    fn binding_status_decides_variable_vs_constant() {
        let e = parse_fol("forall John see(John, x)").unwrap();
        match e {
            FolExpr::Quantified { body, .. } => match *body {
                FolExpr::Atom { args, .. } => {
                    assert_eq!(args, vec![var("John"), con("x")]);
                }
                other => panic!("expected atom, got {other:?}"),
            },
            other => panic!("expected quantified formula, got {other:?}"),
        }
    }

    #[test]
    fn error_unknown_token() {
        assert_eq!(
            parse_fol("p(x) @ q(x)"),
            Err(FolError::UnknownToken {
                pos: 5,
                token: "@".into()
            })
        );
    }

    #[test]
    fn error_syntax_carries_position() {
        match parse_fol("dog(") {
            Err(FolError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse_fol("").is_err());
        assert!(parse_fol("p()").is_err());
        assert!(parse_fol("p").is_err());
    }

    #[test]
    fn print_atom() {
        assert_eq!(
            fol_to_string(&FolExpr::atom("dog", vec![con("x")])),
            "dog(x)"
        );
    }

    #[test]
    fn print_forces_parens_where_precedence_requires() {
        let e = FolExpr::binary(
            And,
            FolExpr::binary(
                Or,
                FolExpr::atom("a", vec![con("x")]),
                FolExpr::atom("b", vec![con("x")]),
            ),
            FolExpr::atom("c", vec![con("x")]),
        );
        assert_eq!(fol_to_string(&e), "(a(x) | b(x)) & c(x)");
    }

    #[test]
    fn print_left_nested_and_without_parens() {
        let e = FolExpr::binary(
            And,
            FolExpr::binary(
                And,
                FolExpr::atom("a", vec![con("x")]),
                FolExpr::atom("b", vec![con("x")]),
            ),
            FolExpr::atom("c", vec![con("x")]),
        );
        assert_eq!(fol_to_string(&e), "a(x) & b(x) & c(x)");
        assert_eq!(parse_fol("a(x) & b(x) & c(x)").unwrap(), e);
    }

    #[test]
    fn print_reparse_roundtrip() {
        let texts = [
            "dog(x)",
            "exists x (dog(x) & see(John, x))",
            "~p(x) & q(x)",
            "a(x) -> b(x) -> c(x)",
            "(a(x) -> b(x)) -> c(x)",
            "forall x exists y (likes(x, y) | ~knows(y, x))",
            "~(p(a) | q(a))",
            "~~p(a)",
            "(forall x p(x)) & q(a)",
            "p(a) & (exists y r(y)) & s(b)",
            "~(forall x p(x)) & q(a)",
        ];
        for text in texts {
            let e = parse_fol(text).unwrap();
            let printed = fol_to_string(&e);
            let reparsed = parse_fol(&printed)
                .unwrap_or_else(|err| panic!("printed `{printed}` failed to parse: {err}"));
            assert_eq!(
                reparsed, e,
                "round trip failed for `{text}` via `{printed}`"
            );
        }
    }

    #[test]
    fn free_variables_in_first_appearance_order() {
        let e = parse_fol("exists x (p(x) & q(y))").unwrap();
        // y is unbound, so the parser classifies it as a constant.
        assert!(e.free_variables().is_empty());

        let hand_built = FolExpr::binary(
            And,
            FolExpr::atom("p", vec![var("y")]),
            FolExpr::quantified(Exists, "x", FolExpr::atom("q", vec![var("x"), var("z")])),
        );
        assert_eq!(
            hand_built.free_variables(),
            vec!["y".to_string(), "z".to_string()]
        );
    }
}

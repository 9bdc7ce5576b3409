//! Property tests for the parser/serializer round-trips, the rejection
//! behavior under single-token mutations, and the arithmetic invariants
//! of mixing and scoring.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::{select, Index};

use srnld::amr::{self, AmrEdge, AmrGraph, AmrTarget};
use srnld::fol::{self, BinOp, FolExpr, Quantifier, Term};
use srnld::gensr;
use srnld::metrics;
use srnld::promptkit::{extract_answer, LabelCatalog, Task};
use srnld::pst::{self, PstTree};

// ---------------------------------------------------------------------
// AMR
// ---------------------------------------------------------------------

fn concept_strategy() -> impl Strategy<Value = String> {
    select(vec![
        "dog".to_string(),
        "cat".to_string(),
        "see-01".to_string(),
        "want-01".to_string(),
        "city".to_string(),
        "good-02".to_string(),
    ])
}

fn relation_strategy() -> impl Strategy<Value = String> {
    select(vec![
        ":ARG0".to_string(),
        ":ARG1".to_string(),
        ":mod".to_string(),
        ":time".to_string(),
        ":op1".to_string(),
        ":snt9".to_string(),
    ])
}

prop_compose! {
    fn graph_strategy()(n in 1usize..10)(
        concepts in proptest::collection::vec(concept_strategy(), n),
        parent_picks in proptest::collection::vec(any::<Index>(), n.saturating_sub(1)),
        tree_relations in proptest::collection::vec(relation_strategy(), n.saturating_sub(1)),
        extras in proptest::collection::vec(
            (any::<Index>(), any::<Index>(), relation_strategy()),
            0..3
        ),
        literals in proptest::collection::vec(
            (any::<Index>(), 0u8..3, 0u32..100),
            0..3
        ),
        n in Just(n),
    ) -> AmrGraph {
        let vars: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut nodes = std::collections::BTreeMap::new();
        for (var, concept) in vars.iter().zip(&concepts) {
            nodes.insert(var.clone(), concept.clone());
        }
        let mut edges = Vec::new();
        for i in 1..n {
            edges.push(AmrEdge {
                source: vars[parent_picks[i - 1].index(i)].clone(),
                relation: tree_relations[i - 1].clone(),
                target: AmrTarget::Var(vars[i].clone()),
            });
        }
        for (src, dst, relation) in extras {
            edges.push(AmrEdge {
                source: vars[src.index(n)].clone(),
                relation,
                target: AmrTarget::Var(vars[dst.index(n)].clone()),
            });
        }
        for (src, kind, value) in literals {
            let target = match kind {
                0 => AmrTarget::Number(format!("{value}")),
                1 => AmrTarget::Text(format!("lit {value}")),
                _ => AmrTarget::Symbol("-".to_string()),
            };
            edges.push(AmrEdge {
                source: vars[src.index(n)].clone(),
                relation: ":quant".to_string(),
                target,
            });
        }
        AmrGraph { root: vars[0].clone(), nodes, edges }
    }
}

fn amr_triplet_set(graph: &AmrGraph) -> BTreeSet<String> {
    amr::to_triplets(graph)
        .iter()
        .map(|t| t.to_string())
        .collect()
}

proptest! {
    #[test]
    fn amr_roundtrip_preserves_triplets(graph in graph_strategy()) {
        prop_assert!(graph.validate().is_ok());
        let text = amr::serialize_penman(&graph);
        let reparsed = amr::parse_penman(&text).expect("serialized graph reparses");
        prop_assert_eq!(amr_triplet_set(&graph), amr_triplet_set(&reparsed));
    }

    #[test]
    fn amr_triplet_counts(graph in graph_strategy()) {
        let triplets = amr::to_triplets(&graph);
        let instances = triplets.iter().filter(|t| t.is_instance()).count();
        prop_assert_eq!(instances, graph.nodes.len());
        prop_assert_eq!(triplets.len(), graph.nodes.len() + graph.edges.len());
    }

    #[test]
    fn amr_identical_text_gives_identical_triplets(graph in graph_strategy()) {
        let text = amr::serialize_penman(&graph);
        let a = amr::to_triplets(&amr::parse_penman(&text).unwrap());
        let b = amr::to_triplets(&amr::parse_penman(&text).unwrap());
        prop_assert_eq!(a, b);
    }

    // Deleting any single parenthesis from valid text must be rejected.
    #[test]
    fn amr_paren_deletion_rejected(graph in graph_strategy(), pick in any::<Index>()) {
        let text = amr::serialize_penman(&graph);
        let paren_positions: Vec<usize> = text
            .char_indices()
            .filter(|(_, c)| *c == '(' || *c == ')')
            .map(|(i, _)| i)
            .collect();
        let at = paren_positions[pick.index(paren_positions.len())];
        let mut mutated = text.clone();
        mutated.remove(at);
        prop_assert!(
            amr::parse_penman(&mutated).is_err(),
            "accepted after deleting a paren: {}",
            mutated
        );
    }

    // Re-declaring an existing variable must be rejected.
    #[test]
    fn amr_duplicate_declaration_rejected(graph in graph_strategy()) {
        let text = amr::serialize_penman(&graph);
        let root = graph.root.clone();
        let mutated = format!(
            "{} :extra ({root} / dup))",
            &text[..text.len() - 1]
        );
        prop_assert_eq!(
            amr::parse_penman(&mutated),
            Err(amr::AmrError::DuplicateVariable(root))
        );
    }
}

// ---------------------------------------------------------------------
// PST
// ---------------------------------------------------------------------

fn tree_strategy() -> impl Strategy<Value = PstTree> {
    let leaf = (
        select(vec![
            "NN".to_string(),
            "DT".to_string(),
            "VBD".to_string(),
            "ZZ".to_string(),
        ]),
        select(vec![
            "dog".to_string(),
            "the".to_string(),
            "saw".to_string(),
            "ran".to_string(),
        ]),
    )
        .prop_map(|(label, token)| PstTree::Leaf { label, token });
    leaf.prop_recursive(3, 24, 3, |inner| {
        (
            select(vec![
                "S".to_string(),
                "NP".to_string(),
                "VP".to_string(),
                "XP".to_string(),
            ]),
            proptest::collection::vec(inner, 1..4),
        )
            .prop_map(|(label, children)| PstTree::Internal { label, children })
    })
}

proptest! {
    #[test]
    fn pst_bracket_roundtrip(tree in tree_strategy()) {
        let text = pst::serialize_brackets(&tree);
        prop_assert_eq!(pst::parse_brackets(&text).unwrap(), tree);
    }

    #[test]
    fn pst_linearization_bijective(tree in tree_strategy()) {
        let linear = pst::dfs_linearize(&tree);
        prop_assert_eq!(linear.sequence.len(), tree.node_count());
        prop_assert_eq!(linear.sequence[0].depth, 0);
        let rebuilt = pst::from_linear(&linear).unwrap();
        prop_assert_eq!(&rebuilt, &tree);
        prop_assert_eq!(pst::dfs_linearize(&rebuilt), linear);
    }

    #[test]
    fn pst_paren_deletion_rejected(tree in tree_strategy(), pick in any::<Index>()) {
        let text = pst::serialize_brackets(&tree);
        let paren_positions: Vec<usize> = text
            .char_indices()
            .filter(|(_, c)| *c == '(' || *c == ')')
            .map(|(i, _)| i)
            .collect();
        let at = paren_positions[pick.index(paren_positions.len())];
        let mut mutated = text.clone();
        mutated.remove(at);
        prop_assert!(
            pst::parse_brackets(&mutated).is_err(),
            "accepted after deleting a paren: {}",
            mutated
        );
    }
}

// ---------------------------------------------------------------------
// FOL
// ---------------------------------------------------------------------

// Constants and quantifier variables come from disjoint pools, so the
// parser's binding-based term classification reproduces the AST, and the
// naive free-variable oracle below agrees with the scope-aware one.
fn fol_strategy() -> impl Strategy<Value = FolExpr> {
    fn term_strategy(bound: Vec<String>) -> impl Strategy<Value = Term> {
        let mut options: Vec<Term> = vec![
            Term::Constant("a".to_string()),
            Term::Constant("John".to_string()),
            Term::Constant("c1".to_string()),
        ];
        for var in bound {
            options.push(Term::Variable(var));
        }
        select(options)
    }

    fn expr_strategy(depth: u32, bound: Vec<String>) -> BoxedStrategy<FolExpr> {
        let atoms = {
            let bound = bound.clone();
            (
                select(vec!["p".to_string(), "q".to_string(), "likes".to_string()]),
                proptest::collection::vec(term_strategy(bound), 1..4),
            )
                .prop_map(|(predicate, args)| FolExpr::Atom { predicate, args })
        };
        if depth == 0 {
            return atoms.boxed();
        }
        let not = expr_strategy(depth - 1, bound.clone()).prop_map(FolExpr::not);
        let binary = (
            select(vec![BinOp::And, BinOp::Or, BinOp::Implies]),
            expr_strategy(depth - 1, bound.clone()),
            expr_strategy(depth - 1, bound.clone()),
        )
            .prop_map(|(op, l, r)| FolExpr::binary(op, l, r));
        let quantified = select(vec!["x".to_string(), "y".to_string(), "z".to_string()])
            .prop_flat_map(move |var| {
                let mut inner_bound = bound.clone();
                inner_bound.push(var.clone());
                (
                    select(vec![Quantifier::Forall, Quantifier::Exists]),
                    Just(var),
                    expr_strategy(depth - 1, inner_bound),
                )
                    .prop_map(|(q, var, body)| FolExpr::quantified(q, var, body))
            });
        prop_oneof![3 => atoms, 1 => not, 2 => binary, 2 => quantified].boxed()
    }

    expr_strategy(3, Vec::new())
}

fn naive_free_variables(expr: &FolExpr) -> BTreeSet<String> {
    fn atoms(expr: &FolExpr, vars: &mut BTreeSet<String>, bound_names: &mut BTreeSet<String>) {
        match expr {
            FolExpr::Atom { args, .. } => {
                for arg in args {
                    if let Term::Variable(name) = arg {
                        vars.insert(name.clone());
                    }
                }
            }
            FolExpr::Not { inner } => atoms(inner, vars, bound_names),
            FolExpr::Binary { left, right, .. } => {
                atoms(left, vars, bound_names);
                atoms(right, vars, bound_names);
            }
            FolExpr::Quantified { variable, body, .. } => {
                bound_names.insert(variable.clone());
                atoms(body, vars, bound_names);
            }
        }
    }
    let mut vars = BTreeSet::new();
    let mut bound = BTreeSet::new();
    atoms(expr, &mut vars, &mut bound);
    vars.difference(&bound).cloned().collect()
}

proptest! {
    #[test]
    fn fol_print_parse_roundtrip(expr in fol_strategy()) {
        let printed = fol::fol_to_string(&expr);
        let reparsed = fol::parse_fol(&printed)
            .unwrap_or_else(|e| panic!("printed `{printed}` failed to parse: {e}"));
        prop_assert_eq!(reparsed, expr);
    }

    #[test]
    fn fol_free_variables_match_bruteforce(expr in fol_strategy()) {
        let scope_aware: BTreeSet<String> = expr.free_variables().into_iter().collect();
        prop_assert_eq!(scope_aware, naive_free_variables(&expr));
    }
}

// ---------------------------------------------------------------------
// Mixing and scoring arithmetic
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn split_counts_partition_and_rounding(total in 0usize..100_000, ratio in 0.0f64..=1.0) {
        let (n_sr, n_text) = gensr::split_counts(total, ratio);
        prop_assert_eq!(n_sr + n_text, total);
        // Round-half-up means the split sits within half a record of the
        // exact ratio, never below it at ties.
        let exact = ratio * total as f64;
        prop_assert!((n_sr as f64 - exact).abs() <= 0.5 + 1e-9);
    }

    #[test]
    fn metrics_stay_in_percentage_range(
        golds in proptest::collection::vec(select(vec!["yes".to_string(), "no".to_string()]), 1..40),
        flips in proptest::collection::vec(any::<bool>(), 40),
    ) {
        let preds: Vec<String> = golds
            .iter()
            .zip(&flips)
            .map(|(g, flip)| {
                if *flip {
                    if g == "yes" { "no".to_string() } else { "yes".to_string() }
                } else {
                    g.clone()
                }
            })
            .collect();
        let label_set = vec!["yes".to_string(), "no".to_string()];
        let f1 = metrics::macro_f1(&preds, &golds, &label_set).unwrap();
        prop_assert!((0.0..=100.0).contains(&f1));
        let em = metrics::exact_match(&preds, &golds).unwrap();
        prop_assert!((0.0..=100.0).contains(&em));
    }

    #[test]
    fn bleu_in_range_on_arbitrary_text(
        hyp in "[a-z ]{0,40}",
        reference in "[a-z ]{1,40}",
    ) {
        let value = metrics::bleu(&[hyp], &[reference]).unwrap();
        prop_assert!((0.0..=100.0).contains(&value));
    }

    #[test]
    fn extract_answer_never_panics(raw in any::<String>()) {
        let labels = LabelCatalog::bundled();
        for task in Task::ALL {
            let _ = extract_answer(task, &raw, &labels);
        }
    }
}

// ---------------------------------------------------------------------
// Parser totality: arbitrary input may be rejected, never panic
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn parsers_never_panic_on_arbitrary_input(text in any::<String>()) {
        let _ = amr::parse_penman(&text);
        let _ = pst::parse_brackets(&text);
        let _ = fol::parse_fol(&text);
    }

    #[test]
    fn parsers_never_panic_on_bracket_soup(text in "[()a-z/ \"~:.\u{00a0}\u{0445}]{0,60}") {
        let _ = amr::parse_penman(&text);
        let _ = pst::parse_brackets(&text);
        let _ = fol::parse_fol(&text);
    }
}

//! Turn first-order-logic formulas into plain-English sentences, with
//! and without verb entries in the dictionary.
//!
//! ```bash
//! cargo run --example fol_to_description
//! ```

use srnld::fol;
use srnld::nld::{self, RelationDictionary, SrKind};

fn main() {
    let bundled = RelationDictionary::bundled(SrKind::Fol);
    for text in [
        "dog(x)",
        "exists x (dog(x) & see(John, x))",
        "~p(x)",
        "forall x (human(x) -> mortal(x))",
        "love(John, Mary)",
    ] {
        let doc = nld::to_nld(text, SrKind::Fol, &bundled).unwrap();
        println!("{text}\n  -> {}", doc.sentences.join(" "));
    }

    // A custom verb entry changes how an atom reads.
    let custom = RelationDictionary::load_str(SrKind::Fol, "\"see\"\t\"{0} sees {1}\"").unwrap();
    let expr = fol::parse_fol("exists x (dog(x) & see(John, x))").unwrap();
    println!(
        "\nwith a verb entry for `see`:\n  -> {}",
        nld::fol_to_sentences(&expr, &custom).join(" ")
    );

    // Hand-built formulas may carry free variables; they get inventoried.
    use srnld::fol::{BinOp, FolExpr, Term};
    let open_formula = FolExpr::binary(
        BinOp::And,
        FolExpr::atom("p", vec![Term::Variable("u".into())]),
        FolExpr::atom("q", vec![Term::Variable("v".into())]),
    );
    println!(
        "\nfree variables are reported:\n  -> {}",
        nld::fol_to_sentences(&open_formula, &bundled).join(" ")
    );
}

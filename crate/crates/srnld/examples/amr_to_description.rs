//! Turn an AMR graph into description sentences: triplets, identifier
//! instantiation, dictionary mapping, and the coverage log.
//!
//! ```bash
//! cargo run --example amr_to_description
//! ```

use srnld::amr;
use srnld::nld::{self, RelationDictionary, SrKind};

fn main() {
    let text = r#"(s / see-01 :ARG0 (p / person :name (n / name :op1 "John")) :ARG1 (d / dog) :weird (w / thing))"#;
    let dict = RelationDictionary::bundled(SrKind::Amr);

    let graph = amr::parse_penman(text).unwrap();
    let triplets = amr::to_triplets(&graph);
    println!("instantiated triplets (variables replaced by concepts):");
    for t in nld::instantiate_identifiers(&triplets).unwrap() {
        println!("  {t}");
    }

    let (doc, coverage) = nld::to_nld_logged(text, SrKind::Amr, &dict).unwrap();
    println!("\nsentences:");
    for sentence in &doc.sentences {
        println!("  {sentence}");
    }
    println!(
        "\ndictionary hits:      {:?}",
        coverage.hits.keys().collect::<Vec<_>>()
    );
    println!(
        "default-template uses: {:?}",
        coverage.fallbacks.keys().collect::<Vec<_>>()
    );
    println!("dictionary hash:       {}", doc.dict_hash);

    // Two variables sharing a concept get numbered in appearance order.
    let twins = nld::to_nld(
        "(a / and :op1 (d / dog) :op2 (d2 / dog))",
        SrKind::Amr,
        &dict,
    )
    .unwrap();
    println!("\nshared concepts disambiguated:");
    for sentence in &twins.sentences {
        println!("  {sentence}");
    }
}

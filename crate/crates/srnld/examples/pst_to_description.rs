//! Turn a constituency tree into one description sentence per node.
//!
//! ```bash
//! cargo run --example pst_to_description
//! ```

use srnld::nld::{self, RelationDictionary, SrKind};

fn main() {
    let text = "(S (NP (NNP John)) (VP (VBD saw) (NP (DT a) (NN dog))) (. .))";
    let dict = RelationDictionary::bundled(SrKind::Pst);

    let (doc, coverage) = nld::to_nld_logged(text, SrKind::Pst, &dict).unwrap();
    println!("one sentence per tree node, pre-order:");
    for sentence in &doc.sentences {
        println!("  {sentence}");
    }
    println!(
        "\ntags hit in the dictionary: {:?}",
        coverage.hits.keys().collect::<Vec<_>>()
    );

    // Unknown tags fall back to the raw label and land in the log.
    let (odd, log) = nld::to_nld_logged("(WEIRDP (ZZ blorp))", SrKind::Pst, &dict).unwrap();
    println!("\nunknown tags fall back to their raw spelling:");
    for sentence in &odd.sentences {
        println!("  {sentence}");
    }
    println!("fallbacks: {:?}", log.fallbacks.keys().collect::<Vec<_>>());
}

//! Polish description sentences without a model, and pick among multiple
//! generations by medoid voting.
//!
//! ```bash
//! cargo run --example offline_refine
//! ```

use srnld::nld::{self, RelationDictionary, SrKind};
use srnld::refine::{self, RefinerConfig};

fn main() {
    let dict = RelationDictionary::bundled(SrKind::Amr);
    let doc = nld::to_nld(
        "(s / see-01 :ARG0 (p / person) :ARG1 (d / dog) :time (y / yesterday))",
        SrKind::Amr,
        &dict,
    )
    .unwrap();
    println!("sentences:");
    for s in &doc.sentences {
        println!("  {s}");
    }
    println!("\noffline refinement (consecutive sentences about the same subject merge):");
    println!("  {}", refine::refine_offline(&doc.sentences).unwrap());

    // Medoid voting: the candidate closest to the others wins; an outlier
    // generation cannot.
    let candidates = [
        "The person saw the dog yesterday.",
        "The person saw the dog yesterday.",
        "A completely unrelated hallucination about cats.",
    ];
    let mut i = 0;
    let config = RefinerConfig {
        votes: 3,
        ..RefinerConfig::default()
    };
    let winner = refine::refine_with_votes(&doc.sentences, &config, || {
        let candidate = candidates[i].to_string();
        i += 1;
        Ok(candidate)
    })
    .unwrap();
    println!("\nmedoid of three generations:");
    println!("  {winner}");
}

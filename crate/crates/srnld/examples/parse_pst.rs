//! Parse a bracketed constituency tree and walk its depth-first
//! linearization.
//!
//! ```bash
//! cargo run --example parse_pst
//! ```

use srnld::pst;

fn main() {
    let text = "(S (NP (NNP John)) (VP (VBD saw) (NP (DT a) (NN dog))))";
    let tree = pst::parse_brackets(text).expect("valid brackets");
    println!("root:  {}", tree.label());
    println!("nodes: {}", tree.node_count());
    println!("json:  {}", tree.to_json());

    println!("\npre-order linearization (depth, label, token):");
    for entry in &pst::dfs_linearize(&tree).sequence {
        match &entry.token {
            Some(token) => println!(
                "  {:indent$}{} {}",
                "",
                entry.label,
                token,
                indent = entry.depth * 2
            ),
            None => println!("  {:indent$}{}", "", entry.label, indent = entry.depth * 2),
        }
    }

    // The PTB file convention with a label-less outer wrapper also parses.
    let wrapped = pst::parse_brackets("((NN dog))").unwrap();
    println!("\nwrapped leaf: {}", pst::serialize_brackets(&wrapped));
}

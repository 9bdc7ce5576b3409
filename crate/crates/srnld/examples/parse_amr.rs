//! Parse PENMAN text, decompose the graph into triplets, and serialize
//! it back.
//!
//! ```bash
//! cargo run --example parse_amr
//! ```

use srnld::amr;

fn main() {
    let text = r#"(s / see-01
    :ARG0 (p / person
        :name (n / name
            :op1 "John"))
    :ARG1 (d / dog)
    :time (y / yesterday))"#;

    let graph = amr::parse_penman(text).expect("valid PENMAN");
    println!("root:  {}", graph.root);
    println!("nodes: {}", graph.nodes.len());
    println!("edges: {}", graph.edges.len());
    println!("json:  {}", graph.to_json());

    println!("\ntriplets (depth-first, instance at first visit):");
    for triplet in amr::to_triplets(&graph) {
        println!("  {triplet}");
    }

    // Re-entrancy: the second reference to `b` stays a bare variable.
    let reentrant = amr::parse_penman("(a / and :op1 (b / boy) :op2 b)").unwrap();
    println!(
        "\nre-entrant graph serialized:\n{}",
        amr::serialize_penman(&reentrant)
    );
}

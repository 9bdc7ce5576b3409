//! Parse first-order-logic formulas and print them back with minimal
//! parentheses.
//!
//! ```bash
//! cargo run --example parse_fol
//! ```

use srnld::fol;

fn main() {
    for text in [
        "exists x (dog(x) & see(John, x))",
        "~p(x) & q(x)",
        "forall x p(x) -> q(x)",
        "(forall x p(x)) -> q(a)",
        "∀x (mortal(x) ∨ ¬human(x))",
    ] {
        let expr = fol::parse_fol(text).expect("valid formula");
        println!("input:   {text}");
        println!("printed: {}", fol::fol_to_string(&expr));
        println!("json:    {}", expr.to_json());
        let free = expr.free_variables();
        if !free.is_empty() {
            println!("free:    {free:?}");
        }
        println!();
    }
}

//! Renders formulas into English through an ontology's glossary, with and
//! without preserved grouping.

use folbench::corpus::tarski_ontology;
use folbench::fol::parse_formula;
use folbench::nlgen::{translate, translate_parenthesized};

fn main() {
    let onto = tarski_ontology();
    for src in [
        "∀x (Cube(x) → Small(x))",
        "∃x (Tet(x) ∧ ¬LeftOf(x, a))",
        "(Cube(a) ∨ Tet(a)) ∧ Large(b)",
        "¬∀x (Dodec(x) → ∃y Larger(y, x))",
    ] {
        let f = parse_formula(src, onto.signature()).unwrap();
        println!("{src}");
        println!("  {}", translate(&f, onto.glossary()).unwrap());
        println!("  {}", translate_parenthesized(&f, onto.glossary()).unwrap());
    }
}

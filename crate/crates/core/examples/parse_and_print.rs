//! Parses formulas in the accepted surface syntaxes and prints them back in
//! canonical form, showing how precedence resolves unparenthesized input.

use folbench::fol::{parse_inferring, print_formula, ParseOptions};

fn main() {
    let inputs = [
        "∀x Country(x) ∧ InEU(x) → EUCountry(x)",
        "forall x (Musician(x) -> exists y Love(x, y))",
        "A(a) | B(a) & ~C(a) <-> D(a)",
        "P(a) → Q(a) → R(a)",
    ];
    for src in inputs {
        let (parsed, sig) = parse_inferring(src, ParseOptions::default()).expect("well-formed input");
        let preds: Vec<String> = sig.predicates.iter().map(|(p, n)| format!("{p}/{n}")).collect();
        println!("{src}");
        println!("  canonical:  {}", print_formula(&parsed.formula));
        println!("  predicates: {}", preds.join(", "));
    }

    match parse_inferring("∀x (P(x) ∧", ParseOptions::default()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}

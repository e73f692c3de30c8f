//! LE score with its truth table, BLEU over formula tokens, and the case
//! where LE rates two inequivalent formulas as identical.

use folbench::fol::{parse_inferring, ParseOptions};
use folbench::metrics::{bleu_formula, default_matching, le_score, PredicateMatching};
use folbench::Formula;

fn p(s: &str) -> Formula {
    parse_inferring(s, ParseOptions::default()).unwrap().0.formula
}

fn main() {
    let phi = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
    let phi2 = p("∀y CountryInEU(y) → EUCountry(y)");
    let m = PredicateMatching::from_pairs(&phi, &phi2, [("InEU", "CountryInEU"), ("EUCountry", "EUCountry")]);
    let le = le_score(&phi, &phi2, &m).unwrap();
    println!("{}", le.table.render());
    println!("LE   = {:.3}", le.value());
    println!("BLEU = {:.4}", bleu_formula(&phi, &phi2));

    let exists = p("∃x Country(x) ∧ InEU(x) → EUCountry(x)");
    let le = le_score(&exists, &phi, &default_matching(&exists, &phi)).unwrap();
    println!("\nLE(∃-version, ∀-version) = {:.3}, although the sentences differ", le.value());
}

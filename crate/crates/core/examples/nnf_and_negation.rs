//! Negation and negation normal form; the NNF of `¬φ` is the fourth
//! reference candidate of the ranking task.

use folbench::fol::{negate, parse_inferring, print_formula, to_nnf, ParseOptions};

fn main() {
    let src = "∀x (Cube(x) → ∃y (Larger(x, y) ∧ ¬Small(y)))";
    let phi = parse_inferring(src, ParseOptions::default()).unwrap().0.formula;
    let neg = negate(&phi);
    let nnf = to_nnf(&neg);
    println!("φ        {}", print_formula(&phi));
    println!("¬φ       {}", print_formula(&neg));
    println!("NNF(¬φ)  {}", print_formula(&nnf));
    assert!(nnf.is_nnf());
    assert_eq!(to_nnf(&nnf), nnf);
}

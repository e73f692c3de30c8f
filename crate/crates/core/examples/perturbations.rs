//! Enumerates every single-edit perturbation of a formula, then draws a
//! seeded sample as the candidate builder does.

use folbench::fol::{parse_inferring, print_formula, ParseOptions};
use folbench::transform::{enumerate_perturbations, sample_perturbations};

fn main() {
    let phi = parse_inferring("∀x (Cube(x) ∧ Small(x) → ∃y LeftOf(x, y))", ParseOptions::default())
        .unwrap()
        .0
        .formula;
    println!("φ = {}", print_formula(&phi));
    for p in enumerate_perturbations(&phi) {
        println!("  site {:>2} {:<18} {}", p.site, p.kind.name(), print_formula(&p.formula));
    }
    println!("seeded sample of 3:");
    for f in sample_perturbations(&phi, 3, 26) {
        println!("  {}", print_formula(&f));
    }
}

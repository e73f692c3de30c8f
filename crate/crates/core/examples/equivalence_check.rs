//! Decides equivalence with the bounded finite-model oracle and, when a
//! solver executable is available, with the SMT solver.

use folbench::equiv::{brute_force_check, EquivVerdict, emit_smtlib, solver_check, Solver, DEFAULT_TIMEOUT_MS};
use folbench::fol::{parse_formula, print_formula};
use folbench::Signature;

fn main() {
    let sig = Signature::new()
        .with_predicate("Turtle", 1)
        .with_predicate("Shell", 1)
        .with_predicate("CanSwim", 1);
    let p = |s: &str| parse_formula(s, &sig).unwrap();
    let pairs = [
        (p("∀x (Turtle(x) → Shell(x))"), p("∀x (¬Shell(x) → ¬Turtle(x))")),
        (p("∃x (Turtle(x) → Shell(x) ∧ CanSwim(x))"), p("∃x (Turtle(x) ∧ Shell(x) ∧ CanSwim(x))")),
    ];
    let solver_ready = Solver::new(Default::default()).is_available();
    for (f, g) in &pairs {
        println!("{}  vs  {}", print_formula(f), print_formula(g));
        let oracle = brute_force_check(f, g, &sig, 3, 200_000).unwrap();
        match &oracle {
            EquivVerdict::Unknown { .. } => println!("  oracle: unknown (no separating structure up to size 3)"),
            v => println!("  oracle: {}", v.label()),
        }
        if let Some(w) = oracle.witness() {
            println!("  witness: {}", serde_json::to_string(w).unwrap());
        }
        if solver_ready {
            println!("  solver: {}", solver_check(f, g, &sig, DEFAULT_TIMEOUT_MS).unwrap().label());
        }
    }
    if !solver_ready {
        println!("(no solver on PATH; set FOLBENCH_SOLVER to enable it)");
    }
    println!("\n{}", emit_smtlib(&pairs[0].0, &pairs[0].1, &sig).unwrap());
}

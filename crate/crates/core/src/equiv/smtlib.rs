use std::fmt::Write;

use crate::fol::{Connective, Formula, Quantifier, Signature, Term};

use super::EquivError;

pub const UNIVERSE_SORT: &str = "U";

const RESERVED: &[&str] = &[
    "and", "or", "not", "=>", "=", "xor", "ite", "true", "false", "forall", "exists", "let", "distinct",
    "as", "par", "_", "!", "Bool", "U", "assert", "check-sat", "declare-fun", "define-fun",
    "declare-sort", "set-option", "set-logic", "get-model", "push", "pop", "exit", "match",
];

/// Renders a user symbol, quoting it when it is not a plain SMT-LIB symbol.
pub fn smt_symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && !RESERVED.contains(&name);
    if simple {
        name.to_string()
    } else {
        format!("|{}|", name.replace(['|', '\\'], "_"))
    }
}

fn term(t: &Term, out: &mut String) {
    match t {
        Term::Variable { name } | Term::Constant { name } => out.push_str(&smt_symbol(name)),
        Term::Function { name, args } => {
            out.push('(');
            out.push_str(&smt_symbol(name));
            for a in args {
                out.push(' ');
                term(a, out);
            }
            out.push(')');
        }
    }
}

/// SMT-LIB2 term for a formula over the uninterpreted sort `U`.
pub fn formula_to_smt(f: &Formula) -> String {
    let mut out = String::new();
    formula(f, &mut out);
    out
}

fn formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom { predicate, args } => {
            if args.is_empty() {
                out.push_str(&smt_symbol(predicate));
            } else {
                out.push('(');
                out.push_str(&smt_symbol(predicate));
                for a in args {
                    out.push(' ');
                    term(a, out);
                }
                out.push(')');
            }
        }
        Formula::Not { inner } => {
            out.push_str("(not ");
            formula(inner, out);
            out.push(')');
        }
        Formula::Binary { op, left, right } => {
            let head = match op {
                Connective::And => "and",
                Connective::Or => "or",
                Connective::Implies => "=>",
                Connective::Iff => "=",
            };
            out.push('(');
            out.push_str(head);
            out.push(' ');
            formula(left, out);
            out.push(' ');
            formula(right, out);
            out.push(')');
        }
        Formula::Quantified {
            quantifier,
            var,
            body,
        } => {
            let head = match quantifier {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            let _ = write!(out, "({head} (({} {UNIVERSE_SORT})) ", smt_symbol(var));
            formula(body, out);
            out.push(')');
        }
    }
}

/// Script whose `unsat` answer proves `f1 ≡ f2`: it asserts `¬(f1 ↔ f2)`.
///
/// Every symbol of `sig` is declared, in sorted order, so identical inputs
/// produce identical bytes.
pub fn emit_smtlib(f1: &Formula, f2: &Formula, sig: &Signature) -> Result<String, EquivError> {
    let mut out = prelude(f1, f2, sig, "; equivalence query: unsat iff the two formulas are equivalent\n")?;
    let _ = writeln!(
        out,
        "(assert (not (= {} {})))",
        formula_to_smt(f1),
        formula_to_smt(f2)
    );
    out.push_str("(check-sat)\n");
    Ok(out)
}

/// Script whose `unsat` answer proves `f1 ⊨ f2`: it asserts `f1` and `¬f2`.
///
/// Each quantifier keeps a single polarity here, which solvers handle far
/// better than the same quantifier on both sides of a negated `=`.
pub fn emit_entailment(f1: &Formula, f2: &Formula, sig: &Signature) -> Result<String, EquivError> {
    let mut out = prelude(f1, f2, sig, "; entailment query: unsat iff the first formula entails the second\n")?;
    let _ = writeln!(out, "(assert {})", formula_to_smt(f1));
    let _ = writeln!(out, "(assert (not {}))", formula_to_smt(f2));
    out.push_str("(check-sat)\n");
    Ok(out)
}

fn prelude(f1: &Formula, f2: &Formula, sig: &Signature, comment: &str) -> Result<String, EquivError> {
    for f in [f1, f2] {
        sig.check(f)?;
        let free = f.free_vars();
        if !free.is_empty() {
            return Err(EquivError::UnsupportedConstruct(format!(
                "formula has free variables: {}",
                free.into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
    }
    let mut out = String::from(comment);
    out.push_str("(set-option :produce-models true)\n");
    let _ = writeln!(out, "(declare-sort {UNIVERSE_SORT} 0)");
    for c in sig.constants.iter() {
        let _ = writeln!(out, "(declare-fun {} () {UNIVERSE_SORT})", smt_symbol(c));
    }
    for (f, arity) in sig.functions.iter() {
        let args = vec![UNIVERSE_SORT; *arity].join(" ");
        let _ = writeln!(out, "(declare-fun {} ({args}) {UNIVERSE_SORT})", smt_symbol(f));
    }
    for (p, arity) in sig.predicates.iter() {
        let args = vec![UNIVERSE_SORT; *arity].join(" ");
        let _ = writeln!(out, "(declare-fun {} ({args}) Bool)", smt_symbol(p));
    }
    Ok(out)
}

use super::syntax::{Connective, Formula};

/// Wraps `f` in a single negation, without simplification.
pub fn negate(f: &Formula) -> Formula {
    Formula::not(f.clone())
}

/// Negation normal form: `→` and `↔` are expanded, then negations are pushed
/// down until they sit directly above atoms.
///
/// `α → β` becomes `¬α ∨ β` and `α ↔ β` becomes `(¬α ∨ β) ∧ (¬β ∨ α)`.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, negated: bool) -> Formula {
    match f {
        Formula::Atom { .. } => {
            if negated {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not { inner } => nnf(inner, !negated),
        Formula::Binary { op, left, right } => match (op, negated) {
            (Connective::And, false) => Formula::and(nnf(left, false), nnf(right, false)),
            (Connective::And, true) => Formula::or(nnf(left, true), nnf(right, true)),
            (Connective::Or, false) => Formula::or(nnf(left, false), nnf(right, false)),
            (Connective::Or, true) => Formula::and(nnf(left, true), nnf(right, true)),
            (Connective::Implies, false) => Formula::or(nnf(left, true), nnf(right, false)),
            (Connective::Implies, true) => Formula::and(nnf(left, false), nnf(right, true)),
            (Connective::Iff, _) => {
                let expanded = Formula::and(
                    Formula::or(Formula::not((**left).clone()), (**right).clone()),
                    Formula::or(Formula::not((**right).clone()), (**left).clone()),
                );
                nnf(&expanded, negated)
            }
        },
        Formula::Quantified {
            quantifier,
            var,
            body,
        } => {
            let q = if negated { quantifier.dual() } else { *quantifier };
            Formula::quantified(q, var.clone(), nnf(body, negated))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_inferring, ParseOptions};

    fn p(s: &str) -> Formula {
        parse_inferring(s, ParseOptions::default()).unwrap().0.formula
    }

    #[test]
    fn de_morgan() {
        assert_eq!(to_nnf(&p("¬(A(c) ∧ B(c))")), p("¬A(c) ∨ ¬B(c)"));
    }

    #[test]
    fn quantifier_duality() {
        assert_eq!(to_nnf(&p("¬∀x P(x)")), p("∃x ¬P(x)"));
    }

    #[test]
    fn negated_implication() {
        assert_eq!(to_nnf(&p("¬(P(c) → Q(c))")), p("P(c) ∧ ¬Q(c)"));
    }

    #[test]
    fn negated_universal_conditional() {
        assert_eq!(
            to_nnf(&p("¬∀x (P(x) → Q(x))")),
            p("∃x (P(x) ∧ ¬Q(x))")
        );
    }

    #[test]
    fn biconditional_expansion() {
        assert_eq!(
            to_nnf(&p("A(c) ↔ B(c)")),
            p("(¬A(c) ∨ B(c)) ∧ (¬B(c) ∨ A(c))")
        );
        assert_eq!(
            to_nnf(&p("¬(A(c) ↔ B(c))")),
            p("(A(c) ∧ ¬B(c)) ∨ (B(c) ∧ ¬A(c))")
        );
    }

    #[test]
    fn negate_is_verbatim() {
        let f = p("¬P(a)");
        assert_eq!(negate(&f), Formula::not(f.clone()));
        assert_eq!(negate(&f).to_string(), "¬¬P(a)");
    }

    #[test]
    fn idempotent_on_examples() {
        for s in ["¬(A(c) ↔ ∃x B(x))", "∀x (P(x) → ¬∃y R(x, y))", "¬¬¬P(c)"] {
            let once = to_nnf(&p(s));
            assert!(once.is_nnf(), "{once}");
            assert_eq!(to_nnf(&once), once);
        }
    }
}

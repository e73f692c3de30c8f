use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fol::{to_nnf, Connective, Formula};
use crate::seeding;

/// Equivalence-preserving rewrite rules, each applied left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewriteRule {
    /// `¬(α ∧ β) ⇒ ¬α ∨ ¬β` and `¬(α ∨ β) ⇒ ¬α ∧ ¬β`.
    DeMorgan,
    /// `α ⇒ ¬((¬α)_nnf)`.
    DoubleNegation,
    /// `α ∘ β ⇒ β ∘ α` for `∘ ∈ {∧, ∨}`.
    Commutativity,
    /// `α ∧ (β ∨ γ) ⇒ (α ∧ β) ∨ (α ∧ γ)` and its dual.
    Distributivity,
    /// `α → β ⇒ ¬α ∨ β`.
    ImplicationExpansion,
}

impl RewriteRule {
    pub const ALL: [RewriteRule; 5] = [
        RewriteRule::DeMorgan,
        RewriteRule::DoubleNegation,
        RewriteRule::Commutativity,
        RewriteRule::Distributivity,
        RewriteRule::ImplicationExpansion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RewriteRule::DeMorgan => "de_morgan",
            RewriteRule::DoubleNegation => "double_negation",
            RewriteRule::Commutativity => "commutativity",
            RewriteRule::Distributivity => "distributivity",
            RewriteRule::ImplicationExpansion => "implication_expansion",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Rewrites of the node `g` itself.
    pub fn apply_here(self, g: &Formula) -> Vec<Formula> {
        use Connective::{And, Or};
        match (self, g) {
            (RewriteRule::DeMorgan, Formula::Not { inner }) => match inner.as_ref() {
                Formula::Binary { op: op @ (And | Or), left, right } => {
                    let dual = if *op == And { Or } else { And };
                    vec![Formula::binary(
                        dual,
                        Formula::not((**left).clone()),
                        Formula::not((**right).clone()),
                    )]
                }
                _ => vec![],
            },
            (RewriteRule::DoubleNegation, g) => vec![Formula::not(to_nnf(&Formula::not(g.clone())))],
            (RewriteRule::Commutativity, Formula::Binary { op: op @ (And | Or), left, right }) => {
                vec![Formula::binary(*op, (**right).clone(), (**left).clone())]
            }
            (RewriteRule::Distributivity, Formula::Binary { op: outer @ (And | Or), left, right }) => {
                let inner_op = if *outer == And { Or } else { And };
                match right.as_ref() {
                    Formula::Binary { op, left: b, right: c } if *op == inner_op => vec![Formula::binary(
                        inner_op,
                        Formula::binary(*outer, (**left).clone(), (**b).clone()),
                        Formula::binary(*outer, (**left).clone(), (**c).clone()),
                    )],
                    _ => vec![],
                }
            }
            (RewriteRule::ImplicationExpansion, Formula::Binary { op: Connective::Implies, left, right }) => {
                vec![Formula::or(Formula::not((**left).clone()), (**right).clone())]
            }
            _ => vec![],
        }
    }
}

/// One applicable rewrite of a formula.
#[derive(Debug, Clone, PartialEq)]
pub struct Rewrite {
    pub formula: Formula,
    pub rule: RewriteRule,
    /// Pre-order index of the rewritten subformula.
    pub site: usize,
}

/// Every (site, rule) rewrite whose result differs from `f`, in site order.
pub fn applicable_rewrites(f: &Formula) -> Vec<Rewrite> {
    let mut nodes = Vec::new();
    f.visit(&mut |n| nodes.push(n));
    let mut out = Vec::new();
    for (site, node) in nodes.into_iter().enumerate() {
        for rule in RewriteRule::ALL {
            for replacement in rule.apply_here(node) {
                let formula = f.replace_at(site, replacement);
                if formula != *f {
                    out.push(Rewrite { formula, rule, site });
                }
            }
        }
    }
    out
}

/// A logically equivalent, structurally different variant of `f`, with the
/// rule used, chosen uniformly over applicable (site, rule) pairs.
pub fn equivalent_rewrite(f: &Formula, seed: u64) -> (Formula, RewriteRule) {
    let r = equivalent_rewrite_with(f, &mut seeding::rng_from(seed));
    (r.formula, r.rule)
}

pub fn equivalent_rewrite_with<R: Rng + ?Sized>(f: &Formula, rng: &mut R) -> Rewrite {
    let mut all = applicable_rewrites(f);
    // double negation on any atom always changes the formula
    assert!(!all.is_empty(), "every formula has an atom");
    let i = rng.random_range(0..all.len());
    all.swap_remove(i)
}

/// Like [`equivalent_rewrite`], restricted to one rule; `None` if it never applies.
pub fn rewrite_with_rule(f: &Formula, rule: RewriteRule, seed: u64) -> Option<Formula> {
    let mut all: Vec<Rewrite> = applicable_rewrites(f).into_iter().filter(|r| r.rule == rule).collect();
    if all.is_empty() {
        return None;
    }
    let i = seeding::rng_from(seed).random_range(0..all.len());
    Some(all.swap_remove(i).formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_inferring, print_formula, ParseOptions};

    fn p(src: &str) -> Formula {
        parse_inferring(src, ParseOptions::default()).unwrap().0.formula
    }

    #[test]
    fn atom_only_double_negation() {
        let (g, rule) = equivalent_rewrite(&p("P(a)"), 7);
        assert_eq!(rule, RewriteRule::DoubleNegation);
        assert_eq!(print_formula(&g), "¬¬P(a)");
    }

    #[test]
    fn named_rules() {
        let g = rewrite_with_rule(&p("A(x) ∧ B(x)"), RewriteRule::Commutativity, 1).unwrap();
        assert_eq!(g, p("B(x) ∧ A(x)"));
        let g = rewrite_with_rule(&p("P(x) → Q(x)"), RewriteRule::ImplicationExpansion, 1).unwrap();
        assert_eq!(g, p("¬P(x) ∨ Q(x)"));
        let g = rewrite_with_rule(&p("¬(A(x) ∨ B(x))"), RewriteRule::DeMorgan, 1).unwrap();
        assert_eq!(g, p("¬A(x) ∧ ¬B(x)"));
        assert!(rewrite_with_rule(&p("A(x) → B(x)"), RewriteRule::Commutativity, 1).is_none());
        assert!(rewrite_with_rule(&p("A(x) ↔ B(x)"), RewriteRule::Commutativity, 1).is_none());
    }

    #[test]
    fn distributivity_left_form_only() {
        let dist = |src: &str| -> Vec<Formula> {
            applicable_rewrites(&p(src))
                .into_iter()
                .filter(|r| r.rule == RewriteRule::Distributivity)
                .map(|r| r.formula)
                .collect()
        };
        assert_eq!(dist("A(x) ∧ (B(x) ∨ C(x))"), vec![p("A(x) ∧ B(x) ∨ A(x) ∧ C(x)")]);
        assert_eq!(dist("A(x) ∨ B(x) ∧ C(x)"), vec![p("(A(x) ∨ B(x)) ∧ (A(x) ∨ C(x))")]);
        assert!(dist("(B(x) ∧ C(x)) ∨ A(x)").is_empty());
    }

    #[test]
    fn trivial_double_negation_is_skipped() {
        // ¬((¬¬P)_nnf) = ¬P at the root changes nothing
        let f = p("¬P(a)");
        assert!(applicable_rewrites(&f).iter().all(|r| r.formula != f));
        assert!(applicable_rewrites(&p("P(a) ∧ P(a)"))
            .iter()
            .all(|r| r.rule != RewriteRule::Commutativity));
    }

    #[test]
    fn deterministic_in_seed() {
        let f = p("∀x (A(x) → B(x) ∨ ¬C(x))");
        assert_eq!(equivalent_rewrite(&f, 26), equivalent_rewrite(&f, 26));
        for seed in 0..50 {
            assert_ne!(equivalent_rewrite(&f, seed).0, f);
        }
    }
}

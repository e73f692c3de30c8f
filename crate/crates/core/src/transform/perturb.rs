use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fol::{Connective, Formula};
use crate::seeding;

/// One elementary syntactic edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "edit", rename_all = "snake_case")]
pub enum EditKind {
    ConnectiveSwap { from: Connective, to: Connective },
    QuantifierFlip,
    NegationInsert,
    NegationRemove,
}

impl EditKind {
    pub fn name(&self) -> &'static str {
        match self {
            EditKind::ConnectiveSwap { .. } => "connective_swap",
            EditKind::QuantifierFlip => "quantifier_flip",
            EditKind::NegationInsert => "negation_insert",
            EditKind::NegationRemove => "negation_remove",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub formula: Formula,
    pub kind: EditKind,
    /// Pre-order index of the edited node in the original formula.
    pub site: usize,
}

/// Every formula one elementary edit away from `f`, deduplicated, in
/// pre-order site order.
///
/// A positive literal gains a `¬`; a negative literal loses it. The atom
/// inside a negative literal is not itself a site.
pub fn enumerate_perturbations(f: &Formula) -> Vec<Perturbation> {
    let mut nodes = Vec::new();
    f.visit(&mut |n| nodes.push(n));
    let mut out: Vec<Perturbation> = Vec::new();
    let push = |formula: Formula, kind: EditKind, site: usize, out: &mut Vec<Perturbation>| {
        if formula != *f && !out.iter().any(|p| p.formula == formula) {
            out.push(Perturbation { formula, kind, site });
        }
    };
    let mut i = 0;
    while i < nodes.len() {
        match nodes[i] {
            Formula::Binary { op, left, right } => {
                for to in Connective::ALL.into_iter().filter(|c| c != op) {
                    let edited = Formula::binary(to, (**left).clone(), (**right).clone());
                    push(f.replace_at(i, edited), EditKind::ConnectiveSwap { from: *op, to }, i, &mut out);
                }
            }
            Formula::Quantified { quantifier, var, body } => {
                let edited = Formula::quantified(quantifier.dual(), var.clone(), (**body).clone());
                push(f.replace_at(i, edited), EditKind::QuantifierFlip, i, &mut out);
            }
            Formula::Not { inner } if inner.is_atom() => {
                push(f.replace_at(i, (**inner).clone()), EditKind::NegationRemove, i, &mut out);
                // the wrapped atom belongs to this literal
                i += 1;
            }
            atom @ Formula::Atom { .. } => {
                push(f.replace_at(i, Formula::not(atom.clone())), EditKind::NegationInsert, i, &mut out);
            }
            Formula::Not { .. } => {}
        }
        i += 1;
    }
    out
}

/// Uniform sample of `min(k, available)` perturbations without replacement.
pub fn sample_perturbations(f: &Formula, k: usize, seed: u64) -> Vec<Formula> {
    sample_perturbations_with(f, k, &mut seeding::rng_from(seed))
        .into_iter()
        .map(|p| p.formula)
        .collect()
}

pub fn sample_perturbations_with<R: Rng + ?Sized>(f: &Formula, k: usize, rng: &mut R) -> Vec<Perturbation> {
    sample_from(enumerate_perturbations(f), k, rng)
}

pub(crate) fn sample_from<R: Rng + ?Sized>(mut pool: Vec<Perturbation>, k: usize, rng: &mut R) -> Vec<Perturbation> {
    let n = k.min(pool.len());
    let picked = rand::seq::index::sample(rng, pool.len(), n).into_vec();
    let mut slots: Vec<Option<Perturbation>> = pool.drain(..).map(Some).collect();
    picked
        .into_iter()
        .map(|i| slots[i].take().expect("indices are distinct"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_inferring, print_formula, ParseOptions};

    fn p(src: &str) -> Formula {
        parse_inferring(src, ParseOptions::default()).unwrap().0.formula
    }

    fn printed(f: &Formula) -> Vec<String> {
        enumerate_perturbations(f).iter().map(|p| print_formula(&p.formula)).collect()
    }

    #[test]
    fn atom_admits_only_negation() {
        assert_eq!(printed(&p("P(a)")), vec!["¬P(a)"]);
        assert_eq!(printed(&p("¬P(a)")), vec!["P(a)"]);
    }

    #[test]
    fn quantified_atom() {
        assert_eq!(printed(&p("∀x P(x)")), vec!["∃x P(x)", "∀x ¬P(x)"]);
    }

    #[test]
    fn binary_conjunction() {
        let got = printed(&p("P(a) ∧ Q(a)"));
        assert_eq!(
            got,
            vec!["P(a) ∨ Q(a)", "P(a) → Q(a)", "P(a) ↔ Q(a)", "¬P(a) ∧ Q(a)", "P(a) ∧ ¬Q(a)"]
        );
    }

    #[test]
    fn sites_and_kinds() {
        let f = p("∀x (P(x) → ¬Q(x))");
        let ps = enumerate_perturbations(&f);
        // flip, 3 swaps, insert at P, remove at ¬Q
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0].kind, EditKind::QuantifierFlip);
        assert_eq!(ps[0].site, 0);
        assert_eq!(ps.last().unwrap().kind, EditKind::NegationRemove);
        assert_eq!(ps.last().unwrap().site, 3);
    }

    #[test]
    fn repeated_subformulas_give_distinct_edits() {
        let f = p("P(a) ∧ P(a)");
        let ps = enumerate_perturbations(&f);
        assert_eq!(ps.len(), 5);
        for (i, q) in ps.iter().enumerate() {
            assert!(ps[i + 1..].iter().all(|r| r.formula != q.formula));
        }
    }

    #[test]
    fn sampling_is_deterministic_and_capped() {
        assert_eq!(sample_perturbations(&p("P(a)"), 8, 3), vec![p("¬P(a)")]);
        let f = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
        let a = sample_perturbations(&f, 8, 3);
        assert_eq!(a, sample_perturbations(&f, 8, 3));
        assert_eq!(a.len(), 8);
        let all: Vec<Formula> = enumerate_perturbations(&f).into_iter().map(|p| p.formula).collect();
        for (i, g) in a.iter().enumerate() {
            assert_ne!(g, &f);
            assert!(all.contains(g));
            assert!(!a[i + 1..].contains(g));
        }
    }
}

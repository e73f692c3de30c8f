use folbench::corpus::{corpus_signature, random_formula, CorpusParams};
use folbench::equiv::{brute_force_check, eval_closed, Element, SigmaStructure};
use folbench::fol::{negate, parse_formula, print_formula, to_nnf, Connective, Formula, Quantifier, Term};
use folbench::metrics::{bleu_formula, formula_tokens, pearson, point_biserial};
use folbench::seeding::rng_from;
use folbench::transform::{applicable_rewrites, enumerate_perturbations};
use folbench::Signature;
use proptest::prelude::*;
use rand::Rng;

fn formula() -> impl Strategy<Value = Formula> {
    any::<u64>().prop_map(|seed| random_formula(&mut rng_from(seed), &CorpusParams::default()))
}

/// A random structure over the corpus signature.
fn structure(sig: &Signature, seed: u64) -> SigmaStructure {
    let mut rng = rng_from(seed);
    let size = rng.random_range(1..=3);
    let mut s = SigmaStructure::new(size);
    for c in &sig.constants {
        s.set_constant(c.clone(), Element(rng.random_range(0..size)));
    }
    for (p, arity) in &sig.predicates {
        let mut tuples: Vec<Vec<Element>> = vec![vec![]];
        for _ in 0..*arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..size).map(move |e| {
                        let mut t = t.clone();
                        t.push(Element(e));
                        t
                    })
                })
                .collect();
        }
        s = s.with_empty_predicate(p.clone());
        for t in tuples {
            if rng.random_bool(0.5) {
                s.add_fact(p.clone(), t);
            }
        }
    }
    s
}

/// Evaluates by grounding: each quantifier becomes a finite conjunction or
/// disjunction of instances with the variable replaced by a domain name.
fn ground_eval(f: &Formula, s: &SigmaStructure) -> bool {
    fn subst_term(t: &Term, var: &str, name: &str) -> Term {
        match t {
            Term::Variable { name: v } if v == var => Term::constant(name),
            Term::Function { name: f, args } => {
                Term::func(f.clone(), args.iter().map(|a| subst_term(a, var, name)).collect())
            }
            other => other.clone(),
        }
    }
    fn subst(f: &Formula, var: &str, name: &str) -> Formula {
        match f {
            Formula::Atom { predicate, args } => {
                Formula::atom(predicate.clone(), args.iter().map(|a| subst_term(a, var, name)).collect())
            }
            Formula::Not { inner } => Formula::not(subst(inner, var, name)),
            Formula::Binary { op, left, right } => Formula::binary(*op, subst(left, var, name), subst(right, var, name)),
            Formula::Quantified { quantifier, var: v, body } if v != var => {
                Formula::quantified(*quantifier, v.clone(), subst(body, var, name))
            }
            bound => bound.clone(),
        }
    }
    fn element(t: &Term, s: &SigmaStructure) -> usize {
        match t {
            Term::Constant { name } => match name.strip_prefix('#') {
                Some(n) => n.parse().unwrap(),
                None => s.constant(name).unwrap().0,
            },
            _ => unreachable!("grounded formulas have no variables or functions"),
        }
    }
    match f {
        Formula::Atom { predicate, args } => {
            let tuple: Vec<Element> = args.iter().map(|a| Element(element(a, s))).collect();
            s.holds(predicate, &tuple)
        }
        Formula::Not { inner } => !ground_eval(inner, s),
        Formula::Binary { op, left, right } => {
            let (l, r) = (ground_eval(left, s), ground_eval(right, s));
            match op {
                Connective::And => l && r,
                Connective::Or => l || r,
                Connective::Implies => !l || r,
                Connective::Iff => l == r,
            }
        }
        Formula::Quantified { quantifier, var, body } => {
            let mut instances = (0..s.size()).map(|e| ground_eval(&subst(body, var, &format!("#{e}")), s));
            match quantifier {
                Quantifier::Forall => instances.all(|b| b),
                Quantifier::Exists => instances.any(|b| b),
            }
        }
    }
}

fn not_refuted(a: &Formula, b: &Formula, sig: &Signature) -> bool {
    !brute_force_check(a, b, sig, 3, 2_000).unwrap().is_not_equivalent()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(f in formula()) {
        let sig = corpus_signature(&CorpusParams::default());
        let printed = print_formula(&f);
        let reparsed = parse_formula(&printed, &sig).unwrap();
        prop_assert_eq!(&reparsed, &f, "{}", printed);
        prop_assert_eq!(print_formula(&reparsed), printed);
    }

    #[test]
    fn nnf_is_idempotent_and_sound(f in formula()) {
        let sig = corpus_signature(&CorpusParams::default());
        let n = to_nnf(&f);
        prop_assert!(n.is_nnf());
        prop_assert_eq!(to_nnf(&n), n.clone());
        prop_assert!(not_refuted(&f, &n, &sig));
        prop_assert_eq!(to_nnf(&negate(&negate(&f))), n);
    }

    #[test]
    fn evaluator_agrees_with_grounding(f in formula(), seed in any::<u64>()) {
        let s = structure(&corpus_signature(&CorpusParams::default()), seed);
        prop_assert_eq!(eval_closed(&f, &s).unwrap(), ground_eval(&f, &s));
        prop_assert_eq!(eval_closed(&negate(&f), &s).unwrap(), !ground_eval(&f, &s));
    }

    #[test]
    fn rewrites_are_never_refuted(f in formula()) {
        let sig = corpus_signature(&CorpusParams::default());
        for r in applicable_rewrites(&f) {
            prop_assert!(r.formula != f);
            prop_assert!(not_refuted(&f, &r.formula, &sig), "{} via {}", print_formula(&r.formula), r.rule.name());
        }
    }

    #[test]
    fn perturbations_are_single_edits(f in formula()) {
        let ps = enumerate_perturbations(&f);
        let mut texts: Vec<String> = ps.iter().map(|p| print_formula(&p.formula)).collect();
        let n = texts.len();
        texts.sort();
        texts.dedup();
        prop_assert_eq!(texts.len(), n);
        for p in &ps {
            prop_assert!(p.formula != f);
            prop_assert!(p.formula.is_closed());
            prop_assert!(p.formula.size().abs_diff(f.size()) <= 1);
        }
    }

    #[test]
    fn bleu_is_bounded_and_reflexive(f in formula(), g in formula()) {
        let b = bleu_formula(&f, &g);
        prop_assert!((0.0..=1.0).contains(&b));
        if formula_tokens(&f).len() >= 4 {
            prop_assert!((bleu_formula(&f, &f) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn point_biserial_is_pearson(
        pairs in prop::collection::vec((any::<bool>(), -100.0f64..100.0), 3..60)
    ) {
        let (b, x): (Vec<bool>, Vec<f64>) = pairs.into_iter().unzip();
        let as_real: Vec<f64> = b.iter().map(|&v| f64::from(u8::from(v))).collect();
        match (point_biserial(&b, &x), pearson(&as_real, &x)) {
            (Ok(r), Some(p)) => prop_assert!((r - p).abs() < 1e-9, "{} vs {}", r, p),
            (Err(_), None) => {}
            (r, p) => prop_assert!(false, "disagree on definedness: {:?} {:?}", r, p),
        }
    }
}

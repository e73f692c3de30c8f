//! Seeded random formulas for property suites, and the bundled Tarski-world
//! fixture dataset.

use std::sync::Arc;

use rand::Rng;

use crate::fol::{parse_formula, Connective, Formula, Instance, Ontology, Quantifier, Signature, Term};
use crate::seeding;

pub const TARSKI_ONTOLOGY_JSON: &str = include_str!("../tests/fixtures/tarski_ontology.json");
pub const TARSKI50_JSONL: &str = include_str!("../tests/fixtures/tarski50.jsonl");

/// Shape limits of generated formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusParams {
    /// Maximum number of ¬, ∧, ∨, → and ↔ occurrences.
    pub max_connectives: usize,
    pub max_quantifiers: usize,
    /// Predicates `P`, `Q`, `R`, `S`, ... with arities cycling 1, 2.
    pub predicates: usize,
    pub max_arity: usize,
    pub constants: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_connectives: 6,
            max_quantifiers: 2,
            predicates: 4,
            max_arity: 2,
            constants: 2,
        }
    }
}

const PREDICATE_NAMES: [&str; 8] = ["P", "Q", "R", "S", "T", "U0", "V", "W"];
const CONSTANT_NAMES: [&str; 4] = ["a", "b", "c", "d"];
const VARIABLE_NAMES: [&str; 4] = ["x", "y", "z", "w"];

/// The signature every formula of a corpus with `params` is drawn from.
pub fn corpus_signature(params: &CorpusParams) -> Signature {
    let mut sig = Signature::new();
    for (i, name) in PREDICATE_NAMES.iter().take(params.predicates.min(PREDICATE_NAMES.len())).enumerate() {
        let arity = 1 + i % params.max_arity.max(1);
        sig = sig.with_predicate(*name, arity);
    }
    for name in CONSTANT_NAMES.iter().take(params.constants.clamp(1, CONSTANT_NAMES.len())) {
        sig = sig.with_constant(*name);
    }
    sig
}

/// One closed formula within `params`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, params: &CorpusParams) -> Formula {
    let sig = corpus_signature(params);
    let predicates: Vec<(String, usize)> = sig.predicates.iter().map(|(p, a)| (p.clone(), *a)).collect();
    let constants: Vec<String> = sig.constants.iter().cloned().collect();
    let connectives = rng.random_range(0..=params.max_connectives);
    let quantifiers = rng.random_range(0..=params.max_quantifiers.min(VARIABLE_NAMES.len()));
    let mut g = Generator {
        rng,
        predicates: &predicates,
        constants: &constants,
        bound: Vec::new(),
    };
    g.formula(connectives, quantifiers)
}

/// `n` formulas from a stream keyed by `seed`.
pub fn random_corpus(seed: u64, n: usize, params: &CorpusParams) -> Vec<Formula> {
    let mut rng = seeding::stream(seed, &["corpus"]);
    (0..n).map(|_| random_formula(&mut rng, params)).collect()
}

struct Generator<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    predicates: &'a [(String, usize)],
    constants: &'a [String],
    bound: Vec<&'static str>,
}

impl<R: Rng + ?Sized> Generator<'_, R> {
    /// A formula using exactly `conn` connectives and `quant` quantifiers.
    fn formula(&mut self, conn: usize, quant: usize) -> Formula {
        if conn == 0 && quant == 0 {
            return self.atom();
        }
        let quantify = quant > 0 && (conn == 0 || self.rng.random_bool(0.35));
        if quantify {
            let var = VARIABLE_NAMES[self.bound.len()];
            let q = if self.rng.random_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
            self.bound.push(var);
            let body = self.formula(conn, quant - 1);
            self.bound.pop();
            return Formula::quantified(q, var, body);
        }
        if self.rng.random_bool(0.2) {
            return Formula::not(self.formula(conn - 1, quant));
        }
        let op = [Connective::And, Connective::Or, Connective::Implies, Connective::Iff][self.rng.random_range(0..4)];
        let left_conn = self.rng.random_range(0..conn);
        let left_quant = self.rng.random_range(0..=quant);
        let left = self.formula(left_conn, left_quant);
        let right = self.formula(conn - 1 - left_conn, quant - left_quant);
        Formula::binary(op, left, right)
    }

    fn atom(&mut self) -> Formula {
        let (name, arity) = &self.predicates[self.rng.random_range(0..self.predicates.len())];
        let args = (0..*arity).map(|_| self.term()).collect();
        Formula::atom(name.clone(), args)
    }

    /// Bound variables are preferred so quantifiers rarely go vacuous.
    fn term(&mut self) -> Term {
        if !self.bound.is_empty() && self.rng.random_bool(0.75) {
            Term::var(self.bound[self.rng.random_range(0..self.bound.len())])
        } else {
            Term::constant(self.constants[self.rng.random_range(0..self.constants.len())].clone())
        }
    }
}

/// Closed formulas wrapped as instances over one generic ontology.
pub fn random_instances(seed: u64, n: usize, params: &CorpusParams) -> Vec<Instance> {
    let ontology = Arc::new(generic_ontology(&corpus_signature(params)));
    random_corpus(seed, n, params)
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            Instance::new(format!("r{i:04}"), "", f, ontology.clone()).expect("generated formulas are closed and well-sorted")
        })
        .collect()
}

/// An ontology glossing every predicate as `x1 is p` / `x1 relates to x2`.
pub fn generic_ontology(sig: &Signature) -> Ontology {
    let mut file = crate::fol::OntologyFile::default();
    for (p, arity) in &sig.predicates {
        let lower = p.to_lowercase();
        let (positive, negative) = match arity {
            0 => (format!("{lower} holds"), format!("{lower} does not hold")),
            1 => (format!("x1 is {lower}"), format!("x1 is not {lower}")),
            n => {
                let rest: Vec<String> = (2..=*n).map(|i| format!("x{i}")).collect();
                (
                    format!("x1 is {lower}-related to {}", rest.join(" and ")),
                    format!("x1 is not {lower}-related to {}", rest.join(" and ")),
                )
            }
        };
        file.predicates.insert(
            p.clone(),
            crate::fol::PredicateEntry {
                arity: *arity,
                positive,
                negative,
            },
        );
    }
    for c in &sig.constants {
        file.constants.insert(c.clone(), c.clone());
    }
    file.functions = sig.functions.clone();
    Ontology::try_from(file).expect("generated glosses are well-formed")
}

pub fn tarski_ontology() -> Ontology {
    Ontology::from_json(TARSKI_ONTOLOGY_JSON).expect("bundled ontology is valid")
}

/// The bundled 50-sentence Tarski-world dataset, sharing one ontology.
pub fn tarski_instances() -> Vec<Instance> {
    #[derive(serde::Deserialize)]
    struct Line {
        id: String,
        nl: String,
        fol: String,
    }
    let ontology = Arc::new(tarski_ontology());
    TARSKI50_JSONL
        .lines()
        .map(|l| {
            let r: Line = serde_json::from_str(l).expect("bundled dataset is valid JSON");
            let f = parse_formula(&r.fol, ontology.signature()).expect("bundled formulas parse");
            Instance::new(r.id, r.nl, f, ontology.clone()).expect("bundled formulas are closed")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_respects_limits() {
        let params = CorpusParams::default();
        let sig = corpus_signature(&params);
        let corpus = random_corpus(7, 300, &params);
        for f in &corpus {
            assert!(f.is_closed(), "{f:?}");
            sig.check(f).unwrap();
            assert!(f.quantifier_count() <= 2);
            let mut negations = 0;
            f.visit(&mut |g| negations += usize::from(matches!(g, Formula::Not { .. })));
            assert!(f.connective_count() + negations <= 6);
            assert!(!f.has_shadowing());
        }
        assert!(corpus.iter().any(|f| f.quantifier_count() == 2));
        assert!(corpus.iter().any(|f| f.connective_count() >= 5));
        assert_eq!(corpus, random_corpus(7, 300, &params));
    }

    #[test]
    fn fixtures_load() {
        let insts = tarski_instances();
        assert_eq!(insts.len(), 50);
        assert!(insts.iter().all(|i| Arc::ptr_eq(&i.ontology, &insts[0].ontology)));
        assert_eq!(random_instances(1, 10, &CorpusParams::default()).len(), 10);
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::syntax::{Formula, Term};
use super::FolError;

/// Declared vocabulary: predicate, constant and function symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
    pub functions: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_predicate(mut self, name: impl Into<String>, arity: usize) -> Self {
        self.predicates.insert(name.into(), arity);
        self
    }

    pub fn with_constant(mut self, name: impl Into<String>) -> Self {
        self.constants.insert(name.into());
        self
    }

    pub fn with_function(mut self, name: impl Into<String>, arity: usize) -> Self {
        self.functions.insert(name.into(), arity);
        self
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    /// Any declared symbol with this name, regardless of kind.
    pub fn declares(&self, name: &str) -> bool {
        self.predicates.contains_key(name)
            || self.constants.contains(name)
            || self.functions.contains_key(name)
    }

    /// Checks pairwise disjointness of the symbol sets and function arities.
    pub fn validate(&self) -> Result<(), FolError> {
        for name in self.constants.iter() {
            if self.predicates.contains_key(name) || self.functions.contains_key(name) {
                return Err(FolError::NamespaceClash { name: name.clone() });
            }
        }
        for (name, arity) in self.functions.iter() {
            if self.predicates.contains_key(name) {
                return Err(FolError::NamespaceClash { name: name.clone() });
            }
            if *arity == 0 {
                return Err(FolError::InvalidOntology(format!(
                    "function `{name}` must have positive arity"
                )));
            }
        }
        Ok(())
    }

    /// Union of two signatures; fails if a symbol is declared with two arities or kinds.
    pub fn merge(&self, other: &Signature) -> Result<Signature, FolError> {
        let mut out = self.clone();
        for (name, arity) in other.predicates.iter() {
            if let Some(prev) = out.predicates.insert(name.clone(), *arity) {
                if prev != *arity {
                    return Err(FolError::ArityMismatch {
                        symbol: name.clone(),
                        expected: prev,
                        got: *arity,
                    });
                }
            }
        }
        for (name, arity) in other.functions.iter() {
            if let Some(prev) = out.functions.insert(name.clone(), *arity) {
                if prev != *arity {
                    return Err(FolError::ArityMismatch {
                        symbol: name.clone(),
                        expected: prev,
                        got: *arity,
                    });
                }
            }
        }
        out.constants.extend(other.constants.iter().cloned());
        out.validate()?;
        Ok(out)
    }

    /// Checks that every symbol of `f` is declared with the right arity and kind.
    pub fn check(&self, f: &Formula) -> Result<(), FolError> {
        let mut result = Ok(());
        f.visit(&mut |node| {
            if result.is_err() {
                return;
            }
            if let Formula::Atom { predicate, args } = node {
                result = match self.predicate_arity(predicate) {
                    None => Err(FolError::UnknownSymbol {
                        name: predicate.clone(),
                    }),
                    Some(n) if n != args.len() => Err(FolError::ArityMismatch {
                        symbol: predicate.clone(),
                        expected: n,
                        got: args.len(),
                    }),
                    Some(_) => args.iter().try_for_each(|t| self.check_term(t)),
                };
            }
        });
        result
    }

    fn check_term(&self, t: &Term) -> Result<(), FolError> {
        match t {
            Term::Variable { name } => {
                if self.declares(name) {
                    Err(FolError::NamespaceClash { name: name.clone() })
                } else {
                    Ok(())
                }
            }
            Term::Constant { name } => {
                if self.is_constant(name) {
                    Ok(())
                } else {
                    Err(FolError::UnknownSymbol { name: name.clone() })
                }
            }
            Term::Function { name, args } => match self.function_arity(name) {
                None => Err(FolError::UnknownSymbol { name: name.clone() }),
                Some(n) if n != args.len() => Err(FolError::ArityMismatch {
                    symbol: name.clone(),
                    expected: n,
                    got: args.len(),
                }),
                Some(_) => args.iter().try_for_each(|a| self.check_term(a)),
            },
        }
    }

    /// The smallest signature declaring every symbol that occurs in `f`.
    pub fn of_formula(f: &Formula) -> Result<Signature, FolError> {
        let mut sig = Signature::new();
        let mut err = None;
        fn add_term(sig: &mut Signature, t: &Term, err: &mut Option<FolError>) {
            match t {
                Term::Variable { .. } => {}
                Term::Constant { name } => {
                    sig.constants.insert(name.clone());
                }
                Term::Function { name, args } => {
                    if let Some(prev) = sig.functions.insert(name.clone(), args.len()) {
                        if prev != args.len() && err.is_none() {
                            *err = Some(FolError::ArityMismatch {
                                symbol: name.clone(),
                                expected: prev,
                                got: args.len(),
                            });
                        }
                    }
                    args.iter().for_each(|a| add_term(sig, a, err));
                }
            }
        }
        f.visit(&mut |node| {
            if let Formula::Atom { predicate, args } = node {
                if let Some(prev) = sig.predicates.insert(predicate.clone(), args.len()) {
                    if prev != args.len() && err.is_none() {
                        err = Some(FolError::ArityMismatch {
                            symbol: predicate.clone(),
                            expected: prev,
                            got: args.len(),
                        });
                    }
                }
                args.iter().for_each(|t| add_term(&mut sig, t, &mut err));
            }
        });
        match err {
            Some(e) => Err(e),
            None => {
                sig.validate()?;
                Ok(sig)
            }
        }
    }
}

/// Positive and negative rendering templates for one predicate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateGloss {
    pub positive: String,
    pub negative: String,
}

/// Natural-language meanings of the signature's symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Glossary {
    pub predicate_meanings: BTreeMap<String, PredicateGloss>,
    pub constant_meanings: BTreeMap<String, String>,
}

/// Highest `xN` placeholder index used in a template, 0 if none.
pub fn max_placeholder(template: &str) -> usize {
    let bytes = template.as_bytes();
    let mut max = 0;
    let mut i = 0;
    while i < bytes.len() {
        let boundary_before = i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
        if bytes[i] == b'x' && boundary_before {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let boundary_after =
                end == bytes.len() || !(bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_');
            if end > start && boundary_after {
                if let Ok(n) = template[start..end].parse::<usize>() {
                    max = max.max(n);
                }
                i = end;
                continue;
            }
        }
        i += 1;
    }
    max
}

/// A signature paired with its glossary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OntologyFile", into = "OntologyFile")]
pub struct Ontology {
    signature: Signature,
    glossary: Glossary,
}

impl Ontology {
    pub fn new(signature: Signature, glossary: Glossary) -> Result<Self, FolError> {
        signature.validate()?;
        for (name, arity) in signature.predicates.iter() {
            let gloss = glossary
                .predicate_meanings
                .get(name)
                .ok_or_else(|| FolError::InvalidOntology(format!("predicate `{name}` has no gloss")))?;
            for template in [&gloss.positive, &gloss.negative] {
                let used = max_placeholder(template);
                if used > *arity {
                    return Err(FolError::InvalidOntology(format!(
                        "template `{template}` of `{name}/{arity}` uses placeholder x{used}"
                    )));
                }
            }
        }
        for name in signature.constants.iter() {
            if !glossary.constant_meanings.contains_key(name) {
                return Err(FolError::InvalidOntology(format!("constant `{name}` has no gloss")));
            }
        }
        for name in glossary.predicate_meanings.keys() {
            if !signature.predicates.contains_key(name) {
                return Err(FolError::InvalidOntology(format!(
                    "gloss for undeclared predicate `{name}`"
                )));
            }
        }
        for name in glossary.constant_meanings.keys() {
            if !signature.constants.contains(name) {
                return Err(FolError::InvalidOntology(format!(
                    "gloss for undeclared constant `{name}`"
                )));
            }
        }
        Ok(Ontology { signature, glossary })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn glossary(&self) -> &Glossary {
        &self.glossary
    }

    pub fn from_json(text: &str) -> Result<Self, FolError> {
        serde_json::from_str(text).map_err(|e| FolError::InvalidOntology(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FolError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| FolError::InvalidOntology(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ontology serializes")
    }
}

/// On-disk ontology layout.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OntologyFile {
    #[serde(default)]
    pub predicates: BTreeMap<String, PredicateEntry>,
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    #[serde(default)]
    pub functions: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredicateEntry {
    pub arity: usize,
    pub positive: String,
    pub negative: String,
}

impl TryFrom<OntologyFile> for Ontology {
    type Error = FolError;

    fn try_from(file: OntologyFile) -> Result<Self, Self::Error> {
        let mut signature = Signature::new();
        let mut glossary = Glossary::default();
        for (name, entry) in file.predicates {
            signature.predicates.insert(name.clone(), entry.arity);
            glossary.predicate_meanings.insert(
                name,
                PredicateGloss {
                    positive: entry.positive,
                    negative: entry.negative,
                },
            );
        }
        for (name, meaning) in file.constants {
            signature.constants.insert(name.clone());
            glossary.constant_meanings.insert(name, meaning);
        }
        signature.functions = file.functions;
        Ontology::new(signature, glossary)
    }
}

impl From<Ontology> for OntologyFile {
    fn from(o: Ontology) -> Self {
        let predicates = o
            .signature
            .predicates
            .iter()
            .map(|(name, arity)| {
                let gloss = &o.glossary.predicate_meanings[name];
                (
                    name.clone(),
                    PredicateEntry {
                        arity: *arity,
                        positive: gloss.positive.clone(),
                        negative: gloss.negative.clone(),
                    },
                )
            })
            .collect();
        OntologyFile {
            predicates,
            constants: o.glossary.constant_meanings.clone(),
            functions: o.signature.functions.clone(),
        }
    }
}

/// One dataset entry: an utterance, its closed gold formula, and the ontology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub utterance: String,
    pub formula: Formula,
    pub ontology: std::sync::Arc<Ontology>,
}

impl Instance {
    pub fn new(
        id: impl Into<String>,
        utterance: impl Into<String>,
        formula: Formula,
        ontology: std::sync::Arc<Ontology>,
    ) -> Result<Self, FolError> {
        ontology.signature().check(&formula)?;
        let free = formula.free_vars();
        if !free.is_empty() {
            return Err(FolError::NotClosed {
                free: free.into_iter().collect(),
            });
        }
        Ok(Instance {
            id: id.into(),
            utterance: utterance.into(),
            formula,
            ontology,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TARSKI_MINI: &str = r#"{
        "predicates": {
            "Cube": {"arity": 1, "positive": "x1 is a cube", "negative": "x1 is not a cube"},
            "LeftOf": {"arity": 2, "positive": "x1 is to the left of x2", "negative": "x1 is not to the left of x2"}
        },
        "constants": {"a": "A"}
    }"#;

    #[test]
    fn loads_ontology_json() {
        let o = Ontology::from_json(TARSKI_MINI).unwrap();
        assert_eq!(o.signature().predicate_arity("LeftOf"), Some(2));
        assert!(o.signature().is_constant("a"));
        assert_eq!(o.glossary().constant_meanings["a"], "A");
        let back = Ontology::from_json(&o.to_json()).unwrap();
        assert_eq!(back, o);
    }

    #[test]
    fn rejects_placeholder_beyond_arity() {
        let bad = r#"{"predicates": {"Cube": {"arity": 1, "positive": "x1 and x2", "negative": "no"}}}"#;
        assert!(matches!(Ontology::from_json(bad), Err(FolError::InvalidOntology(_))));
    }

    #[test]
    fn rejects_namespace_clash() {
        let sig = Signature::new().with_predicate("a", 1).with_constant("a");
        assert!(matches!(sig.validate(), Err(FolError::NamespaceClash { .. })));
    }

    #[test]
    fn placeholder_scan() {
        assert_eq!(max_placeholder("x1 loves x2"), 2);
        assert_eq!(max_placeholder("x10 box x1"), 10);
        assert_eq!(max_placeholder("max1 is xenon"), 0);
        assert_eq!(max_placeholder("no placeholders"), 0);
    }
}

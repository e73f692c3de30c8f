use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::fol::{Connective, Formula, Quantifier, Signature, Term};

use super::EquivError;

/// A domain element; domains are always `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionEntry {
    pub args: Vec<Element>,
    pub value: Element,
}

/// A finite σ-structure. Predicates without an entry denote the empty relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaStructure {
    size: usize,
    constants: BTreeMap<String, Element>,
    predicates: BTreeMap<String, BTreeSet<Vec<Element>>>,
    #[serde(with = "function_table")]
    functions: BTreeMap<String, BTreeMap<Vec<Element>, Element>>,
}

mod function_table {
    use super::*;
    use serde::{Deserializer, Serializer};

    type FunctionTables = BTreeMap<String, BTreeMap<Vec<Element>, Element>>;

    pub fn serialize<S: Serializer>(
        table: &BTreeMap<String, BTreeMap<Vec<Element>, Element>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let flat: BTreeMap<&String, Vec<FunctionEntry>> = table
            .iter()
            .map(|(name, m)| {
                let entries = m
                    .iter()
                    .map(|(args, value)| FunctionEntry {
                        args: args.clone(),
                        value: *value,
                    })
                    .collect();
                (name, entries)
            })
            .collect();
        flat.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<FunctionTables, D::Error> {
        let flat: BTreeMap<String, Vec<FunctionEntry>> = BTreeMap::deserialize(d)?;
        Ok(flat
            .into_iter()
            .map(|(name, entries)| (name, entries.into_iter().map(|e| (e.args, e.value)).collect()))
            .collect())
    }
}

impl SigmaStructure {
    /// A structure over `size` elements with nothing interpreted yet.
    ///
    /// Sizes below one are raised to one: domains are never empty.
    pub fn new(size: usize) -> Self {
        SigmaStructure {
            size: size.max(1),
            constants: BTreeMap::new(),
            predicates: BTreeMap::new(),
            functions: BTreeMap::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn domain(&self) -> impl Iterator<Item = Element> {
        (0..self.size).map(Element)
    }

    pub fn with_constant(mut self, name: impl Into<String>, e: Element) -> Self {
        self.set_constant(name, e);
        self
    }

    pub fn with_fact(mut self, predicate: impl Into<String>, tuple: Vec<Element>) -> Self {
        self.add_fact(predicate, tuple);
        self
    }

    pub fn with_empty_predicate(mut self, predicate: impl Into<String>) -> Self {
        self.predicates.entry(predicate.into()).or_default();
        self
    }

    pub fn set_constant(&mut self, name: impl Into<String>, e: Element) {
        self.constants.insert(name.into(), e);
    }

    pub fn add_fact(&mut self, predicate: impl Into<String>, tuple: Vec<Element>) {
        self.predicates.entry(predicate.into()).or_default().insert(tuple);
    }

    pub fn set_function_value(&mut self, name: impl Into<String>, args: Vec<Element>, value: Element) {
        self.functions.entry(name.into()).or_default().insert(args, value);
    }

    pub fn constant(&self, name: &str) -> Option<Element> {
        self.constants.get(name).copied()
    }

    pub fn holds(&self, predicate: &str, tuple: &[Element]) -> bool {
        self.predicates
            .get(predicate)
            .is_some_and(|set| set.contains(tuple))
    }

    pub fn relation(&self, predicate: &str) -> Option<&BTreeSet<Vec<Element>>> {
        self.predicates.get(predicate)
    }

    pub fn function_value(&self, name: &str, args: &[Element]) -> Option<Element> {
        self.functions.get(name).and_then(|m| m.get(args)).copied()
    }

    /// Checks that every symbol of `sig` is interpreted consistently.
    pub fn validate(&self, sig: &Signature) -> Result<(), EquivError> {
        let in_domain = |e: &Element| e.0 < self.size;
        for c in sig.constants.iter() {
            match self.constants.get(c) {
                Some(e) if in_domain(e) => {}
                _ => return Err(EquivError::Uninterpreted { symbol: c.clone() }),
            }
        }
        for (p, arity) in sig.predicates.iter() {
            if let Some(tuples) = self.predicates.get(p) {
                if tuples.iter().any(|t| t.len() != *arity || !t.iter().all(in_domain)) {
                    return Err(EquivError::InvalidStructure(format!(
                        "relation `{p}` has a tuple outside D^{arity}"
                    )));
                }
            }
        }
        for (f, arity) in sig.functions.iter() {
            let table = self
                .functions
                .get(f)
                .ok_or_else(|| EquivError::Uninterpreted { symbol: f.clone() })?;
            let expected = self.size.checked_pow(*arity as u32).unwrap_or(usize::MAX);
            if table.len() != expected
                || table
                    .iter()
                    .any(|(args, v)| args.len() != *arity || !args.iter().all(in_domain) || !in_domain(v))
            {
                return Err(EquivError::InvalidStructure(format!(
                    "function `{f}` is not a total map D^{arity} -> D"
                )));
            }
        }
        Ok(())
    }
}

pub type Assignment = BTreeMap<String, Element>;

fn eval_term(t: &Term, s: &SigmaStructure, env: &Assignment) -> Result<Element, EquivError> {
    match t {
        Term::Variable { name } => env
            .get(name)
            .copied()
            .ok_or_else(|| EquivError::Unbound { var: name.clone() }),
        Term::Constant { name } => s
            .constant(name)
            .ok_or_else(|| EquivError::Uninterpreted { symbol: name.clone() }),
        Term::Function { name, args } => {
            let vals = args
                .iter()
                .map(|a| eval_term(a, s, env))
                .collect::<Result<Vec<_>, _>>()?;
            s.function_value(name, &vals)
                .ok_or_else(|| EquivError::Uninterpreted { symbol: name.clone() })
        }
    }
}

/// Satisfaction of `f` in `s` under the variable assignment `env`.
pub fn eval(f: &Formula, s: &SigmaStructure, env: &Assignment) -> Result<bool, EquivError> {
    let mut env = env.clone();
    eval_in(f, s, &mut env)
}

fn eval_in(f: &Formula, s: &SigmaStructure, env: &mut Assignment) -> Result<bool, EquivError> {
    Ok(match f {
        Formula::Atom { predicate, args } => {
            let tuple = args
                .iter()
                .map(|t| eval_term(t, s, env))
                .collect::<Result<Vec<_>, _>>()?;
            s.holds(predicate, &tuple)
        }
        Formula::Not { inner } => !eval_in(inner, s, env)?,
        Formula::Binary { op, left, right } => {
            let l = eval_in(left, s, env)?;
            match op {
                Connective::And => l && eval_in(right, s, env)?,
                Connective::Or => l || eval_in(right, s, env)?,
                Connective::Implies => !l || eval_in(right, s, env)?,
                Connective::Iff => l == eval_in(right, s, env)?,
            }
        }
        Formula::Quantified {
            quantifier,
            var,
            body,
        } => {
            let saved = env.get(var).copied();
            let mut result = matches!(quantifier, Quantifier::Forall);
            for d in s.domain() {
                env.insert(var.clone(), d);
                let v = eval_in(body, s, env);
                let v = match v {
                    Ok(v) => v,
                    Err(e) => {
                        restore(env, var, saved);
                        return Err(e);
                    }
                };
                match quantifier {
                    Quantifier::Forall if !v => {
                        result = false;
                        break;
                    }
                    Quantifier::Exists if v => {
                        result = true;
                        break;
                    }
                    _ => {}
                }
            }
            restore(env, var, saved);
            result
        }
    })
}

fn restore(env: &mut Assignment, var: &str, saved: Option<Element>) {
    match saved {
        Some(e) => {
            env.insert(var.to_string(), e);
        }
        None => {
            env.remove(var);
        }
    }
}

/// Truth of a closed formula.
pub fn eval_closed(f: &Formula, s: &SigmaStructure) -> Result<bool, EquivError> {
    eval(f, s, &Assignment::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_formula, Signature};

    fn turtle_sig() -> Signature {
        Signature::new()
            .with_predicate("Turtle", 1)
            .with_predicate("Shell", 1)
            .with_predicate("CanSwim", 1)
    }

    fn empty_world() -> SigmaStructure {
        SigmaStructure::new(1)
    }

    fn holds(src: &str) -> bool {
        let f = parse_formula(src, &turtle_sig()).unwrap();
        eval_closed(&f, &empty_world()).unwrap()
    }

    #[test]
    fn turtle_examples() {
        assert!(!holds("∃x Turtle(x) ∧ Shell(x)"));
        assert!(holds("∀x Turtle(x) → Shell(x)"));
        assert!(holds("∃x (Turtle(x) → Shell(x) ∧ CanSwim(x))"));
        assert!(!holds("∃x (Turtle(x) ∧ Shell(x) ∧ CanSwim(x))"));
    }

    #[test]
    fn free_variables_use_env() {
        let sig = Signature::new().with_predicate("P", 1);
        let f = parse_formula("P(x)", &sig).unwrap();
        let s = SigmaStructure::new(2).with_fact("P", vec![Element(1)]);
        let mut env = Assignment::new();
        assert!(matches!(eval(&f, &s, &env), Err(EquivError::Unbound { .. })));
        env.insert("x".into(), Element(1));
        assert!(eval(&f, &s, &env).unwrap());
        env.insert("x".into(), Element(0));
        assert!(!eval(&f, &s, &env).unwrap());
    }

    #[test]
    fn quantifier_restores_outer_binding() {
        let sig = Signature::new().with_predicate("P", 1);
        let f = parse_formula("P(x) ∧ ∃x ¬P(x)", &sig).unwrap();
        let s = SigmaStructure::new(2).with_fact("P", vec![Element(1)]);
        let env = Assignment::from([("x".to_string(), Element(1))]);
        assert!(eval(&f, &s, &env).unwrap());
    }

    #[test]
    fn functions_and_validation() {
        let sig = Signature::new()
            .with_predicate("P", 1)
            .with_function("f", 1)
            .with_constant("c");
        let mut s = SigmaStructure::new(2)
            .with_constant("c", Element(0))
            .with_fact("P", vec![Element(1)]);
        assert!(s.validate(&sig).is_err());
        s.set_function_value("f", vec![Element(0)], Element(1));
        s.set_function_value("f", vec![Element(1)], Element(0));
        s.validate(&sig).unwrap();
        let f = parse_formula("P(f(c)) ∧ ¬P(f(f(c)))", &sig).unwrap();
        assert!(eval_closed(&f, &s).unwrap());
    }

    #[test]
    fn serde_round_trip() {
        let mut s = SigmaStructure::new(2).with_constant("c", Element(1)).with_fact("R", vec![Element(0), Element(1)]);
        s.set_function_value("f", vec![Element(0)], Element(1));
        let json = serde_json::to_string(&s).unwrap();
        let back: SigmaStructure = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}

//! The truth-table "logical equivalence" score and its predicate matching.
//!
//! Both formulas are stripped of quantifiers and read propositionally: each
//! predicate symbol is one Boolean variable, whatever its arguments. Paired
//! predicates share a variable; unpaired ones are matched to a fresh dummy.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::fol::{Connective, Formula};

use super::MetricsError;

/// Truth tables above this many variables are refused.
pub const MAX_LE_VARIABLES: usize = 20;

/// Minimum token overlap for [`default_matching`] to pair two names.
pub const MATCH_THRESHOLD: f64 = 0.5;

/// One-to-one correspondence between the predicates of two formulas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateMatching {
    /// Predicate of the first formula to its partner in the second.
    pub pairs: BTreeMap<String, String>,
    /// Unpaired predicates of the first formula to their dummy.
    pub dummies_left: BTreeMap<String, String>,
    /// Unpaired predicates of the second formula to their dummy.
    pub dummies_right: BTreeMap<String, String>,
}

impl PredicateMatching {
    /// Pairs exactly the given predicates; everything else gets a dummy.
    pub fn from_pairs<'a>(
        f1: &Formula,
        f2: &Formula,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        let pairs: BTreeMap<String, String> =
            pairs.into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let paired_right: BTreeSet<&String> = pairs.values().collect();
        let left: Vec<String> = f1.predicates().into_iter().filter(|p| !pairs.contains_key(p)).collect();
        let right: Vec<String> = f2.predicates().into_iter().filter(|p| !paired_right.contains(p)).collect();
        let taken: BTreeSet<String> = f1.predicates().into_iter().chain(f2.predicates()).collect();
        let mut fresh = DummyNames::new(taken);
        let dummies_left = left.into_iter().map(|p| (p, fresh.next())).collect();
        let dummies_right = right.into_iter().map(|p| (p, fresh.next())).collect();
        PredicateMatching {
            pairs,
            dummies_left,
            dummies_right,
        }
    }

    /// Matching of a formula with itself.
    pub fn identity(f: &Formula) -> Self {
        let preds = f.predicates();
        Self::from_pairs(f, f, preds.iter().map(|p| (p.as_str(), p.as_str())))
    }

    /// The same matching seen from the second formula.
    pub fn inverted(&self) -> Self {
        PredicateMatching {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            dummies_left: self.dummies_right.clone(),
            dummies_right: self.dummies_left.clone(),
        }
    }

    fn validate(&self, f1: &Formula, f2: &Formula) -> Result<(), MetricsError> {
        let (left, right) = (f1.predicates(), f2.predicates());
        let mut seen = BTreeSet::new();
        for (a, b) in &self.pairs {
            if !seen.insert(b) {
                return Err(MetricsError::MatchingIncomplete {
                    predicate: b.clone(),
                    detail: "paired twice".into(),
                });
            }
            for (p, occurs, side) in [(a, &left, "first"), (b, &right, "second")] {
                if !occurs.contains(p) {
                    return Err(MetricsError::MatchingIncomplete {
                        predicate: p.clone(),
                        detail: format!("does not occur in the {side} formula"),
                    });
                }
            }
        }
        for p in left {
            if !self.pairs.contains_key(&p) && !self.dummies_left.contains_key(&p) {
                return Err(MetricsError::MatchingIncomplete {
                    predicate: p,
                    detail: "first formula".into(),
                });
            }
        }
        for p in right {
            if !seen.contains(&p) && !self.dummies_right.contains_key(&p) {
                return Err(MetricsError::MatchingIncomplete {
                    predicate: p,
                    detail: "second formula".into(),
                });
            }
        }
        Ok(())
    }
}

struct DummyNames {
    taken: BTreeSet<String>,
    n: usize,
}

impl DummyNames {
    fn new(taken: BTreeSet<String>) -> Self {
        DummyNames { taken, n: 0 }
    }

    fn next(&mut self) -> String {
        loop {
            let name = if self.n == 0 {
                "Dummy".to_string()
            } else {
                format!("Dummy{}", self.n)
            };
            self.n += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Lower-cased words of an identifier split at case changes, digits and `_`.
///
/// `CountryInEU` gives `country, in, eu`; `EUCountry` gives `eu, country`.
pub fn name_tokens(name: &str) -> Vec<String> {
    let chars: Vec<char> = name.chars().collect();
    let mut words = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).and_then(|j| chars.get(j)) {
            let next = chars.get(i + 1).copied();
            let boundary = (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_uppercase() && c.is_uppercase() && next.is_some_and(char::is_lowercase))
                || (prev.is_ascii_digit() != c.is_ascii_digit() && prev.is_alphanumeric());
            if boundary && !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
        }
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words
}

/// Jaccard overlap of the two names' word sets.
pub fn name_similarity(a: &str, b: &str) -> f64 {
    let ta: BTreeSet<String> = name_tokens(a).into_iter().collect();
    let tb: BTreeSet<String> = name_tokens(b).into_iter().collect();
    let union = ta.union(&tb).count();
    if union == 0 {
        return 0.0;
    }
    ta.intersection(&tb).count() as f64 / union as f64
}

/// Exact names first, then greedy pairing by descending word overlap of at
/// least [`MATCH_THRESHOLD`]; ties go to the higher case-folded Levenshtein
/// ratio, then to name order.
pub fn default_matching(f1: &Formula, f2: &Formula) -> PredicateMatching {
    let left = f1.predicates();
    let right = f2.predicates();
    let mut pairs: Vec<(String, String)> = left
        .iter()
        .filter(|p| right.contains(p))
        .map(|p| (p.clone(), p.clone()))
        .collect();
    let rest_l: Vec<&String> = left.iter().filter(|p| !right.contains(p)).collect();
    let rest_r: Vec<&String> = right.iter().filter(|p| !left.contains(p)).collect();

    let mut scored = Vec::new();
    for a in &rest_l {
        for b in &rest_r {
            let s = name_similarity(a, b);
            if s >= MATCH_THRESHOLD {
                let lev = strsim::normalized_levenshtein(&a.to_lowercase(), &b.to_lowercase());
                scored.push((s, lev, (*a).clone(), (*b).clone()));
            }
        }
    }
    scored.sort_by(|x, y| {
        y.0.total_cmp(&x.0)
            .then(y.1.total_cmp(&x.1))
            .then_with(|| (&x.2, &x.3).cmp(&(&y.2, &y.3)))
    });
    let mut used_l = BTreeSet::new();
    let mut used_r = BTreeSet::new();
    for (_, _, a, b) in scored {
        if used_l.contains(&a) || used_r.contains(&b) {
            continue;
        }
        used_l.insert(a.clone());
        used_r.insert(b.clone());
        pairs.push((a, b));
    }
    PredicateMatching::from_pairs(f1, f2, pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
}

/// Rows of the truth table: one per propositional variable, then the two
/// formulas. Column `j` assigns the bits of `j`, first variable most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthTable {
    /// Row labels such as `InEU-CountryInEU` or `Country-Dummy`.
    pub variables: Vec<String>,
    pub assignments: Vec<Vec<bool>>,
    pub first: Vec<bool>,
    pub second: Vec<bool>,
}

impl TruthTable {
    pub fn columns(&self) -> usize {
        self.first.len()
    }

    /// Plain-text rendering with `0`/`1` cells.
    pub fn render(&self) -> String {
        let width = self.variables.iter().map(|v| v.chars().count()).max().unwrap_or(0).max(2);
        let row = |label: &str, bits: &[bool]| {
            let cells: Vec<&str> = bits.iter().map(|b| if *b { "1" } else { "0" }).collect();
            format!("{label:<width$}  {}\n", cells.join(" "))
        };
        let mut out = String::new();
        for (v, bits) in self.variables.iter().zip(&self.assignments) {
            out.push_str(&row(v, bits));
        }
        out.push_str(&row("φ", &self.first));
        out.push_str(&row("φ′", &self.second));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeScore {
    pub agreeing: u64,
    pub columns: u64,
    pub table: TruthTable,
}

impl LeScore {
    pub fn value(&self) -> f64 {
        self.agreeing as f64 / self.columns as f64
    }
}

/// Fraction of truth-table columns on which the two stripped bodies agree.
pub fn le_score(f1: &Formula, f2: &Formula, matching: &PredicateMatching) -> Result<LeScore, MetricsError> {
    le_score_table(f1, f2, matching)
}

pub fn le_score_table(f1: &Formula, f2: &Formula, matching: &PredicateMatching) -> Result<LeScore, MetricsError> {
    matching.validate(f1, f2)?;
    // variable order: first formula's predicates, then the second's leftovers
    let mut labels = Vec::new();
    let mut left_index = BTreeMap::new();
    let mut right_index = BTreeMap::new();
    for p in f1.predicates() {
        let i = labels.len();
        match matching.pairs.get(&p) {
            Some(q) => {
                labels.push(format!("{p}-{q}"));
                right_index.insert(q.clone(), i);
            }
            None => labels.push(format!("{p}-{}", matching.dummies_left[&p])),
        }
        left_index.insert(p, i);
    }
    for q in f2.predicates() {
        if !right_index.contains_key(&q) {
            right_index.insert(q.clone(), labels.len());
            labels.push(format!("{}-{q}", matching.dummies_right[&q]));
        }
    }
    let n = labels.len();
    if n > MAX_LE_VARIABLES {
        return Err(MetricsError::TooManyVariables { count: n });
    }
    let columns = 1u64 << n;
    let mut table = TruthTable {
        variables: labels,
        assignments: vec![Vec::with_capacity(columns as usize); n],
        first: Vec::with_capacity(columns as usize),
        second: Vec::with_capacity(columns as usize),
    };
    let mut agreeing = 0;
    for col in 0..columns {
        let bits: Vec<bool> = (0..n).map(|v| col >> (n - 1 - v) & 1 == 1).collect();
        for (row, b) in table.assignments.iter_mut().zip(&bits) {
            row.push(*b);
        }
        let a = prop_eval(f1, &left_index, &bits);
        let b = prop_eval(f2, &right_index, &bits);
        agreeing += u64::from(a == b);
        table.first.push(a);
        table.second.push(b);
    }
    Ok(LeScore {
        agreeing,
        columns,
        table,
    })
}

fn prop_eval(f: &Formula, index: &BTreeMap<String, usize>, bits: &[bool]) -> bool {
    match f {
        Formula::Atom { predicate, .. } => bits[index[predicate]],
        Formula::Not { inner } => !prop_eval(inner, index, bits),
        Formula::Binary { op, left, right } => {
            let (l, r) = (prop_eval(left, index, bits), prop_eval(right, index, bits));
            match op {
                Connective::And => l && r,
                Connective::Or => l || r,
                Connective::Implies => !l || r,
                Connective::Iff => l == r,
            }
        }
        Formula::Quantified { body, .. } => prop_eval(body, index, bits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_inferring, ParseOptions};

    fn p(src: &str) -> Formula {
        parse_inferring(src, ParseOptions::default()).unwrap().0.formula
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn table_one() {
        let phi = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
        let phi2 = p("∀y CountryInEU(y) → EUCountry(y)");
        let m = PredicateMatching::from_pairs(&phi, &phi2, [("InEU", "CountryInEU"), ("EUCountry", "EUCountry")]);
        assert_eq!(m, default_matching(&phi, &phi2));
        let s = le_score(&phi, &phi2, &m).unwrap();
        assert_eq!((s.agreeing, s.columns), (7, 8));
        assert_eq!(s.value(), 0.875);
        let t = &s.table;
        assert_eq!(t.variables, ["Country-Dummy", "InEU-CountryInEU", "EUCountry-EUCountry"]);
        assert_eq!(t.assignments[0], bits("00001111"));
        assert_eq!(t.assignments[1], bits("00110011"));
        assert_eq!(t.assignments[2], bits("01010101"));
        assert_eq!(t.first, bits("11111101"));
        assert_eq!(t.second, bits("11011101"));
    }

    #[test]
    fn quantifiers_are_invisible() {
        let e = p("∃x Country(x) ∧ InEU(x) → EUCountry(x)");
        let a = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
        assert_eq!(le_score(&e, &a, &default_matching(&e, &a)).unwrap().value(), 1.0);
        let f = p("P(a)");
        assert_eq!(le_score(&f, &f, &PredicateMatching::identity(&f)).unwrap().value(), 1.0);
    }

    #[test]
    fn matching_heuristic() {
        assert_eq!(name_tokens("CountryInEU"), ["country", "in", "eu"]);
        assert_eq!(name_tokens("EUCountry"), ["eu", "country"]);
        assert_eq!(name_tokens("is_red2"), ["is", "red", "2"]);
        let f = p("Cube(a) ∧ Small(a)");
        let g = p("Tet(a) ∨ Large(a)");
        let m = default_matching(&f, &g);
        assert!(m.pairs.is_empty());
        assert_eq!(m.dummies_left.len(), 2);
        assert_eq!(m.dummies_right.len(), 2);
        let dummies: BTreeSet<&String> = m.dummies_left.values().chain(m.dummies_right.values()).collect();
        assert_eq!(dummies.len(), 4);
    }

    #[test]
    fn incomplete_matching() {
        let f = p("P(a) ∧ Q(a)");
        let m = PredicateMatching {
            pairs: BTreeMap::from([("P".to_string(), "P".to_string())]),
            dummies_left: BTreeMap::new(),
            dummies_right: BTreeMap::new(),
        };
        assert!(matches!(le_score(&f, &f, &m), Err(MetricsError::MatchingIncomplete { .. })));
    }

    #[test]
    fn symmetric_under_inversion() {
        let phi = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
        let phi2 = p("∀y CountryInEU(y) → EUCountry(y)");
        let m = default_matching(&phi, &phi2);
        let a = le_score(&phi, &phi2, &m).unwrap().value();
        let b = le_score(&phi2, &phi, &m.inverted()).unwrap().value();
        assert_eq!(a, b);
    }
}

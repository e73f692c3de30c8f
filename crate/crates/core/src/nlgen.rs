//! Glossary-driven rendering of formulas into English.
//!
//! Atoms use the predicate's positive template, negated atoms its negative
//! template, and every other construct a fixed phrase:
//!
//! | formula   | phrase                          |
//! |-----------|---------------------------------|
//! | `α ∧ β`   | `α and β`                       |
//! | `α ∨ β`   | `α or β`                        |
//! | `α → β`   | `if α, then β`                  |
//! | `α ↔ β`   | `α if and only if β`            |
//! | `¬α`      | `it's false that α` (α not atomic) |
//! | `∃x α`    | `there is x such that α`        |
//! | `∀x α`    | `for all x α`                   |
//!
//! Placeholders `x1..xn` in templates are replaced by the rendered arguments;
//! variables render as their names and constants as their glossary meaning.

use crate::fol::{left_needs_parens, negand_needs_parens, right_needs_parens};
use crate::fol::{Connective, Formula, Glossary, Quantifier, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NlgenError {
    #[error("no glossary entry for `{symbol}`")]
    MissingGloss { symbol: String },
}

/// Whether grouping from the formula survives into the sentence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Grouping {
    /// All grouping is dropped; distinct formulas may read the same.
    #[default]
    Dropped,
    /// Parentheses are kept wherever the canonical printer needs them.
    Parenthesized,
}

/// Renders `f` as an English sentence.
pub fn translate(f: &Formula, g: &Glossary) -> Result<String, NlgenError> {
    translate_with(f, g, Grouping::Dropped)
}

/// Like [`translate`], but never loses the formula's grouping.
pub fn translate_parenthesized(f: &Formula, g: &Glossary) -> Result<String, NlgenError> {
    translate_with(f, g, Grouping::Parenthesized)
}

pub fn translate_with(f: &Formula, g: &Glossary, grouping: Grouping) -> Result<String, NlgenError> {
    let mut r = Renderer {
        g,
        grouping,
        out: String::new(),
    };
    r.formula(f, true)?;
    Ok(finish(&r.out))
}

struct Renderer<'a> {
    g: &'a Glossary,
    grouping: Grouping,
    out: String,
}

impl Renderer<'_> {
    fn grouped(
        &mut self,
        f: &Formula,
        parens: bool,
        rightmost: bool,
    ) -> Result<(), NlgenError> {
        if parens && self.grouping == Grouping::Parenthesized {
            self.out.push_str(" (");
            self.formula(f, true)?;
            self.out.push_str(") ");
            Ok(())
        } else {
            self.formula(f, rightmost || parens)
        }
    }

    fn formula(&mut self, f: &Formula, rightmost: bool) -> Result<(), NlgenError> {
        match f {
            Formula::Atom { predicate, args } => {
                let gloss = self.gloss(predicate)?.positive.clone();
                self.template(&gloss, args)
            }
            Formula::Not { inner } => match inner.as_ref() {
                Formula::Atom { predicate, args } => {
                    let gloss = self.gloss(predicate)?.negative.clone();
                    self.template(&gloss, args)
                }
                other => {
                    self.out.push_str(" it's false that ");
                    self.grouped(other, negand_needs_parens(other), rightmost)
                }
            },
            Formula::Binary { op, left, right } => {
                if *op == Connective::Implies {
                    self.out.push_str(" if ");
                }
                self.grouped(left, left_needs_parens(*op, left), false)?;
                self.out.push_str(match op {
                    Connective::And => " and ",
                    Connective::Or => " or ",
                    Connective::Implies => ", then ",
                    Connective::Iff => " if and only if ",
                });
                self.grouped(right, right_needs_parens(*op, right, rightmost), rightmost)
            }
            Formula::Quantified {
                quantifier,
                var,
                body,
            } => {
                match quantifier {
                    Quantifier::Exists => {
                        self.out.push_str(" there is ");
                        self.out.push_str(var);
                        self.out.push_str(" such that ");
                    }
                    Quantifier::Forall => {
                        self.out.push_str(" for all ");
                        self.out.push_str(var);
                        self.out.push(' ');
                    }
                }
                self.formula(body, true)
            }
        }
    }

    fn gloss(&self, predicate: &str) -> Result<&crate::fol::PredicateGloss, NlgenError> {
        self.g
            .predicate_meanings
            .get(predicate)
            .ok_or_else(|| NlgenError::MissingGloss {
                symbol: predicate.to_string(),
            })
    }

    fn term(&self, t: &Term) -> Result<String, NlgenError> {
        match t {
            Term::Variable { name } => Ok(name.clone()),
            Term::Constant { name } => self
                .g
                .constant_meanings
                .get(name)
                .cloned()
                .ok_or_else(|| NlgenError::MissingGloss { symbol: name.clone() }),
            // functions carry no gloss; they keep their symbolic form
            Term::Function { name, args } => {
                let inner = args
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(format!("{name}({})", inner.join(", ")))
            }
        }
    }

    fn template(&mut self, template: &str, args: &[Term]) -> Result<(), NlgenError> {
        let rendered = args
            .iter()
            .map(|a| self.term(a))
            .collect::<Result<Vec<_>, _>>()?;
        self.out.push(' ');
        self.out.push_str(&fill_placeholders(template, &rendered));
        self.out.push(' ');
        Ok(())
    }
}

/// Replaces every standalone `xN` (1 ≤ N ≤ len) in one pass.
pub fn fill_placeholders(template: &str, args: &[String]) -> String {
    let bytes = template.as_bytes();
    let is_word = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    let mut out = String::with_capacity(template.len());
    let mut i = 0;
    let mut copied = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' && (i == 0 || !is_word(bytes[i - 1])) {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end > start && (end == bytes.len() || !is_word(bytes[end])) {
                if let Some(arg) = template[start..end]
                    .parse::<usize>()
                    .ok()
                    .and_then(|n| n.checked_sub(1))
                    .and_then(|n| args.get(n))
                {
                    out.push_str(&template[copied..i]);
                    out.push_str(arg);
                    copied = end;
                }
                i = end;
                continue;
            }
        }
        i += 1;
    }
    out.push_str(&template[copied..]);
    out
}

/// Collapses whitespace, tightens punctuation, capitalizes, adds the period.
fn finish(raw: &str) -> String {
    let mut s = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    for (from, to) in [(" ,", ","), (" .", "."), ("( ", "("), (" )", ")"), (",,", ",")] {
        while s.contains(from) {
            s = s.replace(from, to);
        }
    }
    if !s.ends_with('.') {
        s.push('.');
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => s,
    }
}

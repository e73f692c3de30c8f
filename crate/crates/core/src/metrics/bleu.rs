use std::collections::HashMap;

use crate::fol::{print_formula, Formula};

/// Tokens of the canonical printing: identifiers whole, every other
/// non-space character on its own (`∀x P(x)` gives `∀ x P ( x )`).
pub fn formula_tokens(f: &Formula) -> Vec<String> {
    tokenize(&print_formula(f))
}

pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut ident = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' {
            ident.push(c);
            continue;
        }
        if !ident.is_empty() {
            out.push(std::mem::take(&mut ident));
        }
        if !c.is_whitespace() {
            out.push(c.to_string());
        }
    }
    if !ident.is_empty() {
        out.push(ident);
    }
    out
}

/// Sentence BLEU of `candidate` against `reference`: uniform weights over
/// n = 1..4, clipped counts, no smoothing, brevity penalty.
pub fn bleu_formula(reference: &Formula, candidate: &Formula) -> f64 {
    bleu_tokens(&formula_tokens(reference), &formula_tokens(candidate))
}

pub fn bleu_tokens(reference: &[String], candidate: &[String]) -> f64 {
    const MAX_N: usize = 4;
    if candidate.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for n in 1..=MAX_N {
        let (matched, total) = clipped_matches(reference, candidate, n);
        if matched == 0 {
            return 0.0;
        }
        log_sum += (matched as f64 / total as f64).ln();
    }
    let (r, c) = (reference.len() as f64, candidate.len() as f64);
    let bp = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    bp * (log_sum / MAX_N as f64).exp()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

fn clipped_matches(reference: &[String], candidate: &[String], n: usize) -> (usize, usize) {
    let refs = ngram_counts(reference, n);
    let cands = ngram_counts(candidate, n);
    let matched = cands
        .iter()
        .map(|(g, c)| (*c).min(refs.get(g).copied().unwrap_or(0)))
        .sum();
    (matched, candidate.len().saturating_sub(n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_inferring, ParseOptions};

    fn p(src: &str) -> Formula {
        parse_inferring(src, ParseOptions::default()).unwrap().0.formula
    }

    #[test]
    fn tokenization() {
        assert_eq!(
            formula_tokens(&p("∀y CountryInEU(y) → EUCountry(y)")).join(" "),
            "∀ y CountryInEU ( y ) → EUCountry ( y )"
        );
        assert_eq!(formula_tokens(&p("Love(a, b)")).join(" "), "Love ( a , b )");
    }

    #[test]
    fn table_one_pair() {
        let phi = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
        let phi2 = p("∀y CountryInEU(y) → EUCountry(y)");
        let b = bleu_formula(&phi, &phi2);
        // clipped n-gram matches 7/11, 3/10, 2/9, 1/8; lengths r = 16, c = 11
        let precisions: [f64; 4] = [7.0 / 11.0, 3.0 / 10.0, 2.0 / 9.0, 1.0 / 8.0];
        let geo = (precisions.iter().map(|p| p.ln()).sum::<f64>() / 4.0).exp();
        let expected = (1.0f64 - 16.0 / 11.0).exp() * geo;
        assert!((b - expected).abs() < 1e-12, "{b} vs {expected}");
        assert!((b - 0.18).abs() <= 0.03);
    }

    #[test]
    fn extremes() {
        let f = p("∀x P(x) → Q(x)");
        assert_eq!(bleu_formula(&f, &f), 1.0);
        assert_eq!(bleu_tokens(&tokenize("A B C D"), &tokenize("E F G H")), 0.0);
        // shorter than four tokens has no 4-grams
        assert_eq!(bleu_formula(&p("P"), &p("P")), 0.0);
    }
}

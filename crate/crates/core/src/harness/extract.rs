//! Answer extraction from dialogue replies.

use serde_json::Value;

use crate::fol::{parse_formula, Formula, Signature};

/// Longest input the substring fallback scans; longer replies are cut.
const MAX_SCAN_CHARS: usize = 1000;

fn answer_text(answer: &Value) -> Option<String> {
    match answer {
        Value::String(s) => Some(s.clone()),
        Value::Null => None,
        other => Some(other.to_string()),
    }
}

/// Parses the structured answer directly; failing that, the longest
/// substring that parses as a closed formula under `sig`.
pub fn extract_formula(answer: &Value, sig: &Signature) -> Option<(String, Formula)> {
    let text = answer_text(answer)?;
    let text = text.trim();
    if let Some(f) = parse_closed(text, sig) {
        return Some((text.to_string(), f));
    }
    longest_parseable(text, sig)
}

fn parse_closed(text: &str, sig: &Signature) -> Option<Formula> {
    parse_formula(text, sig).ok().filter(Formula::is_closed)
}

fn longest_parseable(text: &str, sig: &Signature) -> Option<(String, Formula)> {
    let chars: Vec<(usize, char)> = text.char_indices().take(MAX_SCAN_CHARS).collect();
    let end_of = |i: usize| chars[i].0 + chars[i].1.len_utf8();
    let word = |i: usize| chars.get(i).is_some_and(|&(_, c)| c.is_alphanumeric() || c == '_');
    // a formula starts with a quantifier, negation, bracket or a word, and
    // ends with a closing bracket or the end of a word
    let starts: Vec<usize> = (0..chars.len())
        .filter(|&i| {
            let c = chars[i].1;
            matches!(c, '∀' | '∃' | '¬' | '(' | '!' | '~') || (c.is_alphabetic() && (i == 0 || !word(i - 1)))
        })
        .collect();
    let ends: Vec<usize> = (0..chars.len())
        .filter(|&i| chars[i].1 == ')' || (word(i) && !word(i + 1)))
        .collect();
    let mut spans: Vec<(usize, usize)> = starts
        .iter()
        .flat_map(|&s| ends.iter().filter(move |&&e| e >= s).map(move |&e| (s, e)))
        .collect();
    // longest first; leftmost among equals
    spans.sort_by_key(|&(s, e)| (std::cmp::Reverse(end_of(e) - chars[s].0), s));
    spans.into_iter().find_map(|(s, e)| {
        let piece = &text[chars[s].0..end_of(e)];
        if piece.matches('(').count() != piece.matches(')').count() {
            return None;
        }
        parse_closed(piece, sig).map(|f| (piece.to_string(), f))
    })
}

fn integers_in(text: &str) -> Vec<i64> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_ascii_digit() || (c == '-' && cur.is_empty()) {
            cur.push(c);
        } else {
            if let Ok(n) = cur.parse() {
                out.push(n);
            }
            cur.clear();
        }
    }
    out
}

/// A single integer: a JSON number, or a string holding exactly one integer.
pub fn extract_integer(answer: &Value) -> Option<i64> {
    match answer {
        Value::Number(n) => n.as_i64(),
        Value::String(s) => match integers_in(s).as_slice() {
            [n] => Some(*n),
            _ => None,
        },
        Value::Array(items) if items.len() == 1 => extract_integer(&items[0]),
        _ => None,
    }
}

/// An integer list: a JSON array of integers, or a string listing them.
pub fn extract_integer_list(answer: &Value) -> Option<Vec<i64>> {
    match answer {
        Value::Array(items) => items.iter().map(extract_integer).collect(),
        Value::String(s) => {
            if let Ok(v @ Value::Array(_)) = serde_json::from_str::<Value>(s) {
                return extract_integer_list(&v);
            }
            let ns = integers_in(s);
            (!ns.is_empty()).then_some(ns)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sig() -> Signature {
        Signature::new().with_predicate("Cube", 1).with_predicate("Small", 1).with_constant("a")
    }

    #[test]
    fn direct_answer() {
        let (text, f) = extract_formula(&json!("∀x (Cube(x) → Small(x))"), &sig()).unwrap();
        assert_eq!(text, "∀x (Cube(x) → Small(x))");
        assert!(f.is_closed());
    }

    #[test]
    fn fallback_finds_longest_formula() {
        let reply = json!("The translation is: `∀x (Cube(x) → Small(x))`. Note Cube(a) holds.");
        let (text, _) = extract_formula(&reply, &sig()).unwrap();
        assert_eq!(text, "∀x (Cube(x) → Small(x))");
    }

    #[test]
    fn unparseable_is_none() {
        assert!(extract_formula(&json!("no idea"), &sig()).is_none());
        assert!(extract_formula(&json!("Cube(x)"), &sig()).is_none());
        assert!(extract_formula(&Value::Null, &sig()).is_none());
    }

    #[test]
    fn integers() {
        assert_eq!(extract_integer(&json!(3)), Some(3));
        assert_eq!(extract_integer(&json!("Rephrasing 4")), Some(4));
        assert_eq!(extract_integer(&json!("1 or 2")), None);
        assert_eq!(extract_integer(&json!(2.5)), None);
        assert_eq!(extract_integer_list(&json!([3, 1, 2])), Some(vec![3, 1, 2]));
        assert_eq!(extract_integer_list(&json!("[3, 1, 2]")), Some(vec![3, 1, 2]));
        assert_eq!(extract_integer_list(&json!("3, 1, 2")), Some(vec![3, 1, 2]));
        assert_eq!(extract_integer_list(&json!(["a"])), None);
    }
}

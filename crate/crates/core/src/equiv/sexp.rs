//! Minimal S-expression reader for solver output.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items) => Some(items),
            Sexp::Atom(_) => None,
        }
    }
}

/// Parses every top-level expression; `None` on unbalanced input.
pub fn parse_all(text: &str) -> Option<Vec<Sexp>> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    while i < chars.len() {
        let c = chars[i];
        match c {
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                stack.push(Vec::new());
                i += 1;
            }
            ')' => {
                let done = stack.pop()?;
                stack.last_mut()?.push(Sexp::List(done));
                i += 1;
            }
            '|' => {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '|' {
                    i += 1;
                }
                if i >= chars.len() {
                    return None;
                }
                stack.last_mut()?.push(Sexp::Atom(chars[start..i].iter().collect()));
                i += 1;
            }
            '"' => {
                let start = i;
                i += 1;
                while i < chars.len() {
                    if chars[i] == '"' {
                        // "" is an escaped quote
                        if i + 1 < chars.len() && chars[i + 1] == '"' {
                            i += 2;
                            continue;
                        }
                        break;
                    }
                    i += 1;
                }
                i += 1;
                let end = i.min(chars.len());
                stack.last_mut()?.push(Sexp::Atom(chars[start..end].iter().collect()));
            }
            c if c.is_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"()|;\"".contains(chars[i]) {
                    i += 1;
                }
                stack.last_mut()?.push(Sexp::Atom(chars[start..i].iter().collect()));
            }
        }
    }
    if stack.len() != 1 {
        return None;
    }
    stack.pop()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_model_fragment() {
        let text = "(\n  ;; universe for U:\n  (declare-fun U!val!0 () U)\n  (define-fun |P| ((x!0 U)) Bool (ite (= x!0 U!val!0) true false))\n)";
        let items = parse_all(text).unwrap();
        assert_eq!(items.len(), 1);
        let model = items[0].as_list().unwrap();
        assert_eq!(model.len(), 2);
        assert_eq!(model[1].as_list().unwrap()[1], Sexp::Atom("P".into()));
    }

    #[test]
    fn unbalanced_is_none() {
        assert!(parse_all("(a (b)").is_none());
        assert!(parse_all("a)").is_none());
    }
}

//! Surface syntax for formulas.
//!
//! Precedence from tightest to loosest: `¬` and the quantifiers, `∧`, `∨`,
//! `⊕` (only when expansion is enabled), `→`, `↔`. `∧`/`∨` associate to the
//! left, `→`/`↔` to the right. A quantifier's scope extends as far to the
//! right as possible, so `∀x P(x) ∧ Q(x) → R(x)` binds every `x`.
//!
//! ASCII aliases: `forall`, `exists`, `!`/`~`, `&`/`&&`, `|`/`||`, `->`/`=>`,
//! `<->`/`<=>`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ontology::Signature;
use super::syntax::{Formula, Quantifier, Term};
use super::FolError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Rewrite `α ⊕ β` as `(α ∨ β) ∧ ¬(α ∧ β)` instead of rejecting it.
    pub expand_xor: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseWarning {
    /// A quantifier rebinds a variable that is already in scope.
    Shadowing { var: String, position: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub formula: Formula,
    pub warnings: Vec<ParseWarning>,
}

/// Parses `input` against a fixed signature.
pub fn parse_formula(input: &str, sig: &Signature) -> Result<Formula, FolError> {
    parse_with(input, sig, ParseOptions::default()).map(|p| p.formula)
}

pub fn parse_with(input: &str, sig: &Signature, options: ParseOptions) -> Result<Parsed, FolError> {
    let tokens = lex(input)?;
    let mut parser = Parser::new(tokens, SymbolTable::Fixed(sig), options);
    parser.run()
}

/// Parses without a declared signature, inferring one from usage.
///
/// Bare identifiers in term position that are not bound by a quantifier are
/// taken to be constants, so the result is always closed.
pub fn parse_inferring(input: &str, options: ParseOptions) -> Result<(Parsed, Signature), FolError> {
    let tokens = lex(input)?;
    let mut parser = Parser::new(tokens, SymbolTable::Inferred(Signature::new()), options);
    let parsed = parser.run()?;
    let sig = match parser.symbols {
        SymbolTable::Inferred(sig) => sig,
        SymbolTable::Fixed(_) => unreachable!(),
    };
    sig.validate()?;
    Ok((parsed, sig))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Forall,
    Exists,
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    LParen,
    RParen,
    Comma,
    Dot,
    Ident(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Forall => "`∀`".into(),
            Tok::Exists => "`∃`".into(),
            Tok::Not => "`¬`".into(),
            Tok::And => "`∧`".into(),
            Tok::Or => "`∨`".into(),
            Tok::Xor => "`⊕`".into(),
            Tok::Implies => "`→`".into(),
            Tok::Iff => "`↔`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    /// character offset into the input
    pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn lex(input: &str) -> Result<Vec<Spanned>, FolError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |pos: usize, found: String| FolError::Syntax {
        position: pos,
        expected: "a formula token".into(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let three: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '∀' => {
                i += 1;
                Tok::Forall
            }
            '∃' => {
                i += 1;
                Tok::Exists
            }
            '¬' | '!' | '~' => {
                i += 1;
                Tok::Not
            }
            '∧' => {
                i += 1;
                Tok::And
            }
            '∨' => {
                i += 1;
                Tok::Or
            }
            '⊕' => {
                i += 1;
                Tok::Xor
            }
            '→' => {
                i += 1;
                Tok::Implies
            }
            '↔' => {
                i += 1;
                Tok::Iff
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '.' | ':' => {
                i += 1;
                Tok::Dot
            }
            '&' => {
                i += if two == "&&" { 2 } else { 1 };
                Tok::And
            }
            '|' => {
                i += if two == "||" { 2 } else { 1 };
                Tok::Or
            }
            '-' if two == "->" => {
                i += 2;
                Tok::Implies
            }
            '=' if two == "=>" => {
                i += 2;
                Tok::Implies
            }
            '<' if three == "<->" || three == "<=>" => {
                i += 3;
                Tok::Iff
            }
            c if is_ident_char(c) => {
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word),
                }
            }
            other => return Err(syntax(start, format!("`{other}`"))),
        };
        out.push(Spanned { tok, pos: start });
    }
    out.push(Spanned {
        tok: Tok::End,
        pos: chars.len(),
    });
    Ok(out)
}

enum SymbolTable<'a> {
    Fixed(&'a Signature),
    Inferred(Signature),
}

impl SymbolTable<'_> {
    fn sig(&self) -> &Signature {
        match self {
            SymbolTable::Fixed(s) => s,
            SymbolTable::Inferred(s) => s,
        }
    }

    fn predicate(&mut self, name: &str, got: usize, pos: usize) -> Result<(), FolError> {
        match self {
            SymbolTable::Fixed(sig) => match sig.predicate_arity(name) {
                Some(n) if n == got => Ok(()),
                Some(n) => Err(FolError::ArityMismatch {
                    symbol: name.into(),
                    expected: n,
                    got,
                }),
                None if sig.declares(name) => Err(FolError::NamespaceClash { name: name.into() }),
                None => Err(FolError::UnknownSymbolAt {
                    name: name.into(),
                    position: pos,
                }),
            },
            SymbolTable::Inferred(sig) => {
                if sig.constants.contains(name) || sig.functions.contains_key(name) {
                    return Err(FolError::NamespaceClash { name: name.into() });
                }
                match sig.predicates.get(name) {
                    Some(&n) if n != got => Err(FolError::ArityMismatch {
                        symbol: name.into(),
                        expected: n,
                        got,
                    }),
                    _ => {
                        sig.predicates.insert(name.into(), got);
                        Ok(())
                    }
                }
            }
        }
    }

    fn function(&mut self, name: &str, got: usize, pos: usize) -> Result<(), FolError> {
        match self {
            SymbolTable::Fixed(sig) => match sig.function_arity(name) {
                Some(n) if n == got => Ok(()),
                Some(n) => Err(FolError::ArityMismatch {
                    symbol: name.into(),
                    expected: n,
                    got,
                }),
                None if sig.declares(name) => Err(FolError::NamespaceClash { name: name.into() }),
                None => Err(FolError::UnknownSymbolAt {
                    name: name.into(),
                    position: pos,
                }),
            },
            SymbolTable::Inferred(sig) => {
                if sig.constants.contains(name) || sig.predicates.contains_key(name) {
                    return Err(FolError::NamespaceClash { name: name.into() });
                }
                match sig.functions.get(name) {
                    Some(&n) if n != got => Err(FolError::ArityMismatch {
                        symbol: name.into(),
                        expected: n,
                        got,
                    }),
                    _ => {
                        sig.functions.insert(name.into(), got);
                        Ok(())
                    }
                }
            }
        }
    }
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    symbols: SymbolTable<'a>,
    options: ParseOptions,
    bound: Vec<String>,
    warnings: Vec<ParseWarning>,
    /// unbound term identifiers seen in inference mode, resolved to constants
    pending_constants: BTreeMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn new(tokens: Vec<Spanned>, symbols: SymbolTable<'a>, options: ParseOptions) -> Self {
        Parser {
            tokens,
            pos: 0,
            symbols,
            options,
            bound: Vec::new(),
            warnings: Vec::new(),
            pending_constants: BTreeMap::new(),
        }
    }

    fn run(&mut self) -> Result<Parsed, FolError> {
        if matches!(self.peek(), Tok::End) {
            return Err(self.unexpected("a formula"));
        }
        let formula = self.parse_iff()?;
        if !matches!(self.peek(), Tok::End) {
            return Err(self.unexpected("a connective or end of input"));
        }
        if let SymbolTable::Inferred(sig) = &mut self.symbols {
            for name in std::mem::take(&mut self.pending_constants).into_keys() {
                if sig.predicates.contains_key(&name) || sig.functions.contains_key(&name) {
                    return Err(FolError::NamespaceClash { name });
                }
                sig.constants.insert(name);
            }
        }
        Ok(Parsed {
            formula,
            warnings: std::mem::take(&mut self.warnings),
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].pos
    }

    fn advance(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> FolError {
        FolError::Syntax {
            position: self.position(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), FolError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn parse_iff(&mut self) -> Result<Formula, FolError> {
        let left = self.parse_implies()?;
        if matches!(self.peek(), Tok::Iff) {
            self.advance();
            let right = self.parse_iff()?;
            return Ok(Formula::iff(left, right));
        }
        Ok(left)
    }

    fn parse_implies(&mut self) -> Result<Formula, FolError> {
        let left = self.parse_xor()?;
        if matches!(self.peek(), Tok::Implies) {
            self.advance();
            let right = self.parse_implies()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn parse_xor(&mut self) -> Result<Formula, FolError> {
        let mut left = self.parse_or()?;
        while matches!(self.peek(), Tok::Xor) {
            if !self.options.expand_xor {
                return Err(FolError::XorNotAllowed {
                    position: self.position(),
                });
            }
            self.advance();
            let right = self.parse_or()?;
            left = Formula::and(
                Formula::or(left.clone(), right.clone()),
                Formula::not(Formula::and(left, right)),
            );
        }
        Ok(left)
    }

    fn parse_or(&mut self) -> Result<Formula, FolError> {
        let mut left = self.parse_and()?;
        while matches!(self.peek(), Tok::Or) {
            self.advance();
            let right = self.parse_and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Formula, FolError> {
        let mut left = self.parse_unary()?;
        while matches!(self.peek(), Tok::And) {
            self.advance();
            let right = self.parse_unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Formula, FolError> {
        match self.peek() {
            Tok::Not => {
                self.advance();
                Ok(Formula::not(self.parse_unary()?))
            }
            Tok::Forall | Tok::Exists => {
                let q = if matches!(self.advance().tok, Tok::Forall) {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                let var_pos = self.position();
                let var = match self.peek().clone() {
                    Tok::Ident(name) => {
                        self.advance();
                        name
                    }
                    _ => return Err(self.unexpected("a variable")),
                };
                if self.symbols.sig().declares(&var) {
                    return Err(FolError::NamespaceClash { name: var });
                }
                if self.bound.contains(&var) {
                    log::warn!("variable `{var}` shadows an enclosing binder at {var_pos}");
                    self.warnings.push(ParseWarning::Shadowing {
                        var: var.clone(),
                        position: var_pos,
                    });
                }
                if matches!(self.peek(), Tok::Dot) {
                    self.advance();
                }
                self.bound.push(var.clone());
                let body = self.parse_iff();
                self.bound.pop();
                Ok(Formula::quantified(q, var, body?))
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<Formula, FolError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let f = self.parse_iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => {
                let pos = self.position();
                self.advance();
                let args = if matches!(self.peek(), Tok::LParen) {
                    self.parse_args()?
                } else {
                    Vec::new()
                };
                self.symbols.predicate(&name, args.len(), pos)?;
                Ok(Formula::atom(name, args))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn parse_args(&mut self) -> Result<Vec<Term>, FolError> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if matches!(self.peek(), Tok::RParen) {
            self.advance();
            return Ok(args);
        }
        loop {
            args.push(self.parse_term()?);
            match self.peek() {
                Tok::Comma => {
                    self.advance();
                }
                Tok::RParen => {
                    self.advance();
                    return Ok(args);
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Term, FolError> {
        let pos = self.position();
        let name = match self.peek().clone() {
            Tok::Ident(name) => name,
            _ => return Err(self.unexpected("a term")),
        };
        self.advance();
        if matches!(self.peek(), Tok::LParen) {
            let args = self.parse_args()?;
            self.symbols.function(&name, args.len(), pos)?;
            return Ok(Term::func(name, args));
        }
        if self.bound.contains(&name) {
            return Ok(Term::var(name));
        }
        let sig = self.symbols.sig();
        if sig.is_constant(&name) {
            return Ok(Term::constant(name));
        }
        if sig.predicates.contains_key(&name) || sig.functions.contains_key(&name) {
            return Err(FolError::NamespaceClash { name });
        }
        match self.symbols {
            SymbolTable::Fixed(_) => Ok(Term::var(name)),
            SymbolTable::Inferred(_) => {
                self.pending_constants.insert(name.clone(), pos);
                Ok(Term::constant(name))
            }
        }
    }
}

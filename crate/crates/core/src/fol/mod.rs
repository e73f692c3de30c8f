//! First-order syntax: terms, formulas, signatures and ontologies, with a
//! parser, a canonical printer, and negation normal form.

mod nnf;
mod ontology;
mod parse;
mod print;
mod syntax;

pub use nnf::{negate, to_nnf};
pub use ontology::{
    max_placeholder, Glossary, Instance, Ontology, OntologyFile, PredicateEntry, PredicateGloss,
    Signature,
};
pub use parse::{parse_formula, parse_inferring, parse_with, ParseOptions, ParseWarning, Parsed};
pub use print::print_formula;
pub(crate) use print::{left_needs_parens, negand_needs_parens, right_needs_parens};
pub use syntax::{Connective, Formula, Quantifier, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FolError {
    #[error("syntax error at {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown symbol `{name}` at {position}")]
    UnknownSymbolAt { name: String, position: usize },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
    #[error("arity mismatch for `{symbol}`: expected {expected}, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("XOR at {position} is not allowed")]
    XorNotAllowed { position: usize },
    #[error("`{name}` is used as more than one kind of symbol")]
    NamespaceClash { name: String },
    #[error("formula is not closed; free variables: {}", free.join(", "))]
    NotClosed { free: Vec<String> },
    #[error("invalid ontology: {0}")]
    InvalidOntology(String),
}

impl FolError {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            FolError::Syntax { .. } => "SyntaxError",
            FolError::UnknownSymbolAt { .. } | FolError::UnknownSymbol { .. } => "UnknownSymbol",
            FolError::ArityMismatch { .. } => "ArityMismatch",
            FolError::XorNotAllowed { .. } => "XorNotAllowed",
            FolError::NamespaceClash { .. } => "NamespaceClash",
            FolError::NotClosed { .. } => "NotClosed",
            FolError::InvalidOntology(_) => "InvalidOntology",
        }
    }
}

//! Logical equivalence of closed formulas: a finite-model evaluator, a
//! bounded brute-force refuter, and an SMT-LIB2 bridge to an external solver.

mod oracle;
pub mod sexp;
mod smtlib;
mod solver;
mod structure;

use serde::{Deserialize, Serialize};

use crate::fol::FolError;

pub use oracle::{brute_force_check, brute_force_report, OracleBounds, OracleReport, FUNCTION_DOMAIN_LIMIT};
pub use smtlib::{emit_entailment, emit_smtlib, formula_to_smt, smt_symbol, UNIVERSE_SORT};
pub use solver::{solver_check, Solver, SolverAnswer, SolverSettings, DEFAULT_TIMEOUT_MS, SOLVER_ENV};
pub use structure::{eval, eval_closed, Assignment, Element, FunctionEntry, SigmaStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivMethod {
    BruteForce,
    Solver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    BoundExhausted,
    SolverUnknown,
    Timeout,
}

/// Outcome of an equivalence query.
///
/// A `NotEquivalent` witness, when present, is a structure in which exactly
/// one of the two formulas holds. The solver may answer `sat` without a
/// usable model, in which case the witness is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EquivVerdict {
    Equivalent {
        method: EquivMethod,
    },
    NotEquivalent {
        method: EquivMethod,
        witness: Option<SigmaStructure>,
    },
    Unknown {
        reason: UnknownReason,
    },
}

impl EquivVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivVerdict::Equivalent { .. })
    }

    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, EquivVerdict::NotEquivalent { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, EquivVerdict::Unknown { .. })
    }

    /// Short lowercase label: `equivalent`, `not_equivalent` or `unknown`.
    pub fn label(&self) -> &'static str {
        match self {
            EquivVerdict::Equivalent { .. } => "equivalent",
            EquivVerdict::NotEquivalent { .. } => "not_equivalent",
            EquivVerdict::Unknown { .. } => "unknown",
        }
    }

    pub fn witness(&self) -> Option<&SigmaStructure> {
        match self {
            EquivVerdict::NotEquivalent { witness, .. } => witness.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EquivError {
    #[error("oracle budget must be at least 1")]
    BudgetExceeded,
    #[error("maximum domain size must be at least 1")]
    InvalidBound,
    #[error("variable `{var}` is unbound")]
    Unbound { var: String },
    #[error("symbol `{symbol}` is not interpreted by the structure")]
    Uninterpreted { symbol: String },
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("solver `{program}` not found")]
    SolverNotFound { program: String },
    #[error("solver crashed: {stderr}")]
    SolverCrashed { stderr: String },
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl EquivError {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            EquivError::BudgetExceeded => "BudgetExceeded",
            EquivError::InvalidBound => "InvalidBound",
            EquivError::Unbound { .. } => "Unbound",
            EquivError::Uninterpreted { .. } => "Uninterpreted",
            EquivError::InvalidStructure(_) => "InvalidStructure",
            EquivError::UnsupportedConstruct(_) => "UnsupportedConstruct",
            EquivError::SolverNotFound { .. } => "SolverNotFound",
            EquivError::SolverCrashed { .. } => "SolverCrashed",
            EquivError::Fol(e) => e.kind(),
            EquivError::Io(_) => "Io",
        }
    }
}

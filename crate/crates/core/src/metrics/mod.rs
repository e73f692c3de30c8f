//! Scores: the truth-table LE score and BLEU on formulas, task scoring for
//! the choice tasks, point-biserial correlation, and score reports.

mod bleu;
mod correlation;
mod le;
mod report;
mod scoring;

pub use bleu::{bleu_formula, bleu_tokens, formula_tokens, tokenize};
pub use correlation::{pearson, point_biserial, population_std};
pub use le::{
    default_matching, le_score, le_score_table, name_similarity, name_tokens, LeScore, PredicateMatching,
    TruthTable, MATCH_THRESHOLD, MAX_LE_VARIABLES,
};
pub use report::{Aggregate, ScoreRecord, ScoreReport};
pub use scoring::{score_most_similar, score_ranking, RankingScore};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("matching does not cover `{predicate}` ({detail})")]
    MatchingIncomplete { predicate: String, detail: String },
    #[error("truth table over {count} variables is too large")]
    TooManyVariables { count: usize },
    #[error("position {position} is outside 1..={len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("ranking is not a permutation of 1..={len}")]
    NotAPermutation { len: usize },
    #[error("candidate set has no equivalent and negation entries")]
    NotARankingSet,
    #[error("vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("correlation undefined: a group is empty or the variable is constant")]
    DegenerateGroups,
}

impl MetricsError {
    pub fn kind(&self) -> &'static str {
        match self {
            MetricsError::MatchingIncomplete { .. } => "MatchingIncomplete",
            MetricsError::TooManyVariables { .. } => "TooManyVariables",
            MetricsError::PositionOutOfRange { .. } => "PositionOutOfRange",
            MetricsError::NotAPermutation { .. } => "NotAPermutation",
            MetricsError::NotARankingSet => "NotARankingSet",
            MetricsError::LengthMismatch { .. } => "LengthMismatch",
            MetricsError::DegenerateGroups => "DegenerateGroups",
        }
    }
}

//! Perturbations, equivalence-preserving rewrites, and candidate sets for
//! the most-similar and ranking tasks.

mod candidates;
mod perturb;
mod rewrite;

pub use candidates::{
    build_most_similar, build_ranking, AnswerPositions, Candidate, CandidateBuilder, CandidateLabel, CandidateSet,
    ChoiceTask, PromptPayload, Variant,
};
pub use perturb::{enumerate_perturbations, sample_perturbations, sample_perturbations_with, EditKind, Perturbation};
pub use rewrite::{
    applicable_rewrites, equivalent_rewrite, equivalent_rewrite_with, rewrite_with_rule, Rewrite, RewriteRule,
};

use crate::equiv::EquivError;
use crate::nlgen::NlgenError;

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("{instance_id}: {rule} rewrite is not equivalent to the original")]
    RewriteRefuted { instance_id: String, rule: &'static str },
    #[error(transparent)]
    Nlgen(#[from] NlgenError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

impl TransformError {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            TransformError::InvalidK => "InvalidK",
            TransformError::RewriteRefuted { .. } => "RewriteRefuted",
            TransformError::Nlgen(_) => "MissingGloss",
            TransformError::Equiv(e) => e.kind(),
        }
    }
}

//! Benchmark harness: dataset ingestion, prompt rendering, model clients,
//! reply extraction, and reproducible runs.

pub mod client;
mod dataset;
mod extract;
mod prompts;
mod run;

use std::path::PathBuf;

use crate::equiv::EquivError;
use crate::fol::FolError;
use crate::transform::TransformError;

pub use client::{
    AnswerSchema, ChatReply, ChatRequest, ClientError, EmbedRequest, FileClient, FixedAnswerClient, HttpChatClient,
    HttpEmbeddingClient, HttpSettings, ModelClient, OracleClient, ScriptedClient,
};
pub use dataset::{ingest_dataset, ingest_str, to_triple_jsonl, Dataset, DatasetFormat};
pub use extract::{extract_formula, extract_integer, extract_integer_list};
pub use prompts::{
    candidate_list, choice_prompt, constant_list, predicate_list, render_template, translation_prompt, Prompt,
    EMBED_INSTRUCTION_FOL, EMBED_INSTRUCTION_NL, TEMPLATE_1, TEMPLATE_2, TEMPLATE_3_FOL, TEMPLATE_3_NL, TEMPLATE_4,
    TEMPLATE_5_FOL, TEMPLATE_5_NL, TEMPLATE_6,
};
pub use run::{
    cosine, execute, ideal_ranking, rank_by_cosine, run, run_choice_task, run_embedding_task, run_logical_translation,
    run_with, ModelDescriptor, ModelKind, ParsedAnswer, RunConfig, RunOutput, RunRecord, SolverConfig, TaskKind,
    DEFAULT_SEEDS, DEFAULT_TOKEN_ENV, FLAG_CLIENT_ERROR, FLAG_DEGENERATE_NEGATION, FLAG_EQUIV_TO_ORIGINAL,
    FLAG_MALFORMED, FLAG_SOLVER_ERROR, FLAG_SOLVER_UNKNOWN, FLAG_TIE,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    BadRecord { line: usize, message: String },
    #[error("record `{record}`: {source}")]
    ParseFailure { record: String, source: FolError },
    #[error("record `{record}` does not fit its ontology: {source}")]
    OntologyMismatch { record: String, source: FolError },
    #[error("template {template}: cannot resolve {placeholder}")]
    MissingPlaceholder { template: u8, placeholder: String },
    #[error("no template {0}; templates are numbered 1 to 6")]
    UnknownTemplate(u8),
    #[error("embedding dimensions differ within instance `{instance_id}`")]
    DimensionMismatch { instance_id: String },
    #[error("solver `{program}` is not available")]
    SolverUnavailable { program: String },
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

impl HarnessError {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Io { .. } => "Io",
            HarnessError::BadRecord { .. } => "BadRecord",
            HarnessError::ParseFailure { .. } => "ParseFailure",
            HarnessError::OntologyMismatch { .. } => "OntologyMismatch",
            HarnessError::MissingPlaceholder { .. } => "MissingPlaceholder",
            HarnessError::UnknownTemplate(_) => "UnknownTemplate",
            HarnessError::DimensionMismatch { .. } => "DimensionMismatch",
            HarnessError::SolverUnavailable { .. } => "SolverUnavailable",
            HarnessError::Config(_) => "Config",
            HarnessError::Client(_) => "ClientError",
            HarnessError::Transform(e) => e.kind(),
            HarnessError::Equiv(e) => e.kind(),
        }
    }
}

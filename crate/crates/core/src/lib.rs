//! Toolkit for benchmarking natural-language to first-order-logic translation.
//!
//! - [`fol`]: formula syntax, parsing, printing, NNF.
//! - [`transform`]: perturbations, equivalence-preserving rewrites, candidate sets.
//! - [`nlgen`]: glossary-driven rendering of formulas into English.
//! - [`equiv`]: finite-model oracle, SMT-LIB2 emission and solver driver.
//! - [`metrics`]: LE score, BLEU on formulas, task scoring, point-biserial correlation.
//! - [`harness`]: datasets, prompt templates, model clients and benchmark runs.
//! - [`cli`]: the `folbench` command-line front end.

pub mod cli;
pub mod corpus;
pub mod equiv;
pub mod fol;
pub mod harness;
pub mod metrics;
pub mod nlgen;
pub mod seeding;
pub mod transform;

pub use fol::{Formula, Instance, Ontology, Signature, Term};

use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::equiv::{brute_force_check, EquivVerdict, OracleBounds, Solver};
use crate::fol::{negate, print_formula, to_nnf, Formula, Instance};
use crate::nlgen;
use crate::seeding;

use super::perturb::{enumerate_perturbations, sample_from, EditKind};
use super::rewrite::{equivalent_rewrite_with, RewriteRule};
use super::TransformError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Fol,
    Nl,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Fol => "fol",
            Variant::Nl => "nl",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fol" => Ok(Variant::Fol),
            "nl" => Ok(Variant::Nl),
            other => Err(format!("unknown variant `{other}` (expected fol or nl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChoiceTask {
    MostSimilar,
    Ranking,
}

impl ChoiceTask {
    pub fn name(self) -> &'static str {
        match self {
            ChoiceTask::MostSimilar => "most_similar",
            ChoiceTask::Ranking => "ranking",
        }
    }

    pub fn default_k(self) -> usize {
        match self {
            ChoiceTask::MostSimilar => 8,
            ChoiceTask::Ranking => 3,
        }
    }
}

impl std::str::FromStr for ChoiceTask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "most_similar" => Ok(ChoiceTask::MostSimilar),
            "ranking" => Ok(ChoiceTask::Ranking),
            other => Err(format!("unknown task `{other}` (expected most_similar or ranking)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum CandidateLabel {
    Original,
    Perturbation { edit: EditKind, site: usize },
    Negation,
    NegationNnf,
    Equivalent { rule: RewriteRule },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub text: String,
    pub formula: Formula,
    pub label: CandidateLabel,
    /// For perturbations: `Some(true)` when the oracle found no structure
    /// separating it from the original within its bound.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equiv_to_original: Option<bool>,
}

/// 1-based positions of the labeled candidates after shuffling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerPositions {
    pub original: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equivalent: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub negation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub negation_nnf: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub instance_id: String,
    pub variant: Variant,
    pub task: ChoiceTask,
    pub k: usize,
    pub shuffle_seed: u64,
    pub candidates: Vec<Candidate>,
    pub answer_positions: AnswerPositions,
    /// Set when `(¬φ)_nnf` is syntactically `¬φ`; both are still present.
    #[serde(default)]
    pub degenerate_negation: bool,
}

/// What a model is shown: candidate texts only, numbered by position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPayload {
    pub instance_id: String,
    pub variant: Variant,
    pub task: ChoiceTask,
    pub candidates: Vec<String>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.text.as_str()).collect()
    }

    /// Candidate at a 1-based position.
    pub fn at(&self, position: usize) -> Option<&Candidate> {
        position.checked_sub(1).and_then(|i| self.candidates.get(i))
    }

    pub fn prompt_payload(&self) -> PromptPayload {
        PromptPayload {
            instance_id: self.instance_id.clone(),
            variant: self.variant,
            task: self.task,
            candidates: self.texts().into_iter().map(str::to_string).collect(),
        }
    }

    /// Full serialization including labels and answer positions.
    pub fn to_ground_truth_json(&self) -> String {
        serde_json::to_string(self).expect("candidate sets serialize")
    }

    pub fn perturbation_count(&self) -> usize {
        self.candidates
            .iter()
            .filter(|c| matches!(c.label, CandidateLabel::Perturbation { .. }))
            .count()
    }

    /// Perturbations the oracle could not tell apart from the original.
    pub fn flagged_perturbations(&self) -> usize {
        self.candidates.iter().filter(|c| c.equiv_to_original == Some(true)).count()
    }
}

/// Assembles candidate sets. Every random choice comes from streams keyed
/// by `(seed, instance id, task, purpose)`; the variant is not part of the
/// key, so the NL set is the rendering of the FOL set in the same order.
#[derive(Debug, Clone)]
pub struct CandidateBuilder {
    /// Number of perturbations; the task default when `None`.
    pub k: Option<usize>,
    /// Bound for the `equiv_to_original` flags; no flags when `None`.
    pub flag_bounds: Option<OracleBounds>,
    /// Bound for refuting the equivalent rewrite; unchecked when `None`.
    pub rewrite_bounds: Option<OracleBounds>,
    /// Solver confirming the equivalent rewrite.
    pub solver: Option<Arc<Solver>>,
}

impl Default for CandidateBuilder {
    fn default() -> Self {
        CandidateBuilder {
            k: None,
            flag_bounds: Some(OracleBounds::default()),
            rewrite_bounds: Some(OracleBounds::default()),
            solver: None,
        }
    }
}

impl CandidateBuilder {
    /// No oracle or solver checks.
    pub fn unchecked() -> Self {
        CandidateBuilder {
            k: None,
            flag_bounds: None,
            rewrite_bounds: None,
            solver: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_solver(mut self, solver: Arc<Solver>) -> Self {
        self.solver = Some(solver);
        self
    }

    pub fn build(
        &self,
        inst: &Instance,
        task: ChoiceTask,
        seed: u64,
        variant: Variant,
    ) -> Result<CandidateSet, TransformError> {
        let k = self.k.unwrap_or(task.default_k());
        if k == 0 {
            return Err(TransformError::InvalidK);
        }
        let phi = &inst.formula;
        let sig = inst.ontology.signature();
        let labels = |purpose: &'static str| [inst.id.as_str(), task.name(), purpose];

        let mut fixed: Vec<(Formula, CandidateLabel)> = Vec::new();
        let mut degenerate = false;
        if task == ChoiceTask::Ranking {
            let neg = negate(phi);
            let neg_nnf = to_nnf(&neg);
            degenerate = neg == neg_nnf;
            let rewrite = equivalent_rewrite_with(phi, &mut seeding::stream(seed, &labels("rewrite")));
            self.verify_rewrite(inst, &rewrite.formula, rewrite.rule)?;
            fixed.push((neg, CandidateLabel::Negation));
            fixed.push((neg_nnf, CandidateLabel::NegationNnf));
            fixed.push((rewrite.formula, CandidateLabel::Equivalent { rule: rewrite.rule }));
        }

        let pool: Vec<_> = enumerate_perturbations(phi)
            .into_iter()
            .filter(|p| fixed.iter().all(|(f, _)| *f != p.formula))
            .collect();
        let sampled = sample_from(pool, k, &mut seeding::stream(seed, &labels("perturb")));

        let mut items: Vec<Candidate> = Vec::with_capacity(sampled.len() + 4);
        items.push(self.candidate(inst, variant, phi.clone(), CandidateLabel::Original, None)?);
        for p in sampled {
            let flag = match self.flag_bounds {
                Some(b) => Some(!matches!(
                    brute_force_check(phi, &p.formula, sig, b.max_domain, b.budget)?,
                    EquivVerdict::NotEquivalent { .. }
                )),
                None => None,
            };
            let label = CandidateLabel::Perturbation {
                edit: p.kind,
                site: p.site,
            };
            items.push(self.candidate(inst, variant, p.formula, label, flag)?);
        }
        for (f, label) in fixed {
            items.push(self.candidate(inst, variant, f, label, None)?);
        }

        let shuffle_seed = seeding::derive_seed(seed, &labels("shuffle"));
        items.shuffle(&mut seeding::rng_from(shuffle_seed));

        let find = |pred: &dyn Fn(&CandidateLabel) -> bool| items.iter().position(|c| pred(&c.label)).map(|i| i + 1);
        let answer_positions = AnswerPositions {
            original: find(&|l| *l == CandidateLabel::Original).expect("original is present"),
            equivalent: find(&|l| matches!(l, CandidateLabel::Equivalent { .. })),
            negation: find(&|l| *l == CandidateLabel::Negation),
            negation_nnf: find(&|l| *l == CandidateLabel::NegationNnf),
        };
        Ok(CandidateSet {
            instance_id: inst.id.clone(),
            variant,
            task,
            k,
            shuffle_seed,
            candidates: items,
            answer_positions,
            degenerate_negation: degenerate,
        })
    }

    fn candidate(
        &self,
        inst: &Instance,
        variant: Variant,
        formula: Formula,
        label: CandidateLabel,
        equiv_to_original: Option<bool>,
    ) -> Result<Candidate, TransformError> {
        let text = match variant {
            Variant::Fol => print_formula(&formula),
            Variant::Nl => nlgen::translate(&formula, inst.ontology.glossary())?,
        };
        Ok(Candidate {
            text,
            formula,
            label,
            equiv_to_original,
        })
    }

    fn verify_rewrite(&self, inst: &Instance, rewritten: &Formula, rule: RewriteRule) -> Result<(), TransformError> {
        let sig = inst.ontology.signature();
        let refuted = |v: &EquivVerdict| matches!(v, EquivVerdict::NotEquivalent { .. });
        if let Some(b) = self.rewrite_bounds {
            let v = brute_force_check(&inst.formula, rewritten, sig, b.max_domain, b.budget)?;
            if refuted(&v) {
                return Err(TransformError::RewriteRefuted {
                    instance_id: inst.id.clone(),
                    rule: rule.name(),
                });
            }
        }
        if let Some(solver) = &self.solver {
            let v = solver.check(&inst.formula, rewritten, sig)?;
            if refuted(&v) {
                return Err(TransformError::RewriteRefuted {
                    instance_id: inst.id.clone(),
                    rule: rule.name(),
                });
            }
            if v.is_unknown() {
                log::warn!("{}: solver could not confirm {} rewrite", inst.id, rule.name());
            }
        }
        Ok(())
    }
}

pub fn build_most_similar(inst: &Instance, k: usize, seed: u64, variant: Variant) -> Result<CandidateSet, TransformError> {
    CandidateBuilder::default().with_k(k).build(inst, ChoiceTask::MostSimilar, seed, variant)
}

pub fn build_ranking(inst: &Instance, k: usize, seed: u64, variant: Variant) -> Result<CandidateSet, TransformError> {
    CandidateBuilder::default().with_k(k).build(inst, ChoiceTask::Ranking, seed, variant)
}

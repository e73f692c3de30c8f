//! Prompt templates 1–6.
//!
//! 1/2: logical translation (system/user). 3/4: most similar. 5/6: ranking.
//! Choice-task templates exist in an NL and a FOL wording; the FOL wording
//! swaps "sentence"/"rephrasing" for "formula" and nothing else.

use crate::fol::Instance;
use crate::transform::{CandidateSet, ChoiceTask, Variant};

use super::HarnessError;

pub const TEMPLATE_1: &str = "\
You are an expert evaluator specializing in translating natural language sentences into a logical formalism. Your task is to formalize a given sentence in First Order Logic (FOL).

Instructions:
You can use the following symbols: 
-  logical symbols: ∀ (for all), ∃ (exists), → (implies), ↔ (is equivalent to), ∧ (and), ∨ (or), ¬ (not)
- predicate symbols: <\\predicate_symbols\\>
- contant symbols: <\\constant_symbols\\>
- variable symbols: x,y,z,...
- non logical symbols: parenthesis ()

Output Format:
Return the First Order Logic sentence that best represents the meaning of the given sentence.

Input Format:
Sentence: {sentence}
";

pub const TEMPLATE_2: &str = "Sentence: <\\sentence\\>";

pub const TEMPLATE_3_NL: &str = "\
You are an expert evaluator specializing in semantic similarity assessment. Your task is to identify the rephrasing that best preserves the original meaning of a given sentence.
Instructions:

- You will receive one original sentence followed by multiple rephrased versions
- Evaluate each rephrasing based solely on semantic/logic equivalence (meaning preservation)
- Ignore differences in grammar, syntax, word order, or writing style
- Select and return the rephrasing that most accurately conveys the same meaning as the original sentence

Evaluation Criteria:

- Prioritize semantic accuracy over grammatical correctness
- Focus on whether the logical meaning is the same or not

Output Format:
Return only the  number of the selected rephrasing that best matches the original sentence's meaning.

Input Format:
Sentence: {sentence}

Rephrasing 1: {rephrasing_1}
Rephrasing 2: {rephrasing_2}
...
Rephrasing n: {rephrasing_n}
";

pub const TEMPLATE_3_FOL: &str = "\
You are an expert evaluator specializing in semantic similarity assessment. Your task is to identify the First Order Logic (FOL) formula that best preserves the original meaning of a given sentence.
Instructions:

- You will receive one original sentence followed by multiple FOL formulas
- Evaluate each formula based solely on semantic/logic equivalence (meaning preservation)
- Ignore differences in syntax, symbol order, or writing style
- Select and return the formula that most accurately conveys the same meaning as the original sentence

Evaluation Criteria:

- Prioritize semantic accuracy over syntactic similarity
- Focus on whether the logical meaning is the same or not

Output Format:
Return only the  number of the selected formula that best matches the original sentence's meaning.

Input Format:
Sentence: {sentence}

Formula 1: {formula_1}
Formula 2: {formula_2}
...
Formula n: {formula_n}
";

pub const TEMPLATE_4: &str = "Sentence: <\\reference\\>\n<\\list_of_sentences_in_F_ms\\>";

pub const TEMPLATE_5_NL: &str = "\
You are an expert evaluator specializing in ranking some NL sentences according to their semantic similarity. You will be given a reference and other sentences; your task is to rank these sentences depending on whether they convey the same meaning of the reference or not.

Instructions:
- Ignore difference in grammar, syntax, style, or word order. You are only interested in the semantic behind the sentences. It is possible that two sentences have a different logical structure but they convey the same logical meaning and this is the only thing you have to focus on;
- If one of the sentences is equivalent to the reference, it should be ranked first;
- If one of the sentences is equivalent to the negation of the reference, i.e. if it has the opposite meaning of the reference, it should be ranked last.
- If two sentences are equivalent, they should be ranked in adjacent positions

Input Format:
Reference: {reference}
Sentence1: {sentence1}
Sentence2: {sentence2}
...
SentenceN : {sentenceN}

Output Format:
Return, after a reasoning stage, the numbers of the sentences in order, from the number of the sentence that is the most similar to the reference to the one that is the least. ([number_of_the_statement_ranked_first, number_of_the_statement_ranked_second, ... number_of_the_statement_ranked_last]).";

pub const TEMPLATE_5_FOL: &str = "\
You are an expert evaluator specializing in ranking some First Order Logic (FOL) formulas according to their semantic similarity to a NL sentence. You will be given a reference sentence and some formulas; your task is to rank these formulas depending on whether they convey the same meaning of the reference or not.

Instructions:
- Ignore difference in syntax, style, or symbol order. You are only interested in the semantic behind the formulas. It is possible that two formulas have a different logical structure but they convey the same logical meaning and this is the only thing you have to focus on;
- If one of the formulas is equivalent to the reference, it should be ranked first;
- If one of the formulas is equivalent to the negation of the reference, i.e. if it has the opposite meaning of the reference, it should be ranked last.
- If two formulas are equivalent, they should be ranked in adjacent positions

Input Format:
Reference: {reference}
Formula1: {formula1}
Formula2: {formula2}
...
FormulaN : {formulaN}

Output Format:
Return, after a reasoning stage, the numbers of the formulas in order, from the number of the formula that is the most similar to the reference to the one that is the least. ([number_of_the_statement_ranked_first, number_of_the_statement_ranked_second, ... number_of_the_statement_ranked_last]).";

pub const TEMPLATE_6: &str = "Sentence: <\\reference\\>\n<\\list_of_sentences_in_F_r\\>";

/// Instruction strings prepended to embedding inputs.
pub const EMBED_INSTRUCTION_FOL: &str = "Encode the first-order logic meaning of the following first-order formula: ";
pub const EMBED_INSTRUCTION_NL: &str =
    "Encode the first-order logic meaning of the following natural-language sentence: ";

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Prompt {
    pub system: String,
    pub user: String,
}

/// Ontology predicates as `name/arity: positive meaning` lines.
pub fn predicate_list(inst: &Instance) -> String {
    let sig = inst.ontology.signature();
    let g = inst.ontology.glossary();
    let mut lines: Vec<String> = sig
        .predicates
        .iter()
        .map(|(name, arity)| format!("{name}/{arity}: {}", g.predicate_meanings[name].positive))
        .collect();
    lines.extend(sig.functions.iter().map(|(name, arity)| format!("{name}/{arity}: function")));
    block(lines)
}

/// Ontology constants as `name: meaning` lines.
pub fn constant_list(inst: &Instance) -> String {
    let g = inst.ontology.glossary();
    block(
        inst.ontology
            .signature()
            .constants
            .iter()
            .map(|c| format!("{c}: {}", g.constant_meanings[c]))
            .collect(),
    )
}

fn block(lines: Vec<String>) -> String {
    if lines.is_empty() {
        return "none".to_string();
    }
    lines.iter().map(|l| format!("\n    {l}")).collect()
}

/// Numbered candidate lines in set order.
pub fn candidate_list(set: &CandidateSet) -> String {
    let lines: Vec<String> = set
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| match (set.task, set.variant) {
            (ChoiceTask::MostSimilar, Variant::Nl) => format!("Rephrasing {}: {}", i + 1, c.text),
            (ChoiceTask::MostSimilar, Variant::Fol) => format!("Formula {}: {}", i + 1, c.text),
            (ChoiceTask::Ranking, Variant::Nl) => format!("Sentence{}: {}", i + 1, c.text),
            (ChoiceTask::Ranking, Variant::Fol) => format!("Formula{}: {}", i + 1, c.text),
        })
        .collect();
    lines.join("\n")
}

/// Instantiates one template. Templates 3 and 5 use the set's variant
/// (NL when no set is given); 4 and 6 need the set.
pub fn render_template(id: u8, inst: &Instance, set: Option<&CandidateSet>) -> Result<String, HarnessError> {
    let need_set = |placeholder: &str| {
        set.ok_or_else(|| HarnessError::MissingPlaceholder {
            template: id,
            placeholder: placeholder.to_string(),
        })
    };
    let variant = set.map(|s| s.variant).unwrap_or(Variant::Nl);
    match id {
        1 => Ok(TEMPLATE_1
            .replace("<\\predicate_symbols\\>", &predicate_list(inst))
            .replace("<\\constant_symbols\\>", &constant_list(inst))),
        2 => Ok(TEMPLATE_2.replace("<\\sentence\\>", &inst.utterance)),
        3 => Ok(match variant {
            Variant::Nl => TEMPLATE_3_NL,
            Variant::Fol => TEMPLATE_3_FOL,
        }
        .to_string()),
        4 => {
            let s = need_set("list_of_sentences_in_F_ms")?;
            Ok(TEMPLATE_4
                .replace("<\\reference\\>", &inst.utterance)
                .replace("<\\list_of_sentences_in_F_ms\\>", &candidate_list(s)))
        }
        5 => Ok(match variant {
            Variant::Nl => TEMPLATE_5_NL,
            Variant::Fol => TEMPLATE_5_FOL,
        }
        .to_string()),
        6 => {
            let s = need_set("list_of_sentences_in_F_r")?;
            Ok(TEMPLATE_6
                .replace("<\\reference\\>", &inst.utterance)
                .replace("<\\list_of_sentences_in_F_r\\>", &candidate_list(s)))
        }
        other => Err(HarnessError::UnknownTemplate(other)),
    }
}

/// System and user prompt for the logical translation task.
pub fn translation_prompt(inst: &Instance) -> Result<Prompt, HarnessError> {
    Ok(Prompt {
        system: render_template(1, inst, None)?,
        user: render_template(2, inst, None)?,
    })
}

/// System and user prompt for a choice task over `set`.
pub fn choice_prompt(inst: &Instance, set: &CandidateSet) -> Result<Prompt, HarnessError> {
    let (sys, user) = match set.task {
        ChoiceTask::MostSimilar => (3, 4),
        ChoiceTask::Ranking => (5, 6),
    };
    Ok(Prompt {
        system: render_template(sys, inst, Some(set))?,
        user: render_template(user, inst, Some(set))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_formula, Ontology};
    use crate::transform::{build_most_similar, build_ranking};
    use std::sync::Arc;

    fn inst() -> Instance {
        let o = Ontology::from_json(
            r#"{"predicates": {"Cube": {"arity": 1, "positive": "x1 is a cube", "negative": "x1 is not a cube"},
                "Small": {"arity": 1, "positive": "x1 is small", "negative": "x1 is not small"}},
                "constants": {"a": "A"}}"#,
        )
        .unwrap();
        let f = parse_formula("∀x (Cube(x) → Small(x))", o.signature()).unwrap();
        Instance::new("s1", "Every cube is small.", f, Arc::new(o)).unwrap()
    }

    #[test]
    fn translation_template() {
        let p = translation_prompt(&inst()).unwrap();
        assert!(p.system.contains("-  logical symbols: ∀ (for all), ∃ (exists), → (implies)"));
        assert!(p.system.contains("- predicate symbols: \n    Cube/1: x1 is a cube\n    Small/1: x1 is small\n"));
        assert!(p.system.contains("- contant symbols: \n    a: A\n"));
        assert_eq!(p.user, "Sentence: Every cube is small.");
    }

    #[test]
    fn most_similar_user_prompt() {
        let i = inst();
        let s = build_most_similar(&i, 8, 3, Variant::Nl).unwrap();
        let p = choice_prompt(&i, &s).unwrap();
        assert!(p.system.starts_with("You are an expert evaluator specializing in semantic similarity"));
        let mut lines = p.user.lines();
        assert_eq!(lines.next(), Some("Sentence: Every cube is small."));
        assert_eq!(lines.next().unwrap(), format!("Rephrasing 1: {}", s.candidates[0].text));
        assert_eq!(p.user.lines().count(), s.len() + 1);
    }

    #[test]
    fn ranking_fol_prompt_hides_labels() {
        let i = inst();
        let s = build_ranking(&i, 3, 3, Variant::Fol).unwrap();
        let p = choice_prompt(&i, &s).unwrap();
        assert!(p.user.contains("Formula1: "));
        assert!(!p.user.to_lowercase().contains("negation"));
        assert!(p.system.contains("FormulaN : {formulaN}"));
    }

    #[test]
    fn template_errors() {
        assert!(matches!(render_template(7, &inst(), None), Err(HarnessError::UnknownTemplate(7))));
        assert!(matches!(render_template(4, &inst(), None), Err(HarnessError::MissingPlaceholder { .. })));
    }
}

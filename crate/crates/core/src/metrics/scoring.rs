use serde::{Deserialize, Serialize};

use crate::transform::CandidateSet;

use super::MetricsError;

/// 1 iff the chosen 1-based position holds the original formula.
pub fn score_most_similar(answer_position: usize, set: &CandidateSet) -> Result<u8, MetricsError> {
    if answer_position == 0 || answer_position > set.len() {
        return Err(MetricsError::PositionOutOfRange {
            position: answer_position,
            len: set.len(),
        });
    }
    Ok(u8::from(answer_position == set.answer_positions.original))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RankingScore {
    /// Original and equivalent occupy the top two slots.
    pub eq: u8,
    /// Negation and its NNF occupy the bottom two slots.
    pub neg: u8,
    pub both: u8,
}

/// Scores a ranking given as 1-based positions, most similar first.
/// Order inside the top pair and inside the bottom pair is irrelevant.
pub fn score_ranking(ranking: &[usize], set: &CandidateSet) -> Result<RankingScore, MetricsError> {
    let n = set.len();
    let mut seen = vec![false; n + 1];
    let is_perm = ranking.len() == n
        && ranking.iter().all(|&p| {
            let fresh = (1..=n).contains(&p) && !seen[p];
            if fresh {
                seen[p] = true;
            }
            fresh
        });
    if !is_perm {
        return Err(MetricsError::NotAPermutation { len: n });
    }
    let pos = &set.answer_positions;
    let (Some(equivalent), Some(negation), Some(negation_nnf)) = (pos.equivalent, pos.negation, pos.negation_nnf)
    else {
        return Err(MetricsError::NotARankingSet);
    };
    let same_pair = |a: usize, b: usize, x: usize, y: usize| (a == x && b == y) || (a == y && b == x);
    let eq = same_pair(ranking[0], ranking[1], pos.original, equivalent);
    let neg = same_pair(ranking[n - 2], ranking[n - 1], negation, negation_nnf);
    Ok(RankingScore {
        eq: u8::from(eq),
        neg: u8::from(neg),
        both: u8::from(eq && neg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{AnswerPositions, ChoiceTask, Variant};

    fn set(len: usize, pos: AnswerPositions) -> CandidateSet {
        use crate::fol::Formula;
        use crate::transform::{Candidate, CandidateLabel};
        CandidateSet {
            instance_id: "t".into(),
            variant: Variant::Fol,
            task: ChoiceTask::Ranking,
            k: 3,
            shuffle_seed: 0,
            candidates: (0..len)
                .map(|i| Candidate {
                    text: format!("c{i}"),
                    formula: Formula::atom(format!("C{i}"), vec![]),
                    label: CandidateLabel::Original,
                    equiv_to_original: None,
                })
                .collect(),
            answer_positions: pos,
            degenerate_negation: false,
        }
    }

    fn ranking_set() -> CandidateSet {
        set(
            7,
            AnswerPositions {
                original: 2,
                equivalent: Some(5),
                negation: Some(7),
                negation_nnf: Some(1),
            },
        )
    }

    #[test]
    fn most_similar() {
        let s = ranking_set();
        assert_eq!(score_most_similar(2, &s).unwrap(), 1);
        assert_eq!(score_most_similar(3, &s).unwrap(), 0);
        assert!(matches!(score_most_similar(8, &s), Err(MetricsError::PositionOutOfRange { .. })));
        assert!(score_most_similar(0, &s).is_err());
    }

    #[test]
    fn ranking_examples() {
        let s = ranking_set();
        let r = |v: &[usize]| score_ranking(v, &s).unwrap();
        assert_eq!(r(&[5, 2, 3, 4, 6, 1, 7]), RankingScore { eq: 1, neg: 1, both: 1 });
        assert_eq!(r(&[2, 3, 5, 4, 6, 1, 7]).eq, 0);
        assert_eq!(r(&[2, 5, 3, 7, 6, 4, 1]), RankingScore { eq: 1, neg: 0, both: 0 });
        assert!(matches!(score_ranking(&[1, 2, 3], &s), Err(MetricsError::NotAPermutation { .. })));
        assert!(score_ranking(&[1, 1, 3, 4, 5, 6, 7], &s).is_err());
    }
}

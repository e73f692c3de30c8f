//! Builds most-similar and ranking candidate sets for one dataset instance,
//! in both the FOL and NL variants, with their ground-truth positions.

use folbench::corpus::tarski_instances;
use folbench::transform::{build_most_similar, build_ranking, CandidateSet, Variant};

fn show(title: &str, set: &CandidateSet) {
    println!("{title}");
    for (i, c) in set.candidates.iter().enumerate() {
        println!("  {}. {:<60} {:?}", i + 1, c.text, c.label);
    }
    println!("  answer positions: {}\n", serde_json::to_string(&set.answer_positions).unwrap());
}

fn main() {
    let inst = &tarski_instances()[10];
    println!("{}: {}\n", inst.id, inst.utterance);
    show("most similar, FOL, k=8, seed 3", &build_most_similar(inst, 8, 3, Variant::Fol).unwrap());
    show("ranking, FOL, k=3, seed 3", &build_ranking(inst, 3, 3, Variant::Fol).unwrap());
    show("ranking, NL, k=3, seed 3", &build_ranking(inst, 3, 3, Variant::Nl).unwrap());
}

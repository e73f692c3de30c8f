//! Embedding-model protocol: candidates are ordered by cosine similarity to
//! the reference sentence. The synthetic oracle vectors rank perfectly.

use folbench::corpus::tarski_instances;
use folbench::harness::{cosine, execute, rank_by_cosine, ModelKind, OracleClient, RunConfig, TaskKind};
use folbench::transform::Variant;

fn main() {
    let a = [1.0, 0.0, 0.0];
    let cands = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.9, 0.0, 0.1]];
    let cos: Vec<f64> = cands.iter().map(|c| cosine(&a, c)).collect();
    println!("cosines {cos:.3?} -> ranking {:?}", rank_by_cosine(&cos));

    let insts = tarski_instances();
    let mut cfg = RunConfig::new("tarski50.jsonl", TaskKind::Ranking, Variant::Fol);
    cfg.model.kind = ModelKind::Embedding;
    let client = OracleClient::for_embeddings(&cfg, &insts).unwrap();
    let out = execute(&cfg, &insts, &client).unwrap();
    println!("{}", out.report.summary());
}

//! End-to-end benchmark runs on the bundled 50-instance dataset with mock
//! models: a perfect oracle and a model that always answers position 1.

use folbench::corpus::tarski_instances;
use folbench::harness::{execute, FixedAnswerClient, OracleClient, RunConfig, TaskKind};
use folbench::transform::Variant;

fn main() {
    let insts = tarski_instances();
    for task in [TaskKind::MostSimilar, TaskKind::Ranking] {
        let cfg = RunConfig::new("tarski50.jsonl", task, Variant::Nl);
        let oracle = OracleClient::for_choices(&cfg, &insts).unwrap();
        let out = execute(&cfg, &insts, &oracle).unwrap();
        println!("{} / oracle\n{}", task.name(), out.report.summary());
        let out = execute(&cfg, &insts, &FixedAnswerClient { position: 1 }).unwrap();
        println!("{} / always-first\n{}", task.name(), out.report.summary());
    }
    if let Some(r) = execute(
        &RunConfig::new("tarski50.jsonl", TaskKind::MostSimilar, Variant::Fol),
        &insts[..1],
        &FixedAnswerClient { position: 1 },
    )
    .unwrap()
    .records
    .first()
    {
        println!("sample record:\n{}", serde_json::to_string_pretty(r).unwrap());
    }
}

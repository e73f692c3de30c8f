use std::path::PathBuf;

use folbench::corpus::tarski_instances;
use folbench::harness::{
    ingest_dataset, render_template, run, DatasetFormat, FixedAnswerClient, ModelKind, OracleClient, RunConfig,
    RunRecord, TaskKind,
};
use folbench::transform::{CandidateBuilder, ChoiceTask, Variant};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn strip_times(records: &[RunRecord]) -> Vec<RunRecord> {
    records
        .iter()
        .cloned()
        .map(|mut r| {
            r.wall_time_ms = 0;
            r
        })
        .collect()
}

#[test]
fn fixture_file_matches_bundled_copy() {
    let d = ingest_dataset(fixture("tarski50.jsonl"), DatasetFormat::TripleJsonl).unwrap();
    assert_eq!(d.dropped_xor, 0);
    assert_eq!(d.instances, tarski_instances());
}

#[test]
fn template_one_lists_the_logical_symbols() {
    let inst = &tarski_instances()[10];
    let t1 = render_template(1, inst, None).unwrap();
    assert!(t1.contains("∀ (for all), ∃ (exists)"));
    assert!(t1.contains("Cube/1: x1 is a cube"));
    assert_eq!(render_template(2, inst, None).unwrap(), "Sentence: Every cube is small.");
}

#[test]
fn runs_persist_identical_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(fixture("tarski50.jsonl"), TaskKind::Ranking, Variant::Nl);
    cfg.seeds = vec![3, 12];
    cfg.model.endpoint = "fixed:1".into();
    cfg.output_dir = Some(dir.path().to_path_buf());
    cfg.run_id = "a".into();
    let a = run(&cfg).unwrap();
    cfg.run_id = "b".into();
    let b = run(&cfg).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(strip_times(&a.records), strip_times(&b.records));
    let read = |id: &str, f: &str| std::fs::read_to_string(dir.path().join(id).join(f)).unwrap();
    assert_eq!(read("a", "report.json"), read("b", "report.json"));
    assert_eq!(read("a", "report.csv"), read("b", "report.csv"));
    let config: RunConfig = serde_json::from_str(&read("a", "config.json")).unwrap();
    assert_eq!(config.seeds, vec![3, 12]);
}

#[test]
fn nl_sets_render_the_fol_sets() {
    let b = CandidateBuilder::unchecked();
    for inst in tarski_instances().iter().take(10) {
        let fol = b.build(inst, ChoiceTask::Ranking, 26, Variant::Fol).unwrap();
        let nl = b.build(inst, ChoiceTask::Ranking, 26, Variant::Nl).unwrap();
        let fs = |s: &folbench::transform::CandidateSet| s.candidates.iter().map(|c| c.formula.clone()).collect::<Vec<_>>();
        assert_eq!(fs(&fol), fs(&nl));
        assert_eq!(fol.answer_positions, nl.answer_positions);
    }
}

#[test]
fn embedding_oracle_through_the_config() {
    let insts = tarski_instances();
    let mut cfg = RunConfig::new("unused", TaskKind::MostSimilar, Variant::Fol);
    cfg.model.kind = ModelKind::Embedding;
    cfg.model.instructed = true;
    let oracle = OracleClient::for_embeddings(&cfg, &insts).unwrap();
    let out = folbench::harness::execute(&cfg, &insts, &oracle).unwrap();
    assert_eq!(out.report.mean("most_similar"), Some(1.0));
    let fixed = folbench::harness::execute(
        &RunConfig::new("unused", TaskKind::MostSimilar, Variant::Fol),
        &insts,
        &FixedAnswerClient { position: 1 },
    )
    .unwrap();
    assert!(fixed.report.mean("most_similar").unwrap() < 0.5);
}

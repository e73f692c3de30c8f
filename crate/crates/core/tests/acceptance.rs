//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::collections::BTreeSet;
use std::time::Instant;

use folbench::corpus::{corpus_signature, random_corpus, tarski_instances, CorpusParams};
use folbench::equiv::{brute_force_check, eval_closed, Element, EquivVerdict, SigmaStructure, Solver};
use folbench::fol::{parse_inferring, print_formula, to_nnf, Formula, ParseOptions};
use folbench::harness::{execute, FixedAnswerClient, ModelClient, OracleClient, RunConfig, RunOutput, RunRecord, TaskKind};
use folbench::metrics::{
    bleu_formula, default_matching, le_score, pearson, point_biserial, score_ranking, MetricsError, PredicateMatching,
};
use folbench::seeding;
use folbench::transform::{
    build_most_similar, build_ranking, equivalent_rewrite, sample_perturbations, CandidateLabel, CandidateSet, Variant,
};
use rand::Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const CORPUS_SIZE: usize = 1000;
const CORPUS_SEED: u64 = 2024;
const ORACLE_DOMAIN: usize = 3;
const ORACLE_BUDGET: u64 = 20_000;

fn p(src: &str) -> Formula {
    parse_inferring(src, ParseOptions::default()).unwrap().0.formula
}

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn solver() -> Result<Solver, String> {
    let s = Solver::new(Default::default());
    if s.is_available() {
        Ok(s)
    } else {
        Err(format!("solver `{}` unavailable", s.settings().program))
    }
}

fn le_golden() -> Outcome {
    let phi = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
    let phi2 = p("∀y CountryInEU(y) → EUCountry(y)");
    let m = PredicateMatching::from_pairs(&phi, &phi2, [("InEU", "CountryInEU"), ("EUCountry", "EUCountry")]);
    let s = le_score(&phi, &phi2, &m).map_err(|e| e.to_string())?;
    check(s.value() == 0.875, format!("score {}", s.value()))?;
    let t = &s.table;
    check(
        t.variables == ["Country-Dummy", "InEU-CountryInEU", "EUCountry-EUCountry"],
        format!("rows {:?}", t.variables),
    )?;
    let expected = [bits("00001111"), bits("00110011"), bits("01010101")];
    check(t.assignments == expected, "assignment rows differ")?;
    check(t.first == bits("11111101") && t.second == bits("11011101"), "formula rows differ")?;
    check(default_matching(&phi, &phi2) == m, "name-similarity matching differs from the stated pairing")?;
    Ok("7/8 = 0.875, all 8 columns and 5 rows match".into())
}

fn le_flaw() -> Outcome {
    let e = p("∃x Country(x) ∧ InEU(x) → EUCountry(x)");
    let a = p("∀x Country(x) ∧ InEU(x) → EUCountry(x)");
    let le = le_score(&e, &a, &default_matching(&e, &a)).map_err(|e| e.to_string())?.value();
    check(le == 1.0, format!("LE {le}"))?;
    let sig = folbench::Signature::of_formula(&e).unwrap();
    let v = solver()?.check(&e, &a, &sig).map_err(|e| e.to_string())?;
    check(v.is_not_equivalent(), format!("solver said {}", v.label()))?;
    let verified = v
        .witness()
        .map(|w| eval_closed(&e, w).unwrap() != eval_closed(&a, w).unwrap())
        .unwrap_or(false);
    Ok(format!("LE = 1.0, solver: not_equivalent (witness verified: {verified})"))
}

fn bleu_golden() -> Outcome {
    let b = bleu_formula(
        &p("∀x Country(x) ∧ InEU(x) → EUCountry(x)"),
        &p("∀y CountryInEU(y) → EUCountry(y)"),
    );
    check((b - 0.18).abs() <= 0.03, format!("BLEU {b:.4}"))?;
    Ok(format!("BLEU = {b:.4}"))
}

fn corpus() -> (folbench::Signature, Vec<Formula>) {
    let params = CorpusParams::default();
    (corpus_signature(&params), random_corpus(CORPUS_SEED, CORPUS_SIZE, &params))
}

/// Checks `f ≡ g(f)` over the corpus with both decision procedures.
fn soundness(transform: impl Fn(usize, &Formula) -> Formula + Sync, what: &str) -> Result<(usize, usize), String> {
    let (sig, fs) = corpus();
    let solver = solver()?;
    let results: Vec<Result<bool, String>> = fs
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let g = transform(i, f);
            let refuted = brute_force_check(f, &g, &sig, ORACLE_DOMAIN, ORACLE_BUDGET)
                .map_err(|e| e.to_string())?
                .is_not_equivalent();
            if refuted {
                return Err(format!("oracle refutes {what} of {}: {}", print_formula(f), print_formula(&g)));
            }
            match solver.check(f, &g, &sig).map_err(|e| e.to_string())? {
                EquivVerdict::Equivalent { .. } => Ok(f != &g),
                other => Err(format!("solver says {} for {what} of {}", other.label(), print_formula(f))),
            }
        })
        .collect();
    let mut changed = 0;
    for r in results {
        changed += usize::from(r?);
    }
    Ok((fs.len(), changed))
}

fn rewrite_soundness() -> Outcome {
    let (n, changed) = soundness(|i, f| equivalent_rewrite(f, i as u64).0, "rewrite")?;
    Ok(format!("{n} formulas, {changed} rewritten, all confirmed equivalent, none refuted"))
}

fn nnf_soundness() -> Outcome {
    let (_, fs) = corpus();
    for f in &fs {
        let n = to_nnf(f);
        check(n.is_nnf() && to_nnf(&n) == n, format!("NNF not idempotent on {}", print_formula(f)))?;
    }
    let (n, changed) = soundness(|_, f| to_nnf(f), "NNF")?;
    Ok(format!("{n} formulas, {changed} changed by NNF, all equivalent, idempotent"))
}

fn oracle_solver_agreement() -> Outcome {
    let (sig, fs) = corpus();
    let solver = solver()?;
    let rows: Vec<Result<(bool, &'static str), String>> = fs
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let Some(g) = sample_perturbations(f, 1, i as u64).pop() else {
                return Ok((false, "none"));
            };
            let oracle = brute_force_check(f, &g, &sig, ORACLE_DOMAIN, ORACLE_BUDGET).map_err(|e| e.to_string())?;
            let smt = solver.check(f, &g, &sig).map_err(|e| e.to_string())?;
            if oracle.is_not_equivalent() && smt.is_equivalent() {
                return Err(format!("conflict on {} vs {}", print_formula(f), print_formula(&g)));
            }
            Ok((oracle.is_not_equivalent(), smt.label()))
        })
        .collect();
    let mut pairs = 0;
    let mut refuted = 0;
    let mut solver_equiv = 0;
    for r in rows {
        let (o, s) = r?;
        if s != "none" {
            pairs += 1;
        }
        refuted += usize::from(o);
        solver_equiv += usize::from(s == "equivalent");
    }
    Ok(format!(
        "{pairs} pairs: {refuted} refuted by oracle, {solver_equiv} equivalent per solver, 0 conflicts"
    ))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for i in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(i, n);
            out.push(p);
        }
    }
    out
}

fn ranking_exhaustive() -> Outcome {
    let inst = &tarski_instances()[10];
    let set: CandidateSet = build_ranking(inst, 3, 3, Variant::Fol).map_err(|e| e.to_string())?;
    check(set.len() == 7, format!("set has {} candidates", set.len()))?;
    let label_at = |pos: usize| &set.candidates[pos - 1].label;
    let top: BTreeSet<&str> = ["original", "equivalent"].into();
    let bottom: BTreeSet<&str> = ["negation", "negation_nnf"].into();
    let name = |l: &CandidateLabel| match l {
        CandidateLabel::Original => "original",
        CandidateLabel::Equivalent { .. } => "equivalent",
        CandidateLabel::Negation => "negation",
        CandidateLabel::NegationNnf => "negation_nnf",
        CandidateLabel::Perturbation { .. } => "perturbation",
    };
    let perms = permutations(7);
    let (mut eq, mut neg, mut both) = (0, 0, 0);
    for r in &perms {
        let s = score_ranking(r, &set).map_err(|e| e.to_string())?;
        let want_eq = [r[0], r[1]].iter().map(|&p| name(label_at(p))).collect::<BTreeSet<_>>() == top;
        let want_neg = [r[5], r[6]].iter().map(|&p| name(label_at(p))).collect::<BTreeSet<_>>() == bottom;
        check(
            (s.eq == 1, s.neg == 1, s.both == 1) == (want_eq, want_neg, want_eq && want_neg),
            format!("ranking {r:?} scored {s:?}"),
        )?;
        eq += s.eq as usize;
        neg += s.neg as usize;
        both += s.both as usize;
    }
    // 2!·5! orders put a given pair on top; 2!·2!·3! put both pairs in place
    check((eq, neg, both) == (240, 240, 24), format!("counts {eq}/{neg}/{both}"))?;
    check(
        matches!(score_ranking(&[1, 2, 3, 4, 5, 6, 6], &set), Err(MetricsError::NotAPermutation { .. })),
        "non-permutation accepted",
    )?;
    Ok(format!("{} permutations; eq {eq}, neg {neg}, both {both}", perms.len()))
}

fn strip_times(out: &RunOutput) -> Vec<RunRecord> {
    out.records
        .iter()
        .cloned()
        .map(|mut r| {
            r.wall_time_ms = 0;
            r
        })
        .collect()
}

fn harness_determinism() -> Outcome {
    solver()?;
    let insts = tarski_instances();
    check(insts.len() == 50, "fixture size")?;
    let cfg = |task, variant| {
        let mut c = RunConfig::new("tarski50.jsonl", task, variant);
        c.seeds = vec![3, 12, 26, 85, 107];
        c
    };
    let run = |c: &RunConfig, client: &dyn ModelClient| execute(c, &insts, client).map_err(|e| e.to_string());
    let mut notes = Vec::new();

    let lt = cfg(TaskKind::LogicalTranslation, Variant::Fol);
    let echo = OracleClient::for_translation(&lt, &insts, |i, _| print_formula(&i.formula));
    let rewrite = OracleClient::for_translation(&lt, &insts, |i, s| print_formula(&equivalent_rewrite(&i.formula, s).0));
    for (name, client) in [("echo", &echo), ("rewrite", &rewrite)] {
        let (a, b) = (run(&lt, client)?, run(&lt, client)?);
        check(a.report == b.report && strip_times(&a) == strip_times(&b), "translation runs differ")?;
        let m = a.report.mean("logical_translation").unwrap();
        check(m == 1.0, format!("{name} translation oracle scored {m}"))?;
    }
    notes.push("translation 1.0".to_string());

    for variant in [Variant::Fol, Variant::Nl] {
        for task in [TaskKind::MostSimilar, TaskKind::Ranking] {
            let c = cfg(task, variant);
            let oracle = OracleClient::for_choices(&c, &insts).map_err(|e| e.to_string())?;
            let (a, b) = (run(&c, &oracle)?, run(&c, &oracle)?);
            check(a.report == b.report && strip_times(&a) == strip_times(&b), "choice runs differ")?;
            for agg in &a.report.aggregates {
                check(agg.mean == 1.0, format!("{} {} oracle scored {}", variant.name(), agg.task, agg.mean))?;
            }
        }
    }
    notes.push("choice oracles 1.0 (fol, nl)".to_string());

    let c = cfg(TaskKind::MostSimilar, Variant::Fol);
    let adversary = FixedAnswerClient { position: 1 };
    let (a, b) = (run(&c, &adversary)?, run(&c, &adversary)?);
    check(a.report == b.report && strip_times(&a) == strip_times(&b), "adversarial runs differ")?;
    // uniform shuffling puts the original first with probability 1/|set|
    let mut ps = Vec::new();
    for inst in insts.iter() {
        for &seed in &c.seeds {
            let set = build_most_similar(inst, 8, seed, Variant::Fol).map_err(|e| e.to_string())?;
            ps.push(1.0 / set.len() as f64);
        }
    }
    let n = ps.len() as f64;
    let expected = ps.iter().sum::<f64>() / n;
    let sigma = (ps.iter().map(|p| p * (1.0 - p)).sum::<f64>()).sqrt() / n;
    let got = a.report.mean("most_similar").unwrap();
    check(
        (got - expected).abs() <= 3.0 * sigma,
        format!("fixed-answer accuracy {got:.4}, expected {expected:.4} ± 3·{sigma:.4}"),
    )?;
    notes.push(format!("fixed-answer {got:.3} vs 1/|set| {expected:.3} (σ {sigma:.3})"));
    Ok(format!("50 instances × 5 seeds, repeat runs identical; {}", notes.join("; ")))
}

fn turtle() -> Outcome {
    let guideline = p("∃x (Turtle(x) → Shell(x) ∧ CanSwim(x))");
    let intended = p("∃x (Turtle(x) ∧ Shell(x) ∧ CanSwim(x))");
    let world = SigmaStructure::new(1)
        .with_empty_predicate("Turtle")
        .with_empty_predicate("Shell")
        .with_empty_predicate("CanSwim");
    let g = eval_closed(&guideline, &world).map_err(|e| e.to_string())?;
    let i = eval_closed(&intended, &world).map_err(|e| e.to_string())?;
    check(g && !i, format!("→-version {g}, ∧-version {i}"))?;
    let swimmer = world.clone().with_fact("Turtle", vec![Element(0)]);
    let g2 = eval_closed(&guideline, &swimmer).map_err(|e| e.to_string())?;
    Ok(format!("turtle-free world: →-version true, ∧-version false (shell-less turtle world: {g2})"))
}

fn correlation() -> Outcome {
    let mut rng = seeding::stream(7, &["acceptance", "correlation"]);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(5..200);
        let b: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        if b.iter().all(|&v| v) || b.iter().all(|&v| !v) {
            continue;
        }
        let r = point_biserial(&b, &x).map_err(|e| e.to_string())?;
        let bx: Vec<f64> = b.iter().map(|&v| f64::from(u8::from(v))).collect();
        let q = pearson(&bx, &x).ok_or("pearson undefined")?;
        worst = worst.max((r - q).abs());
        checked += 1;
    }
    check(worst <= 1e-12, format!("max difference {worst:e}"))?;
    let one_class = point_biserial(&[true; 6], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    check(matches!(one_class, Err(MetricsError::DegenerateGroups)), "one-class input not flagged")?;
    check(pearson(&[1.0; 6], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).is_none(), "pearson defined on constant input")?;
    Ok(format!("100 pairs, max |r_pb − r| = {worst:.1e}; one-class input reported undefined"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("LE golden", le_golden),
        ("LE flaw reproduction", le_flaw),
        ("BLEU golden", bleu_golden),
        ("rewrite soundness", rewrite_soundness),
        ("NNF soundness", nnf_soundness),
        ("oracle/solver agreement", oracle_solver_agreement),
        ("ranking scorer exhaustive", ranking_exhaustive),
        ("harness determinism", harness_determinism),
        ("degenerate-equivalence realization", turtle),
        ("correlation identity", correlation),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

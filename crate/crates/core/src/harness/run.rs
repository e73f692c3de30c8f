//! Benchmark runs: configuration, per-(instance, seed) execution, records.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::equiv::{EquivVerdict, OracleBounds, Solver, SolverSettings, DEFAULT_TIMEOUT_MS};
use crate::fol::{print_formula, Instance};
use crate::metrics::{score_most_similar, score_ranking, ScoreRecord, ScoreReport};
use crate::transform::{AnswerPositions, CandidateBuilder, CandidateLabel, CandidateSet, ChoiceTask, Variant};

use super::client::{
    AnswerSchema, ChatRequest, ClientError, EmbedRequest, FileClient, FixedAnswerClient, HttpChatClient,
    HttpEmbeddingClient, HttpSettings, ModelClient, OracleClient,
};
use super::dataset::{ingest_dataset, DatasetFormat};
use super::extract::{extract_formula, extract_integer, extract_integer_list};
use super::prompts::{choice_prompt, translation_prompt, Prompt, EMBED_INSTRUCTION_FOL, EMBED_INSTRUCTION_NL};
use super::HarnessError;

pub const DEFAULT_SEEDS: [u64; 5] = [3, 12, 26, 85, 107];
pub const DEFAULT_TOKEN_ENV: &str = "FOLBENCH_API_TOKEN";

/// Record flags.
pub const FLAG_MALFORMED: &str = "malformed";
pub const FLAG_SOLVER_UNKNOWN: &str = "solver_unknown";
pub const FLAG_SOLVER_ERROR: &str = "solver_error";
pub const FLAG_EQUIV_TO_ORIGINAL: &str = "equiv_to_original";
pub const FLAG_DEGENERATE_NEGATION: &str = "degenerate_negation";
pub const FLAG_CLIENT_ERROR: &str = "client_error";
pub const FLAG_TIE: &str = "tie";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    LogicalTranslation,
    MostSimilar,
    Ranking,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::LogicalTranslation => "logical_translation",
            TaskKind::MostSimilar => "most_similar",
            TaskKind::Ranking => "ranking",
        }
    }

    pub fn choice(self) -> Option<ChoiceTask> {
        match self {
            TaskKind::LogicalTranslation => None,
            TaskKind::MostSimilar => Some(ChoiceTask::MostSimilar),
            TaskKind::Ranking => Some(ChoiceTask::Ranking),
        }
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "logical_translation" => Ok(TaskKind::LogicalTranslation),
            "most_similar" => Ok(TaskKind::MostSimilar),
            "ranking" => Ok(TaskKind::Ranking),
            _ => Err(format!("unknown task `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Dialogue,
    Embedding,
}

/// Which model to drive and how to reach it.
///
/// `endpoint` selects the client: an `http(s)://` URL, `file:PATH` for
/// recorded replies, `oracle` for ground-truth answers, or `fixed:N` for a
/// client that always picks position N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: ModelKind,
    pub name: String,
    pub endpoint: String,
    #[serde(default = "default_token_env")]
    pub token_env: String,
    pub max_completion_tokens: u32,
    /// Prepend the task instruction to every embedding input.
    #[serde(default)]
    pub instructed: bool,
}

fn default_token_env() -> String {
    DEFAULT_TOKEN_ENV.to_string()
}

impl Default for ModelDescriptor {
    fn default() -> Self {
        ModelDescriptor {
            kind: ModelKind::Dialogue,
            name: "oracle".into(),
            endpoint: "oracle".into(),
            token_env: default_token_env(),
            max_completion_tokens: 2500,
            instructed: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Solver executable; `$FOLBENCH_SOLVER` or `z3` when `None`.
    pub program: Option<String>,
    pub timeout_ms: u64,
    pub max_concurrent: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            program: None,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            max_concurrent: 4,
        }
    }
}

impl SolverConfig {
    pub fn settings(&self, keep_smt_dir: Option<PathBuf>) -> SolverSettings {
        let mut s = SolverSettings::default().with_timeout_ms(self.timeout_ms);
        if let Some(p) = &self.program {
            s = s.with_program(p);
        }
        s.max_concurrent = self.max_concurrent.max(1);
        s.keep_smt_dir = keep_smt_dir;
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: PathBuf,
    #[serde(default)]
    pub format: DatasetFormat,
    pub task: TaskKind,
    pub variant: Variant,
    /// Perturbation count; the task default (8 or 3) when `None`.
    pub k: Option<usize>,
    pub seeds: Vec<u64>,
    pub model: ModelDescriptor,
    pub solver: SolverConfig,
    pub oracle_bounds: OracleBounds,
    /// Runs are written to `<output_dir>/<run_id>/`; nothing is written when `None`.
    pub output_dir: Option<PathBuf>,
    pub run_id: String,
    pub concurrency: usize,
    pub request_timeout_s: u64,
    pub max_retries: u32,
    pub backoff_ms: u64,
    /// Keep every solver script under `smt/`.
    pub keep_smt: bool,
}

impl RunConfig {
    pub fn new(dataset: impl Into<PathBuf>, task: TaskKind, variant: Variant) -> Self {
        RunConfig {
            dataset: dataset.into(),
            format: DatasetFormat::default(),
            task,
            variant,
            k: None,
            seeds: DEFAULT_SEEDS.to_vec(),
            model: ModelDescriptor::default(),
            solver: SolverConfig::default(),
            oracle_bounds: OracleBounds::default(),
            output_dir: None,
            run_id: "run".into(),
            concurrency: 8,
            request_timeout_s: 120,
            max_retries: 3,
            backoff_ms: 500,
            keep_smt: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.seeds.is_empty() {
            return bad("seeds must be non-empty");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return bad("seeds must be distinct");
        }
        if self.k == Some(0) {
            return bad("k must be at least 1");
        }
        if self.concurrency == 0 {
            return bad("concurrency must be at least 1");
        }
        if self.model.kind == ModelKind::Embedding && self.task == TaskKind::LogicalTranslation {
            return bad("embedding models only support most_similar and ranking");
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        match (self.k, self.task.choice()) {
            (Some(k), _) => k,
            (None, Some(t)) => t.default_k(),
            (None, None) => 0,
        }
    }

    pub fn run_dir(&self) -> Option<PathBuf> {
        self.output_dir.as_ref().map(|d| d.join(&self.run_id))
    }

    fn solver(&self) -> Solver {
        let keep = if self.keep_smt { self.run_dir().map(|d| d.join("smt")) } else { None };
        Solver::new(self.solver.settings(keep))
    }

    /// Builder producing exactly the candidate sets of this run.
    ///
    /// An equivalent rewrite always exhausts the oracle's budget, so the
    /// oracle only checks rewrites when no solver can.
    pub fn candidate_builder(&self, solver: Option<Arc<Solver>>) -> CandidateBuilder {
        CandidateBuilder {
            k: Some(self.k()),
            flag_bounds: Some(self.oracle_bounds),
            rewrite_bounds: if solver.is_some() { None } else { Some(self.oracle_bounds) },
            solver,
        }
    }

    /// The client named by `model.endpoint`.
    pub fn client(&self, instances: &[Instance]) -> Result<Box<dyn ModelClient>, HarnessError> {
        let ep = self.model.endpoint.as_str();
        if ep.starts_with("http://") || ep.starts_with("https://") {
            let settings = HttpSettings {
                endpoint: ep.to_string(),
                model: self.model.name.clone(),
                token_env: self.model.token_env.clone(),
                timeout_s: self.request_timeout_s,
            };
            return Ok(match self.model.kind {
                ModelKind::Dialogue => Box::new(HttpChatClient::new(settings)),
                ModelKind::Embedding => Box::new(HttpEmbeddingClient::new(settings)),
            });
        }
        if let Some(path) = ep.strip_prefix("file:") {
            let c = FileClient::load(path).map_err(|source| HarnessError::Io {
                path: PathBuf::from(path),
                source,
            })?;
            return Ok(Box::new(c));
        }
        if let Some(n) = ep.strip_prefix("fixed:") {
            let position = n
                .parse()
                .map_err(|_| HarnessError::Config(format!("bad fixed position `{n}`")))?;
            return Ok(Box::new(FixedAnswerClient { position }));
        }
        if ep == "oracle" {
            return Ok(Box::new(match (self.model.kind, self.task) {
                (ModelKind::Embedding, _) => OracleClient::for_embeddings(self, instances)?,
                (_, TaskKind::LogicalTranslation) => {
                    OracleClient::for_translation(self, instances, |inst, _| print_formula(&inst.formula))
                }
                _ => OracleClient::for_choices(self, instances)?,
            }));
        }
        Err(HarnessError::Config(format!("unrecognized endpoint `{ep}`")))
    }
}

/// The parsed form of a reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParsedAnswer {
    Formula { text: String },
    Position { value: i64 },
    Ranking { values: Vec<i64> },
    /// Embedding replies are summarized by a digest and the cosines to `p`.
    Embeddings { digest: String, dimension: usize, cosines: Vec<f64> },
}

/// Everything about one (instance, seed) query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub seed: u64,
    pub task: String,
    pub variant: String,
    pub prompts: Option<Prompt>,
    pub raw_reply: Option<String>,
    pub parsed_answer: Option<ParsedAnswer>,
    pub verdict: Option<EquivVerdict>,
    pub ground_truth: Option<AnswerPositions>,
    /// Metric name to score.
    pub scores: BTreeMap<String, f64>,
    pub flags: Vec<String>,
    pub error: Option<String>,
    pub attempts: u32,
    pub wall_time_ms: u64,
}

impl RunRecord {
    fn new(inst: &Instance, seed: u64, task: TaskKind, variant: &str) -> Self {
        RunRecord {
            instance_id: inst.id.clone(),
            seed,
            task: task.name().to_string(),
            variant: variant.to_string(),
            prompts: None,
            raw_reply: None,
            parsed_answer: None,
            verdict: None,
            ground_truth: None,
            scores: BTreeMap::new(),
            flags: Vec::new(),
            error: None,
            attempts: 0,
            wall_time_ms: 0,
        }
    }

    fn flag(&mut self, f: &str) {
        if !self.flags.iter().any(|x| x == f) {
            self.flags.push(f.to_string());
        }
    }

    pub fn score_records(&self) -> Vec<ScoreRecord> {
        self.scores
            .iter()
            .map(|(metric, score)| ScoreRecord {
                instance_id: self.instance_id.clone(),
                seed: self.seed,
                task: metric.clone(),
                variant: self.variant.clone(),
                score: *score,
                flags: self.flags.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: RunConfig,
    pub records: Vec<RunRecord>,
    pub report: ScoreReport,
}

impl RunOutput {
    fn new(config: &RunConfig, mut records: Vec<RunRecord>) -> Self {
        records.sort_by(|a, b| (&a.instance_id, a.seed).cmp(&(&b.instance_id, b.seed)));
        let report = ScoreReport::new(records.iter().flat_map(RunRecord::score_records).collect());
        RunOutput {
            config: config.clone(),
            records,
            report,
        }
    }

    /// Records as JSON Lines, in (instance, seed) order.
    pub fn records_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }

    /// Writes `config.json`, `records.jsonl`, `report.json` and `report.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<(), HarnessError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| HarnessError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let files = [
            ("config.json", serde_json::to_string_pretty(&self.config).expect("config serializes") + "\n"),
            ("records.jsonl", self.records_jsonl()),
            ("report.json", self.report.to_json()),
            ("report.csv", self.report.to_csv()),
        ];
        for (name, body) in files {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(io(&p))?;
        }
        Ok(())
    }
}

/// Loads the dataset, runs the configured task, and persists the run.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    let data = ingest_dataset(&cfg.dataset, cfg.format)?;
    let client = cfg.client(&data.instances)?;
    run_with(cfg, &data.instances, client.as_ref())
}

/// Runs over `instances` with `client`, persisting when `output_dir` is set.
pub fn run_with(cfg: &RunConfig, instances: &[Instance], client: &dyn ModelClient) -> Result<RunOutput, HarnessError> {
    let out = execute(cfg, instances, client)?;
    if let Some(dir) = cfg.run_dir() {
        out.write_to(&dir)?;
    }
    Ok(out)
}

/// Runs over `instances` without touching the file system (except kept
/// solver scripts).
pub fn execute(cfg: &RunConfig, instances: &[Instance], client: &dyn ModelClient) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let records = match (cfg.model.kind, cfg.task.choice()) {
        (ModelKind::Embedding, Some(task)) => embedding_records(cfg, instances, client, task)?,
        (ModelKind::Embedding, None) => unreachable!("rejected by validate"),
        (ModelKind::Dialogue, None) => translation_records(cfg, instances, client)?,
        (ModelKind::Dialogue, Some(task)) => choice_records(cfg, instances, client, task)?,
    };
    Ok(RunOutput::new(cfg, records))
}

fn expect_task(cfg: &RunConfig, ok: bool, what: &str) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::Config(format!("task {} is not {what}", cfg.task.name())))
    }
}

pub fn run_logical_translation(cfg: &RunConfig, client: &dyn ModelClient) -> Result<ScoreReport, HarnessError> {
    expect_task(cfg, cfg.task == TaskKind::LogicalTranslation, "logical_translation")?;
    let data = ingest_dataset(&cfg.dataset, cfg.format)?;
    Ok(run_with(cfg, &data.instances, client)?.report)
}

pub fn run_choice_task(cfg: &RunConfig, client: &dyn ModelClient) -> Result<ScoreReport, HarnessError> {
    expect_task(cfg, cfg.task.choice().is_some() && cfg.model.kind == ModelKind::Dialogue, "a dialogue choice task")?;
    let data = ingest_dataset(&cfg.dataset, cfg.format)?;
    Ok(run_with(cfg, &data.instances, client)?.report)
}

pub fn run_embedding_task(cfg: &RunConfig, client: &dyn ModelClient) -> Result<ScoreReport, HarnessError> {
    expect_task(cfg, cfg.task.choice().is_some() && cfg.model.kind == ModelKind::Embedding, "an embedding task")?;
    let data = ingest_dataset(&cfg.dataset, cfg.format)?;
    Ok(run_with(cfg, &data.instances, client)?.report)
}

fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.concurrency)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

/// Calls `f` until it succeeds, fails permanently, or retries run out.
/// Returns the outcome and the number of attempts.
fn with_retry<T>(cfg: &RunConfig, mut f: impl FnMut() -> Result<T, ClientError>) -> (Result<T, ClientError>, u32) {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match f() {
            Err(e) if e.is_retryable() && attempt <= cfg.max_retries => {
                let delay = cfg.backoff_ms.saturating_mul(1 << (attempt - 1).min(16)).min(60_000);
                log::warn!("retrying after {e} (attempt {attempt})");
                std::thread::sleep(Duration::from_millis(delay));
            }
            other => return (other, attempt),
        }
    }
}

fn jobs<'a>(cfg: &RunConfig, instances: &'a [Instance]) -> Vec<(&'a Instance, u64)> {
    instances
        .iter()
        .flat_map(|i| cfg.seeds.iter().map(move |&s| (i, s)))
        .collect()
}

fn translation_records(
    cfg: &RunConfig,
    instances: &[Instance],
    client: &dyn ModelClient,
) -> Result<Vec<RunRecord>, HarnessError> {
    let solver = cfg.solver();
    if !solver.is_available() {
        return Err(HarnessError::SolverUnavailable {
            program: solver.settings().program.clone(),
        });
    }
    let jobs = jobs(cfg, instances);
    pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|&(inst, seed)| translation_record(cfg, inst, seed, client, &solver))
            .collect()
    })
}

fn translation_record(
    cfg: &RunConfig,
    inst: &Instance,
    seed: u64,
    client: &dyn ModelClient,
    solver: &Solver,
) -> Result<RunRecord, HarnessError> {
    let start = Instant::now();
    let mut rec = RunRecord::new(inst, seed, TaskKind::LogicalTranslation, "none");
    let prompt = translation_prompt(inst)?;
    let req = ChatRequest {
        instance_id: inst.id.clone(),
        task: TaskKind::LogicalTranslation.name().into(),
        seed,
        system: prompt.system.clone(),
        user: prompt.user.clone(),
        max_tokens: cfg.model.max_completion_tokens,
        schema: AnswerSchema::Text,
    };
    rec.prompts = Some(prompt);
    let (reply, attempts) = with_retry(cfg, || client.chat(&req));
    rec.attempts = attempts;
    let mut score = 0.0;
    match reply {
        Err(e) => {
            rec.flag(FLAG_CLIENT_ERROR);
            rec.error = Some(e.to_string());
        }
        Ok(reply) => {
            rec.raw_reply = Some(reply.raw.clone());
            match extract_formula(&reply.answer, inst.ontology.signature()) {
                None => rec.flag(FLAG_MALFORMED),
                Some((text, candidate)) => {
                    rec.parsed_answer = Some(ParsedAnswer::Formula { text });
                    match solver.check(&candidate, &inst.formula, inst.ontology.signature()) {
                        Ok(v) => {
                            if v.is_equivalent() {
                                score = 1.0;
                            }
                            if v.is_unknown() {
                                rec.flag(FLAG_SOLVER_UNKNOWN);
                            }
                            rec.verdict = Some(v);
                        }
                        Err(e @ crate::equiv::EquivError::SolverNotFound { .. }) => return Err(e.into()),
                        Err(e) => {
                            rec.flag(FLAG_SOLVER_ERROR);
                            rec.error = Some(e.to_string());
                        }
                    }
                }
            }
        }
    }
    rec.scores.insert(TaskKind::LogicalTranslation.name().into(), score);
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}

/// Solver used to confirm equivalent rewrites, when one can be found.
fn rewrite_solver(cfg: &RunConfig) -> Option<Arc<Solver>> {
    let solver = cfg.solver();
    if solver.is_available() {
        Some(Arc::new(solver))
    } else {
        log::warn!("solver unavailable; equivalent rewrites are checked by the bounded oracle only");
        None
    }
}

fn set_flags(rec: &mut RunRecord, set: &CandidateSet) {
    if set.flagged_perturbations() > 0 {
        rec.flag(FLAG_EQUIV_TO_ORIGINAL);
    }
    if set.degenerate_negation {
        rec.flag(FLAG_DEGENERATE_NEGATION);
    }
}

fn choice_records(
    cfg: &RunConfig,
    instances: &[Instance],
    client: &dyn ModelClient,
    task: ChoiceTask,
) -> Result<Vec<RunRecord>, HarnessError> {
    let builder = cfg.candidate_builder(rewrite_solver(cfg));
    let jobs = jobs(cfg, instances);
    pool(cfg)?.install(|| {
        jobs.par_iter()
            .map(|&(inst, seed)| choice_record(cfg, &builder, inst, seed, client, task))
            .collect()
    })
}

fn choice_record(
    cfg: &RunConfig,
    builder: &CandidateBuilder,
    inst: &Instance,
    seed: u64,
    client: &dyn ModelClient,
    task: ChoiceTask,
) -> Result<RunRecord, HarnessError> {
    let start = Instant::now();
    let mut rec = RunRecord::new(inst, seed, cfg.task, cfg.variant.name());
    let set = builder.build(inst, task, seed, cfg.variant)?;
    set_flags(&mut rec, &set);
    rec.ground_truth = Some(set.answer_positions);
    let prompt = choice_prompt(inst, &set)?;
    let req = ChatRequest {
        instance_id: inst.id.clone(),
        task: task.name().into(),
        seed,
        system: prompt.system.clone(),
        user: prompt.user.clone(),
        max_tokens: cfg.model.max_completion_tokens,
        schema: match task {
            ChoiceTask::MostSimilar => AnswerSchema::Integer,
            ChoiceTask::Ranking => AnswerSchema::IntegerList,
        },
    };
    rec.prompts = Some(prompt);
    let (reply, attempts) = with_retry(cfg, || client.chat(&req));
    rec.attempts = attempts;
    let answer = match reply {
        Ok(r) => {
            rec.raw_reply = Some(r.raw);
            Some(r.answer)
        }
        Err(e) => {
            rec.flag(FLAG_CLIENT_ERROR);
            rec.error = Some(e.to_string());
            None
        }
    };
    score_choice(&mut rec, &set, answer.as_ref());
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}

fn to_position(n: i64) -> usize {
    usize::try_from(n).unwrap_or(0)
}

fn score_choice(rec: &mut RunRecord, set: &CandidateSet, answer: Option<&Value>) {
    match set.task {
        ChoiceTask::MostSimilar => {
            let parsed = answer.and_then(extract_integer);
            if let Some(v) = parsed {
                rec.parsed_answer = Some(ParsedAnswer::Position { value: v });
            }
            let score = match parsed.map(|v| score_most_similar(to_position(v), set)) {
                Some(Ok(s)) => f64::from(s),
                Some(Err(e)) => {
                    rec.flag(FLAG_MALFORMED);
                    rec.error = Some(e.to_string());
                    0.0
                }
                None => {
                    if answer.is_some() {
                        rec.flag(FLAG_MALFORMED);
                    }
                    0.0
                }
            };
            rec.scores.insert("most_similar".into(), score);
        }
        ChoiceTask::Ranking => {
            let parsed = answer.and_then(extract_integer_list);
            if let Some(v) = &parsed {
                rec.parsed_answer = Some(ParsedAnswer::Ranking { values: v.clone() });
            }
            let ranking = parsed.map(|v| v.into_iter().map(to_position).collect::<Vec<_>>());
            let (eq, neg, both) = match ranking.map(|r| score_ranking(&r, set)) {
                Some(Ok(s)) => (s.eq, s.neg, s.both),
                Some(Err(e)) => {
                    rec.flag(FLAG_MALFORMED);
                    rec.error = Some(e.to_string());
                    (0, 0, 0)
                }
                None => {
                    if answer.is_some() {
                        rec.flag(FLAG_MALFORMED);
                    }
                    (0, 0, 0)
                }
            };
            rec.scores.insert("ranking_eq".into(), f64::from(eq));
            rec.scores.insert("ranking_neg".into(), f64::from(neg));
            rec.scores.insert("ranking_both".into(), f64::from(both));
        }
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Positions (1-based) ordered by decreasing cosine; ties keep the lower
/// position first.
pub fn rank_by_cosine(cosines: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=cosines.len()).collect();
    order.sort_by(|&a, &b| cosines[b - 1].total_cmp(&cosines[a - 1]).then(a.cmp(&b)));
    order
}

fn embed_instruction(cfg: &RunConfig, variant: Variant) -> Option<String> {
    cfg.model.instructed.then(|| {
        match variant {
            Variant::Fol => EMBED_INSTRUCTION_FOL,
            Variant::Nl => EMBED_INSTRUCTION_NL,
        }
        .to_string()
    })
}

fn embedding_records(
    cfg: &RunConfig,
    instances: &[Instance],
    client: &dyn ModelClient,
    task: ChoiceTask,
) -> Result<Vec<RunRecord>, HarnessError> {
    let builder = cfg.candidate_builder(rewrite_solver(cfg));
    // embeddings are deterministic, so each instance is queried once
    let seed = cfg.seeds[0];
    pool(cfg)?.install(|| {
        instances
            .par_iter()
            .map(|inst| embedding_record(cfg, &builder, inst, seed, client, task))
            .collect()
    })
}

fn embedding_record(
    cfg: &RunConfig,
    builder: &CandidateBuilder,
    inst: &Instance,
    seed: u64,
    client: &dyn ModelClient,
    task: ChoiceTask,
) -> Result<RunRecord, HarnessError> {
    let start = Instant::now();
    let mut rec = RunRecord::new(inst, seed, cfg.task, cfg.variant.name());
    let set = builder.build(inst, task, seed, cfg.variant)?;
    set_flags(&mut rec, &set);
    rec.ground_truth = Some(set.answer_positions);

    let mut requests = vec![EmbedRequest {
        instance_id: inst.id.clone(),
        text: inst.utterance.clone(),
        instruction: embed_instruction(cfg, Variant::Nl),
    }];
    requests.extend(set.candidates.iter().map(|c| EmbedRequest {
        instance_id: inst.id.clone(),
        text: c.text.clone(),
        instruction: embed_instruction(cfg, cfg.variant),
    }));
    let mut vectors = Vec::with_capacity(requests.len());
    for req in &requests {
        let (v, attempts) = with_retry(cfg, || client.embed(req));
        rec.attempts += attempts;
        match v {
            Ok(v) => vectors.push(v),
            Err(e) => {
                rec.flag(FLAG_CLIENT_ERROR);
                rec.error = Some(e.to_string());
                break;
            }
        }
    }
    if vectors.len() == requests.len() {
        let dim = vectors[0].len();
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(HarnessError::DimensionMismatch {
                instance_id: inst.id.clone(),
            });
        }
        let mut hasher = Sha256::new();
        for v in &vectors {
            for x in v {
                hasher.update(x.to_le_bytes());
            }
        }
        let digest: String = hasher.finalize().iter().take(16).map(|b| format!("{b:02x}")).collect();
        let cosines: Vec<f64> = vectors[1..].iter().map(|v| cosine(&vectors[0], v)).collect();
        let order = rank_by_cosine(&cosines);
        let at = |rank: usize| cosines[order[rank] - 1];
        let n = order.len();
        let tie = match task {
            ChoiceTask::MostSimilar => n > 1 && at(0) == at(1),
            ChoiceTask::Ranking => n > 3 && (at(1) == at(2) || at(n - 3) == at(n - 2)),
        };
        if tie {
            rec.flag(FLAG_TIE);
        }
        rec.parsed_answer = Some(ParsedAnswer::Embeddings {
            digest,
            dimension: dim,
            cosines,
        });
        let answer = match task {
            ChoiceTask::MostSimilar => Value::from(order[0]),
            ChoiceTask::Ranking => Value::from(order),
        };
        score_choice(&mut rec, &set, Some(&answer));
    } else {
        score_choice(&mut rec, &set, None);
    }
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}

/// Ranking that puts labels in their ideal order: original and equivalent
/// first, perturbations next, negation pair last.
pub fn ideal_ranking(set: &CandidateSet) -> Vec<usize> {
    let priority = |l: &CandidateLabel| match l {
        CandidateLabel::Original => 0,
        CandidateLabel::Equivalent { .. } => 1,
        CandidateLabel::Perturbation { .. } => 2,
        CandidateLabel::Negation => 3,
        CandidateLabel::NegationNnf => 4,
    };
    let mut order: Vec<usize> = (1..=set.len()).collect();
    order.sort_by_key(|&p| (priority(&set.candidates[p - 1].label), p));
    order
}

impl OracleClient {
    /// Answers every choice query of `cfg` correctly.
    pub fn for_choices(cfg: &RunConfig, instances: &[Instance]) -> Result<Self, HarnessError> {
        let task = cfg
            .task
            .choice()
            .ok_or_else(|| HarnessError::Config("oracle choice client needs a choice task".into()))?;
        let builder = CandidateBuilder::unchecked().with_k(cfg.k());
        let mut c = OracleClient::new("oracle");
        for (inst, seed) in jobs(cfg, instances) {
            let set = builder.build(inst, task, seed, cfg.variant)?;
            let answer = match task {
                ChoiceTask::MostSimilar => Value::from(set.answer_positions.original),
                ChoiceTask::Ranking => Value::from(ideal_ranking(&set)),
            };
            c.insert_answer(&inst.id, task.name(), seed, answer);
        }
        Ok(c)
    }

    /// Answers every translation query with `answer(instance, seed)`.
    pub fn for_translation(
        cfg: &RunConfig,
        instances: &[Instance],
        answer: impl Fn(&Instance, u64) -> String,
    ) -> Self {
        let mut c = OracleClient::new("oracle");
        for (inst, seed) in jobs(cfg, instances) {
            c.insert_answer(
                &inst.id,
                TaskKind::LogicalTranslation.name(),
                seed,
                Value::String(answer(inst, seed)),
            );
        }
        c
    }

    /// Embeddings under which every set is ranked ideally: `p` and the
    /// original share `e0`, the equivalent sits close to it, perturbations
    /// are orthogonal, and the negation pair points away.
    pub fn for_embeddings(cfg: &RunConfig, instances: &[Instance]) -> Result<Self, HarnessError> {
        let task = cfg
            .task
            .choice()
            .ok_or_else(|| HarnessError::Config("oracle embedding client needs a choice task".into()))?;
        let builder = CandidateBuilder::unchecked().with_k(cfg.k());
        let mut c = OracleClient::new("oracle-embeddings");
        let seed = cfg.seeds[0];
        for inst in instances {
            let set = builder.build(inst, task, seed, cfg.variant)?;
            let dim = set.len() + 2;
            let unit = |i: usize, scale: f64| {
                let mut v = vec![0.0; dim];
                v[i] = scale;
                v
            };
            let add = |a: Vec<f64>, b: Vec<f64>| a.into_iter().zip(b).map(|(x, y)| x + y).collect::<Vec<f64>>();
            c.insert_vector(&inst.id, &inst.utterance, unit(0, 1.0));
            // the original goes last so it wins any text collision
            let mut order: Vec<usize> = (0..set.len()).collect();
            order.sort_by_key(|&i| set.candidates[i].label == CandidateLabel::Original);
            for i in order {
                let v = match set.candidates[i].label {
                    CandidateLabel::Original => unit(0, 1.0),
                    CandidateLabel::Equivalent { .. } => add(unit(0, 1.0), unit(1, 0.1)),
                    CandidateLabel::Perturbation { .. } => unit(i + 2, 1.0),
                    CandidateLabel::Negation => add(unit(0, -1.0), unit(i + 2, 0.1)),
                    CandidateLabel::NegationNnf => unit(0, -1.0),
                };
                c.insert_vector(&inst.id, &set.candidates[i].text, v);
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_formula, Ontology};
    use crate::harness::client::ScriptedClient;
    use crate::harness::client::ChatReply;
    use crate::transform::rewrite_with_rule;
    use serde_json::json;

    fn instances() -> Vec<Instance> {
        let o = Arc::new(
            Ontology::from_json(
                r#"{
                "predicates": {
                    "Cube": {"arity": 1, "positive": "x1 is a cube", "negative": "x1 is not a cube"},
                    "Small": {"arity": 1, "positive": "x1 is small", "negative": "x1 is not small"},
                    "Left": {"arity": 2, "positive": "x1 is left of x2", "negative": "x1 is not left of x2"}
                },
                "constants": {"a": "a", "b": "b"}
            }"#,
            )
            .unwrap(),
        );
        [
            ("s1", "Every cube is small.", "∀x (Cube(x) → Small(x))"),
            ("s2", "a is left of b and b is small.", "Left(a, b) ∧ Small(b)"),
            ("s3", "Something is a cube.", "∃x Cube(x)"),
            ("s4", "a is a cube.", "Cube(a)"),
        ]
        .iter()
        .map(|(id, nl, fol)| {
            Instance::new(*id, *nl, parse_formula(fol, o.signature()).unwrap(), o.clone()).unwrap()
        })
        .collect()
    }

    fn cfg(task: TaskKind, variant: Variant) -> RunConfig {
        let mut c = RunConfig::new("unused", task, variant);
        c.seeds = vec![3, 12];
        c.backoff_ms = 0;
        c
    }

    fn mean(out: &RunOutput, metric: &str) -> f64 {
        out.report.mean(metric).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(TaskKind::Ranking, Variant::Fol);
        assert_eq!(c.k(), 3);
        c.seeds = vec![3, 3];
        assert!(matches!(c.validate(), Err(HarnessError::Config(_))));
        c.seeds = vec![];
        assert!(c.validate().is_err());
        let mut c = cfg(TaskKind::LogicalTranslation, Variant::Fol);
        c.model.kind = ModelKind::Embedding;
        assert!(c.validate().is_err());
        assert_eq!("logical-translation".parse::<TaskKind>(), Ok(TaskKind::LogicalTranslation));
    }

    #[test]
    fn oracle_choice_runs_score_one() {
        let insts = instances();
        for variant in [Variant::Fol, Variant::Nl] {
            let c = cfg(TaskKind::MostSimilar, variant);
            let client = OracleClient::for_choices(&c, &insts).unwrap();
            let out = execute(&c, &insts, &client).unwrap();
            assert_eq!(mean(&out, "most_similar"), 1.0);
            assert_eq!(out.records.len(), 8);

            let c = cfg(TaskKind::Ranking, variant);
            let client = OracleClient::for_choices(&c, &insts).unwrap();
            let out = execute(&c, &insts, &client).unwrap();
            for m in ["ranking_eq", "ranking_neg", "ranking_both"] {
                assert_eq!(mean(&out, m), 1.0, "{m}");
            }
            let atomic = out.records.iter().find(|r| r.instance_id == "s4").unwrap();
            assert!(atomic.flags.contains(&FLAG_DEGENERATE_NEGATION.to_string()));
        }
    }

    #[test]
    fn translation_runs_use_the_solver() {
        let insts = instances();
        let c = cfg(TaskKind::LogicalTranslation, Variant::Fol);
        let echo = OracleClient::for_translation(&c, &insts, |i, _| print_formula(&i.formula));
        assert_eq!(mean(&execute(&c, &insts, &echo).unwrap(), "logical_translation"), 1.0);

        let rewrite = OracleClient::for_translation(&c, &insts, |i, _| {
            let f = rewrite_with_rule(&i.formula, crate::transform::RewriteRule::DoubleNegation, 0)
                .unwrap_or_else(|| i.formula.clone());
            format!("Answer: {}", print_formula(&f))
        });
        assert_eq!(mean(&execute(&c, &insts, &rewrite).unwrap(), "logical_translation"), 1.0);

        let neg = OracleClient::for_translation(&c, &insts, |i, _| print_formula(&crate::fol::negate(&i.formula)));
        let out = execute(&c, &insts, &neg).unwrap();
        assert_eq!(mean(&out, "logical_translation"), 0.0);
        assert!(out.records.iter().all(|r| r.verdict.as_ref().is_some_and(|v| v.is_not_equivalent())));

        let junk = OracleClient::for_translation(&c, &insts, |_, _| "I cannot answer".into());
        let out = execute(&c, &insts, &junk).unwrap();
        assert!(out.records.iter().all(|r| r.flags == vec![FLAG_MALFORMED.to_string()]));
    }

    #[test]
    fn malformed_and_failed_replies_score_zero() {
        let insts = instances();
        let c = cfg(TaskKind::Ranking, Variant::Fol);
        let client = ScriptedClient::new("dup").on_chat(|_| Ok(ChatReply::answer(json!([1, 1, 2]))));
        let out = execute(&c, &insts, &client).unwrap();
        assert_eq!(mean(&out, "ranking_both"), 0.0);
        assert!(out.records.iter().all(|r| r.flags.contains(&FLAG_MALFORMED.to_string())));

        let c = cfg(TaskKind::MostSimilar, Variant::Fol);
        let client = ScriptedClient::new("far").on_chat(|_| Ok(ChatReply::answer(json!(99))));
        let out = execute(&c, &insts, &client).unwrap();
        assert!(out.records.iter().all(|r| r.flags.contains(&FLAG_MALFORMED.to_string())));

        let mut c = cfg(TaskKind::MostSimilar, Variant::Fol);
        c.max_retries = 2;
        let client = ScriptedClient::new("down").on_chat(|_| {
            Err(ClientError::Status {
                status: 503,
                body: String::new(),
            })
        });
        let out = execute(&c, &insts, &client).unwrap();
        assert!(out.records.iter().all(|r| r.attempts == 3 && r.flags == vec![FLAG_CLIENT_ERROR.to_string()]));
    }

    #[test]
    fn retries_recover_without_duplicating() {
        let insts = instances();
        let c = cfg(TaskKind::MostSimilar, Variant::Fol);
        let oracle = OracleClient::for_choices(&c, &insts).unwrap();
        let calls = std::sync::Mutex::new(std::collections::HashMap::<(String, u64), u32>::new());
        let flaky = ScriptedClient::new("flaky").on_chat(move |req| {
            let mut calls = calls.lock().unwrap();
            let n = calls.entry((req.instance_id.clone(), req.seed)).or_default();
            *n += 1;
            if *n == 1 {
                Err(ClientError::Transport {
                    message: "reset".into(),
                    retryable: true,
                })
            } else {
                oracle.chat(req)
            }
        });
        let out = execute(&c, &insts, &flaky).unwrap();
        assert_eq!(out.records.len(), insts.len() * 2);
        assert_eq!(mean(&out, "most_similar"), 1.0);
        assert!(out.records.iter().all(|r| r.attempts == 2));
    }

    #[test]
    fn oracle_embeddings_score_one() {
        let insts = instances();
        for (task, metric) in [(TaskKind::MostSimilar, "most_similar"), (TaskKind::Ranking, "ranking_both")] {
            let mut c = cfg(task, Variant::Fol);
            c.model.kind = ModelKind::Embedding;
            let client = OracleClient::for_embeddings(&c, &insts).unwrap();
            let out = execute(&c, &insts, &client).unwrap();
            assert_eq!(out.records.len(), insts.len());
            assert_eq!(mean(&out, metric), 1.0);
        }
    }

    #[test]
    fn cosine_ties_break_low_and_flag() {
        assert_eq!(rank_by_cosine(&[0.5, 0.9, 0.9, -1.0]), vec![2, 3, 1, 4]);
        let insts = instances();
        let mut c = cfg(TaskKind::MostSimilar, Variant::Fol);
        c.model.kind = ModelKind::Embedding;
        let flat = ScriptedClient::new("flat").on_embed(|_| Ok(vec![1.0, 0.0]));
        let out = execute(&c, &insts, &flat).unwrap();
        for r in &out.records {
            assert!(r.flags.contains(&FLAG_TIE.to_string()));
            let expected = if r.ground_truth.as_ref().unwrap().original == 1 { 1.0 } else { 0.0 };
            assert_eq!(r.scores["most_similar"], expected);
        }
        let ragged = ScriptedClient::new("ragged").on_embed(|r| Ok(vec![1.0; r.text.len() % 3 + 1]));
        assert!(matches!(execute(&c, &insts, &ragged), Err(HarnessError::DimensionMismatch { .. })));
    }

    #[test]
    fn persisted_runs_are_reproducible() {
        let insts = instances();
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(TaskKind::Ranking, Variant::Nl);
        c.output_dir = Some(dir.path().to_path_buf());
        let client = FixedAnswerClient { position: 1 };
        let a = run_with(&c, &insts, &client).unwrap();
        let b = run_with(&c, &insts, &client).unwrap();
        assert_eq!(a.report, b.report);
        let run_dir = dir.path().join("run");
        for f in ["config.json", "records.jsonl", "report.json", "report.csv"] {
            assert!(run_dir.join(f).exists(), "{f}");
        }
        for r in &a.records {
            let p = r.prompts.as_ref().unwrap();
            assert!(!p.user.contains("Original") && !p.system.contains("Negation"));
        }
    }
}

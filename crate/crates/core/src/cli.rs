//! The `folbench` command line.
//!
//! Every command is non-interactive. Exit status is 0 on success, 1 on a
//! domain failure, 2 on a usage error and 3 when the solver is unavailable.
//! Failures print `error[Kind]: message` on stderr, or a JSON object
//! `{"error": {"kind", "message"}}` on stdout under `--json`.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::equiv::{brute_force_check, EquivError, EquivVerdict, OracleBounds, Solver};
use crate::fol::{negate, parse_inferring, parse_with, print_formula, to_nnf, Formula, Instance, Ontology, ParseOptions, Signature};
use crate::harness::{
    choice_prompt, ingest_dataset, run, DatasetFormat, HarnessError, ModelKind, RunConfig, SolverConfig, TaskKind,
};
use crate::metrics::{bleu_formula, default_matching, le_score, MetricsError, PredicateMatching, ScoreReport};
use crate::nlgen::{translate_with, Grouping, NlgenError};
use crate::transform::{
    applicable_rewrites, enumerate_perturbations, equivalent_rewrite, rewrite_with_rule, sample_perturbations_with,
    CandidateBuilder, ChoiceTask, RewriteRule, TransformError, Variant,
};
use crate::{fol::FolError, seeding};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "folbench", version, about = "First-order logic benchmarking toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ontology JSON file; without one, signatures are inferred.
    #[arg(long, global = true, value_name = "FILE")]
    pub ontology: Option<PathBuf>,
    /// Solver executable.
    #[arg(long, global = true, value_name = "PATH")]
    pub solver: Option<String>,
    /// Largest domain the brute-force oracle enumerates.
    #[arg(long, global = true, value_name = "N")]
    pub max_domain: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print its syntax tree as JSON.
    Parse {
        formula: String,
        /// Rewrite ⊕ into ∨/∧/¬ instead of rejecting it.
        #[arg(long)]
        expand_xor: bool,
    },
    /// Print a JSON syntax tree (argument or `-` for stdin) as formula text.
    Print { tree: String },
    /// Negation normal form.
    Nnf { formula: String },
    /// Negation of a formula.
    Negate {
        formula: String,
        /// Push the negation inward.
        #[arg(long)]
        nnf: bool,
    },
    /// Render a formula in English using the ontology's glossary.
    Translate {
        formula: String,
        /// Keep grouping as parentheses.
        #[arg(long)]
        parenthesized: bool,
    },
    /// Sample syntactic perturbations.
    Perturb {
        formula: String,
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// List every perturbation instead of sampling.
        #[arg(long)]
        all: bool,
    },
    /// Produce an equivalent rewrite.
    RewriteEq {
        formula: String,
        /// One of de_morgan, double_negation, commutativity, distributivity,
        /// implication_expansion.
        #[arg(long)]
        rule: Option<String>,
        /// List every applicable rewrite.
        #[arg(long)]
        all: bool,
    },
    /// Decide whether two closed formulas are equivalent.
    CheckEquiv {
        first: String,
        second: String,
        #[arg(long, value_enum, default_value_t = Method::Solver)]
        method: Method,
        #[arg(long, value_name = "MS")]
        timeout_ms: Option<u64>,
    },
    /// Logical-equivalence score of the truth-table reduction.
    LeScore {
        first: String,
        second: String,
        /// Predicate pairing `LEFT=RIGHT`; repeatable. Name similarity when absent.
        #[arg(long = "match", value_name = "LEFT=RIGHT")]
        pairs: Vec<String>,
        /// Print the truth table.
        #[arg(long)]
        table: bool,
    },
    /// BLEU of a candidate formula against a reference, per-symbol tokens.
    Bleu { reference: String, candidate: String },
    /// Build most-similar or ranking candidate sets.
    BuildTask(BuildTaskArgs),
    /// Run a benchmark task against a model.
    Run(RunArgs),
    /// Summarize a finished run.
    Report {
        /// Run directory or report.json.
        path: PathBuf,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Solver,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChoiceArg {
    MostSimilar,
    Ranking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    LogicalTranslation,
    MostSimilar,
    Ranking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Fol,
    Nl,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Fol => Variant::Fol,
            VariantArg::Nl => Variant::Nl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    TripleJsonl,
    FolioLike,
}

impl From<FormatArg> for DatasetFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::TripleJsonl => DatasetFormat::TripleJsonl,
            FormatArg::FolioLike => DatasetFormat::FolioLike,
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildTaskArgs {
    #[arg(value_enum)]
    pub task: ChoiceArg,
    /// A single formula (requires --ontology); otherwise --dataset.
    pub formula: Option<String>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::TripleJsonl)]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Fol)]
    pub variant: VariantArg,
    #[arg(long)]
    pub k: Option<usize>,
    /// Print rendered prompts instead of ground truth.
    #[arg(long)]
    pub prompts: bool,
    /// Reference sentence for a single formula.
    #[arg(long, default_value = "")]
    pub sentence: String,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(value_enum)]
    pub task: TaskArg,
    /// Dataset file (JSONL).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Full run configuration as JSON; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset record layout.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Candidate variant for the choice tasks.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Perturbations per candidate set; 8 for most-similar, 3 for ranking.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated seeds; the default is 3,12,26,85,107.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Use an embedding model.
    #[arg(long)]
    pub embedding: bool,
    /// `http(s)://...`, `file:PATH`, `oracle` or `fixed:N`.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model name sent to the endpoint.
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the API token.
    #[arg(long)]
    pub token_env: Option<String>,
    /// Completion token limit; 2500 by default.
    #[arg(long)]
    pub max_tokens: Option<u32>,
    /// Prepend the task instruction to embedding inputs.
    #[arg(long)]
    pub instructed: bool,
    /// Parent of the run directory; `runs` by default.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Run directory name.
    #[arg(long)]
    pub run_id: Option<String>,
    /// Instances processed in parallel.
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Per-request timeout in seconds.
    #[arg(long)]
    pub timeout_s: Option<u64>,
    /// Retries for rate-limited or failed requests.
    #[arg(long)]
    pub retries: Option<u32>,
    /// Keep every solver script under `smt/`.
    #[arg(long)]
    pub keep_smt: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Nlgen(#[from] NlgenError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Fol(e) => e.kind(),
            CliError::Equiv(e) => e.kind(),
            CliError::Transform(e) => e.kind(),
            CliError::Nlgen(_) => "MissingGloss",
            CliError::Metrics(e) => e.kind(),
            CliError::Harness(e) => e.kind(),
            CliError::Io { .. } => "Io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "Usage" => EXIT_USAGE,
            "SolverNotFound" | "SolverUnavailable" => EXIT_SOLVER,
            _ => EXIT_DOMAIN,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`dispatch`] with explicit output streams.
pub fn dispatch_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let json = cli.global.json;
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        // a reader that closed early (`| head`) is not a failure
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            if json {
                let body = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
                let _ = writeln!(out, "{body}");
            } else {
                let _ = writeln!(err, "error[{}]: {e}", e.kind());
            }
            e.exit_code()
        }
    }
}

struct Ctx<'a> {
    g: &'a GlobalArgs,
    ontology: Option<Arc<Ontology>>,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.g.seed.unwrap_or(0)
    }

    fn bounds(&self) -> OracleBounds {
        let mut b = OracleBounds::default();
        if let Some(n) = self.g.max_domain {
            b.max_domain = n;
        }
        b
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            program: self.g.solver.clone(),
            ..SolverConfig::default()
        }
    }

    fn ontology(&self) -> Result<&Arc<Ontology>, CliError> {
        self.ontology
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --ontology FILE".into()))
    }

    /// Parses formulas against the ontology, or infers one shared signature.
    fn parse_all(&self, sources: &[&str], options: ParseOptions) -> Result<(Vec<Formula>, Signature), CliError> {
        if let Some(o) = &self.ontology {
            let fs = sources
                .iter()
                .map(|s| parse_with(s, o.signature(), options).map(|p| p.formula))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((fs, o.signature().clone()));
        }
        let mut sig = Signature::new();
        let mut fs = Vec::new();
        for s in sources {
            let (parsed, inferred) = parse_inferring(s, options)?;
            sig = sig.merge(&inferred)?;
            fs.push(parsed.formula);
        }
        Ok((fs, sig))
    }

    fn parse(&self, source: &str) -> Result<(Formula, Signature), CliError> {
        let (mut fs, sig) = self.parse_all(&[source], ParseOptions::default())?;
        Ok((fs.remove(0), sig))
    }
}

fn emit(out: &mut dyn Write, json: bool, value: serde_json::Value, text: &str) -> Result<(), CliError> {
    let r = if json { writeln!(out, "{value}") } else { writeln!(out, "{text}") };
    r.map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn read_arg(arg: &str) -> Result<String, CliError> {
    if arg != "-" {
        return Ok(arg.to_string());
    }
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io {
        path: "<stdin>".into(),
        source,
    })?;
    Ok(s)
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let ontology = match &cli.global.ontology {
        Some(p) => Some(Arc::new(Ontology::load(p)?)),
        None => None,
    };
    let ctx = Ctx { g: &cli.global, ontology };
    let json = cli.global.json;
    match &cli.command {
        Command::Parse { formula, expand_xor } => {
            let options = ParseOptions { expand_xor: *expand_xor };
            let (fs, sig) = ctx.parse_all(&[formula], options)?;
            let f = &fs[0];
            let warnings = match &ctx.ontology {
                Some(o) => parse_with(formula, o.signature(), options)?.warnings,
                None => parse_inferring(formula, options)?.0.warnings,
            };
            let value = json!({"formula": print_formula(f), "tree": f, "signature": sig, "warnings": warnings});
            let text = serde_json::to_string_pretty(f).expect("formulas serialize");
            emit(out, json, value, &text)
        }
        Command::Print { tree } => {
            let text = read_arg(tree)?;
            let f: Formula = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad syntax tree: {e}")))?;
            let printed = print_formula(&f);
            emit(out, json, json!({"formula": printed}), &printed)
        }
        Command::Nnf { formula } => {
            let (f, _) = ctx.parse(formula)?;
            let r = print_formula(&to_nnf(&f));
            emit(out, json, json!({"formula": r}), &r)
        }
        Command::Negate { formula, nnf } => {
            let (f, _) = ctx.parse(formula)?;
            let n = negate(&f);
            let r = print_formula(&if *nnf { to_nnf(&n) } else { n });
            emit(out, json, json!({"formula": r}), &r)
        }
        Command::Translate { formula, parenthesized } => {
            let o = ctx.ontology()?.clone();
            let (f, _) = ctx.parse(formula)?;
            let grouping = if *parenthesized { Grouping::Parenthesized } else { Grouping::Dropped };
            let s = translate_with(&f, o.glossary(), grouping)?;
            emit(out, json, json!({"sentence": s}), &s)
        }
        Command::Perturb { formula, k, all } => {
            let (f, _) = ctx.parse(formula)?;
            let ps = if *all {
                enumerate_perturbations(&f)
            } else {
                if *k == 0 {
                    return Err(TransformError::InvalidK.into());
                }
                let mut rng = seeding::stream(ctx.seed(), &["cli", "perturb"]);
                sample_perturbations_with(&f, *k, &mut rng)
            };
            if !*all && ps.len() < *k {
                let _ = writeln!(err, "note: only {} perturbation(s) available, {} requested", ps.len(), k);
            }
            let items: Vec<_> = ps
                .iter()
                .map(|p| json!({"formula": print_formula(&p.formula), "edit": p.kind.name(), "site": p.site}))
                .collect();
            let text: Vec<String> = ps.iter().map(|p| print_formula(&p.formula)).collect();
            emit(out, json, json!({"requested": k, "perturbations": items}), &text.join("\n"))
        }
        Command::RewriteEq { formula, rule, all } => {
            let (f, _) = ctx.parse(formula)?;
            if *all {
                let rs = applicable_rewrites(&f);
                let items: Vec<_> = rs
                    .iter()
                    .map(|r| json!({"formula": print_formula(&r.formula), "rule": r.rule.name(), "site": r.site}))
                    .collect();
                let text: Vec<String> = rs
                    .iter()
                    .map(|r| format!("{}\t{}", r.rule.name(), print_formula(&r.formula)))
                    .collect();
                return emit(out, json, json!({"rewrites": items}), &text.join("\n"));
            }
            let (g, used) = match rule {
                Some(name) => {
                    let r = RewriteRule::from_name(name)
                        .ok_or_else(|| CliError::Usage(format!("unknown rule `{name}`")))?;
                    match rewrite_with_rule(&f, r, ctx.seed()) {
                        Some(g) => (g, r),
                        None => return Err(CliError::Usage(format!("rule {} does not apply", r.name()))),
                    }
                }
                None => equivalent_rewrite(&f, ctx.seed()),
            };
            let printed = print_formula(&g);
            emit(out, json, json!({"formula": printed, "rule": used.name()}), &printed)
        }
        Command::CheckEquiv {
            first,
            second,
            method,
            timeout_ms,
        } => {
            let (fs, sig) = ctx.parse_all(&[first, second], ParseOptions::default())?;
            let verdict = match method {
                Method::Oracle => {
                    let b = ctx.bounds();
                    brute_force_check(&fs[0], &fs[1], &sig, b.max_domain, b.budget)?
                }
                Method::Solver => {
                    let mut cfg = ctx.solver_config();
                    if let Some(t) = timeout_ms {
                        cfg.timeout_ms = *t;
                    }
                    let solver = Solver::new(cfg.settings(None));
                    if !solver.is_available() {
                        return Err(EquivError::SolverNotFound {
                            program: solver.settings().program.clone(),
                        }
                        .into());
                    }
                    solver.check(&fs[0], &fs[1], &sig)?
                }
            };
            let value = serde_json::to_value(&verdict).expect("verdicts serialize");
            let mut text = verdict.label().to_string();
            if let EquivVerdict::NotEquivalent { witness: Some(w), .. } = &verdict {
                text.push_str(&format!("\nwitness: {}", serde_json::to_string(w).expect("structures serialize")));
            }
            emit(out, json, value, &text)
        }
        Command::LeScore {
            first,
            second,
            pairs,
            table,
        } => {
            let (fs, _) = ctx.parse_all(&[first, second], ParseOptions::default())?;
            let matching = if pairs.is_empty() {
                default_matching(&fs[0], &fs[1])
            } else {
                let split = pairs
                    .iter()
                    .map(|p| {
                        p.split_once('=')
                            .ok_or_else(|| CliError::Usage(format!("--match expects LEFT=RIGHT, got `{p}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                PredicateMatching::from_pairs(&fs[0], &fs[1], split)
            };
            let score = le_score(&fs[0], &fs[1], &matching)?;
            let mut text = format!("{}", score.value());
            if *table {
                text = format!("{}{text}", score.table.render());
            }
            let value = json!({
                "score": score.value(),
                "agreeing": score.agreeing,
                "columns": score.columns,
                "matching": matching,
                "table": score.table,
            });
            emit(out, json, value, &text)
        }
        Command::Bleu { reference, candidate } => {
            let (fs, _) = ctx.parse_all(&[reference, candidate], ParseOptions::default())?;
            let b = bleu_formula(&fs[0], &fs[1]);
            emit(out, json, json!({"bleu": b}), &format!("{b}"))
        }
        Command::BuildTask(args) => build_task(&ctx, args, out),
        Command::Run(args) => run_command(&ctx, args, out),
        Command::Report { path, csv } => {
            let file = if path.is_dir() { path.join("report.json") } else { path.clone() };
            let text = std::fs::read_to_string(&file).map_err(|source| CliError::Io {
                path: file.clone(),
                source,
            })?;
            let report = ScoreReport::from_json(&text)
                .map_err(|e| CliError::Usage(format!("{}: not a report: {e}", file.display())))?;
            if *csv {
                return write!(out, "{}", report.to_csv()).map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                });
            }
            let value = serde_json::to_value(&report.aggregates).expect("aggregates serialize");
            emit(out, json, value, report.summary().trim_end())
        }
    }
}

fn build_task(ctx: &Ctx, args: &BuildTaskArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let task = match args.task {
        ChoiceArg::MostSimilar => ChoiceTask::MostSimilar,
        ChoiceArg::Ranking => ChoiceTask::Ranking,
    };
    let instances: Vec<Instance> = match (&args.formula, &args.dataset) {
        (Some(src), None) => {
            let o = ctx.ontology()?.clone();
            let (f, _) = ctx.parse(src)?;
            vec![Instance::new("cli", args.sentence.clone(), f, o)?]
        }
        (None, Some(path)) => ingest_dataset(path, args.format.into())?.instances,
        _ => return Err(CliError::Usage("give either a formula or --dataset".into())),
    };
    let mut builder = CandidateBuilder {
        k: args.k,
        ..CandidateBuilder::default()
    };
    if let Some(n) = ctx.g.max_domain {
        builder.flag_bounds = Some(OracleBounds { max_domain: n, ..OracleBounds::default() });
        builder.rewrite_bounds = builder.flag_bounds;
    }
    for inst in &instances {
        let set = builder.build(inst, task, ctx.seed(), args.variant.into())?;
        let line = if args.prompts {
            let p = choice_prompt(inst, &set)?;
            if ctx.g.json {
                json!({"instance_id": inst.id, "system": p.system, "user": p.user}).to_string()
            } else {
                format!("{}\n\n{}\n", p.system, p.user)
            }
        } else {
            set.to_ground_truth_json()
        };
        writeln!(out, "{line}").map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })?;
    }
    Ok(())
}

fn run_command(ctx: &Ctx, args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let task = match args.task {
        TaskArg::LogicalTranslation => TaskKind::LogicalTranslation,
        TaskArg::MostSimilar => TaskKind::MostSimilar,
        TaskArg::Ranking => TaskKind::Ranking,
    };
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.clone(), source })?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: bad config: {e}", p.display())))?
        }
        None => {
            let dataset = args
                .dataset
                .clone()
                .ok_or_else(|| CliError::Usage("run needs --dataset or --config".into()))?;
            let mut c = RunConfig::new(dataset, task, Variant::Fol);
            c.output_dir = Some(PathBuf::from("runs"));
            c
        }
    };
    cfg.task = task;
    if let Some(d) = &args.dataset {
        cfg.dataset = d.clone();
    }
    if let Some(f) = args.format {
        cfg.format = f.into();
    }
    if let Some(v) = args.variant {
        cfg.variant = v.into();
    }
    if args.k.is_some() {
        cfg.k = args.k;
    }
    if let Some(s) = &args.seeds {
        cfg.seeds = s.clone();
    } else if let Some(s) = ctx.g.seed {
        cfg.seeds = vec![s];
    }
    if args.embedding {
        cfg.model.kind = ModelKind::Embedding;
    }
    if let Some(e) = &args.endpoint {
        cfg.model.endpoint = e.clone();
    }
    if let Some(m) = &args.model {
        cfg.model.name = m.clone();
    }
    if let Some(t) = &args.token_env {
        cfg.model.token_env = t.clone();
    }
    if let Some(t) = args.max_tokens {
        cfg.model.max_completion_tokens = t;
    }
    cfg.model.instructed |= args.instructed;
    if let Some(d) = &args.output_dir {
        cfg.output_dir = Some(d.clone());
    }
    if let Some(r) = &args.run_id {
        cfg.run_id = r.clone();
    }
    if let Some(c) = args.concurrency {
        cfg.concurrency = c;
    }
    if let Some(t) = args.timeout_s {
        cfg.request_timeout_s = t;
    }
    if let Some(r) = args.retries {
        cfg.max_retries = r;
    }
    cfg.keep_smt |= args.keep_smt;
    if let Some(p) = &ctx.g.solver {
        cfg.solver.program = Some(p.clone());
    }
    if let Some(n) = ctx.g.max_domain {
        cfg.oracle_bounds.max_domain = n;
    }
    cfg.validate()?;
    let output = run(&cfg)?;
    let value = serde_json::to_value(&output.report.aggregates).expect("aggregates serialize");
    let mut text = output.report.summary().trim_end().to_string();
    if let Some(dir) = cfg.run_dir() {
        text.push_str(&format!("\nwritten to {}", dir.display()));
    }
    emit(out, ctx.g.json, value, &text)
}

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::{Condvar, Mutex, OnceLock};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::fol::{Formula, Signature};

use super::sexp::{parse_all, Sexp};
use super::smtlib::{emit_entailment, emit_smtlib, smt_symbol};
use super::structure::{eval_closed, Element, SigmaStructure};
use super::{EquivError, EquivMethod, EquivVerdict, UnknownReason};

/// Environment variable overriding the solver executable.
pub const SOLVER_ENV: &str = "FOLBENCH_SOLVER";
pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;
/// Per-process memory cap handed to z3; quantifier instantiation can
/// otherwise exhaust the machine and take neighbouring processes with it.
pub const DEFAULT_MEMORY_MB: u64 = 1_024;

/// Grace period past the soft timeout before the process is killed.
const KILL_GRACE: Duration = Duration::from_millis(2_000);
/// Function tables larger than this are not read back from a model.
const MAX_TABLE: usize = 4_096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverSettings {
    pub program: String,
    /// Arguments passed before any z3 defaults; the script arrives on stdin.
    pub args: Vec<String>,
    pub timeout_ms: u64,
    /// Directory receiving a copy of every emitted script.
    pub keep_smt_dir: Option<PathBuf>,
    pub max_concurrent: usize,
    /// Memory cap in MiB, passed to z3 as `-memory:N`.
    pub memory_mb: Option<u64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            program: std::env::var(SOLVER_ENV).unwrap_or_else(|_| "z3".to_string()),
            args: Vec::new(),
            timeout_ms: DEFAULT_TIMEOUT_MS,
            keep_smt_dir: None,
            max_concurrent: 4,
            memory_mb: Some(DEFAULT_MEMORY_MB),
        }
    }
}

impl SolverSettings {
    pub fn with_program(mut self, program: impl Into<String>) -> Self {
        self.program = program.into();
        self
    }

    pub fn with_timeout_ms(mut self, timeout_ms: u64) -> Self {
        self.timeout_ms = timeout_ms;
        self
    }

    fn is_z3(&self) -> bool {
        Path::new(&self.program)
            .file_stem()
            .and_then(|s| s.to_str())
            .is_some_and(|s| s.starts_with("z3"))
    }

    fn command_args(&self) -> Vec<String> {
        let mut args = self.args.clone();
        if self.is_z3() {
            if !args.iter().any(|a| a == "-in") {
                args.push("-in".into());
            }
            if !args.iter().any(|a| a.starts_with("-t:")) {
                args.push(format!("-t:{}", self.timeout_ms));
            }
            if let Some(mb) = self.memory_mb {
                if !args.iter().any(|a| a.starts_with("-memory:")) {
                    args.push(format!("-memory:{mb}"));
                }
            }
        }
        args
    }
}

/// Raw answer of one solver invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat { model: Option<String> },
    Unsat,
    Unknown,
    Timeout,
}

struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
}

/// An external SMT solver with a cap on simultaneous processes.
pub struct Solver {
    settings: SolverSettings,
    gate: Gate,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("settings", &self.settings).finish()
    }
}

impl Solver {
    pub fn new(settings: SolverSettings) -> Self {
        Solver {
            settings,
            gate: Gate {
                in_flight: Mutex::new(0),
                freed: Condvar::new(),
            },
        }
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    /// True if the executable can be started.
    pub fn is_available(&self) -> bool {
        let args: &[&str] = if self.settings.is_z3() { &["-version"] } else { &["--version"] };
        Command::new(&self.settings.program)
            .args(args)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status()
            .is_ok()
    }

    /// Decides `f1 ≡ f2` by asking whether `¬(f1 ↔ f2)` is satisfiable.
    ///
    /// When that query is inconclusive the two entailments `f1 ⊨ f2` and
    /// `f2 ⊨ f1` are asked separately; both unsat proves equivalence and a
    /// sat answer to either refutes it.
    pub fn check(&self, f1: &Formula, f2: &Formula, sig: &Signature) -> Result<EquivVerdict, EquivError> {
        let script = emit_smtlib(f1, f2, sig)?;
        let verdict = self.decide(&script, f1, f2, sig)?;
        if !verdict.is_unknown() {
            return Ok(verdict);
        }
        log::debug!("equivalence query inconclusive; checking both entailments");
        let mut both_unsat = true;
        for (a, b) in [(f1, f2), (f2, f1)] {
            match self.decide(&emit_entailment(a, b, sig)?, f1, f2, sig)? {
                EquivVerdict::Equivalent { .. } => {}
                refuted @ EquivVerdict::NotEquivalent { .. } => return Ok(refuted),
                EquivVerdict::Unknown { .. } => both_unsat = false,
            }
        }
        Ok(if both_unsat {
            EquivVerdict::Equivalent {
                method: EquivMethod::Solver,
            }
        } else {
            verdict
        })
    }

    /// Runs one script whose `unsat` means "no structure separates f1, f2".
    fn decide(&self, script: &str, f1: &Formula, f2: &Formula, sig: &Signature) -> Result<EquivVerdict, EquivError> {
        if let Some(dir) = &self.settings.keep_smt_dir {
            keep_script(dir, script)?;
        }
        Ok(match self.run(script)? {
            SolverAnswer::Unsat => EquivVerdict::Equivalent {
                method: EquivMethod::Solver,
            },
            SolverAnswer::Sat { model } => {
                let witness = model
                    .and_then(|m| structure_from_model(&m, sig))
                    .filter(|s| distinguishes(f1, f2, s));
                if witness.is_none() {
                    log::debug!("solver answered sat without a usable model");
                }
                EquivVerdict::NotEquivalent {
                    method: EquivMethod::Solver,
                    witness,
                }
            }
            SolverAnswer::Unknown => EquivVerdict::Unknown {
                reason: UnknownReason::SolverUnknown,
            },
            SolverAnswer::Timeout => EquivVerdict::Unknown {
                reason: UnknownReason::Timeout,
            },
        })
    }

    /// Runs a script that ends in `(check-sat)`; a `(get-model)` is appended.
    pub fn run(&self, script: &str) -> Result<SolverAnswer, EquivError> {
        self.acquire();
        let result = self.run_unguarded(script);
        self.release();
        result
    }

    fn acquire(&self) {
        let cap = self.settings.max_concurrent.max(1);
        let mut n = self.gate.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= cap {
            n = self.gate.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
    }

    fn release(&self) {
        let mut n = self.gate.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.gate.freed.notify_one();
    }

    fn run_unguarded(&self, script: &str) -> Result<SolverAnswer, EquivError> {
        let mut child = Command::new(&self.settings.program)
            .args(self.settings.command_args())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
                    EquivError::SolverNotFound {
                        program: self.settings.program.clone(),
                    }
                }
                _ => EquivError::Io(e),
            })?;

        let mut stdin = child.stdin.take().expect("stdin is piped");
        let mut payload = script.to_string();
        payload.push_str("(get-model)\n(exit)\n");
        // a solver that dies early closes the pipe; its output explains why
        let _ = stdin.write_all(payload.as_bytes());
        drop(stdin);

        let mut stdout = child.stdout.take().expect("stdout is piped");
        let mut stderr = child.stderr.take().expect("stderr is piped");
        let out_reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stdout.read_to_string(&mut s);
            s
        });
        let err_reader = std::thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });

        let deadline = Instant::now() + Duration::from_millis(self.settings.timeout_ms) + KILL_GRACE;
        let mut killed = false;
        loop {
            if child.try_wait()?.is_some() {
                break;
            }
            if Instant::now() >= deadline {
                let _ = child.kill();
                let _ = child.wait();
                killed = true;
                break;
            }
            std::thread::sleep(Duration::from_millis(2));
        }
        let out = out_reader.join().unwrap_or_default();
        let err = err_reader.join().unwrap_or_default();
        if killed {
            return Ok(SolverAnswer::Timeout);
        }

        // z3 reports a hit memory cap as an error instead of an answer
        if [&out, &err].iter().any(|s| s.contains("(error \"out of memory\")")) {
            return Ok(SolverAnswer::Unknown);
        }
        let trimmed = out.trim_start();
        let (first, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        match first {
            "unsat" => Ok(SolverAnswer::Unsat),
            "sat" => {
                let model = rest.trim();
                Ok(SolverAnswer::Sat {
                    model: (model.starts_with('(') && !model.starts_with("(error")).then(|| model.to_string()),
                })
            }
            "unknown" => Ok(SolverAnswer::Unknown),
            "timeout" => Ok(SolverAnswer::Timeout),
            _ => Err(EquivError::SolverCrashed {
                stderr: if err.trim().is_empty() { out } else { err },
            }),
        }
    }
}

fn keep_script(dir: &Path, script: &str) -> Result<(), EquivError> {
    std::fs::create_dir_all(dir)?;
    let digest = Sha256::digest(script.as_bytes());
    let name: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    std::fs::write(dir.join(format!("{name}.smt2")), script)?;
    Ok(())
}

fn distinguishes(f1: &Formula, f2: &Formula, s: &SigmaStructure) -> bool {
    match (eval_closed(f1, s), eval_closed(f2, s)) {
        (Ok(a), Ok(b)) => a != b,
        _ => false,
    }
}

fn default_solver() -> &'static Solver {
    static SOLVER: OnceLock<Solver> = OnceLock::new();
    SOLVER.get_or_init(|| Solver::new(SolverSettings::default()))
}

/// Checks equivalence with the default solver (`z3`, or `$FOLBENCH_SOLVER`).
pub fn solver_check(
    f1: &Formula,
    f2: &Formula,
    sig: &Signature,
    timeout_ms: u64,
) -> Result<EquivVerdict, EquivError> {
    let base = default_solver();
    if base.settings.timeout_ms == timeout_ms {
        return base.check(f1, f2, sig);
    }
    let solver = Solver::new(base.settings.clone().with_timeout_ms(timeout_ms));
    solver.check(f1, f2, sig)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Bool(bool),
    Elem(usize),
}

struct Definition<'a> {
    params: Vec<String>,
    body: &'a Sexp,
}

struct Model<'a> {
    elements: BTreeMap<String, usize>,
    defs: BTreeMap<String, Definition<'a>>,
}

impl<'a> Model<'a> {
    fn eval(&self, e: &Sexp, env: &BTreeMap<String, Value>, depth: usize) -> Option<Value> {
        if depth > 256 {
            return None;
        }
        match e {
            Sexp::Atom(a) => match a.as_str() {
                "true" => Some(Value::Bool(true)),
                "false" => Some(Value::Bool(false)),
                name => env
                    .get(name)
                    .copied()
                    .or_else(|| self.elements.get(name).map(|&i| Value::Elem(i)))
                    .or_else(|| self.call(name, &[], depth)),
            },
            Sexp::List(items) => {
                let head = items.first()?.as_atom()?;
                let args = &items[1..];
                let eval_all = |xs: &[Sexp]| -> Option<Vec<Value>> {
                    xs.iter().map(|x| self.eval(x, env, depth + 1)).collect()
                };
                let as_bool = |v: Value| match v {
                    Value::Bool(b) => Some(b),
                    Value::Elem(_) => None,
                };
                match head {
                    "as" => self.eval(args.first()?, env, depth + 1),
                    "not" => Some(Value::Bool(!as_bool(self.eval(args.first()?, env, depth + 1)?)?)),
                    "and" => {
                        let vs = eval_all(args)?;
                        let mut r = true;
                        for v in vs {
                            r &= as_bool(v)?;
                        }
                        Some(Value::Bool(r))
                    }
                    "or" => {
                        let vs = eval_all(args)?;
                        let mut r = false;
                        for v in vs {
                            r |= as_bool(v)?;
                        }
                        Some(Value::Bool(r))
                    }
                    "=>" => {
                        let vs = eval_all(args)?;
                        let (last, init) = vs.split_last()?;
                        let mut premise = true;
                        for v in init {
                            premise &= as_bool(*v)?;
                        }
                        Some(Value::Bool(!premise || as_bool(*last)?))
                    }
                    "xor" => {
                        let vs = eval_all(args)?;
                        let mut r = false;
                        for v in vs {
                            r ^= as_bool(v)?;
                        }
                        Some(Value::Bool(r))
                    }
                    "=" => {
                        let vs = eval_all(args)?;
                        Some(Value::Bool(vs.windows(2).all(|w| w[0] == w[1])))
                    }
                    "distinct" => {
                        let vs = eval_all(args)?;
                        let all_distinct = vs
                            .iter()
                            .enumerate()
                            .all(|(i, a)| vs[i + 1..].iter().all(|b| a != b));
                        Some(Value::Bool(all_distinct))
                    }
                    "ite" => {
                        if args.len() != 3 {
                            return None;
                        }
                        if as_bool(self.eval(&args[0], env, depth + 1)?)? {
                            self.eval(&args[1], env, depth + 1)
                        } else {
                            self.eval(&args[2], env, depth + 1)
                        }
                    }
                    "let" => {
                        let bindings = args.first()?.as_list()?;
                        let mut inner = env.clone();
                        for b in bindings {
                            let pair = b.as_list()?;
                            let name = pair.first()?.as_atom()?;
                            let v = self.eval(pair.get(1)?, env, depth + 1)?;
                            inner.insert(name.to_string(), v);
                        }
                        self.eval(args.get(1)?, &inner, depth + 1)
                    }
                    name => {
                        let vs = eval_all(args)?;
                        self.call(name, &vs, depth)
                    }
                }
            }
        }
    }

    fn call(&self, name: &str, args: &[Value], depth: usize) -> Option<Value> {
        let def = self.defs.get(name)?;
        if def.params.len() != args.len() {
            return None;
        }
        let env: BTreeMap<String, Value> = def.params.iter().cloned().zip(args.iter().copied()).collect();
        self.eval(def.body, &env, depth + 1)
    }
}

fn collect_elements(e: &Sexp, out: &mut Vec<String>) {
    match e {
        Sexp::Atom(a) if a.starts_with("U!val!") => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        Sexp::Atom(_) => {}
        Sexp::List(items) => items.iter().for_each(|i| collect_elements(i, out)),
    }
}

fn element_index(name: &str) -> u64 {
    name.trim_start_matches("U!val!").parse().unwrap_or(u64::MAX)
}

/// Reads a z3-style model into a structure over every symbol of `sig`.
///
/// Symbols absent from the model get a default interpretation: the first
/// element for constants and functions, the empty relation for predicates.
fn structure_from_model(text: &str, sig: &Signature) -> Option<SigmaStructure> {
    let top = parse_all(text)?;
    let items: &[Sexp] = match top.as_slice() {
        [Sexp::List(items)] if items.first().and_then(Sexp::as_atom) != Some("model") => items,
        [Sexp::List(items)] => &items[1..],
        _ => return None,
    };

    let mut names = Vec::new();
    for item in items {
        collect_elements(item, &mut names);
    }
    names.sort_by_key(|n| element_index(n));
    let elements: BTreeMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    let size = elements.len().max(1);

    let mut defs = BTreeMap::new();
    for item in items {
        let Some(parts) = item.as_list() else { continue };
        if parts.first().and_then(Sexp::as_atom) != Some("define-fun") || parts.len() != 5 {
            continue;
        }
        let name = parts[1].as_atom()?.to_string();
        let params = parts[2]
            .as_list()?
            .iter()
            .map(|p| p.as_list().and_then(|p| p.first()).and_then(Sexp::as_atom).map(str::to_string))
            .collect::<Option<Vec<_>>>()?;
        defs.insert(name, Definition { params, body: &parts[4] });
    }
    let model = Model { elements, defs };
    let unquoted = |s: &str| smt_symbol(s).trim_matches('|').to_string();

    let mut s = SigmaStructure::new(size);
    for c in sig.constants.iter() {
        let e = match model.call(&unquoted(c), &[], 0) {
            Some(Value::Elem(i)) => i,
            Some(Value::Bool(_)) => return None,
            None => 0,
        };
        s.set_constant(c.clone(), Element(e));
    }
    for (p, arity) in sig.predicates.iter() {
        let key = unquoted(p);
        let defined = model.defs.contains_key(&key);
        s = s.with_empty_predicate(p.clone());
        if !defined {
            continue;
        }
        for tuple in tuples(size, *arity)? {
            let args: Vec<Value> = tuple.iter().map(|&i| Value::Elem(i)).collect();
            match model.call(&key, &args, 0)? {
                Value::Bool(true) => s.add_fact(p.clone(), tuple.into_iter().map(Element).collect()),
                Value::Bool(false) => {}
                Value::Elem(_) => return None,
            }
        }
    }
    for (f, arity) in sig.functions.iter() {
        let key = unquoted(f);
        let defined = model.defs.contains_key(&key);
        for tuple in tuples(size, *arity)? {
            let value = if defined {
                let args: Vec<Value> = tuple.iter().map(|&i| Value::Elem(i)).collect();
                match model.call(&key, &args, 0)? {
                    Value::Elem(i) => i,
                    Value::Bool(_) => return None,
                }
            } else {
                0
            };
            s.set_function_value(f.clone(), tuple.into_iter().map(Element).collect(), Element(value));
        }
    }
    Some(s)
}

/// All tuples in `{0..size}^arity`, or `None` past [`MAX_TABLE`].
fn tuples(size: usize, arity: usize) -> Option<Vec<Vec<usize>>> {
    let count = size.checked_pow(arity as u32)?;
    if count > MAX_TABLE {
        return None;
    }
    let mut out = Vec::with_capacity(count);
    for mut n in 0..count {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = n % size;
            n /= size;
        }
        out.push(t);
    }
    Some(out)
}

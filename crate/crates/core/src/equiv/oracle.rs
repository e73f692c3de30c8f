//! Bounded refutation of equivalence by enumerating finite structures.
//!
//! Only the symbols that occur in either formula are varied; everything else
//! in the signature is fixed to a default (first element, empty relation).
//! Each domain size is enumerated exhaustively when its interpretation count
//! fits in the remaining budget, otherwise sampled uniformly.

use std::collections::BTreeMap;

use rand::Rng;

use crate::fol::{Connective, Formula, Quantifier, Signature, Term};
use crate::seeding;

use super::structure::{Element, SigmaStructure};
use super::{EquivError, EquivMethod, EquivVerdict, UnknownReason};

/// Function symbols are only enumerated up to this domain size.
pub const FUNCTION_DOMAIN_LIMIT: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OracleBounds {
    pub max_domain: usize,
    /// Total number of structure evaluations across all domain sizes.
    pub budget: u64,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds {
            max_domain: 3,
            budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub verdict: EquivVerdict,
    pub structures_checked: u64,
    /// Largest domain size that was covered exhaustively (0 if none).
    pub exhaustive_up_to: usize,
}

/// Searches for a structure distinguishing two closed formulas.
///
/// Never answers `Equivalent`: without a refutation the verdict is
/// `Unknown(BoundExhausted)`.
pub fn brute_force_check(
    f1: &Formula,
    f2: &Formula,
    sig: &Signature,
    max_domain: usize,
    budget: u64,
) -> Result<EquivVerdict, EquivError> {
    brute_force_report(f1, f2, sig, OracleBounds { max_domain, budget }).map(|r| r.verdict)
}

pub fn brute_force_report(
    f1: &Formula,
    f2: &Formula,
    sig: &Signature,
    bounds: OracleBounds,
) -> Result<OracleReport, EquivError> {
    if bounds.budget < 1 {
        return Err(EquivError::BudgetExceeded);
    }
    if bounds.max_domain < 1 {
        return Err(EquivError::InvalidBound);
    }
    for f in [f1, f2] {
        sig.check(f)?;
        let free = f.free_vars();
        if !free.is_empty() {
            return Err(crate::fol::FolError::NotClosed {
                free: free.into_iter().collect(),
            }
            .into());
        }
    }

    let mut vocab = Vocab::default();
    let c1 = vocab.compile(f1);
    let c2 = vocab.compile(f2);

    let mut rng = seeding::stream(0, &["oracle", &f1.to_string(), &f2.to_string()]);
    let mut remaining = bounds.budget;
    let mut checked = 0u64;
    let mut exhaustive_up_to = 0;

    for size in 1..=bounds.max_domain {
        if remaining == 0 {
            break;
        }
        if size > FUNCTION_DOMAIN_LIMIT && !vocab.functions.is_empty() {
            break;
        }
        let mut world = World::new(&vocab, size);
        let count = world.interpretation_count();
        let sizes_left = (bounds.max_domain - size + 1) as u64;
        let exhaustive = count.is_some_and(|c| c <= remaining as u128);
        let quota = if exhaustive {
            count.unwrap() as u64
        } else {
            (remaining / sizes_left).max(1)
        };

        for i in 0..quota {
            if exhaustive {
                if i > 0 {
                    world.increment();
                }
            } else {
                world.randomize(&mut rng);
            }
            checked += 1;
            let v1 = world.eval(&c1);
            let v2 = world.eval(&c2);
            if v1 != v2 {
                return Ok(OracleReport {
                    verdict: EquivVerdict::NotEquivalent {
                        method: EquivMethod::BruteForce,
                        witness: Some(world.to_structure(&vocab, sig)),
                    },
                    structures_checked: checked,
                    exhaustive_up_to,
                });
            }
        }
        remaining -= quota;
        if exhaustive {
            exhaustive_up_to = size;
        }
    }

    Ok(OracleReport {
        verdict: EquivVerdict::Unknown {
            reason: UnknownReason::BoundExhausted,
        },
        structures_checked: checked,
        exhaustive_up_to,
    })
}

#[derive(Default)]
struct Vocab {
    predicates: Vec<(String, usize)>,
    constants: Vec<String>,
    functions: Vec<(String, usize)>,
    pred_index: BTreeMap<String, usize>,
    const_index: BTreeMap<String, usize>,
    func_index: BTreeMap<String, usize>,
    slots: usize,
}

enum CTerm {
    Var(usize),
    Const(usize),
    Func(usize, Vec<CTerm>),
}

enum CForm {
    Atom(usize, Vec<CTerm>),
    Not(Box<CForm>),
    Bin(Connective, Box<CForm>, Box<CForm>),
    Quant(Quantifier, usize, Box<CForm>),
}

impl Vocab {
    fn compile(&mut self, f: &Formula) -> CForm {
        let mut scope = Vec::new();
        self.compile_in(f, &mut scope)
    }

    fn compile_in(&mut self, f: &Formula, scope: &mut Vec<(String, usize)>) -> CForm {
        match f {
            Formula::Atom { predicate, args } => {
                let idx = match self.pred_index.get(predicate) {
                    Some(&i) => i,
                    None => {
                        self.predicates.push((predicate.clone(), args.len()));
                        self.pred_index.insert(predicate.clone(), self.predicates.len() - 1);
                        self.predicates.len() - 1
                    }
                };
                let args = args.iter().map(|t| self.compile_term(t, scope)).collect();
                CForm::Atom(idx, args)
            }
            Formula::Not { inner } => CForm::Not(Box::new(self.compile_in(inner, scope))),
            Formula::Binary { op, left, right } => CForm::Bin(
                *op,
                Box::new(self.compile_in(left, scope)),
                Box::new(self.compile_in(right, scope)),
            ),
            Formula::Quantified {
                quantifier,
                var,
                body,
            } => {
                let slot = self.slots;
                self.slots += 1;
                scope.push((var.clone(), slot));
                let body = self.compile_in(body, scope);
                scope.pop();
                CForm::Quant(*quantifier, slot, Box::new(body))
            }
        }
    }

    fn compile_term(&mut self, t: &Term, scope: &[(String, usize)]) -> CTerm {
        match t {
            Term::Variable { name } => {
                let slot = scope
                    .iter()
                    .rev()
                    .find(|(v, _)| v == name)
                    .map(|(_, s)| *s)
                    .expect("closed formula");
                CTerm::Var(slot)
            }
            Term::Constant { name } => {
                let idx = match self.const_index.get(name) {
                    Some(&i) => i,
                    None => {
                        self.constants.push(name.clone());
                        self.const_index.insert(name.clone(), self.constants.len() - 1);
                        self.constants.len() - 1
                    }
                };
                CTerm::Const(idx)
            }
            Term::Function { name, args } => {
                let idx = match self.func_index.get(name) {
                    Some(&i) => i,
                    None => {
                        self.functions.push((name.clone(), args.len()));
                        self.func_index.insert(name.clone(), self.functions.len() - 1);
                        self.functions.len() - 1
                    }
                };
                let args = args.iter().map(|a| self.compile_term(a, scope)).collect();
                CTerm::Func(idx, args)
            }
        }
    }
}

/// One candidate interpretation, stored as a mixed-radix odometer.
struct World {
    size: usize,
    /// start offset of each predicate's truth table in `bits`
    pred_offsets: Vec<usize>,
    bits: Vec<bool>,
    consts: Vec<usize>,
    func_offsets: Vec<usize>,
    func_values: Vec<usize>,
    env: Vec<usize>,
}

impl World {
    fn new(vocab: &Vocab, size: usize) -> Self {
        let mut pred_offsets = Vec::new();
        let mut total = 0;
        for (_, arity) in vocab.predicates.iter() {
            pred_offsets.push(total);
            total += size.pow(*arity as u32);
        }
        let mut func_offsets = Vec::new();
        let mut ftotal = 0;
        for (_, arity) in vocab.functions.iter() {
            func_offsets.push(ftotal);
            ftotal += size.pow(*arity as u32);
        }
        World {
            size,
            pred_offsets,
            bits: vec![false; total],
            consts: vec![0; vocab.constants.len()],
            func_offsets,
            func_values: vec![0; ftotal],
            env: vec![0; vocab.slots],
        }
    }

    /// Number of distinct interpretations, `None` if it overflows.
    fn interpretation_count(&self) -> Option<u128> {
        let mut count: u128 = 1;
        for _ in 0..self.bits.len() {
            count = count.checked_mul(2)?;
        }
        for _ in 0..(self.consts.len() + self.func_values.len()) {
            count = count.checked_mul(self.size as u128)?;
        }
        Some(count)
    }

    fn increment(&mut self) {
        for b in self.bits.iter_mut() {
            if *b {
                *b = false;
            } else {
                *b = true;
                return;
            }
        }
        for v in self.consts.iter_mut().chain(self.func_values.iter_mut()) {
            if *v + 1 < self.size {
                *v += 1;
                return;
            }
            *v = 0;
        }
    }

    fn randomize(&mut self, rng: &mut impl Rng) {
        for b in self.bits.iter_mut() {
            *b = rng.random();
        }
        for v in self.consts.iter_mut().chain(self.func_values.iter_mut()) {
            *v = rng.random_range(0..self.size);
        }
    }

    fn term(&self, t: &CTerm) -> usize {
        match t {
            CTerm::Var(slot) => self.env[*slot],
            CTerm::Const(i) => self.consts[*i],
            CTerm::Func(i, args) => {
                let mut idx = 0;
                for a in args {
                    idx = idx * self.size + self.term(a);
                }
                self.func_values[self.func_offsets[*i] + idx]
            }
        }
    }

    fn eval(&mut self, f: &CForm) -> bool {
        match f {
            CForm::Atom(p, args) => {
                let mut idx = 0;
                for a in args {
                    idx = idx * self.size + self.term(a);
                }
                self.bits[self.pred_offsets[*p] + idx]
            }
            CForm::Not(inner) => !self.eval(inner),
            CForm::Bin(op, l, r) => {
                let lv = self.eval(l);
                match op {
                    Connective::And => lv && self.eval(r),
                    Connective::Or => lv || self.eval(r),
                    Connective::Implies => !lv || self.eval(r),
                    Connective::Iff => lv == self.eval(r),
                }
            }
            CForm::Quant(q, slot, body) => {
                let saved = self.env[*slot];
                let mut result = matches!(q, Quantifier::Forall);
                for d in 0..self.size {
                    self.env[*slot] = d;
                    let v = self.eval(body);
                    if v != result {
                        result = v;
                        break;
                    }
                }
                self.env[*slot] = saved;
                result
            }
        }
    }

    fn tuple(&self, mut idx: usize, arity: usize) -> Vec<Element> {
        let mut out = vec![Element(0); arity];
        for k in (0..arity).rev() {
            out[k] = Element(idx % self.size);
            idx /= self.size;
        }
        out
    }

    fn to_structure(&self, vocab: &Vocab, sig: &Signature) -> SigmaStructure {
        let mut s = SigmaStructure::new(self.size);
        for c in sig.constants.iter() {
            let e = vocab.const_index.get(c).map(|&i| self.consts[i]).unwrap_or(0);
            s.set_constant(c.clone(), Element(e));
        }
        for (p, arity) in sig.predicates.iter() {
            s = s.with_empty_predicate(p.clone());
            if let Some(&i) = vocab.pred_index.get(p) {
                let n = self.size.pow(*arity as u32);
                for idx in 0..n {
                    if self.bits[self.pred_offsets[i] + idx] {
                        s.add_fact(p.clone(), self.tuple(idx, *arity));
                    }
                }
            }
        }
        for (f, arity) in sig.functions.iter() {
            let n = self.size.pow(*arity as u32);
            for idx in 0..n {
                let value = vocab
                    .func_index
                    .get(f)
                    .map(|&i| self.func_values[self.func_offsets[i] + idx])
                    .unwrap_or(0);
                s.set_function_value(f.clone(), self.tuple(idx, *arity), Element(value));
            }
        }
        s
    }
}

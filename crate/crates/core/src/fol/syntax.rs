use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// A first-order term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    Variable { name: String },
    Constant { name: String },
    Function { name: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable { name: name.into() }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant { name: name.into() }
    }

    pub fn func(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Function {
            name: name.into(),
            args,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Variable { name } | Term::Constant { name } | Term::Function { name, .. } => name,
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Variable { name } => {
                out.insert(name.clone());
            }
            Term::Constant { .. } => {}
            Term::Function { args, .. } => args.iter().for_each(|t| t.collect_vars(out)),
        }
    }
}

/// Binary Boolean connectives, ordered from tightest to loosest binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

impl Connective {
    pub const ALL: [Connective; 4] = [
        Connective::And,
        Connective::Or,
        Connective::Implies,
        Connective::Iff,
    ];

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            Connective::And => 4,
            Connective::Or => 3,
            Connective::Implies => 2,
            Connective::Iff => 1,
        }
    }

    pub fn is_right_assoc(self) -> bool {
        matches!(self, Connective::Implies | Connective::Iff)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "∧",
            Connective::Or => "∨",
            Connective::Implies => "→",
            Connective::Iff => "↔",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Quantifier::Forall => "∀",
            Quantifier::Exists => "∃",
        }
    }
}

/// A first-order formula. Conjunction and disjunction are binary nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Formula {
    Atom {
        predicate: String,
        args: Vec<Term>,
    },
    Not {
        inner: Box<Formula>,
    },
    Binary {
        op: Connective,
        left: Box<Formula>,
        right: Box<Formula>,
    },
    Quantified {
        quantifier: Quantifier,
        var: String,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom {
            predicate: predicate.into(),
            args,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not {
            inner: Box::new(inner),
        }
    }

    pub fn binary(op: Connective, left: Formula, right: Formula) -> Self {
        Formula::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::And, left, right)
    }

    pub fn or(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::Or, left, right)
    }

    pub fn implies(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::Implies, left, right)
    }

    pub fn iff(left: Formula, right: Formula) -> Self {
        Self::binary(Connective::Iff, left, right)
    }

    pub fn quantified(quantifier: Quantifier, var: impl Into<String>, body: Formula) -> Self {
        Formula::Quantified {
            quantifier,
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Self::quantified(Quantifier::Forall, var, body)
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Self::quantified(Quantifier::Exists, var, body)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom { .. })
    }

    /// An atom or a negated atom.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom { .. } => true,
            Formula::Not { inner } => inner.is_atom(),
            _ => false,
        }
    }

    /// Free variables of the formula.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { args, .. } => {
                let mut vars = BTreeSet::new();
                args.iter().for_each(|t| t.collect_vars(&mut vars));
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not { inner } => inner.collect_free(bound, out),
            Formula::Binary { left, right, .. } => {
                left.collect_free(bound, out);
                right.collect_free(bound, out);
            }
            Formula::Quantified { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Universally binds every free variable, in sorted order (outermost first).
    pub fn universal_closure(&self) -> Formula {
        self.free_vars()
            .into_iter()
            .rev()
            .fold(self.clone(), |acc, v| Formula::forall(v, acc))
    }

    /// Number of nodes in the formula tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom { .. } => 1,
            Formula::Not { inner } => 1 + inner.size(),
            Formula::Binary { left, right, .. } => 1 + left.size() + right.size(),
            Formula::Quantified { body, .. } => 1 + body.size(),
        }
    }

    pub fn connective_count(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Not { inner } => inner.connective_count(),
            Formula::Binary { left, right, .. } => 1 + left.connective_count() + right.connective_count(),
            Formula::Quantified { body, .. } => body.connective_count(),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Not { inner } => inner.quantifier_count(),
            Formula::Binary { left, right, .. } => left.quantifier_count() + right.quantifier_count(),
            Formula::Quantified { body, .. } => 1 + body.quantifier_count(),
        }
    }

    /// Predicate symbols in order of first occurrence (left to right).
    pub fn predicates(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom { predicate, .. } = f {
                if !out.contains(predicate) {
                    out.push(predicate.clone());
                }
            }
        });
        out
    }

    /// Constant symbols occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        fn walk(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Constant { name } => {
                    out.insert(name.clone());
                }
                Term::Variable { .. } => {}
                Term::Function { args, .. } => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom { args, .. } = f {
                args.iter().for_each(|t| walk(t, &mut out));
            }
        });
        out
    }

    /// Function symbols occurring anywhere in the formula.
    pub fn functions(&self) -> BTreeSet<String> {
        fn walk(t: &Term, out: &mut BTreeSet<String>) {
            if let Term::Function { name, args } = t {
                out.insert(name.clone());
                args.iter().for_each(|a| walk(a, out));
            }
        }
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom { args, .. } = f {
                args.iter().for_each(|t| walk(t, &mut out));
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom { .. } => {}
            Formula::Not { inner } => inner.visit(f),
            Formula::Binary { left, right, .. } => {
                left.visit(f);
                right.visit(f);
            }
            Formula::Quantified { body, .. } => body.visit(f),
        }
    }

    /// Subformula at a pre-order index.
    pub fn subformula(&self, index: usize) -> Option<&Formula> {
        let mut found = None;
        let mut i = 0;
        self.visit(&mut |f| {
            if i == index {
                found = Some(f);
            }
            i += 1;
        });
        found
    }

    /// Returns a copy with the subformula at pre-order `index` replaced.
    pub fn replace_at(&self, index: usize, replacement: Formula) -> Formula {
        let mut counter = 0;
        let mut replacement = Some(replacement);
        self.replace_rec(index, &mut counter, &mut replacement)
    }

    fn replace_rec(&self, target: usize, counter: &mut usize, rep: &mut Option<Formula>) -> Formula {
        let here = *counter;
        *counter += 1;
        if here == target {
            // skip the subtree so later indices stay consistent
            *counter += self.size() - 1;
            return rep.take().expect("replacement used once");
        }
        match self {
            Formula::Atom { .. } => self.clone(),
            Formula::Not { inner } => Formula::not(inner.replace_rec(target, counter, rep)),
            Formula::Binary { op, left, right } => {
                let l = left.replace_rec(target, counter, rep);
                let r = right.replace_rec(target, counter, rep);
                Formula::binary(*op, l, r)
            }
            Formula::Quantified {
                quantifier,
                var,
                body,
            } => Formula::quantified(*quantifier, var.clone(), body.replace_rec(target, counter, rep)),
        }
    }

    /// True if `¬` occurs only directly above atoms and no `→`/`↔` remain.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Atom { .. } => true,
            Formula::Not { inner } => inner.is_atom(),
            Formula::Binary { op, left, right } => {
                matches!(op, Connective::And | Connective::Or) && left.is_nnf() && right.is_nnf()
            }
            Formula::Quantified { body, .. } => body.is_nnf(),
        }
    }

    /// True if some quantifier rebinds a variable already bound by an enclosing one.
    pub fn has_shadowing(&self) -> bool {
        fn walk(f: &Formula, bound: &mut Vec<String>) -> bool {
            match f {
                Formula::Atom { .. } => false,
                Formula::Not { inner } => walk(inner, bound),
                Formula::Binary { left, right, .. } => walk(left, bound) || walk(right, bound),
                Formula::Quantified { var, body, .. } => {
                    if bound.contains(var) {
                        return true;
                    }
                    bound.push(var.clone());
                    let r = walk(body, bound);
                    bound.pop();
                    r
                }
            }
        }
        walk(self, &mut Vec::new())
    }
}

use std::fmt::{self, Write};

use super::syntax::{Connective, Formula, Term};

/// True if the formula's printed form is left open on the right, i.e. ends in
/// a quantifier scope that would swallow anything printed after it.
pub(crate) fn ends_open(f: &Formula) -> bool {
    match f {
        Formula::Quantified { .. } => true,
        Formula::Not { inner } => ends_open(inner),
        _ => false,
    }
}

pub(crate) fn left_needs_parens(op: Connective, left: &Formula) -> bool {
    match left {
        Formula::Binary { op: lop, .. } => {
            lop.precedence() < op.precedence() || (*lop == op && op.is_right_assoc())
        }
        other => ends_open(other),
    }
}

pub(crate) fn right_needs_parens(op: Connective, right: &Formula, rightmost: bool) -> bool {
    match right {
        Formula::Binary { op: rop, .. } => {
            rop.precedence() < op.precedence() || (*rop == op && !op.is_right_assoc())
        }
        other => !rightmost && ends_open(other),
    }
}

pub(crate) fn negand_needs_parens(inner: &Formula) -> bool {
    matches!(inner, Formula::Binary { .. })
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable { name } | Term::Constant { name } => f.write_str(name),
            Term::Function { name, args } => {
                f.write_str(name)?;
                write_args(f, args)
            }
        }
    }
}

fn write_args(out: &mut impl Write, args: &[Term]) -> fmt::Result {
    out.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write!(out, "{a}")?;
    }
    out.write_char(')')
}

fn write_formula(out: &mut impl Write, f: &Formula, rightmost: bool) -> fmt::Result {
    match f {
        Formula::Atom { predicate, args } => {
            out.write_str(predicate)?;
            if args.is_empty() {
                Ok(())
            } else {
                write_args(out, args)
            }
        }
        Formula::Not { inner } => {
            out.write_char('¬')?;
            if negand_needs_parens(inner) {
                out.write_char('(')?;
                write_formula(out, inner, true)?;
                out.write_char(')')
            } else {
                write_formula(out, inner, rightmost)
            }
        }
        Formula::Binary { op, left, right } => {
            if left_needs_parens(*op, left) {
                out.write_char('(')?;
                write_formula(out, left, true)?;
                out.write_char(')')?;
            } else {
                write_formula(out, left, false)?;
            }
            write!(out, " {} ", op.symbol())?;
            if right_needs_parens(*op, right, rightmost) {
                out.write_char('(')?;
                write_formula(out, right, true)?;
                out.write_char(')')
            } else {
                write_formula(out, right, rightmost)
            }
        }
        Formula::Quantified {
            quantifier,
            var,
            body,
        } => {
            write!(out, "{}{} ", quantifier.symbol(), var)?;
            write_formula(out, body, true)
        }
    }
}

/// Canonical Unicode rendering with the fewest parentheses that reparse to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, true)
    }
}

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

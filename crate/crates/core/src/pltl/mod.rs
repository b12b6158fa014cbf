//! Past LTL: syntax, parser and the two trace evaluators.

mod eval;
mod parser;

use std::fmt;

use crate::trace::Variable;

pub use eval::{eval_formula, eval_formula_inductive, recognizes, series, EvalError, SinceSemantics};
pub(crate) use parser::is_keyword;
pub use parser::{parse_formula, parse_formula_with, FormulaParser};

/// A Past LTL formula.
///
/// `Once` and `Hist` are sugar for `true S f` and `!(true S !f)`; they are
/// kept as nodes so that printing and sizes follow what the user wrote, and
/// [`Formula::desugar`] produces the expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bot,
    Atom(Variable),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Before(Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Once(Box<Formula>),
    Hist(Box<Formula>),
}

impl Formula {
    pub fn atom(v: Variable) -> Self {
        Formula::Atom(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn before(f: Formula) -> Self {
        Formula::Before(Box::new(f))
    }

    pub fn since(l: Formula, r: Formula) -> Self {
        Formula::Since(Box::new(l), Box::new(r))
    }

    pub fn once(f: Formula) -> Self {
        Formula::Once(Box::new(f))
    }

    pub fn hist(f: Formula) -> Self {
        Formula::Hist(Box::new(f))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Before(f) | Formula::Once(f) | Formula::Hist(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Since(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Number of `Y`, `S`, `O`, `H` nodes.
    pub fn temporal_count(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => 0,
            Formula::Not(f) => f.temporal_count(),
            Formula::Before(f) | Formula::Once(f) | Formula::Hist(f) => 1 + f.temporal_count(),
            Formula::And(l, r) | Formula::Or(l, r) => l.temporal_count() + r.temporal_count(),
            Formula::Since(l, r) => 1 + l.temporal_count() + r.temporal_count(),
        }
    }

    /// True iff the formula has no temporal operator.
    pub fn is_static(&self) -> bool {
        self.temporal_count() == 0
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Atom(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Formula::Not(f) | Formula::Before(f) | Formula::Once(f) | Formula::Hist(f) => f.collect_vars(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Since(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Number of variable occurrences (with repetition).
    pub fn var_occurrences(&self) -> Vec<&Variable> {
        let mut out = Vec::new();
        self.walk_atoms(&mut |v| out.push(v));
        out
    }

    fn walk_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Variable)) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Atom(v) => f(v),
            Formula::Not(g) | Formula::Before(g) | Formula::Once(g) | Formula::Hist(g) => g.walk_atoms(f),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Since(l, r) => {
                l.walk_atoms(f);
                r.walk_atoms(f);
            }
        }
    }

    /// Replaces `O f` by `true S f` and `H f` by `!(true S !f)`, recursively.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(l, r) => Formula::and(l.desugar(), r.desugar()),
            Formula::Or(l, r) => Formula::or(l.desugar(), r.desugar()),
            Formula::Before(f) => Formula::before(f.desugar()),
            Formula::Since(l, r) => Formula::since(l.desugar(), r.desugar()),
            Formula::Once(f) => Formula::since(Formula::Top, f.desugar()),
            Formula::Hist(f) => Formula::not(Formula::since(Formula::Top, Formula::not(f.desugar()))),
        }
    }

    /// Evaluates a static formula under `lookup`; `None` if a temporal node is met.
    pub fn eval_static(&self, lookup: &impl Fn(&Variable) -> bool) -> Option<bool> {
        Some(match self {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(v) => lookup(v),
            Formula::Not(f) => !f.eval_static(lookup)?,
            Formula::And(l, r) => l.eval_static(lookup)? && r.eval_static(lookup)?,
            Formula::Or(l, r) => l.eval_static(lookup)? || r.eval_static(lookup)?,
            _ => return None,
        })
    }

    /// Replaces every atom `v` by `subst(v)` when it returns `Some`.
    pub fn substitute(&self, subst: &mut impl FnMut(&Variable) -> Option<Formula>) -> Formula {
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Atom(v) => subst(v).unwrap_or_else(|| self.clone()),
            Formula::Not(f) => Formula::not(f.substitute(subst)),
            Formula::And(l, r) => Formula::and(l.substitute(subst), r.substitute(subst)),
            Formula::Or(l, r) => Formula::or(l.substitute(subst), r.substitute(subst)),
            Formula::Before(f) => Formula::before(f.substitute(subst)),
            Formula::Since(l, r) => Formula::since(l.substitute(subst), r.substitute(subst)),
            Formula::Once(f) => Formula::once(f.substitute(subst)),
            Formula::Hist(f) => Formula::hist(f.substitute(subst)),
        }
    }

    /// Disjunction of `fs`, `false` when empty.
    pub fn disjunction(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot)
    }

    /// Conjunction of `fs`, `true` when empty.
    pub fn conjunction(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().reduce(Formula::and).unwrap_or(Formula::Top)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Since(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) | Formula::Before(_) | Formula::Once(_) | Formula::Hist(_) => 4,
            Formula::Top | Formula::Bot | Formula::Atom(_) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::Top => f.write_str("true"),
            Formula::Bot => f.write_str("false"),
            Formula::Atom(v) => write!(f, "{v}"),
            Formula::Not(g) => {
                f.write_str("!")?;
                g.fmt_at(f, 4)
            }
            Formula::Before(g) => {
                f.write_str("Y ")?;
                g.fmt_at(f, 4)
            }
            Formula::Once(g) => {
                f.write_str("O ")?;
                g.fmt_at(f, 4)
            }
            Formula::Hist(g) => {
                f.write_str("H ")?;
                g.fmt_at(f, 4)
            }
            Formula::And(l, r) => {
                l.fmt_at(f, 3)?;
                f.write_str(" & ")?;
                r.fmt_at(f, 4)
            }
            Formula::Or(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" | ")?;
                r.fmt_at(f, 3)
            }
            Formula::Since(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str(" S ")?;
                r.fmt_at(f, 1)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sizes_and_desugaring() {
        let f = parse_formula("H a").unwrap();
        assert_eq!(f.size(), 2);
        let d = f.desugar();
        assert_eq!(d.to_string(), "!(true S !a)");
        assert_eq!(d.size(), 5);
        assert_eq!(parse_formula("O a").unwrap().desugar().to_string(), "true S a");
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        for (src, printed) in [
            ("a S b S c", "a S b S c"),
            ("(a S b) S c", "(a S b) S c"),
            ("a & (b | c)", "a & (b | c)"),
            ("a & b | c", "a & b | c"),
            ("!Y (a & b)", "!Y (a & b)"),
            ("(a | b) S c & d", "a | b S c & d"),
        ] {
            assert_eq!(parse_formula(src).unwrap().to_string(), printed, "{src}");
        }
    }

    proptest! {
        #[test]
        fn printing_round_trips(f in strategy::formula(vec!["a", "b", "c"], 5)) {
            let back = parse_formula(&f.to_string()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}

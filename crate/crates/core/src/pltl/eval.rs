use thiserror::Error;

use crate::trace::{Interpretation, Trace};

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("time {t} out of range 1..={len}")]
    TimeOutOfRange { t: usize, len: usize },
}

/// Which characterisation of `S` (and of `O`, `H`) to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinceSemantics {
    /// `exists j in [1,t]` with the right operand at `j` and the left one on `(j,t]`.
    Direct,
    /// Right operand now, or the formula held at `t-1` and the left operand holds now.
    Inductive,
}

/// Truth values of `f` at times `1..=upto`, index `t-1` for time `t`.
///
/// Every subformula is evaluated once over the whole prefix, which memoizes
/// the `(subformula, t)` table: `O(|f| * upto^2)` for the direct
/// characterisation, `O(|f| * upto)` for the inductive one.
pub fn series<I: Interpretation + ?Sized>(f: &Formula, interp: &I, upto: usize, sem: SinceSemantics) -> Vec<bool> {
    match f {
        Formula::Top => vec![true; upto],
        Formula::Bot => vec![false; upto],
        Formula::Atom(v) => (1..=upto).map(|t| interp.holds(t, v)).collect(),
        Formula::Not(g) => series(g, interp, upto, sem).into_iter().map(|b| !b).collect(),
        Formula::And(l, r) => {
            let (l, r) = (series(l, interp, upto, sem), series(r, interp, upto, sem));
            l.iter().zip(&r).map(|(a, b)| *a && *b).collect()
        }
        Formula::Or(l, r) => {
            let (l, r) = (series(l, interp, upto, sem), series(r, interp, upto, sem));
            l.iter().zip(&r).map(|(a, b)| *a || *b).collect()
        }
        Formula::Before(g) => {
            let g = series(g, interp, upto, sem);
            // t = 1 refers to the out-of-range instant 0.
            (0..upto).map(|i| i >= 1 && g[i - 1]).collect()
        }
        Formula::Since(l, r) => {
            let (l, r) = (series(l, interp, upto, sem), series(r, interp, upto, sem));
            since(&l, &r, sem)
        }
        Formula::Once(g) => {
            let g = series(g, interp, upto, sem);
            since(&vec![true; upto], &g, sem)
        }
        Formula::Hist(g) => {
            let g: Vec<bool> = series(g, interp, upto, sem).into_iter().map(|b| !b).collect();
            since(&vec![true; upto], &g, sem).into_iter().map(|b| !b).collect()
        }
    }
}

fn since(lhs: &[bool], rhs: &[bool], sem: SinceSemantics) -> Vec<bool> {
    let n = lhs.len();
    match sem {
        SinceSemantics::Direct => (0..n)
            .map(|t| (0..=t).any(|j| rhs[j] && (j + 1..=t).all(|k| lhs[k])))
            .collect(),
        SinceSemantics::Inductive => {
            let mut out = Vec::with_capacity(n);
            for t in 0..n {
                let prev = t >= 1 && out[t - 1];
                out.push(rhs[t] || (prev && lhs[t]));
            }
            out
        }
    }
}

fn check_time<I: Interpretation + ?Sized>(interp: &I, t: usize) -> Result<(), EvalError> {
    if t == 0 || t > interp.len() {
        Err(EvalError::TimeOutOfRange { t, len: interp.len() })
    } else {
        Ok(())
    }
}

/// `I, t |= f` using the direct semantics of `S`.
pub fn eval_formula<I: Interpretation + ?Sized>(f: &Formula, interp: &I, t: usize) -> Result<bool, EvalError> {
    check_time(interp, t)?;
    Ok(series(f, interp, t, SinceSemantics::Direct)[t - 1])
}

/// `I, t |= f` using the inductive characterisation of `S`.
pub fn eval_formula_inductive<I: Interpretation + ?Sized>(
    f: &Formula,
    interp: &I,
    t: usize,
) -> Result<bool, EvalError> {
    check_time(interp, t)?;
    Ok(series(f, interp, t, SinceSemantics::Inductive)[t - 1])
}

/// The formula accepts the trace iff it holds at the last step.
pub fn recognizes(f: &Formula, trace: &Trace) -> bool {
    *series(f, trace, trace.len(), SinceSemantics::Inductive)
        .last()
        .expect("traces are non-empty")
}

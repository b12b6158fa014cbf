//! Bounded language comparison by exhaustive enumeration of traces.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::{Alphabet, AutomataError, Automaton};
use crate::cascades::{Cascade, CascadeError};
use crate::pltl::{recognizes, Formula};
use crate::programs::{eval_program, Program, ProgramError};
use crate::trace::{bit_of, Trace, Variable};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("{needed} candidates exceed the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("recognizers are over different universes: {left} vs {right}")]
    UniverseMismatch { left: String, right: String },
    #[error("{what} reads `{var}`, which is not in the universe")]
    OutsideUniverse { what: &'static str, var: Variable },
    #[error("alphabet of {found} letters does not fit a universe of {vars} variables")]
    AlphabetMismatch { vars: usize, found: usize },
    #[error("maximum length must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
}

/// How an automaton or cascade reads a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Reading {
    /// Letters over these named variables.
    Named(Vec<Variable>),
    /// Letters over the universe, in order.
    Positional,
}

/// Anything that accepts or rejects traces over a fixed universe.
#[derive(Debug, Clone)]
pub struct Recognizer {
    universe: Vec<Variable>,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Formula(Formula),
    Program(Program, Variable),
    Automaton(Automaton, Reading),
    Cascade(Cascade, Reading),
}

fn check_vars<'a>(
    universe: &[Variable],
    vars: impl IntoIterator<Item = &'a Variable>,
    what: &'static str,
) -> Result<(), EquivError> {
    match vars.into_iter().find(|v| !universe.contains(v)) {
        Some(v) => Err(EquivError::OutsideUniverse { what, var: v.clone() }),
        None => Ok(()),
    }
}

/// Named bit alphabets are matched by variable; anything else must have one
/// letter per assignment to the universe.
fn reading(alphabet: &Alphabet, universe: &[Variable], what: &'static str) -> Result<Reading, EquivError> {
    if let Alphabet::Bits(b) = alphabet {
        if !b.vars.iter().any(Variable::is_generated) {
            check_vars(universe, &b.vars, what)?;
            return Ok(Reading::Named(b.vars.clone()));
        }
    }
    if universe.len() >= usize::BITS as usize || alphabet.len() != 1 << universe.len() {
        return Err(EquivError::AlphabetMismatch {
            vars: universe.len(),
            found: alphabet.len(),
        });
    }
    Ok(Reading::Positional)
}

impl Recognizer {
    pub fn formula(formula: Formula, universe: Vec<Variable>) -> Result<Self, EquivError> {
        check_vars(&universe, &formula.vars(), "formula")?;
        Ok(Recognizer {
            universe,
            kind: Kind::Formula(formula),
        })
    }

    pub fn program(program: Program, accept: Variable, universe: Vec<Variable>) -> Result<Self, EquivError> {
        check_vars(&universe, program.input_vars(), "program")?;
        if !program.mentions(&accept) && !universe.contains(&accept) {
            return Err(ProgramError::UnknownVariable(accept).into());
        }
        Ok(Recognizer {
            universe,
            kind: Kind::Program(program, accept),
        })
    }

    pub fn automaton(automaton: Automaton, universe: Vec<Variable>) -> Result<Self, EquivError> {
        if !automaton.is_acceptor() {
            return Err(AutomataError::NotAnAcceptor.into());
        }
        let r = reading(automaton.inputs(), &universe, "automaton")?;
        Ok(Recognizer {
            universe,
            kind: Kind::Automaton(automaton, r),
        })
    }

    pub fn cascade(cascade: Cascade, universe: Vec<Variable>) -> Result<Self, EquivError> {
        if cascade.outputs().accepting_letter().is_none() {
            return Err(AutomataError::NotAnAcceptor.into());
        }
        let r = reading(cascade.external(), &universe, "cascade")?;
        Ok(Recognizer {
            universe,
            kind: Kind::Cascade(cascade, r),
        })
    }

    pub fn universe(&self) -> &[Variable] {
        &self.universe
    }

    fn word(&self, trace: &Trace, r: &Reading) -> Vec<usize> {
        match r {
            Reading::Named(vars) => trace.letters_over(vars),
            Reading::Positional => trace.letters_over(&self.universe),
        }
    }

    /// Acceptance of a non-empty trace: the value at its last step.
    pub fn accepts(&self, trace: &Trace) -> Result<bool, EquivError> {
        Ok(match &self.kind {
            Kind::Formula(f) => recognizes(f, trace),
            Kind::Program(p, accept) => eval_program(p, trace, trace.len(), &Formula::Atom(accept.clone()))?,
            Kind::Automaton(a, r) => a.accepts(&self.word(trace, r))?,
            Kind::Cascade(c, r) => c.accepts(&self.word(trace, r))?,
        })
    }
}

/// `(2^m)^1 + .. + (2^m)^max_len`, or `None` on overflow.
pub fn trace_count(vars: usize, max_len: usize) -> Option<u64> {
    let k = 1u64.checked_shl(vars as u32)?;
    let mut total = 0u64;
    let mut layer = 1u64;
    for _ in 0..max_len {
        layer = layer.checked_mul(k)?;
        total = total.checked_add(layer)?;
    }
    Some(total)
}

fn check_budget(vars: usize, max_len: usize, budget: u64) -> Result<u64, EquivError> {
    if max_len == 0 {
        return Err(EquivError::ZeroLength);
    }
    match trace_count(vars, max_len) {
        Some(n) if n <= budget => Ok(n),
        n => Err(EquivError::BudgetExceeded {
            needed: n.unwrap_or(u64::MAX),
            budget,
        }),
    }
}

/// Every trace over `universe` of length `1..=max_len` in shortlex order:
/// by length, then by letters with the first step most significant.
pub fn traces_up_to(universe: &[Variable], max_len: usize) -> impl Iterator<Item = Trace> + '_ {
    let k = 1usize << universe.len();
    (1..=max_len).flat_map(move |len| {
        let total = k.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut letters = vec![0; len];
            for slot in letters.iter_mut().rev() {
                *slot = code % k;
                code /= k;
            }
            Trace::from_letters(universe, &letters).expect("non-empty")
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    EqualUpTo(usize),
    Counterexample,
}

#[derive(Debug, Clone)]
pub struct EquivReport {
    pub verdict: Verdict,
    pub counterexample: Option<Trace>,
    /// Whether the left recognizer accepts the counterexample.
    pub left_accepts: Option<bool>,
    pub checked: u64,
    pub elapsed: Duration,
}

impl EquivReport {
    pub fn is_equal(&self) -> bool {
        matches!(self.verdict, Verdict::EqualUpTo(_))
    }
}

impl fmt::Display for EquivReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.verdict, &self.counterexample) {
            (Verdict::EqualUpTo(l), _) => write!(f, "equal on all {} traces up to length {l}", self.checked),
            (Verdict::Counterexample, Some(t)) => {
                let side = if self.left_accepts == Some(true) { "left" } else { "right" };
                write!(f, "counterexample {t} (accepted by {side} only)")
            }
            (Verdict::Counterexample, None) => write!(f, "counterexample"),
        }
    }
}

fn same_universe(a: &Recognizer, b: &Recognizer) -> Result<(), EquivError> {
    let set = |r: &Recognizer| r.universe.iter().cloned().collect::<HashSet<_>>();
    if set(a) != set(b) || a.universe.len() != b.universe.len() {
        let show = |r: &Recognizer| r.universe.iter().map(|v| v.name()).collect::<Vec<_>>().join(",");
        return Err(EquivError::UniverseMismatch {
            left: show(a),
            right: show(b),
        });
    }
    Ok(())
}

pub fn bounded_equiv(left: &Recognizer, right: &Recognizer, max_len: usize) -> Result<EquivReport, EquivError> {
    bounded_equiv_with_budget(left, right, max_len, DEFAULT_BUDGET)
}

/// Compares acceptance on every trace up to `max_len`, stopping at the first
/// difference in shortlex order.
pub fn bounded_equiv_with_budget(
    left: &Recognizer,
    right: &Recognizer,
    max_len: usize,
    budget: u64,
) -> Result<EquivReport, EquivError> {
    same_universe(left, right)?;
    check_budget(left.universe.len(), max_len, budget)?;
    let start = Instant::now();
    let mut checked = 0;
    for trace in traces_up_to(&left.universe, max_len) {
        checked += 1;
        let (a, b) = (left.accepts(&trace)?, right.accepts(&trace)?);
        if a != b {
            // re-verify before reporting
            assert_ne!(left.accepts(&trace)?, right.accepts(&trace)?);
            return Ok(EquivReport {
                verdict: Verdict::Counterexample,
                counterexample: Some(trace),
                left_accepts: Some(a),
                checked,
                elapsed: start.elapsed(),
            });
        }
    }
    Ok(EquivReport {
        verdict: Verdict::EqualUpTo(max_len),
        counterexample: None,
        left_accepts: None,
        checked,
        elapsed: start.elapsed(),
    })
}

/// The accepted traces of length `1..=max_len`, in shortlex order.
pub fn enumerate_language(r: &Recognizer, max_len: usize, budget: u64) -> Result<Vec<Trace>, EquivError> {
    check_budget(r.universe.len(), max_len, budget)?;
    let mut out = Vec::new();
    for t in traces_up_to(&r.universe, max_len) {
        if r.accepts(&t)? {
            out.push(t);
        }
    }
    Ok(out)
}

/// Acceptance over every trace up to a length, one bit per trace in
/// shortlex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Behaviour(Vec<u64>);

/// Shortlex indexing of all traces of length `1..=max_len`.
struct TraceIndex {
    vars: usize,
    letters: usize,
    /// `offsets[l]`: index of the first trace of length `l + 1`.
    offsets: Vec<usize>,
    total: usize,
}

impl TraceIndex {
    fn new(vars: usize, max_len: usize) -> Self {
        let letters = 1usize << vars;
        let mut offsets = Vec::with_capacity(max_len);
        let mut total = 0;
        for l in 1..=max_len {
            offsets.push(total);
            total += letters.pow(l as u32);
        }
        TraceIndex {
            vars,
            letters,
            offsets,
            total,
        }
    }

    fn words(&self) -> usize {
        self.total.div_ceil(64)
    }

    fn empty(&self) -> Behaviour {
        Behaviour(vec![0; self.words()])
    }

    fn full(&self) -> Behaviour {
        let mut b = Behaviour(vec![u64::MAX; self.words()]);
        let extra = self.words() * 64 - self.total;
        if extra > 0 {
            *b.0.last_mut().expect("non-empty") >>= extra;
        }
        b
    }

    fn get(b: &Behaviour, i: usize) -> bool {
        b.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(b: &mut Behaviour, i: usize) {
        b.0[i / 64] |= 1 << (i % 64);
    }

    /// `(index, parent index, last letter)` for every trace, shortlex.
    fn each(&self) -> impl Iterator<Item = (usize, Option<usize>, usize)> + '_ {
        self.offsets.iter().enumerate().flat_map(move |(l, &off)| {
            let count = self.letters.pow(l as u32 + 1);
            (0..count).map(move |code| {
                let parent = (l > 0).then(|| self.offsets[l - 1] + code / self.letters);
                (off + code, parent, code % self.letters)
            })
        })
    }

    fn atom(&self, i: usize) -> Behaviour {
        let mut b = self.empty();
        for (w, _, letter) in self.each() {
            if bit_of(letter, self.vars, i) {
                Self::set(&mut b, w);
            }
        }
        b
    }

    fn not(&self, a: &Behaviour) -> Behaviour {
        let full = self.full();
        Behaviour(a.0.iter().zip(&full.0).map(|(x, m)| !x & m).collect())
    }

    fn and(a: &Behaviour, b: &Behaviour) -> Behaviour {
        Behaviour(a.0.iter().zip(&b.0).map(|(x, y)| x & y).collect())
    }

    fn or(a: &Behaviour, b: &Behaviour) -> Behaviour {
        Behaviour(a.0.iter().zip(&b.0).map(|(x, y)| x | y).collect())
    }

    fn before(&self, a: &Behaviour) -> Behaviour {
        let mut b = self.empty();
        for (w, parent, _) in self.each() {
            if parent.is_some_and(|p| Self::get(a, p)) {
                Self::set(&mut b, w);
            }
        }
        b
    }

    /// Parents precede children in shortlex order, so one pass suffices.
    fn since(&self, l: &Behaviour, r: &Behaviour) -> Behaviour {
        let mut b = self.empty();
        for (w, parent, _) in self.each() {
            if Self::get(r, w) || (Self::get(l, w) && parent.is_some_and(|p| Self::get(&b, p))) {
                Self::set(&mut b, w);
            }
        }
        b
    }
}

#[derive(Debug, Clone)]
pub struct NonexpressibilityReport {
    /// A formula matching the target, if one was found.
    pub found: Option<Formula>,
    /// Formulas built, before discarding repeated behaviours.
    pub formulas_checked: u64,
    /// Distinct behaviours among them.
    pub behaviours: usize,
    pub elapsed: Duration,
}

/// Searches formulas over `universe` of size at most `max_size` for one that
/// agrees with `target` on every trace up to `max_len`.
///
/// Formulas are built by increasing size; commutative arguments are taken
/// in one order only and a formula is dropped when an earlier one already
/// has its behaviour. Since the behaviour of a formula determines that of
/// every formula built on it, the search stays exhaustive. A `None` result
/// is evidence of non-expressibility up to these bounds, not a proof.
pub fn bounded_nonexpressibility(
    target: &Recognizer,
    universe: &[Variable],
    max_size: usize,
    max_len: usize,
    budget: u64,
) -> Result<NonexpressibilityReport, EquivError> {
    let start = Instant::now();
    check_budget(universe.len(), max_len, budget)?;
    let idx = TraceIndex::new(universe.len(), max_len);
    let mut goal = idx.empty();
    for (w, t) in traces_up_to(universe, max_len).enumerate() {
        if target.accepts(&t)? {
            TraceIndex::set(&mut goal, w);
        }
    }

    let mut seen: HashSet<Behaviour> = HashSet::new();
    let mut levels: Vec<Vec<(Formula, Behaviour)>> = vec![Vec::new()];
    let mut checked = 0u64;
    let report = |found: Option<Formula>, checked: u64, seen: &HashSet<Behaviour>| NonexpressibilityReport {
        found,
        formulas_checked: checked,
        behaviours: seen.len(),
        elapsed: start.elapsed(),
    };

    for size in 1..=max_size {
        let mut level: Vec<(Formula, Behaviour)> = Vec::new();
        let mut candidates: Vec<(Formula, Behaviour)> = Vec::new();
        if size == 1 {
            candidates.push((Formula::Top, idx.full()));
            candidates.push((Formula::Bot, idx.empty()));
            for (i, v) in universe.iter().enumerate() {
                candidates.push((Formula::Atom(v.clone()), idx.atom(i)));
            }
        }
        for (f, b) in &levels[size - 1] {
            if !matches!(f, Formula::Not(_)) {
                candidates.push((Formula::not(f.clone()), idx.not(b)));
            }
            candidates.push((Formula::before(f.clone()), idx.before(b)));
            candidates.push((Formula::once(f.clone()), idx.since(&idx.full(), b)));
            let hist = idx.not(&idx.since(&idx.full(), &idx.not(b)));
            candidates.push((Formula::hist(f.clone()), hist));
        }
        for ls in 1..size.saturating_sub(1) {
            let rs = size - 1 - ls;
            for (i, (lf, lb)) in levels[ls].iter().enumerate() {
                for (j, (rf, rb)) in levels[rs].iter().enumerate() {
                    if (ls, i) <= (rs, j) {
                        candidates.push((Formula::and(lf.clone(), rf.clone()), TraceIndex::and(lb, rb)));
                        candidates.push((Formula::or(lf.clone(), rf.clone()), TraceIndex::or(lb, rb)));
                    }
                    candidates.push((Formula::since(lf.clone(), rf.clone()), idx.since(lb, rb)));
                }
            }
        }
        for (f, b) in candidates {
            checked += 1;
            if checked > budget {
                return Err(EquivError::BudgetExceeded { needed: checked, budget });
            }
            if b == goal {
                return Ok(report(Some(f), checked, &seen));
            }
            if seen.insert(b.clone()) {
                level.push((f, b));
            }
        }
        levels.push(level);
    }
    Ok(report(None, checked, &seen))
}

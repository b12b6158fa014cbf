//! Built-in operator automata and the registry used by dynamic rules.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::automata::{canonical_counter, canonical_flip_flop, compose, Alphabet, InputFunction, Semiautomaton};
use crate::trace::bit_of;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("operator `{0}` is already defined")]
    DuplicateName(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("arity error: {0}")]
    ArityError(String),
    #[error("invalid operator automaton: {0}")]
    Invalid(String),
}

/// A semiautomaton on `B^m` with states `1..=n` and an initial state.
///
/// Internally states are 0-based; the JSON form and [`fmt::Display`] use the
/// 1-based numbering of programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorAutomaton {
    pub arity: usize,
    pub init: usize,
    /// `delta[q][letter]`, letters indexed by binary value, first argument most significant.
    pub delta: Vec<Vec<usize>>,
}

impl OperatorAutomaton {
    pub fn new(arity: usize, init: usize, delta: Vec<Vec<usize>>) -> Result<Self, OperatorError> {
        let n = delta.len();
        if n == 0 {
            return Err(OperatorError::Invalid("no states".into()));
        }
        if init >= n {
            return Err(OperatorError::Invalid(format!("initial state {} out of range", init + 1)));
        }
        if arity > 16 {
            return Err(OperatorError::ArityError(format!("input arity {arity} is too large")));
        }
        for row in &delta {
            if row.len() != 1 << arity || row.iter().any(|&q| q >= n) {
                return Err(OperatorError::Invalid("transition table is not total over B^m x [1,n]".into()));
            }
        }
        Ok(OperatorAutomaton { arity, init, delta })
    }

    /// Number of states, which is also the number of heads.
    pub fn n_states(&self) -> usize {
        self.delta.len()
    }

    pub fn step(&self, q: usize, letter: usize) -> usize {
        self.delta[q][letter]
    }

    pub fn to_semiautomaton(&self) -> Semiautomaton {
        Semiautomaton::numbered(Alphabet::anonymous_bits(self.arity), self.delta.clone()).expect("validated")
    }

    pub fn to_json(&self) -> Value {
        let delta: Vec<Vec<usize>> = self.delta.iter().map(|r| r.iter().map(|q| q + 1).collect()).collect();
        serde_json::json!({
            "inputs": self.arity,
            "states": self.n_states(),
            "init": self.init + 1,
            "delta": delta,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, OperatorError> {
        #[derive(Deserialize)]
        struct Repr {
            inputs: usize,
            states: usize,
            init: usize,
            delta: Vec<Vec<usize>>,
        }
        let r: Repr = serde_json::from_value(v.clone()).map_err(|e| OperatorError::Invalid(e.to_string()))?;
        if r.delta.len() != r.states {
            return Err(OperatorError::Invalid(format!("{} rows for {} states", r.delta.len(), r.states)));
        }
        let one_based = |q: usize| q.checked_sub(1).ok_or_else(|| OperatorError::Invalid("states are numbered from 1".into()));
        let delta = r
            .delta
            .iter()
            .map(|row| row.iter().map(|&q| one_based(q)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(r.inputs, one_based(r.init)?, delta)
    }
}

impl fmt::Display for OperatorAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Reading of the counter increment when the formula and its gloss disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CounterConvention {
    /// `j = min({1} ∪ {k | b_k = 1})`, so `j` is 0 or 1.
    #[default]
    Literal,
    /// `j` is the least `k` with `b_k = 1`, or 0 when no bit is set.
    Intent,
}

impl FromStr for CounterConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "literal" => Ok(CounterConvention::Literal),
            "intent" => Ok(CounterConvention::Intent),
            _ => Err(format!("unknown counter convention `{s}` (expected literal or intent)")),
        }
    }
}

impl fmt::Display for CounterConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CounterConvention::Literal => "literal",
            CounterConvention::Intent => "intent",
        })
    }
}

/// `F`: `00` reads, `01` resets to 1, `10` and `11` set to 2.
pub fn flip_flop_operator() -> OperatorAutomaton {
    OperatorAutomaton::new(2, 0, vec![vec![0, 0, 1, 1], vec![1, 0, 1, 1]]).expect("well-formed")
}

/// `S`: `10` keeps, `01` and `11` go to 2, `00` goes to 1.
pub fn since_operator() -> OperatorAutomaton {
    OperatorAutomaton::new(2, 0, vec![vec![0, 1, 0, 1], vec![0, 1, 1, 1]]).expect("well-formed")
}

/// The increment of `C_n` on a letter of `B^n`.
pub fn counter_increment(letter: usize, n: usize, convention: CounterConvention) -> usize {
    let first = (0..n).find(|&k| bit_of(letter, n, k));
    match convention {
        CounterConvention::Literal => first.map_or(1, |k| k.min(1)),
        CounterConvention::Intent => first.unwrap_or(0),
    }
}

pub fn counter_operator(n: usize, convention: CounterConvention) -> Result<OperatorAutomaton, OperatorError> {
    if n < 2 {
        return Err(OperatorError::ArityError(format!("C{n}: counters need n >= 2")));
    }
    let delta = (0..n)
        .map(|i| (0..1usize << n).map(|l| (i + counter_increment(l, n, convention)) % n).collect())
        .collect();
    OperatorAutomaton::new(n, 0, delta)
}

pub fn simplified_counter_operator(n: usize) -> Result<OperatorAutomaton, OperatorError> {
    if n < 2 {
        return Err(OperatorError::ArityError(format!("Cs{n}: counters need n >= 2")));
    }
    OperatorAutomaton::new(1, 0, (0..n).map(|i| vec![i, (i + 1) % n]).collect())
}

/// `P = Cs2`; head 1 means the argument has been true an even number of times.
pub fn parity_operator() -> OperatorAutomaton {
    simplified_counter_operator(2).expect("n = 2")
}

/// `O f` as a one-argument operator: state 2 once the argument has held. Not registered.
pub fn once_operator() -> OperatorAutomaton {
    OperatorAutomaton::new(1, 0, vec![vec![0, 1], vec![1, 1]]).expect("well-formed")
}

/// `H f` as a one-argument operator: state 2 once the argument has failed. Not registered.
pub fn historically_operator() -> OperatorAutomaton {
    OperatorAutomaton::new(1, 0, vec![vec![1, 0], vec![1, 1]]).expect("well-formed")
}

/// An input function together with the semiautomaton it feeds.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub phi: InputFunction,
    pub core: Semiautomaton,
}

impl Factorization {
    /// The composed semiautomaton over the operator's bit alphabet.
    pub fn composed(&self, arity: usize) -> Semiautomaton {
        compose(&self.phi, &self.core, Alphabet::anonymous_bits(arity)).expect("factorization is well-typed")
    }
}

/// `00 -> read, 01 -> reset, 10 -> set, 11 -> set` onto the canonical flip-flop.
pub fn sr_latch_input_function() -> InputFunction {
    InputFunction::new(vec![2, 1, 0, 0], 3).expect("valid")
}

/// `00 -> reset, 01 -> set, 10 -> read, 11 -> set` onto the canonical flip-flop.
pub fn since_input_function() -> InputFunction {
    InputFunction::new(vec![1, 0, 2, 0], 3).expect("valid")
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Builtin {
    F,
    S,
    P,
    C(usize),
    Cs(usize),
}

fn builtin(name: &str) -> Option<Result<Builtin, OperatorError>> {
    let numeric = |rest: &str| -> Option<Result<usize, OperatorError>> {
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        Some(
            rest.parse::<usize>()
                .ok()
                .filter(|&n| n >= 2)
                .ok_or_else(|| OperatorError::ArityError(format!("{name}: counters need n >= 2"))),
        )
    };
    match name {
        "F" => Some(Ok(Builtin::F)),
        "S" => Some(Ok(Builtin::S)),
        "P" => Some(Ok(Builtin::P)),
        _ => {
            if let Some(rest) = name.strip_prefix("Cs") {
                numeric(rest).map(|r| r.map(Builtin::Cs))
            } else if let Some(rest) = name.strip_prefix('C') {
                numeric(rest).map(|r| r.map(Builtin::C))
            } else {
                None
            }
        }
    }
}

/// Name-to-operator map. `F`, `S`, `P` and every `C<n>`, `Cs<n>` with
/// `n >= 2` are built in and cannot be redefined.
#[derive(Debug, Clone, Default)]
pub struct OperatorRegistry {
    custom: BTreeMap<String, OperatorAutomaton>,
    convention: CounterConvention,
}

impl OperatorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_convention(convention: CounterConvention) -> Self {
        OperatorRegistry {
            custom: BTreeMap::new(),
            convention,
        }
    }

    pub fn convention(&self) -> CounterConvention {
        self.convention
    }

    pub fn register(&mut self, name: &str, op: OperatorAutomaton) -> Result<(), OperatorError> {
        if builtin(name).is_some() || self.custom.contains_key(name) {
            return Err(OperatorError::DuplicateName(name.to_string()));
        }
        self.custom.insert(name.to_string(), op);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Result<OperatorAutomaton, OperatorError> {
        match builtin(name) {
            Some(b) => Ok(match b? {
                Builtin::F => flip_flop_operator(),
                Builtin::S => since_operator(),
                Builtin::P => parity_operator(),
                Builtin::C(n) => counter_operator(n, self.convention)?,
                Builtin::Cs(n) => simplified_counter_operator(n)?,
            }),
            None => self
                .custom
                .get(name)
                .cloned()
                .ok_or_else(|| OperatorError::UnknownOperator(name.to_string())),
        }
    }

    /// Names of the fixed built-ins followed by registered ones.
    pub fn names(&self) -> Vec<String> {
        ["F", "S", "P", "C<n>", "Cs<n>"]
            .iter()
            .map(|s| s.to_string())
            .chain(self.custom.keys().cloned())
            .collect()
    }

    /// The known factorization of a built-in through a canonical semiautomaton.
    pub fn factorization(&self, name: &str) -> Option<Factorization> {
        let b = builtin(name)?.ok()?;
        Some(match b {
            Builtin::F => Factorization {
                phi: sr_latch_input_function(),
                core: canonical_flip_flop(),
            },
            Builtin::S => Factorization {
                phi: since_input_function(),
                core: canonical_flip_flop(),
            },
            Builtin::P => Factorization {
                phi: InputFunction::identity(2),
                core: parity_operator().to_semiautomaton(),
            },
            Builtin::Cs(n) => Factorization {
                phi: InputFunction::identity(2),
                core: simplified_counter_operator(n).ok()?.to_semiautomaton(),
            },
            Builtin::C(n) => Factorization {
                phi: InputFunction::new(
                    (0..1usize << n).map(|l| counter_increment(l, n, self.convention) % n).collect(),
                    n,
                )
                .ok()?,
                core: canonical_counter(n),
            },
        })
    }
}

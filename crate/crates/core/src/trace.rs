//! Ground types shared by every evaluator: variables, assignments, bit
//! alphabets and finite traces.
//!
//! Time is 1-based throughout the crate. A trace `I = I_1, ..., I_l` has
//! `l >= 1` steps and step `t` is addressed as `trace.step(t)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Separator reserved for generated names (`<base>$k`).
pub const GENERATED_SEPARATOR: char = '$';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("empty trace: a trace has at least one step")]
    EmptyTrace,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

/// A propositional variable.
///
/// User-facing names match `[a-zA-Z_][a-zA-Z0-9_']*`. Names produced by the
/// compilers additionally contain `$`, which user input may not use, so the
/// two namespaces never collide.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Result<Self, TraceError> {
        if is_user_name(name) {
            Ok(Variable(Arc::from(name)))
        } else {
            Err(TraceError::InvalidName(name.to_string()))
        }
    }

    /// Accepts both user names and generated `<base>$k` names.
    pub fn new_lenient(name: &str) -> Result<Self, TraceError> {
        let ok = name.split(GENERATED_SEPARATOR).enumerate().all(|(i, part)| {
            if i == 0 {
                is_user_name(part)
            } else {
                !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            }
        });
        if ok {
            Ok(Variable(Arc::from(name)))
        } else {
            Err(TraceError::InvalidName(name.to_string()))
        }
    }

    /// A generated name `<base>$<k>`.
    pub fn generated(base: &str, k: usize) -> Self {
        let base = base.split(GENERATED_SEPARATOR).next().unwrap_or("v");
        Variable(Arc::from(format!("{base}{GENERATED_SEPARATOR}{k}")))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_generated(&self) -> bool {
        self.0.contains(GENERATED_SEPARATOR)
    }
}

fn is_user_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Variable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Variable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Variable::new_lenient(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses a comma separated list of variable names, e.g. `a,b,c`.
pub fn parse_variable_list(text: &str) -> Result<Vec<Variable>, TraceError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Variable::new)
        .collect()
}

/// The alphabet `B^m` of bit-vectors over an ordered list of variables.
///
/// Letters are indexed by their binary value with the first variable as the
/// most significant bit, so the letter written `10` over `(a, b)` has index 2
/// and assigns `a = 1, b = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitAlphabet {
    pub vars: Vec<Variable>,
}

impl BitAlphabet {
    pub fn new(vars: Vec<Variable>) -> Self {
        BitAlphabet { vars }
    }

    /// `m` placeholder variables `x$1 .. x$m`.
    pub fn anonymous(arity: usize) -> Self {
        BitAlphabet {
            vars: (1..=arity).map(|k| Variable::generated("x", k)).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        1usize << self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bit `i` (0-based variable position) of `letter`.
    pub fn bit(&self, letter: usize, i: usize) -> bool {
        bit_of(letter, self.arity(), i)
    }

    pub fn letter_name(&self, letter: usize) -> String {
        letter_bits(letter, self.arity())
    }
}

/// Bit at position `i` of a letter of arity `arity`, first position most significant.
pub fn bit_of(letter: usize, arity: usize, i: usize) -> bool {
    (letter >> (arity - 1 - i)) & 1 == 1
}

/// Letter value of a bit-vector, first bit most significant.
pub fn letter_of_bits(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// `0`/`1` rendering of a letter, e.g. `10`.
pub fn letter_bits(letter: usize, arity: usize) -> String {
    (0..arity)
        .map(|i| if bit_of(letter, arity, i) { '1' } else { '0' })
        .collect()
}

/// An assignment of truth values to an ordered list of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub over: Vec<Variable>,
    pub bits: Vec<bool>,
}

impl Assignment {
    pub fn from_letter(over: &[Variable], letter: usize) -> Self {
        let bits = (0..over.len()).map(|i| bit_of(letter, over.len(), i)).collect();
        Assignment {
            over: over.to_vec(),
            bits,
        }
    }

    pub fn letter(&self) -> usize {
        letter_of_bits(&self.bits)
    }

    pub fn get(&self, var: &Variable) -> Option<bool> {
        self.over.iter().position(|v| v == var).map(|i| self.bits[i])
    }

    /// The variables assigned true.
    pub fn true_vars(&self) -> BTreeSet<Variable> {
        self.over
            .iter()
            .zip(&self.bits)
            .filter(|(_, b)| **b)
            .map(|(v, _)| v.clone())
            .collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Bit `i` is 1 iff `over[i]` is in `step`.
pub fn assignment_of(step: &BTreeSet<Variable>, over: &[Variable]) -> Assignment {
    Assignment {
        over: over.to_vec(),
        bits: over.iter().map(|v| step.contains(v)).collect(),
    }
}

/// Anything that can answer "is `var` true at time `t`" for `t` in `1..=len`.
pub trait Interpretation {
    fn len(&self) -> usize;
    fn holds(&self, t: usize, var: &Variable) -> bool;
}

/// A finite non-empty sequence of variable sets over a declared universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    universe: Vec<Variable>,
    steps: Vec<BTreeSet<Variable>>,
}

impl Trace {
    pub fn new(universe: Vec<Variable>, steps: Vec<BTreeSet<Variable>>) -> Result<Self, TraceError> {
        if steps.is_empty() {
            return Err(TraceError::EmptyTrace);
        }
        for step in &steps {
            if let Some(v) = step.iter().find(|v| !universe.contains(v)) {
                return Err(TraceError::UnknownVariable(v.to_string()));
            }
        }
        Ok(Trace { universe, steps })
    }

    /// Builds a trace from letter values over the universe (first variable most significant).
    pub fn from_letters(universe: &[Variable], letters: &[usize]) -> Result<Self, TraceError> {
        let steps = letters
            .iter()
            .map(|&l| Assignment::from_letter(universe, l).true_vars())
            .collect();
        Trace::new(universe.to_vec(), steps)
    }

    pub fn universe(&self) -> &[Variable] {
        &self.universe
    }

    pub fn steps(&self) -> &[BTreeSet<Variable>] {
        &self.steps
    }

    /// Step `t`, 1-based.
    pub fn step(&self, t: usize) -> &BTreeSet<Variable> {
        &self.steps[t - 1]
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Letter values over `over`, one per step.
    pub fn letters_over(&self, over: &[Variable]) -> Vec<usize> {
        self.steps.iter().map(|s| assignment_of(s, over).letter()).collect()
    }

    pub fn letters(&self) -> Vec<usize> {
        self.letters_over(&self.universe)
    }

    pub fn prefix(&self, t: usize) -> Trace {
        Trace {
            universe: self.universe.clone(),
            steps: self.steps[..t].to_vec(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.steps
                .iter()
                .map(|s| {
                    serde_json::Value::Array(
                        self.ordered(s).map(|v| serde_json::Value::String(v.to_string())).collect(),
                    )
                })
                .collect(),
        )
    }

    fn ordered<'a>(&'a self, step: &'a BTreeSet<Variable>) -> impl Iterator<Item = &'a Variable> + 'a {
        self.universe.iter().filter(move |v| step.contains(*v))
    }
}

impl Interpretation for Trace {
    fn len(&self) -> usize {
        self.steps.len()
    }

    fn holds(&self, t: usize, var: &Variable) -> bool {
        t >= 1 && t <= self.steps.len() && self.steps[t - 1].contains(var)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            f.write_str("{")?;
            for (j, v) in self.ordered(step).enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

/// Parses `{a}; {}; {a,b}` over `universe`. Whitespace is insignificant.
pub fn parse_trace(text: &str, universe: &[Variable]) -> Result<Trace, TraceError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut steps = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let syntax = |offset: usize, message: &str| TraceError::Syntax {
        offset,
        message: message.to_string(),
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(TraceError::EmptyTrace);
    }
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() || bytes[pos] != b'{' {
            return Err(syntax(pos, "expected `{`"));
        }
        pos += 1;
        let mut step = BTreeSet::new();
        loop {
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'}' {
                pos += 1;
                break;
            }
            let start = pos;
            while pos < bytes.len()
                && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_' || bytes[pos] == b'\'')
            {
                pos += 1;
            }
            if start == pos {
                return Err(syntax(pos, "expected a variable name or `}`"));
            }
            let name = &text[start..pos];
            let var = Variable::new(name).map_err(|_| syntax(start, "invalid variable name"))?;
            if !universe.contains(&var) {
                return Err(TraceError::UnknownVariable(name.to_string()));
            }
            step.insert(var);
            skip_ws(&mut pos);
            match bytes.get(pos) {
                Some(b',') => pos += 1,
                Some(b'}') => {}
                _ => return Err(syntax(pos, "expected `,` or `}`")),
            }
        }
        steps.push(step);
        skip_ws(&mut pos);
        match bytes.get(pos) {
            None => break,
            Some(b';') => pos += 1,
            Some(_) => return Err(syntax(pos, "expected `;` between steps")),
        }
    }
    Trace::new(universe.to_vec(), steps)
}

/// Parses the JSON encoding `[["a"],[],["a","b"]]`.
pub fn parse_trace_json(text: &str, universe: &[Variable]) -> Result<Trace, TraceError> {
    let raw: Vec<Vec<String>> = serde_json::from_str(text).map_err(|e| TraceError::Syntax {
        offset: e.column(),
        message: e.to_string(),
    })?;
    let mut steps = Vec::with_capacity(raw.len());
    for names in raw {
        let mut step = BTreeSet::new();
        for name in names {
            let var = Variable::new(&name)?;
            if !universe.contains(&var) {
                return Err(TraceError::UnknownVariable(name));
            }
            step.insert(var);
        }
        steps.push(step);
    }
    Trace::new(universe.to_vec(), steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(n).unwrap()).collect()
    }

    #[test]
    fn parses_three_steps() {
        let u = vars(&["a", "b"]);
        let t = parse_trace("{a}; {}; {a,b}", &u).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.step(1).contains(&u[0]));
        assert!(t.step(2).is_empty());
        assert_eq!(t.step(3).len(), 2);
    }

    #[test]
    fn single_empty_step_is_a_trace() {
        let t = parse_trace("{}", &vars(&["a"])).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.step(1).is_empty());
    }

    #[test]
    fn empty_text_is_empty_trace() {
        assert_eq!(parse_trace("", &vars(&["a"])), Err(TraceError::EmptyTrace));
        assert_eq!(parse_trace("   ", &vars(&["a"])), Err(TraceError::EmptyTrace));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let u = vars(&["a"]);
        assert_eq!(
            parse_trace("{a};{c}", &u),
            Err(TraceError::UnknownVariable("c".into()))
        );
        assert!(matches!(parse_trace("{a", &u), Err(TraceError::Syntax { .. })));
        assert!(matches!(parse_trace("{a} {a}", &u), Err(TraceError::Syntax { .. })));
        assert!(matches!(parse_trace("{a};", &u), Err(TraceError::Syntax { .. })));
    }

    #[test]
    fn json_encoding() {
        let u = vars(&["a", "b"]);
        let t = parse_trace_json(r#"[["a"],[],["a","b"]]"#, &u).unwrap();
        assert_eq!(t, parse_trace("{a};{};{a,b}", &u).unwrap());
        assert_eq!(t.to_json().to_string(), r#"[["a"],[],["a","b"]]"#);
        assert_eq!(parse_trace_json("[]", &u), Err(TraceError::EmptyTrace));
    }

    #[test]
    fn assignments_follow_declaration_order() {
        let ab = vars(&["a", "b"]);
        let step = |names: &[&str]| vars(names).into_iter().collect::<BTreeSet<_>>();
        assert_eq!(assignment_of(&step(&["a"]), &ab).to_string(), "10");
        assert_eq!(assignment_of(&step(&[]), &ab).to_string(), "00");
        assert_eq!(assignment_of(&step(&["b", "a"]), &ab).to_string(), "11");
        assert_eq!(assignment_of(&step(&["a"]), &ab).letter(), 2);
    }

    #[test]
    fn variable_names() {
        assert!(Variable::new("x'").is_ok());
        assert!(Variable::new("_a1").is_ok());
        assert!(Variable::new("1a").is_err());
        assert!(Variable::new("a$1").is_err());
        assert!(Variable::new_lenient("a$1").is_ok());
        assert!(Variable::generated("q", 3).is_generated());
    }

    proptest! {
        #[test]
        fn assignment_is_a_bijection(letter in 0usize..16) {
            let over = vars(&["a", "b", "c", "d"]);
            let a = Assignment::from_letter(&over, letter);
            prop_assert_eq!(assignment_of(&a.true_vars(), &over).letter(), letter);
        }

        #[test]
        fn trace_text_round_trips(letters in proptest::collection::vec(0usize..8, 1..8)) {
            let u = vars(&["a", "b", "c"]);
            let t = Trace::from_letters(&u, &letters).unwrap();
            let back = parse_trace(&t.to_string(), &u).unwrap();
            prop_assert_eq!(back.letters(), letters);
            prop_assert_eq!(back, t);
        }
    }
}

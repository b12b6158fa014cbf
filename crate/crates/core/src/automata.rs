//! Semiautomata and Mealy automata over explicit or bit-vector alphabets.

use std::fmt;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::trace::{letter_bits, BitAlphabet, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("letter `{0}` is not in the alphabet")]
    LetterNotInAlphabet(String),
    #[error("acceptance needs a non-empty input")]
    EmptyInput,
    #[error("automaton is not an acceptor (output alphabet must be {{0,1}})")]
    NotAnAcceptor,
    #[error("alphabet mismatch: expected {expected} letters, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },
    #[error("invalid automaton: {0}")]
    Invalid(String),
}

/// An input or output alphabet. Letters are indices; bit alphabets index a
/// letter by its binary value, first variable most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Alphabet {
    Named(Vec<String>),
    Bits(BitAlphabet),
}

impl Alphabet {
    pub fn named<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Alphabet::Named(names.into_iter().map(Into::into).collect())
    }

    pub fn bits(vars: Vec<Variable>) -> Self {
        Alphabet::Bits(BitAlphabet::new(vars))
    }

    pub fn anonymous_bits(arity: usize) -> Self {
        Alphabet::Bits(BitAlphabet::anonymous(arity))
    }

    /// The `{0,1}` alphabet of acceptors.
    pub fn boolean() -> Self {
        Alphabet::named(["0", "1"])
    }

    pub fn len(&self) -> usize {
        match self {
            Alphabet::Named(n) => n.len(),
            Alphabet::Bits(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn letter_name(&self, letter: usize) -> String {
        match self {
            Alphabet::Named(n) => n[letter].clone(),
            Alphabet::Bits(b) => letter_bits(letter, b.arity()),
        }
    }

    pub fn letter(&self, name: &str) -> Result<usize, AutomataError> {
        let missing = || AutomataError::LetterNotInAlphabet(name.to_string());
        match self {
            Alphabet::Named(n) => n.iter().position(|x| x == name).ok_or_else(missing),
            Alphabet::Bits(b) => {
                if name.len() != b.arity() || !name.bytes().all(|c| c == b'0' || c == b'1') {
                    return Err(missing());
                }
                Ok(name.bytes().fold(0, |acc, c| acc * 2 + usize::from(c == b'1')))
            }
        }
    }

    /// Parses a comma-separated word; blank text is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>, AutomataError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split(',').map(|s| self.letter(s.trim())).collect()
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(",")
    }

    /// Index of the accepting letter `1`, if this is the `{0,1}` alphabet.
    pub fn accepting_letter(&self) -> Option<usize> {
        match self {
            Alphabet::Bits(b) if b.arity() == 1 => Some(1),
            Alphabet::Named(n) if n.len() == 2 && n.iter().any(|x| x == "0") => n.iter().position(|x| x == "1"),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Alphabet::Named(n) => serde_json::json!(n),
            Alphabet::Bits(b) => {
                let names: Vec<&str> = b.vars.iter().map(Variable::name).collect();
                serde_json::json!({ "bits": names })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, AutomataError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Bits {
            Arity(usize),
            Names(Vec<String>),
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Named(Vec<String>),
            Bits { bits: Bits },
        }
        let repr: Repr = serde_json::from_value(v.clone()).map_err(|e| AutomataError::Invalid(format!("alphabet: {e}")))?;
        Ok(match repr {
            Repr::Named(n) => Alphabet::Named(n),
            Repr::Bits { bits: Bits::Arity(m) } => Alphabet::anonymous_bits(m),
            Repr::Bits { bits: Bits::Names(names) } => {
                let vars = names
                    .iter()
                    .map(|n| Variable::new_lenient(n))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| AutomataError::Invalid(e.to_string()))?;
                Alphabet::bits(vars)
            }
        })
    }
}

/// A state transformation `Q -> Q` as a table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transformation(pub Vec<usize>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformationKind {
    Identity,
    Permutation,
    Reset,
    Other,
}

impl Transformation {
    pub fn identity(n: usize) -> Self {
        Transformation((0..n).collect())
    }

    pub fn apply(&self, q: usize) -> usize {
        self.0[q]
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Transformation) -> Transformation {
        Transformation(self.0.iter().map(|&q| next.0[q]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &q)| i == q)
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        for &q in &self.0 {
            if std::mem::replace(&mut seen[q], true) {
                return false;
            }
        }
        true
    }

    /// Constant map.
    pub fn is_reset(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    pub fn kind(&self) -> TransformationKind {
        if self.is_identity() {
            TransformationKind::Identity
        } else if self.is_permutation() {
            TransformationKind::Permutation
        } else if self.is_reset() {
            TransformationKind::Reset
        } else {
            TransformationKind::Other
        }
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// A total map from external letters to internal letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFunction {
    pub map: Vec<usize>,
    pub codomain: usize,
}

impl InputFunction {
    pub fn new(map: Vec<usize>, codomain: usize) -> Result<Self, AutomataError> {
        if let Some(&bad) = map.iter().find(|&&p| p >= codomain) {
            return Err(AutomataError::Invalid(format!("input function maps to letter {bad} outside 0..{codomain}")));
        }
        Ok(InputFunction { map, codomain })
    }

    pub fn identity(n: usize) -> Self {
        InputFunction {
            map: (0..n).collect(),
            codomain: n,
        }
    }

    pub fn apply(&self, letter: usize) -> usize {
        self.map[letter]
    }

    pub fn domain_len(&self) -> usize {
        self.map.len()
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain];
        for &p in &self.map {
            hit[p] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semiautomaton {
    pub inputs: Alphabet,
    pub states: Vec<String>,
    /// `delta[q][letter]`.
    pub delta: Vec<Vec<usize>>,
}

impl Semiautomaton {
    pub fn new(inputs: Alphabet, states: Vec<String>, delta: Vec<Vec<usize>>) -> Result<Self, AutomataError> {
        check_table("delta", &delta, states.len(), inputs.len(), states.len())?;
        if states.is_empty() {
            return Err(AutomataError::Invalid("no states".into()));
        }
        Ok(Semiautomaton { inputs, states, delta })
    }

    /// States named `1..=n`.
    pub fn numbered(inputs: Alphabet, delta: Vec<Vec<usize>>) -> Result<Self, AutomataError> {
        let states = (1..=delta.len()).map(|i| i.to_string()).collect();
        Self::new(inputs, states, delta)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_letters(&self) -> usize {
        self.inputs.len()
    }

    pub fn step(&self, q: usize, letter: usize) -> usize {
        self.delta[q][letter]
    }

    pub fn is_trivial(&self) -> bool {
        self.states.len() == 1
    }

    pub fn state(&self, name: &str) -> Result<usize, AutomataError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| AutomataError::Invalid(format!("unknown state `{name}`")))
    }

    pub fn transformation(&self, letter: usize) -> Transformation {
        Transformation(self.delta.iter().map(|row| row[letter]).collect())
    }
}

/// One transformation per letter.
pub fn transformations_of(d: &Semiautomaton) -> Vec<(usize, Transformation)> {
    (0..d.n_letters()).map(|l| (l, d.transformation(l))).collect()
}

/// The distinct transformations of `d`, in order of first letter.
pub fn distinct_transformations(d: &Semiautomaton) -> Vec<Transformation> {
    let mut out: Vec<Transformation> = Vec::new();
    for (_, t) in transformations_of(d) {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// `delta_phi(q, sigma) = delta(q, phi(sigma))`, over the alphabet `over`.
pub fn compose(phi: &InputFunction, d: &Semiautomaton, over: Alphabet) -> Result<Semiautomaton, AutomataError> {
    if phi.codomain != d.n_letters() {
        return Err(AutomataError::AlphabetMismatch {
            expected: d.n_letters(),
            found: phi.codomain,
        });
    }
    if over.len() != phi.domain_len() {
        return Err(AutomataError::AlphabetMismatch {
            expected: phi.domain_len(),
            found: over.len(),
        });
    }
    let delta = d
        .delta
        .iter()
        .map(|row| phi.map.iter().map(|&p| row[p]).collect())
        .collect();
    Semiautomaton::new(over, d.states.clone(), delta)
}

/// A Mealy automaton: the output on letter `sigma` read in state `q` is `theta[q][sigma]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub semi: Semiautomaton,
    pub init: usize,
    pub outputs: Alphabet,
    pub theta: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub states: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl Automaton {
    pub fn new(semi: Semiautomaton, init: usize, outputs: Alphabet, theta: Vec<Vec<usize>>) -> Result<Self, AutomataError> {
        if init >= semi.n_states() {
            return Err(AutomataError::Invalid(format!("initial state {init} out of range")));
        }
        check_table("theta", &theta, semi.n_states(), semi.n_letters(), outputs.len())?;
        Ok(Automaton {
            semi,
            init,
            outputs,
            theta,
        })
    }

    /// Outputs the state it reads in: `theta(q, sigma) = q`.
    pub fn with_state_output(semi: Semiautomaton, init: usize) -> Result<Self, AutomataError> {
        let outputs = Alphabet::Named(semi.states.clone());
        let theta = (0..semi.n_states()).map(|q| vec![q; semi.n_letters()]).collect();
        Self::new(semi, init, outputs, theta)
    }

    /// Mealy form of a state-labelling output: `theta(q, sigma) = label(delta(q, sigma))`.
    pub fn moore(semi: Semiautomaton, init: usize, outputs: Alphabet, label: &[usize]) -> Result<Self, AutomataError> {
        if label.len() != semi.n_states() {
            return Err(AutomataError::Invalid("one label per state expected".into()));
        }
        let theta = semi
            .delta
            .iter()
            .map(|row| row.iter().map(|&q| label[q]).collect())
            .collect();
        Self::new(semi, init, outputs, theta)
    }

    /// Acceptor in Moore form, accepting after reaching a state of `accepting`.
    pub fn moore_acceptor(semi: Semiautomaton, init: usize, accepting: &[usize]) -> Result<Self, AutomataError> {
        let label: Vec<usize> = (0..semi.n_states()).map(|q| usize::from(accepting.contains(&q))).collect();
        Self::moore(semi, init, Alphabet::boolean(), &label)
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.semi.inputs
    }

    pub fn n_states(&self) -> usize {
        self.semi.n_states()
    }

    pub fn is_acceptor(&self) -> bool {
        self.outputs.accepting_letter().is_some()
    }

    pub fn run(&self, word: &[usize]) -> Result<Run, AutomataError> {
        let mut states = Vec::with_capacity(word.len() + 1);
        let mut outputs = Vec::with_capacity(word.len());
        let mut q = self.init;
        states.push(q);
        for &l in word {
            if l >= self.semi.n_letters() {
                return Err(AutomataError::LetterNotInAlphabet(l.to_string()));
            }
            outputs.push(self.theta[q][l]);
            q = self.semi.delta[q][l];
            states.push(q);
        }
        Ok(Run { states, outputs })
    }

    pub fn accepts(&self, word: &[usize]) -> Result<bool, AutomataError> {
        let yes = self.outputs.accepting_letter().ok_or(AutomataError::NotAnAcceptor)?;
        if word.is_empty() {
            return Err(AutomataError::EmptyInput);
        }
        Ok(*self.run(word)?.outputs.last().expect("non-empty") == yes)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "inputs": self.semi.inputs.to_json(),
            "states": self.semi.states,
            "init": self.semi.states[self.init],
            "delta": self.semi.delta,
            "outputs": self.outputs.to_json(),
            "theta": self.theta,
        })
    }

    /// Reads the JSON format. Without `outputs`/`theta` the automaton outputs its state.
    pub fn from_json(v: &Value) -> Result<Self, AutomataError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Init {
            Index(usize),
            Name(String),
        }
        #[derive(Deserialize)]
        struct Repr {
            inputs: Value,
            states: Vec<String>,
            init: Init,
            delta: Vec<Vec<usize>>,
            #[serde(default)]
            outputs: Option<Value>,
            #[serde(default)]
            theta: Option<Vec<Vec<usize>>>,
        }
        let r: Repr = serde_json::from_value(v.clone()).map_err(|e| AutomataError::Invalid(e.to_string()))?;
        let semi = Semiautomaton::new(Alphabet::from_json(&r.inputs)?, r.states, r.delta)?;
        let init = match r.init {
            Init::Index(i) => i,
            Init::Name(n) => semi.state(&n)?,
        };
        match (r.outputs, r.theta) {
            (Some(o), Some(theta)) => Self::new(semi, init, Alphabet::from_json(&o)?, theta),
            (None, None) => Self::with_state_output(semi, init),
            _ => Err(AutomataError::Invalid("`outputs` and `theta` go together".into())),
        }
    }
}

fn check_table(name: &str, table: &[Vec<usize>], rows: usize, cols: usize, bound: usize) -> Result<(), AutomataError> {
    if table.len() != rows {
        return Err(AutomataError::Invalid(format!("{name} has {} rows, expected {rows}", table.len())));
    }
    for (q, row) in table.iter().enumerate() {
        if row.len() != cols {
            return Err(AutomataError::Invalid(format!("{name} row {q} has {} entries, expected {cols}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&x| x >= bound) {
            return Err(AutomataError::Invalid(format!("{name} row {q} has entry {bad} outside 0..{bound}")));
        }
    }
    Ok(())
}

/// Letters `set`, `reset`, `read`; states `low`, `high`.
pub fn canonical_flip_flop() -> Semiautomaton {
    Semiautomaton::new(
        Alphabet::named(["set", "reset", "read"]),
        vec!["low".into(), "high".into()],
        vec![vec![1, 0, 0], vec![1, 0, 1]],
    )
    .expect("well-formed")
}

/// Outputs its pre-update state; starts `low`.
pub fn canonical_flip_flop_automaton() -> Automaton {
    Automaton::with_state_output(canonical_flip_flop(), 0).expect("well-formed")
}

/// `delta(i, j) = i + j mod n` over letters and states `0..n`.
pub fn canonical_counter(n: usize) -> Semiautomaton {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let delta = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    Semiautomaton::new(Alphabet::Named(names.clone()), names, delta).expect("well-formed")
}

pub fn canonical_counter_automaton(n: usize) -> Automaton {
    Automaton::with_state_output(canonical_counter(n), 0).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flip_flop_run() {
        let a = canonical_flip_flop_automaton();
        let w = a.inputs().parse_word("set,read,reset").unwrap();
        let r = a.run(&w).unwrap();
        let names: Vec<&str> = r.states.iter().map(|&q| a.semi.states[q].as_str()).collect();
        assert_eq!(names, ["low", "high", "high", "low"]);
        assert_eq!(a.run(&[]).unwrap(), Run { states: vec![0], outputs: vec![] });
    }

    #[test]
    fn counter_run() {
        let a = canonical_counter_automaton(3);
        assert_eq!(a.run(&[1, 2, 2]).unwrap().states, [0, 1, 0, 2]);
    }

    #[test]
    fn acceptance() {
        let high = Automaton::moore_acceptor(canonical_flip_flop(), 0, &[1]).unwrap();
        assert!(high.accepts(&[0, 2]).unwrap());
        assert!(!high.accepts(&[0, 2, 1]).unwrap());
        assert_eq!(high.accepts(&[]), Err(AutomataError::EmptyInput));
        assert_eq!(canonical_flip_flop_automaton().accepts(&[0]), Err(AutomataError::NotAnAcceptor));
        let even = Automaton::moore_acceptor(canonical_counter(2), 0, &[0]).unwrap();
        assert!(even.accepts(&[1, 1]).unwrap());
        assert!(!even.accepts(&[1, 0]).unwrap());
    }

    #[test]
    fn unknown_letters_are_rejected() {
        let a = canonical_flip_flop_automaton();
        assert!(matches!(a.inputs().parse_word("set,jump"), Err(AutomataError::LetterNotInAlphabet(_))));
        assert!(matches!(a.run(&[7]), Err(AutomataError::LetterNotInAlphabet(_))));
    }

    #[test]
    fn sr_latch_encoding() {
        // bit letters 00, 01, 10, 11 onto set=0, reset=1, read=2
        let phi = InputFunction::new(vec![2, 1, 0, 0], 3).unwrap();
        let core = compose(&phi, &canonical_flip_flop(), Alphabet::anonymous_bits(2)).unwrap();
        assert_eq!(core.delta, vec![vec![0, 0, 1, 1], vec![1, 0, 1, 1]]);
        assert!(phi.is_surjective());
        let bad = InputFunction::new(vec![0, 1], 2).unwrap();
        assert!(matches!(
            compose(&bad, &canonical_flip_flop(), Alphabet::anonymous_bits(1)),
            Err(AutomataError::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn transformation_sets() {
        let ff = distinct_transformations(&canonical_flip_flop());
        assert_eq!(ff.len(), 3);
        assert_eq!(ff.iter().filter(|t| t.kind() == TransformationKind::Reset).count(), 2);
        assert!(ff.iter().any(Transformation::is_identity));
        let c2 = distinct_transformations(&canonical_counter(2));
        assert_eq!(c2.len(), 2);
        assert!(c2.iter().all(Transformation::is_permutation));
        let trivial = Semiautomaton::numbered(Alphabet::anonymous_bits(1), vec![vec![0, 0]]).unwrap();
        assert_eq!(distinct_transformations(&trivial), vec![Transformation::identity(1)]);
    }

    #[test]
    fn moore_emulation() {
        let a = Automaton::moore(canonical_counter(2), 0, Alphabet::boolean(), &[1, 0]).unwrap();
        // output after reading is the label of the new state
        assert_eq!(a.run(&[1, 1, 0]).unwrap().outputs, [0, 1, 1]);
    }

    #[test]
    fn json_round_trip() {
        let a = Automaton::moore_acceptor(canonical_flip_flop(), 1, &[1]).unwrap();
        assert_eq!(Automaton::from_json(&a.to_json()).unwrap(), a);
        let v = serde_json::json!({"inputs": {"bits": 1}, "states": ["e", "o"], "init": "e", "delta": [[0, 1], [1, 0]]});
        let p = Automaton::from_json(&v).unwrap();
        assert_eq!(p.run(&[1, 1]).unwrap().states, [0, 1, 0]);
        let bad = serde_json::json!({"inputs": ["x"], "states": ["s"], "init": 0, "delta": [[3]]});
        assert!(Automaton::from_json(&bad).is_err());
    }

    fn arb_transformation(n: usize) -> impl Strategy<Value = Transformation> {
        proptest::collection::vec(0..n, n).prop_map(Transformation)
    }

    proptest! {
        #[test]
        fn reset_and_permutation_only_on_one_state(n in 1usize..5, seed in any::<u64>()) {
            let t = Transformation((0..n).map(|i| ((seed >> (i * 3)) as usize) % n).collect());
            if t.is_reset() && t.is_permutation() {
                prop_assert_eq!(n, 1);
            }
            if t.is_identity() {
                prop_assert!(t.is_permutation());
            }
        }

        #[test]
        fn identity_input_function_is_neutral(t0 in arb_transformation(3), t1 in arb_transformation(3)) {
            let d = Semiautomaton::numbered(Alphabet::anonymous_bits(1), (0..3).map(|q| vec![t0.0[q], t1.0[q]]).collect()).unwrap();
            let c = compose(&InputFunction::identity(2), &d, Alphabet::anonymous_bits(1)).unwrap();
            prop_assert_eq!(c, d);
        }

        #[test]
        fn run_lengths(word in proptest::collection::vec(0usize..3, 0..10)) {
            let r = canonical_flip_flop_automaton().run(&word).unwrap();
            prop_assert_eq!(r.states.len(), word.len() + 1);
            prop_assert_eq!(r.outputs.len(), word.len());
        }
    }
}

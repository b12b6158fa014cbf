//! Translations between formulas, programs, automata and cascades.

mod flipflop;
mod logic;
mod synth;
mod to_cascade;

use std::collections::HashSet;

use thiserror::Error;

use crate::automata::AutomataError;
use crate::cascades::{CascadeError, CascadeRun};
use crate::pltl::Formula;
use crate::programs::ProgramError;
use crate::trace::{bit_of, letter_of_bits, Variable};

pub use flipflop::{flipflop_automaton_to_pltl_program, FlipFlopAutomaton};
pub use logic::{formula_to_normal_program, pltl_to_program, unfold_program};
pub use synth::{automaton_to_program, automaton_to_program_named, cascade_to_program};
pub use to_cascade::{
    delay_rule_to_automaton, dynamic_rule_to_automaton, program_to_cascade, rule_to_automaton, static_rule_to_automaton,
};

/// Bit alphabets above this arity are refused.
pub const MAX_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("automaton alphabets must be bit-vectors")]
    NotBitAlphabet,
    #[error("operator `{0}` cannot be unfolded (only S can)")]
    UnsupportedOperator(String),
    #[error("only flip-flops starting low are supported")]
    UnsupportedInitialState,
    #[error("{bits} input bits exceed the limit of {MAX_BITS}")]
    TooManyBits { bits: usize },
    #[error("variable `{0}` is both read and defined")]
    NameClash(Variable),
    #[error("invalid flip-flop automaton: {0}")]
    InvalidFlipFlop(String),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// Which variables a cascade reads and which its components output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableWiring {
    /// External input bits, first most significant.
    pub inputs: Vec<Variable>,
    /// Output bits of each component.
    pub outputs: Vec<Vec<Variable>>,
}

impl VariableWiring {
    /// Component and bit position of `v`.
    pub fn locate(&self, v: &Variable) -> Option<(usize, usize)> {
        self.outputs
            .iter()
            .enumerate()
            .find_map(|(i, o)| o.iter().position(|x| x == v).map(|k| (i, k)))
    }

    /// Every output variable, component by component.
    pub fn output_vars(&self) -> Vec<Variable> {
        self.outputs.iter().flatten().cloned().collect()
    }

    /// Value of output variable `v` at step `t` (1-based) of a run.
    pub fn value(&self, run: &CascadeRun, v: &Variable, t: usize) -> Option<bool> {
        let (i, k) = self.locate(v)?;
        let g = *run.component_outputs[i].get(t.checked_sub(1)?)?;
        Some(bit_of(g, self.outputs[i].len(), k))
    }
}

/// Generates `<base>$k` names not used so far.
#[derive(Debug, Clone, Default)]
pub struct Fresh {
    used: HashSet<String>,
}

impl Fresh {
    pub fn new<'a>(taken: impl IntoIterator<Item = &'a Variable>) -> Self {
        Fresh {
            used: taken.into_iter().map(|v| v.name().to_string()).collect(),
        }
    }

    pub fn reserve(&mut self, v: &Variable) {
        self.used.insert(v.name().to_string());
    }

    pub fn is_used(&self, v: &Variable) -> bool {
        self.used.contains(v.name())
    }

    pub fn next(&mut self, base: &str) -> Variable {
        let base = base.split('$').next().unwrap_or(base);
        let v = (1..)
            .map(|k| Variable::generated(base, k))
            .find(|v| !self.used.contains(v.name()))
            .expect("unbounded");
        self.used.insert(v.name().to_string());
        v
    }
}

/// Truth table to formula: a disjunction of minterms over the variables the
/// function actually depends on, minterms in increasing letter order.
pub fn dnf(vars: &[Variable], truth: impl Fn(usize) -> bool) -> Formula {
    let m = vars.len();
    let table: Vec<bool> = (0..1usize << m).map(truth).collect();
    let essential: Vec<usize> = (0..m)
        .filter(|&i| {
            let flip = 1 << (m - 1 - i);
            (0..table.len()).any(|l| table[l] != table[l ^ flip])
        })
        .collect();
    let k = essential.len();
    let minterms = (0..1usize << k).filter_map(|sub| {
        // extend the sub-assignment with zeros on inessential bits
        let bits: Vec<bool> = (0..m)
            .map(|i| essential.iter().position(|&e| e == i).is_some_and(|p| bit_of(sub, k, p)))
            .collect();
        table[letter_of_bits(&bits)].then(|| {
            Formula::conjunction(essential.iter().enumerate().map(|(p, &i)| {
                let atom = Formula::Atom(vars[i].clone());
                if bit_of(sub, k, p) {
                    atom
                } else {
                    Formula::not(atom)
                }
            }))
        })
    });
    Formula::disjunction(minterms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::Variable;

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(n).unwrap()).collect()
    }

    #[test]
    fn dnf_keeps_essential_variables() {
        let v = vars(&["a", "b", "c"]);
        // a & !c, independent of b
        let f = dnf(&v, |l| bit_of(l, 3, 0) && !bit_of(l, 3, 2));
        assert_eq!(f.to_string(), "a & !c");
        assert_eq!(dnf(&v, |_| true), Formula::Top);
        assert_eq!(dnf(&v, |_| false), Formula::Bot);
        assert_eq!(dnf(&v, |l| bit_of(l, 3, 1) != bit_of(l, 3, 2)).to_string(), "!b & c | b & !c");
    }

    #[test]
    fn fresh_names_skip_taken_ones() {
        let taken = vars(&["a"]);
        let mut f = Fresh::new(&taken);
        f.reserve(&Variable::generated("q", 1));
        assert_eq!(f.next("q").name(), "q$2");
        assert_eq!(f.next("q$2").name(), "q$3");
        assert_eq!(f.next("a").name(), "a$1");
    }
}

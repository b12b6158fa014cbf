//! Automata cascades: wiring, execution and flattening.

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::automata::{Alphabet, AutomataError, Automaton, Semiautomaton};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CascadeError {
    #[error("component {component} reads {found} letters but its wiring provides {expected}")]
    WiringMismatch {
        component: usize,
        expected: usize,
        found: usize,
    },
    #[error("cascade has no components")]
    Empty,
    #[error("product has {size} states, over the cap of {cap}")]
    StateSpaceTooLarge { size: usize, cap: usize },
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// Components `A_1 .. A_d`; component `i` reads the external letter
/// together with the current outputs of components `1 .. i-1`.
///
/// The letter `<sigma, g_1, .., g_{i-1}>` has index
/// `((sigma * |G_1| + g_1) * |G_2| + g_2) ...`, external letter most
/// significant. On bit alphabets this is plain bit concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    external: Alphabet,
    components: Vec<Automaton>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeRun {
    /// Joint states `q_0 .. q_n`, one entry per component.
    pub states: Vec<Vec<usize>>,
    /// Outputs of the last component.
    pub outputs: Vec<usize>,
    /// `component_outputs[i][k]`: output of component `i` on letter `k + 1`.
    pub component_outputs: Vec<Vec<usize>>,
}

impl Cascade {
    pub fn new(external: Alphabet, components: Vec<Automaton>) -> Result<Self, CascadeError> {
        if components.is_empty() {
            return Err(CascadeError::Empty);
        }
        let mut expected = external.len();
        for (i, c) in components.iter().enumerate() {
            if c.inputs().len() != expected {
                return Err(CascadeError::WiringMismatch {
                    component: i + 1,
                    expected,
                    found: c.inputs().len(),
                });
            }
            expected *= c.outputs.len();
        }
        Ok(Cascade { external, components })
    }

    /// A cascade of semiautomata: every component outputs its own state.
    pub fn of_semiautomata(external: Alphabet, components: Vec<(Semiautomaton, usize)>) -> Result<Self, CascadeError> {
        let autos = components
            .into_iter()
            .map(|(d, init)| Automaton::with_state_output(d, init))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(external, autos)
    }

    pub fn external(&self) -> &Alphabet {
        &self.external
    }

    pub fn components(&self) -> &[Automaton] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn outputs(&self) -> &Alphabet {
        &self.components.last().expect("non-empty").outputs
    }

    /// Simple iff every component but the last outputs the state it reads in.
    pub fn is_simple(&self) -> bool {
        let d = self.components.len();
        self.components[..d - 1]
            .iter()
            .all(|c| c.theta.iter().enumerate().all(|(q, row)| row.iter().all(|&g| g == q)))
    }

    /// One step from joint state `q` on external letter `sigma`: the
    /// per-component outputs and the next joint state.
    pub fn step(&self, q: &[usize], sigma: usize) -> (Vec<usize>, Vec<usize>) {
        let mut letter = sigma;
        let mut outs = Vec::with_capacity(self.components.len());
        let mut next = Vec::with_capacity(self.components.len());
        for (c, &qi) in self.components.iter().zip(q) {
            let g = c.theta[qi][letter];
            next.push(c.semi.delta[qi][letter]);
            outs.push(g);
            letter = letter * c.outputs.len() + g;
        }
        (outs, next)
    }

    pub fn initial(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.init).collect()
    }

    pub fn run(&self, word: &[usize]) -> Result<CascadeRun, CascadeError> {
        let mut q = self.initial();
        let mut states = vec![q.clone()];
        let mut component_outputs = vec![Vec::with_capacity(word.len()); self.components.len()];
        for &sigma in word {
            if sigma >= self.external.len() {
                return Err(AutomataError::LetterNotInAlphabet(sigma.to_string()).into());
            }
            let (outs, next) = self.step(&q, sigma);
            for (i, g) in outs.into_iter().enumerate() {
                component_outputs[i].push(g);
            }
            q = next;
            states.push(q.clone());
        }
        Ok(CascadeRun {
            states,
            outputs: component_outputs.last().expect("non-empty").clone(),
            component_outputs,
        })
    }

    pub fn accepts(&self, word: &[usize]) -> Result<bool, CascadeError> {
        let yes = self.outputs().accepting_letter().ok_or(AutomataError::NotAnAcceptor)?;
        if word.is_empty() {
            return Err(AutomataError::EmptyInput.into());
        }
        Ok(*self.run(word)?.outputs.last().expect("non-empty") == yes)
    }

    pub fn product_size(&self) -> Option<usize> {
        self.components.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.n_states()))
    }

    pub fn flatten(&self) -> Result<Automaton, CascadeError> {
        self.flatten_capped(DEFAULT_STATE_CAP)
    }

    /// The product automaton on `Q_1 x .. x Q_d`, first component most significant.
    pub fn flatten_capped(&self, cap: usize) -> Result<Automaton, CascadeError> {
        let size = self.product_size().unwrap_or(usize::MAX);
        if size > cap {
            return Err(CascadeError::StateSpaceTooLarge { size, cap });
        }
        let radices: Vec<usize> = self.components.iter().map(Automaton::n_states).collect();
        let decode = |mut idx: usize| {
            let mut q = vec![0; radices.len()];
            for i in (0..radices.len()).rev() {
                q[i] = idx % radices[i];
                idx /= radices[i];
            }
            q
        };
        let encode = |q: &[usize]| q.iter().zip(&radices).fold(0, |acc, (&qi, &r)| acc * r + qi);
        let n_letters = self.external.len();
        let mut delta = Vec::with_capacity(size);
        let mut theta = Vec::with_capacity(size);
        let mut names = Vec::with_capacity(size);
        for idx in 0..size {
            let q = decode(idx);
            let parts: Vec<&str> = q
                .iter()
                .zip(&self.components)
                .map(|(&qi, c)| c.semi.states[qi].as_str())
                .collect();
            names.push(format!("({})", parts.join(",")));
            let mut drow = Vec::with_capacity(n_letters);
            let mut trow = Vec::with_capacity(n_letters);
            for sigma in 0..n_letters {
                let (outs, next) = self.step(&q, sigma);
                drow.push(encode(&next));
                trow.push(*outs.last().expect("non-empty"));
            }
            delta.push(drow);
            theta.push(trow);
        }
        let semi = Semiautomaton::new(self.external.clone(), names, delta)?;
        Ok(Automaton::new(semi, encode(&self.initial()), self.outputs().clone(), theta)?)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "external_inputs": self.external.to_json(),
            "components": self.components.iter().map(Automaton::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, CascadeError> {
        #[derive(Deserialize)]
        struct Repr {
            external_inputs: Value,
            components: Vec<Value>,
        }
        let r: Repr = serde_json::from_value(v.clone()).map_err(|e| AutomataError::Invalid(e.to_string()))?;
        let components = r
            .components
            .iter()
            .map(Automaton::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(Alphabet::from_json(&r.external_inputs)?, components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{canonical_flip_flop, canonical_flip_flop_automaton};
    use proptest::prelude::*;

    /// Second flip-flop sets iff the first outputs `high`, resets otherwise
    /// on `reset`, and reads otherwise.
    fn two_flip_flops() -> Cascade {
        let ff = canonical_flip_flop();
        // letters <sigma, g1> = sigma * 2 + g1 with sigma in set, reset, read and g1 in low, high
        let delta = (0..2)
            .map(|q| {
                (0..6)
                    .map(|l| {
                        let (sigma, g1) = (l / 2, l % 2);
                        let inner = if g1 == 1 { 0 } else if sigma == 1 { 1 } else { 2 };
                        ff.delta[q][inner]
                    })
                    .collect()
            })
            .collect();
        let second = Semiautomaton::new(Alphabet::Named((0..6).map(|l| format!("l{l}")).collect()), ff.states.clone(), delta).unwrap();
        Cascade::new(
            ff.inputs.clone(),
            vec![canonical_flip_flop_automaton(), Automaton::with_state_output(second, 0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn single_component_is_its_automaton() {
        let a = canonical_flip_flop_automaton();
        let c = Cascade::new(a.inputs().clone(), vec![a.clone()]).unwrap();
        let w = [0, 2, 1, 2];
        assert_eq!(c.run(&w).unwrap().outputs, a.run(&w).unwrap().outputs);
        assert_eq!(c.flatten().unwrap().semi.delta, a.semi.delta);
    }

    #[test]
    fn second_flip_flop_lags_by_one_step() {
        let c = two_flip_flops();
        let r = c.run(&[0, 2]).unwrap();
        assert_eq!(r.states, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert!(c.is_simple());
    }

    #[test]
    fn wiring_is_checked() {
        let a = canonical_flip_flop_automaton();
        let err = Cascade::new(a.inputs().clone(), vec![a.clone(), a]).unwrap_err();
        assert_eq!(
            err,
            CascadeError::WiringMismatch {
                component: 2,
                expected: 6,
                found: 3
            }
        );
    }

    #[test]
    fn flatten_cap() {
        let c = two_flip_flops();
        assert_eq!(c.flatten().unwrap().n_states(), 4);
        assert_eq!(c.flatten_capped(3), Err(CascadeError::StateSpaceTooLarge { size: 4, cap: 3 }));
    }

    #[test]
    fn json_round_trip() {
        let c = two_flip_flops();
        let back = Cascade::from_json(&c.to_json()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back, c);
    }

    proptest! {
        #[test]
        fn flatten_agrees_with_run(word in proptest::collection::vec(0usize..3, 0..7)) {
            let c = two_flip_flops();
            let flat = c.flatten().unwrap();
            prop_assert_eq!(flat.run(&word).unwrap().outputs, c.run(&word).unwrap().outputs);
        }
    }
}

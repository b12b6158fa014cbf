use crate::automata::{distinct_transformations, Alphabet, Automaton};
use crate::cascades::Cascade;
use crate::operators::OperatorAutomaton;
use crate::pltl::Formula;
use crate::programs::{Program, Rule};
use crate::trace::{bit_of, Variable};

use super::{dnf, CompileError, Fresh, VariableWiring, MAX_BITS};

fn bit_vars(a: &Alphabet) -> Result<Vec<Variable>, CompileError> {
    match a {
        Alphabet::Bits(b) => Ok(b.vars.clone()),
        Alphabet::Named(_) => Err(CompileError::NotBitAlphabet),
    }
}

/// A program defining the output bits of `a` from its input bits.
///
/// The letters are factored through the distinct transformations they
/// induce, encoded on `k = ceil(log2 K)` fresh bits. The program has one
/// dynamic rule over those bits, a delay rule per state recovering the state
/// before the update, `k` rules computing the code and one rule per output
/// bit. Automata with a single state only get the output rules.
pub fn automaton_to_program(a: &Automaton) -> Result<(Program, VariableWiring), CompileError> {
    let inputs = bit_vars(a.inputs())?;
    let outputs = bit_vars(&a.outputs)?;
    let mut fresh = Fresh::new(inputs.iter().chain(&outputs));
    let rules = automaton_to_program_named(a, &inputs, &outputs, &mut fresh)?;
    let program = Program::new(rules)?;
    Ok((
        program,
        VariableWiring {
            inputs,
            outputs: vec![outputs],
        },
    ))
}

/// Rules for `a` reading `inputs` (positionally, first most significant)
/// and defining `outputs`; internal names come from `fresh`.
pub fn automaton_to_program_named(
    a: &Automaton,
    inputs: &[Variable],
    outputs: &[Variable],
    fresh: &mut Fresh,
) -> Result<Vec<Rule>, CompileError> {
    let m = inputs.len();
    let h = outputs.len();
    if m > MAX_BITS {
        return Err(CompileError::TooManyBits { bits: m });
    }
    if a.inputs().len() != 1 << m || a.outputs.len() != 1 << h {
        return Err(CompileError::NotBitAlphabet);
    }
    if let Some(v) = outputs.iter().find(|v| inputs.contains(v)) {
        return Err(CompileError::NameClash(v.clone()));
    }
    let n = a.n_states();
    let n_letters = 1usize << m;
    let output_bit = |q: usize, sigma: usize, i: usize| bit_of(a.theta[q][sigma], h, i);

    if n == 1 {
        return Ok(outputs
            .iter()
            .enumerate()
            .map(|(i, c)| Rule::Static {
                head: c.clone(),
                body: dnf(inputs, |sigma| output_bit(0, sigma, i)),
            })
            .collect());
    }

    let taus = distinct_transformations(&a.semi);
    let code: Vec<usize> = (0..n_letters)
        .map(|sigma| {
            let t = a.semi.transformation(sigma);
            taus.iter().position(|u| *u == t).expect("listed")
        })
        .collect();
    let k = usize::BITS as usize - (taus.len() - 1).leading_zeros() as usize;
    let delta = (0..n)
        .map(|q| {
            (0..1usize << k)
                .map(|c| taus.get(c).map_or(q, |t| t.apply(q)))
                .collect()
        })
        .collect();
    let op = OperatorAutomaton::new(k, a.init, delta).map_err(crate::programs::ProgramError::Operator)?;

    let q: Vec<Variable> = (0..n).map(|_| fresh.next("q")).collect();
    let p: Vec<Variable> = (0..n).map(|_| fresh.next("p")).collect();
    let b: Vec<Variable> = (0..k).map(|_| fresh.next("b")).collect();

    let mut rules = Vec::with_capacity(1 + n + k + h);
    rules.push(Rule::Dynamic {
        heads: q.clone(),
        operator: op.to_json().to_string(),
        automaton: op,
        args: b.clone(),
    });
    for (pi, qi) in p.iter().zip(&q) {
        rules.push(Rule::Delay {
            head: pi.clone(),
            body: qi.clone(),
        });
    }
    for (j, bj) in b.iter().enumerate() {
        rules.push(Rule::Static {
            head: bj.clone(),
            body: dnf(inputs, |sigma| bit_of(code[sigma], k, j)),
        });
    }
    for (i, c) in outputs.iter().enumerate() {
        let per_state: Vec<Formula> = (0..n).map(|s| dnf(inputs, |sigma| output_bit(s, sigma, i))).collect();
        let body = if per_state.iter().all(|f| *f == per_state[0]) {
            per_state[0].clone()
        } else {
            Formula::disjunction(per_state.into_iter().zip(&p).filter_map(|(f, ps)| {
                let state = Formula::Atom(ps.clone());
                match f {
                    Formula::Bot => None,
                    Formula::Top => Some(state),
                    f => Some(Formula::and(state, f)),
                }
            }))
        };
        rules.push(Rule::Static { head: c.clone(), body });
    }
    Ok(rules)
}

/// A program whose variables track every output bit of every component.
/// Component `i` reads the external bits and the outputs of the earlier
/// components, positionally. Declared output names are kept when unique,
/// duplicates get fresh `c$k` names.
pub fn cascade_to_program(c: &Cascade) -> Result<(Program, VariableWiring), CompileError> {
    let inputs = bit_vars(c.external())?;
    let declared: Vec<Vec<Variable>> = c
        .components()
        .iter()
        .map(|a| bit_vars(&a.outputs))
        .collect::<Result<_, _>>()?;
    let mut seen = Fresh::new(&inputs);
    let keep: Vec<Vec<bool>> = declared
        .iter()
        .map(|vs| {
            vs.iter()
                .map(|v| {
                    let ok = !seen.is_used(v);
                    seen.reserve(v);
                    ok
                })
                .collect()
        })
        .collect();
    let mut fresh = Fresh::new(inputs.iter().chain(declared.iter().flatten()));
    let outputs: Vec<Vec<Variable>> = declared
        .iter()
        .zip(&keep)
        .map(|(vs, ks)| {
            vs.iter()
                .zip(ks)
                .map(|(v, &k)| if k { v.clone() } else { fresh.next("c") })
                .collect()
        })
        .collect();

    let mut visible = inputs.clone();
    let mut rules = Vec::new();
    for (a, outs) in c.components().iter().zip(&outputs) {
        rules.extend(automaton_to_program_named(a, &visible, outs, &mut fresh)?);
        visible.extend(outs.iter().cloned());
    }
    Ok((Program::new(rules)?, VariableWiring { inputs, outputs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Semiautomaton};
    use crate::compile::program_to_cascade;
    use crate::programs::{parse_program, simulate};
    use crate::trace::Trace;
    use proptest::prelude::*;

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(n).unwrap()).collect()
    }

    /// Counts `a` modulo 3, accepting on count 0; `b` resets.
    fn mod3() -> Automaton {
        let delta = (0..3)
            .map(|q| (0..4).map(|l| if l & 1 == 1 { 0 } else if l & 2 == 2 { (q + 1) % 3 } else { q }).collect())
            .collect();
        let semi = Semiautomaton::new(Alphabet::bits(vars(&["a", "b"])), vec!["0".into(), "1".into(), "2".into()], delta).unwrap();
        Automaton::moore(semi, 0, Alphabet::bits(vars(&["acc"])), &[1, 0, 0]).unwrap()
    }

    #[test]
    fn rule_counts() {
        let (p, _) = automaton_to_program(&mod3()).unwrap();
        // transformations: identity, reset, +1
        let dynamic = p.rules().iter().filter(|r| matches!(r, Rule::Dynamic { .. })).count();
        let delay = p.rules().iter().filter(|r| matches!(r, Rule::Delay { .. })).count();
        assert_eq!((dynamic, delay, p.len()), (1, 3, 1 + 3 + 2 + 1));
        // the printed program parses back
        let text = p.to_string();
        let opts = crate::programs::ParseOptions {
            allow_generated: true,
            ..Default::default()
        };
        assert_eq!(crate::programs::parse_program_with(&text, &opts).unwrap(), p);
    }

    #[test]
    fn named_alphabets_are_refused() {
        let a = crate::automata::canonical_flip_flop_automaton();
        assert_eq!(automaton_to_program(&a).unwrap_err(), CompileError::NotBitAlphabet);
    }

    #[test]
    fn trivial_automaton_has_only_output_rules() {
        let semi = Semiautomaton::new(Alphabet::bits(vars(&["a", "b"])), vec!["s".into()], vec![vec![0; 4]]).unwrap();
        let a = Automaton::new(semi, 0, Alphabet::bits(vars(&["x"])), vec![vec![0, 1, 1, 0]]).unwrap();
        let (p, _) = automaton_to_program(&a).unwrap();
        assert_eq!(p.to_string(), "x :- !a & b | a & !b.\n");
    }

    proptest! {
        #[test]
        fn program_tracks_automaton(letters in proptest::collection::vec(0usize..4, 1..12)) {
            let a = mod3();
            let (p, w) = automaton_to_program(&a).unwrap();
            let tr = Trace::from_letters(&w.inputs, &letters).unwrap();
            let sim = simulate(&p, &tr).unwrap();
            let outs = a.run(&letters).unwrap().outputs;
            for t in 1..=letters.len() {
                prop_assert_eq!(sim.value(t, &w.outputs[0][0]).unwrap(), outs[t - 1] == 1);
            }
        }

        #[test]
        fn program_cascade_program_round_trip(letters in proptest::collection::vec(0usize..4, 1..10)) {
            let p = parse_program("e, o :- P(a).\nd :- Y o.\nh :- d & !b | e.\nq1, q2 :- S(h, b).").unwrap();
            let (c, _) = program_to_cascade(&p).unwrap();
            let (p2, w2) = cascade_to_program(&c).unwrap();
            let tr = Trace::from_letters(&vars(&["a", "b"]), &letters).unwrap();
            let (s1, s2) = (simulate(&p, &tr).unwrap(), simulate(&p2, &tr).unwrap());
            for v in p.defined_vars() {
                prop_assert!(w2.locate(&v).is_some());
                prop_assert_eq!(s1.column(&v), s2.column(&v));
            }
        }
    }
}

use std::collections::HashMap;

use crate::automata::{canonical_flip_flop, compose, Alphabet, Automaton, InputFunction, Semiautomaton};
use crate::cascades::Cascade;
use crate::programs::{Program, Rule};
use crate::trace::{bit_of, Variable};

use super::{CompileError, VariableWiring, MAX_BITS};

/// Automaton of one rule, reading its body variables in order of first
/// occurrence and writing its heads.
pub fn rule_to_automaton(rule: &Rule) -> Result<Automaton, CompileError> {
    rule_over(rule, &rule.body_vars(), &[])
}

/// One state; the output is the body under the letter read.
pub fn static_rule_to_automaton(rule: &Rule) -> Result<Automaton, CompileError> {
    debug_assert!(matches!(rule, Rule::Static { .. }));
    rule_over(rule, &rule.body_vars(), &[])
}

/// The flip-flop with `1 -> set`, `0 -> reset`, starting low; it outputs
/// its state before the update, so `1, 0` yields `0, 1`.
pub fn delay_rule_to_automaton(rule: &Rule) -> Result<Automaton, CompileError> {
    debug_assert!(matches!(rule, Rule::Delay { .. }));
    rule_over(rule, &rule.body_vars(), &[])
}

/// The operator's semiautomaton; the output is the one-hot encoding of the
/// state after the update.
pub fn dynamic_rule_to_automaton(rule: &Rule) -> Result<Automaton, CompileError> {
    debug_assert!(matches!(rule, Rule::Dynamic { .. }));
    rule_over(rule, &rule.body_vars(), &[])
}

/// The rule's automaton reading the bit alphabet over `over`, which must
/// contain every body variable. A delay whose body is in `high_at_zero`
/// starts high.
fn rule_over(rule: &Rule, over: &[Variable], high_at_zero: &[Variable]) -> Result<Automaton, CompileError> {
    let m = over.len();
    if m > MAX_BITS {
        return Err(CompileError::TooManyBits { bits: m });
    }
    let pos: HashMap<&Variable, usize> = over.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n_letters = 1usize << m;
    let inputs = Alphabet::bits(over.to_vec());
    let heads: Vec<Variable> = rule.heads().into_iter().cloned().collect();
    let outputs = Alphabet::bits(heads.clone());
    match rule {
        Rule::Static { body, .. } => {
            let theta = vec![(0..n_letters)
                .map(|l| {
                    let value = body.eval_static(&|v: &Variable| bit_of(l, m, pos[v])).expect("static body");
                    usize::from(value)
                })
                .collect()];
            let semi = Semiautomaton::new(inputs, vec!["q".into()], vec![vec![0; n_letters]])?;
            Ok(Automaton::new(semi, 0, outputs, theta)?)
        }
        Rule::Delay { body, .. } => {
            let i = pos[body];
            // set = 0, reset = 1 in the canonical flip-flop
            let phi = InputFunction::new((0..n_letters).map(|l| if bit_of(l, m, i) { 0 } else { 1 }).collect(), 3)?;
            let semi = compose(&phi, &canonical_flip_flop(), inputs)?;
            let theta = (0..2).map(|q| vec![q; n_letters]).collect();
            let init = usize::from(high_at_zero.contains(body));
            Ok(Automaton::new(semi, init, outputs, theta)?)
        }
        Rule::Dynamic { automaton, args, .. } => {
            let n = automaton.n_states();
            let letter_of = |l: usize| args.iter().fold(0, |acc, a| acc * 2 + usize::from(bit_of(l, m, pos[a])));
            let delta: Vec<Vec<usize>> = (0..n)
                .map(|q| (0..n_letters).map(|l| automaton.step(q, letter_of(l))).collect())
                .collect();
            // head k true is the letter with bit k set, first head most significant
            let theta = delta.iter().map(|row| row.iter().map(|&q| 1 << (n - 1 - q)).collect()).collect();
            let names = heads.iter().map(|h| h.name().to_string()).collect();
            let semi = Semiautomaton::new(inputs, names, delta)?;
            Ok(Automaton::new(semi, automaton.init, outputs, theta)?)
        }
    }
}

/// One component per rule in topological order. Component `i` reads the
/// program's input variables followed by the heads of components `1..i-1`.
pub fn program_to_cascade(program: &Program) -> Result<(Cascade, VariableWiring), CompileError> {
    let inputs = program.input_vars().to_vec();
    let mut visible = inputs.clone();
    let mut components = Vec::with_capacity(program.len());
    let mut outputs = Vec::with_capacity(program.len());
    // initial heads of dynamic rules hold at the virtual instant
    let high_at_zero: Vec<Variable> = program
        .rules()
        .iter()
        .filter_map(|r| match r {
            Rule::Dynamic { heads, automaton, .. } => Some(heads[automaton.init].clone()),
            _ => None,
        })
        .collect();
    for &r in program.order() {
        let rule = &program.rules()[r];
        components.push(rule_over(rule, &visible, &high_at_zero)?);
        let heads: Vec<Variable> = rule.heads().into_iter().cloned().collect();
        visible.extend(heads.iter().cloned());
        outputs.push(heads);
    }
    let cascade = Cascade::new(Alphabet::bits(inputs.clone()), components)?;
    Ok((cascade, VariableWiring { inputs, outputs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::{parse_program, simulate};
    use crate::trace::Trace;
    use proptest::prelude::*;

    fn rule(text: &str) -> Rule {
        parse_program(text).unwrap().rules()[0].clone()
    }

    #[test]
    fn delay_outputs_previous_input() {
        let a = delay_rule_to_automaton(&rule("p :- Y q.")).unwrap();
        assert_eq!(a.run(&[1, 0]).unwrap().outputs, vec![0, 1]);
        assert_eq!(a.run(&[1, 1, 0, 0]).unwrap().outputs, vec![0, 1, 1, 0]);
    }

    #[test]
    fn dynamic_is_one_hot_after_update() {
        let a = dynamic_rule_to_automaton(&rule("e, o :- P(a).")).unwrap();
        // e is the high bit
        assert_eq!(a.run(&[1, 1, 0]).unwrap().outputs, vec![0b01, 0b10, 0b10]);
    }

    #[test]
    fn static_reads_its_body() {
        let a = static_rule_to_automaton(&rule("h :- a & !b.")).unwrap();
        assert_eq!(a.n_states(), 1);
        assert_eq!(a.theta[0], vec![0, 0, 1, 0]);
    }

    #[test]
    fn delay_of_initial_head_starts_high() {
        let p = parse_program("e, o :- P(a).\nd :- Y e.").unwrap();
        let (c, w) = program_to_cascade(&p).unwrap();
        let tr = Trace::from_letters(&vars(&["a"]), &[0, 1]).unwrap();
        let run = c.run(&tr.letters_over(&w.inputs)).unwrap();
        let d = Variable::new("d").unwrap();
        assert_eq!(w.value(&run, &d, 1), Some(true));
        assert_eq!(simulate(&p, &tr).unwrap().value(1, &d), Some(true));
    }

    #[test]
    fn empty_program_has_no_cascade() {
        assert!(program_to_cascade(&Program::empty()).is_err());
    }

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(n).unwrap()).collect()
    }

    proptest! {
        #[test]
        fn cascade_agrees_with_program(letters in proptest::collection::vec(0usize..4, 1..10)) {
            let p = parse_program(
                "e, o :- P(a).\nd :- Y o.\nh :- d & !b | e.\nq1, q2 :- S(h, b).\nx, y, z :- C3(a, q2, d).",
            )
            .unwrap();
            let tr = Trace::from_letters(&vars(&["a", "b"]), &letters).unwrap();
            let (c, wiring) = program_to_cascade(&p).unwrap();
            let run = c.run(&tr.letters_over(&wiring.inputs)).unwrap();
            let sim = simulate(&p, &tr).unwrap();
            for v in p.defined_vars() {
                for t in 1..=tr.len() {
                    prop_assert_eq!(wiring.value(&run, &v, t), sim.value(t, &v), "{} at {}", v, t);
                }
            }
        }
    }
}

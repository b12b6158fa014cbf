use std::collections::HashMap;

use crate::automata::{Alphabet, Automaton, Semiautomaton};
use crate::operators::since_operator;
use crate::pltl::Formula;
use crate::programs::{Program, Rule};
use crate::trace::{bit_of, Variable};

use super::{CompileError, Fresh, MAX_BITS};

/// A flip-flop driven by static programs. `input_program` defines `set` and
/// `reset` from the input bits; when both hold, set wins, and when neither
/// does the letter is read. `output_program` defines `output` from the
/// inputs, the input program's variables, and `high` / `low`, which
/// describe the state before the update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipFlopAutomaton {
    pub inputs: Vec<Variable>,
    pub input_program: Program,
    pub output_program: Program,
    pub output: Variable,
    pub init_high: bool,
}

fn var(name: &str) -> Variable {
    Variable::new(name).expect("valid name")
}

fn static_only(p: &Program, what: &str) -> Result<(), CompileError> {
    match p.rules().iter().find(|r| r.is_temporal()) {
        Some(r) => Err(CompileError::InvalidFlipFlop(format!("{what} has temporal rule `{r}`"))),
        None => Ok(()),
    }
}

/// Values of every variable of a static program under `env`.
fn eval_static_program(p: &Program, env: &mut HashMap<Variable, bool>) {
    for &r in p.order() {
        if let Rule::Static { head, body } = &p.rules()[r] {
            let value = body
                .eval_static(&|v: &Variable| env.get(v).copied().unwrap_or(false))
                .expect("static");
            env.insert(head.clone(), value);
        }
    }
}

impl FlipFlopAutomaton {
    pub fn new(
        inputs: Vec<Variable>,
        input_program: Program,
        output_program: Program,
        output: Variable,
        init_high: bool,
    ) -> Result<Self, CompileError> {
        if inputs.len() > MAX_BITS {
            return Err(CompileError::TooManyBits { bits: inputs.len() });
        }
        static_only(&input_program, "input program")?;
        static_only(&output_program, "output program")?;
        for v in ["set", "reset"] {
            if !input_program.is_defined(&var(v)) {
                return Err(CompileError::InvalidFlipFlop(format!("input program must define `{v}`")));
            }
        }
        if let Some(v) = input_program.input_vars().iter().find(|v| !inputs.contains(v)) {
            return Err(CompileError::InvalidFlipFlop(format!("input program reads unknown `{v}`")));
        }
        let state = [var("high"), var("low")];
        if let Some(v) = state.iter().find(|v| input_program.mentions(v) || output_program.is_defined(v)) {
            return Err(CompileError::InvalidFlipFlop(format!("`{v}` is reserved for the state")));
        }
        let known = |v: &Variable| inputs.contains(v) || state.contains(v) || input_program.is_defined(v);
        if let Some(v) = output_program.input_vars().iter().find(|v| !known(v)) {
            return Err(CompileError::InvalidFlipFlop(format!("output program reads unknown `{v}`")));
        }
        if !output_program.is_defined(&output) {
            return Err(CompileError::InvalidFlipFlop(format!("output program does not define `{output}`")));
        }
        Ok(FlipFlopAutomaton {
            inputs,
            input_program,
            output_program,
            output,
            init_high,
        })
    }

    /// The automaton over the input bits with states `low`, `high` and a
    /// single output bit.
    pub fn to_automaton(&self) -> Result<Automaton, CompileError> {
        let m = self.inputs.len();
        let n_letters = 1usize << m;
        let env_of = |sigma: usize, high: bool| {
            let mut env: HashMap<Variable, bool> =
                self.inputs.iter().enumerate().map(|(i, v)| (v.clone(), bit_of(sigma, m, i))).collect();
            eval_static_program(&self.input_program, &mut env);
            env.insert(var("high"), high);
            env.insert(var("low"), !high);
            eval_static_program(&self.output_program, &mut env);
            env
        };
        let mut delta = vec![Vec::with_capacity(n_letters); 2];
        let mut theta = vec![Vec::with_capacity(n_letters); 2];
        for q in 0..2 {
            for sigma in 0..n_letters {
                let env = env_of(sigma, q == 1);
                let next = if env[&var("set")] {
                    1
                } else if env[&var("reset")] {
                    0
                } else {
                    q
                };
                delta[q].push(next);
                theta[q].push(usize::from(env[&self.output]));
            }
        }
        let semi = Semiautomaton::new(Alphabet::bits(self.inputs.clone()), vec!["low".into(), "high".into()], delta)?;
        let init = usize::from(self.init_high);
        Ok(Automaton::new(semi, init, Alphabet::bits(vec![self.output.clone()]), theta)?)
    }
}

/// The input and output programs joined with
/// `high :- Y(!reset S set)` and `low :- !high`, using a single `S` rule.
/// Only flip-flops starting low are supported, since `Y` is false at the
/// first step.
pub fn flipflop_automaton_to_pltl_program(ff: &FlipFlopAutomaton) -> Result<Program, CompileError> {
    if ff.init_high {
        return Err(CompileError::UnsupportedInitialState);
    }
    let mut fresh = Fresh::new(ff.input_program.vars().iter().chain(&ff.output_program.vars()));
    let (not_reset, outside, inside) = (fresh.next("reset"), fresh.next("set"), fresh.next("set"));
    let mut rules: Vec<Rule> = ff.input_program.rules().to_vec();
    rules.push(Rule::Static {
        head: not_reset.clone(),
        body: Formula::not(Formula::Atom(var("reset"))),
    });
    rules.push(Rule::Dynamic {
        heads: vec![outside, inside.clone()],
        operator: "S".into(),
        automaton: since_operator(),
        args: vec![not_reset, var("set")],
    });
    rules.push(Rule::Delay {
        head: var("high"),
        body: inside,
    });
    rules.push(Rule::Static {
        head: var("low"),
        body: Formula::not(Formula::Atom(var("high"))),
    });
    rules.extend(ff.output_program.rules().iter().cloned());
    Ok(Program::new(rules)?)
}

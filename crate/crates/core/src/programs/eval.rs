use std::collections::HashMap;

use crate::pltl::{series, Formula, SinceSemantics};
use crate::trace::{Interpretation, Trace, Variable};

use super::{Program, ProgramError, Rule};

/// Truth of every variable at every instant `0..=len` of one trace.
#[derive(Debug, Clone)]
pub struct ProgramRun {
    vars: Vec<Variable>,
    index: HashMap<Variable, usize>,
    /// `table[t][i]` for variable `vars[i]`; row 0 is the virtual instant.
    table: Vec<Vec<bool>>,
}

impl ProgramRun {
    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn value(&self, t: usize, v: &Variable) -> Option<bool> {
        let i = *self.index.get(v)?;
        self.table.get(t).map(|row| row[i])
    }

    /// Values at `1..=len`.
    pub fn column(&self, v: &Variable) -> Option<Vec<bool>> {
        let i = *self.index.get(v)?;
        Some(self.table[1..].iter().map(|row| row[i]).collect())
    }
}

impl Interpretation for ProgramRun {
    fn len(&self) -> usize {
        self.table.len() - 1
    }

    fn holds(&self, t: usize, var: &Variable) -> bool {
        self.value(t, var).unwrap_or(false)
    }
}

/// Forward simulation of `program` on `trace`, one step at a time, rules in
/// topological order. Trace variables the program does not mention are
/// carried along so that queries may refer to them.
pub fn simulate(program: &Program, trace: &Trace) -> Result<ProgramRun, ProgramError> {
    let mut vars = program.vars();
    for v in trace.universe() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    let index: HashMap<Variable, usize> = vars.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    for v in program.input_vars() {
        if !trace.universe().contains(v) {
            return Err(ProgramError::UnknownVariable(v.clone()));
        }
    }
    let from_trace: Vec<usize> = trace.universe().iter().map(|v| index[v]).collect();

    struct Compiled {
        rule: usize,
        heads: Vec<usize>,
        body: Vec<usize>,
    }
    let compiled: Vec<Compiled> = program
        .order()
        .iter()
        .map(|&r| {
            let rule = &program.rules()[r];
            Compiled {
                rule: r,
                heads: rule.heads().iter().map(|h| index[*h]).collect(),
                body: match rule {
                    Rule::Dynamic { args, .. } => args.iter().map(|a| index[a]).collect(),
                    Rule::Delay { body, .. } => vec![index[body]],
                    Rule::Static { .. } => Vec::new(),
                },
            }
        })
        .collect();

    let len = trace.len();
    let mut table = vec![vec![false; vars.len()]; len + 1];
    let mut state = vec![0usize; program.rules().len()];
    for c in &compiled {
        if let Rule::Dynamic { automaton, .. } = &program.rules()[c.rule] {
            state[c.rule] = automaton.init;
            table[0][c.heads[automaton.init]] = true;
        }
    }
    for t in 1..=len {
        let (before, after) = table.split_at_mut(t);
        let prev = &before[t - 1];
        let row = &mut after[0];
        for (v, &i) in trace.universe().iter().zip(&from_trace) {
            row[i] = trace.step(t).contains(v);
        }
        for c in &compiled {
            match &program.rules()[c.rule] {
                Rule::Static { body, .. } => {
                    let value = body
                        .eval_static(&|v: &Variable| row[index[v]])
                        .expect("static rule bodies are static");
                    row[c.heads[0]] = value;
                }
                Rule::Delay { .. } => row[c.heads[0]] = prev[c.body[0]],
                Rule::Dynamic { automaton, .. } => {
                    let letter = c.body.iter().fold(0, |acc, &i| acc * 2 + usize::from(row[i]));
                    let next = automaton.step(state[c.rule], letter);
                    state[c.rule] = next;
                    for (k, &h) in c.heads.iter().enumerate() {
                        row[h] = k == next;
                    }
                }
            }
        }
    }
    Ok(ProgramRun { vars, index, table })
}

/// `(P, I, t) |= query`. At the virtual instant `t = 0` only static
/// queries are meaningful: dynamic heads encode the initial state and every
/// other variable is false.
pub fn eval_program(program: &Program, trace: &Trace, t: usize, query: &Formula) -> Result<bool, ProgramError> {
    let run = simulate(program, trace)?;
    for v in query.vars() {
        if !run.index.contains_key(&v) {
            return Err(ProgramError::UnknownVariable(v));
        }
    }
    if t > trace.len() {
        return Err(ProgramError::TimeOutOfRange { t, len: trace.len() });
    }
    if t == 0 {
        return query
            .eval_static(&|v: &Variable| run.table[0][run.index[v]])
            .ok_or(ProgramError::TimeOutOfRange { t, len: trace.len() });
    }
    Ok(series(query, &run, t, SinceSemantics::Inductive)[t - 1])
}

/// Acceptance through `accept`: its value at the last step.
pub fn recognizes_program(program: &Program, trace: &Trace, accept: &Variable) -> Result<bool, ProgramError> {
    if !program.mentions(accept) {
        return Err(ProgramError::UnknownVariable(accept.clone()));
    }
    eval_program(program, trace, trace.len(), &Formula::Atom(accept.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pltl::{eval_formula, parse_formula};
    use crate::programs::parse_program;
    use crate::trace::parse_trace;
    use proptest::prelude::*;

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(n).unwrap()).collect()
    }

    fn holds(prog: &str, trace: &str, universe: &[&str], t: usize, q: &str) -> bool {
        let p = parse_program(prog).unwrap();
        let tr = parse_trace(trace, &vars(universe)).unwrap();
        eval_program(&p, &tr, t, &parse_formula(q).unwrap()).unwrap()
    }

    #[test]
    fn parity() {
        let p = "even, odd :- P(a).";
        let tr = "{a};{a};{}";
        assert!(holds(p, tr, &["a"], 1, "odd"));
        assert!(holds(p, tr, &["a"], 2, "even"));
        assert!(holds(p, tr, &["a"], 3, "even"));
        assert!(holds(p, tr, &["a"], 0, "even & !odd"));
    }

    #[test]
    fn delay_boundary() {
        assert!(holds("p :- Y q.", "{q};{}", &["q"], 2, "p"));
        assert!(!holds("p :- Y q.", "{q};{}", &["q"], 1, "p"));
    }

    #[test]
    fn since_rule() {
        assert!(holds("q1, q2 :- S(a, b).", "{b};{a}", &["a", "b"], 2, "q2"));
        assert!(holds("q1, q2 :- S(a, b).", "{b};{a}", &["a", "b"], 2, "!q1"));
    }

    #[test]
    fn acceptance_and_errors() {
        let p = parse_program("even, odd :- P(a).").unwrap();
        let tr = parse_trace("{a};{a}", &vars(&["a"])).unwrap();
        assert!(recognizes_program(&p, &tr, &Variable::new("even").unwrap()).unwrap());
        assert!(matches!(
            recognizes_program(&p, &tr, &Variable::new("zz").unwrap()),
            Err(ProgramError::UnknownVariable(_))
        ));
        assert!(matches!(
            eval_program(&p, &tr, 3, &parse_formula("even").unwrap()),
            Err(ProgramError::TimeOutOfRange { .. })
        ));
        let other = parse_trace("{b}", &vars(&["b"])).unwrap();
        assert!(matches!(simulate(&p, &other), Err(ProgramError::UnknownVariable(_))));
    }

    #[test]
    fn temporal_queries_over_defined_variables() {
        assert!(holds("h :- a & b.", "{a,b};{a}", &["a", "b"], 2, "Y h & !h"));
    }

    fn trace_strategy(names: &'static [&'static str]) -> impl Strategy<Value = Trace> {
        proptest::collection::vec(0usize..(1 << names.len()), 1..8)
            .prop_map(move |ls| Trace::from_letters(&vars(names), &ls).unwrap())
    }

    proptest! {
        #[test]
        fn dynamic_heads_are_one_hot(tr in trace_strategy(&["a", "b", "c"])) {
            let p = parse_program("x, y, z :- C3(a, b, c).\ne, o :- P(a).\nq1, q2 :- S(x, b).").unwrap();
            let run = simulate(&p, &tr).unwrap();
            for t in 0..=tr.len() {
                for group in [&["x", "y", "z"][..], &["e", "o"], &["q1", "q2"]] {
                    let ones = group.iter().filter(|n| run.value(t, &Variable::new(n).unwrap()).unwrap()).count();
                    prop_assert_eq!(ones, 1);
                }
            }
        }

        #[test]
        fn delay_matches_before(tr in trace_strategy(&["q"])) {
            let p = parse_program("h :- Y q.").unwrap();
            let f = parse_formula("Y q").unwrap();
            for t in 1..=tr.len() {
                prop_assert_eq!(
                    eval_program(&p, &tr, t, &parse_formula("h").unwrap()).unwrap(),
                    eval_formula(&f, &tr, t).unwrap()
                );
            }
        }

        #[test]
        fn empty_program_is_the_formula(tr in trace_strategy(&["a", "b"]), f in crate::pltl::strategy::formula(vec!["a", "b"], 3)) {
            for t in 1..=tr.len() {
                prop_assert_eq!(eval_program(&Program::empty(), &tr, t, &f).unwrap(), eval_formula(&f, &tr, t).unwrap());
            }
        }
    }
}

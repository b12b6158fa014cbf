//! KR-Logic programs: rules, well-formedness, evaluation and the normal /
//! treelike classification.

mod classify;
mod eval;
mod parser;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::lexer::SyntaxError;
use crate::operators::{OperatorAutomaton, OperatorError};
use crate::pltl::Formula;
use crate::trace::Variable;

pub use classify::{is_normal, is_treelike, NormalReport};
pub use eval::{eval_program, recognizes_program, simulate, ProgramRun};
pub use parser::{parse_program, parse_program_with, ParseOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("variable `{0}` is defined more than once")]
    DoubleDefinition(Variable),
    #[error("program is recursive: {}", cycle_text(.0))]
    RecursiveProgram(Vec<Variable>),
    #[error("arity mismatch for `{operator}`: {what} expected {expected}, found {found}")]
    ArityMismatch {
        operator: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error(transparent)]
    Operator(OperatorError),
    #[error("body of the rule for `{0}` is not a static formula")]
    NotStatic(Variable),
    #[error("time {t} out of range 0..={len}")]
    TimeOutOfRange { t: usize, len: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(Variable),
}

fn cycle_text(cycle: &[Variable]) -> String {
    cycle.iter().map(Variable::name).collect::<Vec<_>>().join(" -> ")
}

impl From<OperatorError> for ProgramError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::UnknownOperator(n) => ProgramError::UnknownOperator(n),
            other => ProgramError::Operator(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// `h :- body.` with a static body.
    Static { head: Variable, body: Formula },
    /// `h :- Y q.`
    Delay { head: Variable, body: Variable },
    /// `p1, ..., pn :- Op(a1, ..., am).` `operator` is the name used in the
    /// text, or the inline JSON of an anonymous automaton.
    Dynamic {
        heads: Vec<Variable>,
        operator: String,
        automaton: OperatorAutomaton,
        args: Vec<Variable>,
    },
}

impl Rule {
    pub fn heads(&self) -> Vec<&Variable> {
        match self {
            Rule::Static { head, .. } | Rule::Delay { head, .. } => vec![head],
            Rule::Dynamic { heads, .. } => heads.iter().collect(),
        }
    }

    /// Body variables in order of first occurrence.
    pub fn body_vars(&self) -> Vec<Variable> {
        match self {
            Rule::Static { body, .. } => body.vars(),
            Rule::Delay { body, .. } => vec![body.clone()],
            Rule::Dynamic { args, .. } => {
                let mut out: Vec<Variable> = Vec::new();
                for a in args {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                out
            }
        }
    }

    /// Body variable occurrences, with repetition.
    pub fn body_occurrences(&self) -> Vec<&Variable> {
        match self {
            Rule::Static { body, .. } => body.var_occurrences(),
            Rule::Delay { body, .. } => vec![body],
            Rule::Dynamic { args, .. } => args.iter().collect(),
        }
    }

    pub fn is_temporal(&self) -> bool {
        !matches!(self, Rule::Static { .. })
    }

    /// Heads plus body size: a static body counts its nodes, a delay body
    /// counts 1, a dynamic body counts the operator and each argument.
    pub fn size(&self) -> usize {
        match self {
            Rule::Static { body, .. } => 1 + body.size(),
            Rule::Delay { .. } => 2,
            Rule::Dynamic { heads, args, .. } => heads.len() + 1 + args.len(),
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Static { head, body } => write!(f, "{head} :- {body}."),
            Rule::Delay { head, body } => write!(f, "{head} :- Y {body}."),
            Rule::Dynamic {
                heads,
                operator,
                args,
                ..
            } => write!(f, "{} :- {operator}({}).", join(heads), join(args)),
        }
    }
}

/// A definitorial, nonrecursive set of rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    rules: Vec<Rule>,
    order: Vec<usize>,
    defined: HashMap<Variable, usize>,
    inputs: Vec<Variable>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Result<Self, ProgramError> {
        let mut defined = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            if let Rule::Dynamic {
                heads,
                operator,
                automaton,
                args,
            } = r
            {
                check_arity(operator, automaton, heads.len(), args.len())?;
            }
            for h in r.heads() {
                if defined.insert(h.clone(), i).is_some() {
                    return Err(ProgramError::DoubleDefinition(h.clone()));
                }
            }
        }
        let mut inputs: Vec<Variable> = Vec::new();
        for r in &rules {
            for v in r.body_vars() {
                if !defined.contains_key(&v) && !inputs.contains(&v) {
                    inputs.push(v);
                }
            }
        }
        let order = topological_order(&rules, &defined)?;
        Ok(Program {
            rules,
            order,
            defined,
            inputs,
        })
    }

    pub fn empty() -> Self {
        Program::new(Vec::new()).expect("empty program is well-formed")
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Rule indices such that every rule comes after the rules it depends
    /// on; ties broken by textual order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn input_vars(&self) -> &[Variable] {
        &self.inputs
    }

    /// Defined variables in textual order.
    pub fn defined_vars(&self) -> Vec<Variable> {
        self.rules.iter().flat_map(|r| r.heads().into_iter().cloned()).collect()
    }

    pub fn is_defined(&self, v: &Variable) -> bool {
        self.defined.contains_key(v)
    }

    pub fn definition(&self, v: &Variable) -> Option<&Rule> {
        self.defined.get(v).map(|&i| &self.rules[i])
    }

    pub fn defining_rule(&self, v: &Variable) -> Option<usize> {
        self.defined.get(v).copied()
    }

    /// Inputs followed by defined variables.
    pub fn vars(&self) -> Vec<Variable> {
        self.inputs.iter().cloned().chain(self.defined_vars()).collect()
    }

    pub fn mentions(&self, v: &Variable) -> bool {
        self.is_defined(v) || self.inputs.contains(v)
    }

    pub fn size(&self) -> usize {
        self.rules.iter().map(Rule::size).sum()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// This program's rules followed by `other`'s.
    pub fn union(&self, other: &Program) -> Result<Program, ProgramError> {
        Program::new(self.rules.iter().chain(other.rules.iter()).cloned().collect())
    }

    /// True iff every dynamic rule uses `S`.
    pub fn is_since_only(&self) -> bool {
        self.rules
            .iter()
            .all(|r| !matches!(r, Rule::Dynamic { operator, .. } if operator != "S"))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn check_arity(operator: &str, automaton: &OperatorAutomaton, heads: usize, args: usize) -> Result<(), ProgramError> {
    if args != automaton.arity {
        return Err(ProgramError::ArityMismatch {
            operator: operator.to_string(),
            what: "arguments",
            expected: automaton.arity,
            found: args,
        });
    }
    if heads != automaton.n_states() {
        return Err(ProgramError::ArityMismatch {
            operator: operator.to_string(),
            what: "heads",
            expected: automaton.n_states(),
            found: heads,
        });
    }
    Ok(())
}

fn topological_order(rules: &[Rule], defined: &HashMap<Variable, usize>) -> Result<Vec<usize>, ProgramError> {
    let n = rules.len();
    let deps: Vec<BTreeSet<usize>> = rules
        .iter()
        .map(|r| r.body_vars().iter().filter_map(|v| defined.get(v).copied()).collect())
        .collect();
    let mut dependents = vec![Vec::new(); n];
    let mut pending: Vec<usize> = deps.iter().map(BTreeSet::len).collect();
    for (i, d) in deps.iter().enumerate() {
        for &j in d {
            dependents[j].push(i);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &k in &dependents[i] {
            pending[k] -= 1;
            if pending[k] == 0 {
                ready.insert(k);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    Err(ProgramError::RecursiveProgram(find_cycle(rules, defined, &pending)))
}

/// A variable cycle `v1 -> v2 -> ... -> v1` among the rules left unordered.
fn find_cycle(rules: &[Rule], defined: &HashMap<Variable, usize>, pending: &[usize]) -> Vec<Variable> {
    let start = (0..rules.len()).find(|&i| pending[i] > 0).expect("a rule is stuck");
    let mut path: Vec<Variable> = Vec::new();
    let mut seen_at: HashMap<Variable, usize> = HashMap::new();
    let mut var = rules[start].heads()[0].clone();
    loop {
        if let Some(&pos) = seen_at.get(&var) {
            let mut cycle = path[pos..].to_vec();
            cycle.push(var);
            return cycle;
        }
        seen_at.insert(var.clone(), path.len());
        path.push(var.clone());
        let rule = &rules[defined[&var]];
        var = rule
            .body_vars()
            .into_iter()
            .find(|v| defined.get(v).is_some_and(|&j| pending[j] > 0))
            .expect("stuck rules depend on stuck rules");
    }
}

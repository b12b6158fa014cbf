use std::collections::HashMap;

use crate::operators::since_operator;
use crate::pltl::Formula;
use crate::programs::{Program, Rule};
use crate::trace::Variable;

use super::{CompileError, Fresh};

fn since_rule(heads: [Variable; 2], l: Variable, r: Variable) -> Rule {
    Rule::Dynamic {
        heads: heads.to_vec(),
        operator: "S".into(),
        automaton: since_operator(),
        args: vec![l, r],
    }
}

/// A program with a variable per subformula of `phi` after desugaring, and
/// that variable for `phi` itself. An atom yields the empty program.
///
/// Every Boolean node becomes a static rule, `Y` a delay rule and `S` a
/// dynamic `S` rule, so the program has at most `size(desugar(phi))` rules.
pub fn pltl_to_program(phi: &Formula) -> Result<(Program, Variable), CompileError> {
    let phi = phi.desugar();
    let vars = phi.vars();
    let mut fresh = Fresh::new(&vars);
    let mut rules = Vec::new();
    let accept = subformula_var(&phi, &mut fresh, &mut rules);
    Ok((Program::new(rules)?, accept))
}

fn subformula_var(f: &Formula, fresh: &mut Fresh, rules: &mut Vec<Rule>) -> Variable {
    let define = |body: Formula, fresh: &mut Fresh, rules: &mut Vec<Rule>| {
        let head = fresh.next("f");
        rules.push(Rule::Static { head: head.clone(), body });
        head
    };
    match f {
        Formula::Atom(v) => v.clone(),
        Formula::Top | Formula::Bot => define(f.clone(), fresh, rules),
        Formula::Not(g) => {
            let x = subformula_var(g, fresh, rules);
            define(Formula::not(Formula::Atom(x)), fresh, rules)
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            let x = Formula::Atom(subformula_var(l, fresh, rules));
            let y = Formula::Atom(subformula_var(r, fresh, rules));
            let body = if matches!(f, Formula::And(..)) {
                Formula::and(x, y)
            } else {
                Formula::or(x, y)
            };
            define(body, fresh, rules)
        }
        Formula::Before(g) => {
            let x = subformula_var(g, fresh, rules);
            let head = fresh.next("f");
            rules.push(Rule::Delay {
                head: head.clone(),
                body: x,
            });
            head
        }
        Formula::Since(l, r) => {
            let x = subformula_var(l, fresh, rules);
            let y = subformula_var(r, fresh, rules);
            let heads = [fresh.next("f"), fresh.next("f")];
            rules.push(since_rule(heads.clone(), x, y));
            heads[1].clone()
        }
        Formula::Once(_) | Formula::Hist(_) => unreachable!("desugared"),
    }
}

/// The formula equivalent to variable `a` of a program whose dynamic rules
/// all use `S`: `q1, q2 :- S(b, c)` gives `q2 = b S c` and `q1 = !(b S c)`,
/// delay rules give `Y`, static rules are substituted.
///
/// Shared subformulas are copied, so the result can be exponentially larger
/// than the program. A variable the program does not define unfolds to
/// itself.
pub fn unfold_program(program: &Program, a: &Variable) -> Result<Formula, CompileError> {
    if let Some(Rule::Dynamic { operator, .. }) = program
        .rules()
        .iter()
        .find(|r| matches!(r, Rule::Dynamic { operator, .. } if operator != "S"))
    {
        return Err(CompileError::UnsupportedOperator(operator.clone()));
    }
    let mut memo: HashMap<Variable, Formula> = HashMap::new();
    // rules in topological order, so every body is already unfolded
    for &r in program.order() {
        let lookup = |memo: &HashMap<Variable, Formula>, v: &Variable| {
            memo.get(v).cloned().unwrap_or_else(|| Formula::Atom(v.clone()))
        };
        match &program.rules()[r] {
            Rule::Static { head, body } => {
                let f = body.substitute(&mut |v| memo.get(v).cloned());
                memo.insert(head.clone(), f);
            }
            Rule::Delay { head, body } => {
                let f = Formula::before(lookup(&memo, body));
                memo.insert(head.clone(), f);
            }
            Rule::Dynamic { heads, args, .. } => {
                let s = Formula::since(lookup(&memo, &args[0]), lookup(&memo, &args[1]));
                memo.insert(heads[0].clone(), Formula::not(s.clone()));
                memo.insert(heads[1].clone(), s);
            }
        }
    }
    Ok(memo.remove(a).unwrap_or_else(|| Formula::Atom(a.clone())))
}

/// A normal program for `phi`: one `Y` or `S` rule per temporal operator of
/// the desugared formula, with static rules in between. Temporal bodies only
/// see input variables and statically-defined ones, static bodies only
/// input variables and temporally-defined ones.
pub fn formula_to_normal_program(phi: &Formula) -> Result<(Program, Variable), CompileError> {
    let phi = phi.desugar();
    let inputs = phi.vars();
    let mut b = NormalBuilder {
        fresh: Fresh::new(&inputs),
        inputs,
        rules: Vec::new(),
    };
    let root = b.context(&phi);
    let accept = match root {
        Formula::Atom(v) => v,
        body => b.define("f", body),
    };
    Ok((Program::new(b.rules)?, accept))
}

struct NormalBuilder {
    fresh: Fresh,
    inputs: Vec<Variable>,
    rules: Vec<Rule>,
}

impl NormalBuilder {
    fn define(&mut self, base: &str, body: Formula) -> Variable {
        let head = self.fresh.next(base);
        self.rules.push(Rule::Static { head: head.clone(), body });
        head
    }

    /// A static formula over inputs and temporal heads equivalent to `f`.
    fn context(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Top | Formula::Bot | Formula::Atom(_) => f.clone(),
            Formula::Not(g) => Formula::not(self.context(g)),
            Formula::And(l, r) => Formula::and(self.context(l), self.context(r)),
            Formula::Or(l, r) => Formula::or(self.context(l), self.context(r)),
            Formula::Before(g) => {
                let x = self.argument(g);
                let head = self.fresh.next("y");
                self.rules.push(Rule::Delay {
                    head: head.clone(),
                    body: x,
                });
                Formula::Atom(head)
            }
            Formula::Since(l, r) => {
                let x = self.argument(l);
                let y = self.argument(r);
                let heads = [self.fresh.next("s"), self.fresh.next("s")];
                self.rules.push(since_rule(heads.clone(), x, y));
                Formula::Atom(heads[1].clone())
            }
            Formula::Once(_) | Formula::Hist(_) => unreachable!("desugared"),
        }
    }

    /// A variable a temporal body may read: an input, or a static copy.
    fn argument(&mut self, f: &Formula) -> Variable {
        match self.context(f) {
            Formula::Atom(v) if self.inputs.contains(&v) => v,
            body => self.define("g", body),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pltl::{eval_formula, parse_formula};
    use crate::programs::{eval_program, is_normal, is_treelike, parse_program};
    use crate::trace::Trace;
    use proptest::prelude::*;

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::new(n).unwrap()).collect()
    }

    fn kinds(p: &Program) -> (usize, usize, usize) {
        let count = |k: fn(&Rule) -> bool| p.rules().iter().filter(|r| k(r)).count();
        (
            count(|r| matches!(r, Rule::Dynamic { .. })),
            count(|r| matches!(r, Rule::Delay { .. })),
            count(|r| matches!(r, Rule::Static { .. })),
        )
    }

    #[test]
    fn example_rule_kinds() {
        let (p, _) = pltl_to_program(&parse_formula("Y (a S b) & c").unwrap()).unwrap();
        assert_eq!(kinds(&p), (1, 1, 1));
        let (p, acc) = pltl_to_program(&parse_formula("a").unwrap()).unwrap();
        assert!(p.is_empty());
        assert_eq!(acc.name(), "a");
    }

    #[test]
    fn unfold_since_rule() {
        let p = parse_program("q1, q2 :- S(b, c).\nh :- Y q1.").unwrap();
        let f = unfold_program(&p, &Variable::new("h").unwrap()).unwrap();
        assert_eq!(f.to_string(), "Y !(b S c)");
        let p = parse_program("e, o :- P(a).").unwrap();
        assert_eq!(
            unfold_program(&p, &Variable::new("o").unwrap()),
            Err(CompileError::UnsupportedOperator("P".into()))
        );
    }

    #[test]
    fn unfold_grows_exponentially_on_shared_chains() {
        let k = 6;
        let text: String = (1..=k)
            .map(|i| {
                let prev = if i == 1 { "a".to_string() } else { format!("p{}", i - 1) };
                format!("p{i} :- {prev} & {prev}.\n")
            })
            .collect();
        let p = parse_program(&text).unwrap();
        let f = unfold_program(&p, &Variable::new(&format!("p{k}")).unwrap()).unwrap();
        assert!(f.size() >= 1 << k);
        assert!(f.size() as u128 <= 1u128 << p.size());
    }

    #[test]
    fn normal_programs() {
        let (p, _) = formula_to_normal_program(&parse_formula("Y Y a & (b S Y c)").unwrap()).unwrap();
        assert!(is_normal(&p).normal, "{p}");
        assert_eq!(kinds(&p).0 + kinds(&p).1, 4);
        let (p, _) = formula_to_normal_program(&parse_formula("Y a & Y b").unwrap()).unwrap();
        assert!(is_normal(&p).normal);
        assert!(!is_treelike(&p));
    }

    proptest! {
        #[test]
        fn translations_preserve_meaning(
            f in crate::pltl::strategy::formula(vec!["a", "b"], 4),
            letters in proptest::collection::vec(0usize..4, 1..8),
        ) {
            let tr = Trace::from_letters(&vars(&["a", "b"]), &letters).unwrap();
            let (p, acc) = pltl_to_program(&f).unwrap();
            prop_assert!(p.len() <= f.desugar().size());
            let (n, nacc) = formula_to_normal_program(&f).unwrap();
            prop_assert!(is_normal(&n).normal);
            prop_assert_eq!(n.rules().iter().filter(|r| r.is_temporal()).count(), f.desugar().temporal_count());
            let unfolded = unfold_program(&p, &acc).unwrap();
            for t in 1..=tr.len() {
                let expected = eval_formula(&f, &tr, t).unwrap();
                prop_assert_eq!(eval_program(&p, &tr, t, &Formula::Atom(acc.clone())).unwrap(), expected);
                prop_assert_eq!(eval_program(&n, &tr, t, &Formula::Atom(nacc.clone())).unwrap(), expected);
                prop_assert_eq!(eval_formula(&unfolded, &tr, t).unwrap(), expected);
            }
        }
    }
}

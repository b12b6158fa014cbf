use std::collections::HashSet;

use crate::lexer::{lex, Tok};
use crate::operators::{OperatorAutomaton, OperatorRegistry};
use crate::pltl::{is_keyword, Formula, FormulaParser};
use crate::trace::Variable;

use super::{Program, ProgramError, Rule};

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Accept `$` in names, as printed for generated variables.
    pub allow_generated: bool,
    pub registry: OperatorRegistry,
}

/// Parses a program with the built-in operators.
pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    parse_program_with(text, &ParseOptions::default())
}

/// Grammar, one rule per `.`:
///
/// ```text
/// h :- <static formula>.
/// h :- Y q.
/// h :- p S q.                      % sugar for  h$k, h :- S(p, q).
/// p1, ..., pn :- Op(a1, ..., am).  % Op registered, or an inline {...} automaton
/// ```
pub fn parse_program_with(text: &str, opts: &ParseOptions) -> Result<Program, ProgramError> {
    let lexed = lex(text, opts.allow_generated)?;
    let used: HashSet<&str> = lexed
        .tokens
        .iter()
        .filter_map(|t| match &t.tok {
            Tok::Ident(s) => Some(s.as_str()),
            _ => None,
        })
        .collect();
    let mut p = FormulaParser::new(&lexed, 0);
    let mut rules = Vec::new();
    let mut fresh: HashSet<String> = HashSet::new();
    while *p.peek() != Tok::End {
        let mut heads = vec![p.variable()?];
        while *p.peek() == Tok::Comma {
            p.bump();
            heads.push(p.variable()?);
        }
        p.expect(Tok::Turnstile)?;
        let rule = match (p.peek().clone(), p.peek_at(1).clone()) {
            (Tok::Ident(op), Tok::LParen) if op == "S" || !is_keyword(&op) => {
                let offset = p.offset();
                p.bump();
                let automaton = opts.registry.lookup(&op).map_err(|e| match e {
                    crate::operators::OperatorError::UnknownOperator(_) => ProgramError::UnknownOperator(op.clone()),
                    other => ProgramError::Syntax(lexed.error_at(offset, other.to_string())),
                })?;
                dynamic(&mut p, heads, op, automaton)?
            }
            (Tok::Json(json), Tok::LParen) => {
                let offset = p.offset();
                p.bump();
                let value: serde_json::Value = serde_json::from_str(&json)
                    .map_err(|e| ProgramError::Syntax(lexed.error_at(offset, format!("inline automaton: {e}"))))?;
                let automaton = OperatorAutomaton::from_json(&value)
                    .map_err(|e| ProgramError::Syntax(lexed.error_at(offset, e.to_string())))?;
                dynamic(&mut p, heads, value.to_string(), automaton)?
            }
            _ => {
                let offset = p.offset();
                let body = p.since()?;
                if heads.len() != 1 {
                    return Err(ProgramError::Syntax(
                        lexed.error_at(offset, "several heads need an operator body"),
                    ));
                }
                let head = heads.pop().expect("one head");
                classify_body(head, body, &used, &mut fresh)?
            }
        };
        p.expect(Tok::Dot)?;
        rules.push(rule);
    }
    Program::new(rules)
}

fn dynamic(
    p: &mut FormulaParser<'_, '_>,
    heads: Vec<Variable>,
    operator: String,
    automaton: OperatorAutomaton,
) -> Result<Rule, ProgramError> {
    p.expect(Tok::LParen)?;
    let mut args = Vec::new();
    if *p.peek() != Tok::RParen {
        args.push(p.variable()?);
        while *p.peek() == Tok::Comma {
            p.bump();
            args.push(p.variable()?);
        }
    }
    p.expect(Tok::RParen)?;
    Ok(Rule::Dynamic {
        heads,
        operator,
        automaton,
        args,
    })
}

fn classify_body(
    head: Variable,
    body: Formula,
    used: &HashSet<&str>,
    fresh: &mut HashSet<String>,
) -> Result<Rule, ProgramError> {
    match body {
        Formula::Before(inner) => match *inner {
            Formula::Atom(q) => Ok(Rule::Delay { head, body: q }),
            _ => Err(ProgramError::NotStatic(head)),
        },
        Formula::Since(l, r) => match (*l, *r) {
            (Formula::Atom(a), Formula::Atom(b)) => {
                let first = (1..)
                    .map(|k| Variable::generated(head.name(), k))
                    .find(|v| !used.contains(v.name()) && !fresh.contains(v.name()))
                    .expect("unbounded");
                fresh.insert(first.name().to_string());
                Ok(Rule::Dynamic {
                    heads: vec![first, head],
                    operator: "S".into(),
                    automaton: crate::operators::since_operator(),
                    args: vec![a, b],
                })
            }
            _ => Err(ProgramError::NotStatic(head)),
        },
        body if body.is_static() => Ok(Rule::Static { head, body }),
        _ => Err(ProgramError::NotStatic(head)),
    }
}

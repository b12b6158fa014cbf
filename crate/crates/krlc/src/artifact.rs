//! Loading formulas, programs, automata and cascades from the command line.

use std::path::Path;

use clap::ValueEnum;
use krl_core::automata::{Alphabet, Automaton};
use krl_core::cascades::Cascade;
use krl_core::equiv::Recognizer;
use krl_core::pltl::{parse_formula_with, Formula};
use krl_core::programs::{parse_program_with, ParseOptions, Program};
use krl_core::trace::{parse_trace, parse_trace_json, Trace, Variable};
use serde_json::Value;

use crate::error::{self, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Formula,
    Program,
    Automaton,
    Cascade,
}

#[derive(Debug, Clone)]
pub enum Artifact {
    Formula(Formula),
    Program { program: Program, accept: Option<Variable> },
    Automaton(Automaton),
    Cascade(Cascade),
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(error::IO, format!("{path}: {e}")))
}

fn read_json(path: &str) -> Result<Value, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::new(error::SYNTAX, format!("{path}: {e}")))
}

/// `file.krl:var` into the path and the accepting variable.
fn split_accept(arg: &str) -> (&str, Option<&str>) {
    match arg.rsplit_once(':') {
        Some((path, var)) if !var.is_empty() && !var.contains(['/', '\\']) && !Path::new(arg).exists() => {
            (path, Some(var))
        }
        _ => (arg, None),
    }
}

pub fn sniff(arg: &str) -> Kind {
    let (path, _) = split_accept(arg);
    if path.ends_with(".krl") {
        Kind::Program
    } else if path.ends_with(".json") {
        match read_json(path) {
            Ok(v) if v.get("components").is_some() => Kind::Cascade,
            _ => Kind::Automaton,
        }
    } else {
        Kind::Formula
    }
}

pub fn load_program(path: &str, opts: &ParseOptions) -> Result<Program, CliError> {
    Ok(parse_program_with(&read(path)?, opts)?)
}

pub fn load(arg: &str, kind: Option<Kind>, opts: &ParseOptions) -> Result<Artifact, CliError> {
    Ok(match kind.unwrap_or_else(|| sniff(arg)) {
        Kind::Formula => Artifact::Formula(parse_formula_with(arg, opts.allow_generated)?),
        Kind::Program => {
            let (path, var) = split_accept(arg);
            let accept = var
                .map(|v| Variable::new_lenient(v))
                .transpose()
                .map_err(|e| CliError::new(error::SYNTAX, e.to_string()))?;
            Artifact::Program {
                program: load_program(path, opts)?,
                accept,
            }
        }
        Kind::Automaton => Artifact::Automaton(Automaton::from_json(&read_json(arg)?)?),
        Kind::Cascade => Artifact::Cascade(Cascade::from_json(&read_json(arg)?)?),
    })
}

fn named_bits(a: &Alphabet) -> Vec<Variable> {
    match a {
        Alphabet::Bits(b) if !b.vars.iter().any(Variable::is_generated) => b.vars.clone(),
        _ => Vec::new(),
    }
}

impl Artifact {
    /// Variables the artifact reads.
    pub fn vars(&self) -> Vec<Variable> {
        match self {
            Artifact::Formula(f) => f.vars(),
            Artifact::Program { program, .. } => program.input_vars().to_vec(),
            Artifact::Automaton(a) => named_bits(a.inputs()),
            Artifact::Cascade(c) => named_bits(c.external()),
        }
    }

    pub fn recognizer(self, universe: Vec<Variable>) -> Result<Recognizer, CliError> {
        Ok(match self {
            Artifact::Formula(f) => Recognizer::formula(f, universe)?,
            Artifact::Program { program, accept } => {
                let accept = accept.ok_or_else(|| CliError::usage("programs need an accepting variable: `file.krl:var`"))?;
                Recognizer::program(program, accept, universe)?
            }
            Artifact::Automaton(a) => Recognizer::automaton(a, universe)?,
            Artifact::Cascade(c) => Recognizer::cascade(c, universe)?,
        })
    }
}

/// `a,b,c`, or the given variables in order of first occurrence.
pub fn universe(explicit: Option<&str>, inferred: impl IntoIterator<Item = Variable>) -> Result<Vec<Variable>, CliError> {
    if let Some(list) = explicit {
        return krl_core::trace::parse_variable_list(list).map_err(CliError::from);
    }
    let mut out: Vec<Variable> = Vec::new();
    for v in inferred {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Names appearing in a trace, in order.
pub fn trace_names(text: &str) -> Vec<Variable> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '\''))
        .filter_map(|w| Variable::new(w).ok())
        .collect()
}

/// A trace given inline as `{a};{}`, as JSON, or as a file holding either.
pub fn trace_text(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else if Path::new(arg).is_file() {
        read(arg)
    } else {
        Err(CliError::new(error::SYNTAX, format!("`{arg}` is neither a trace nor a file")))
    }
}

pub fn parse_any_trace(text: &str, universe: &[Variable]) -> Result<Trace, CliError> {
    Ok(if text.trim_start().starts_with('[') {
        parse_trace_json(text, universe)?
    } else {
        parse_trace(text, universe)?
    })
}

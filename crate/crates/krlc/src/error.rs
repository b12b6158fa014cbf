use std::fmt;

use krl_core::algebra::AlgebraError;
use krl_core::automata::AutomataError;
use krl_core::cascades::CascadeError;
use krl_core::compile::CompileError;
use krl_core::equiv::EquivError;
use krl_core::lexer::SyntaxError;
use krl_core::operators::OperatorError;
use krl_core::pltl::EvalError;
use krl_core::programs::ProgramError;
use krl_core::trace::TraceError;

/// An error with a stable code for scripts.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("KRL001", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

pub const IO: &str = "KRL002";
pub const SYNTAX: &str = "KRL003";
pub const UNKNOWN_VARIABLE: &str = "KRL004";
pub const ILL_FORMED_PROGRAM: &str = "KRL005";
pub const OPERATOR: &str = "KRL006";
pub const AUTOMATON: &str = "KRL007";
pub const UNSUPPORTED: &str = "KRL008";
pub const LIMIT: &str = "KRL009";
pub const UNIVERSE: &str = "KRL010";
pub const TIME: &str = "KRL011";

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(IO, e.to_string())
    }
}

impl From<SyntaxError> for CliError {
    fn from(e: SyntaxError) -> Self {
        CliError::new(SYNTAX, e.to_string())
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        let code = match e {
            TraceError::UnknownVariable(_) => UNKNOWN_VARIABLE,
            _ => SYNTAX,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::new(TIME, e.to_string())
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        CliError::new(OPERATOR, e.to_string())
    }
}

impl From<ProgramError> for CliError {
    fn from(e: ProgramError) -> Self {
        let code = match &e {
            ProgramError::Syntax(_) => SYNTAX,
            ProgramError::UnknownVariable(_) => UNKNOWN_VARIABLE,
            ProgramError::UnknownOperator(_) | ProgramError::Operator(_) => OPERATOR,
            ProgramError::TimeOutOfRange { .. } => TIME,
            _ => ILL_FORMED_PROGRAM,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<AutomataError> for CliError {
    fn from(e: AutomataError) -> Self {
        CliError::new(AUTOMATON, e.to_string())
    }
}

impl From<CascadeError> for CliError {
    fn from(e: CascadeError) -> Self {
        let code = match e {
            CascadeError::StateSpaceTooLarge { .. } => LIMIT,
            _ => AUTOMATON,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Program(p) => p.into(),
            CompileError::Cascade(c) => c.into(),
            CompileError::Automata(a) => a.into(),
            CompileError::TooManyBits { .. } => CliError::new(LIMIT, e.to_string()),
            _ => CliError::new(UNSUPPORTED, e.to_string()),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        let code = match e {
            AlgebraError::StateSpaceTooLarge { .. } | AlgebraError::TooLarge { .. } => LIMIT,
            _ => AUTOMATON,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<EquivError> for CliError {
    fn from(e: EquivError) -> Self {
        match e {
            EquivError::Program(p) => p.into(),
            EquivError::Automata(a) => a.into(),
            EquivError::Cascade(c) => c.into(),
            EquivError::BudgetExceeded { .. } => CliError::new(LIMIT, e.to_string()),
            EquivError::ZeroLength => CliError::usage(e.to_string()),
            _ => CliError::new(UNIVERSE, e.to_string()),
        }
    }
}

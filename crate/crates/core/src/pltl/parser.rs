use crate::lexer::{lex, Lexed, SyntaxError, Tok};
use crate::trace::Variable;

use super::Formula;

const KEYWORDS: &[&str] = &["true", "false", "Y", "O", "H", "S"];

pub(crate) fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

/// Parses a formula. Precedence, tightest first: `!` and the prefix
/// operators `Y O H`, then `&`, then `|`, then `S` (right associative).
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    parse_formula_with(text, false)
}

pub fn parse_formula_with(text: &str, allow_generated: bool) -> Result<Formula, SyntaxError> {
    let lexed = lex(text, allow_generated)?;
    let mut p = FormulaParser::new(&lexed, 0);
    let f = p.since()?;
    p.expect_end()?;
    Ok(f)
}

/// Recursive-descent formula parser over a token slice; the program parser
/// reuses it for rule bodies.
pub struct FormulaParser<'a, 'b> {
    lexed: &'b Lexed<'a>,
    pub pos: usize,
}

impl<'a, 'b> FormulaParser<'a, 'b> {
    pub fn new(lexed: &'b Lexed<'a>, pos: usize) -> Self {
        FormulaParser { lexed, pos }
    }

    pub fn peek(&self) -> &Tok {
        &self.lexed.tokens[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.lexed.tokens.len() - 1);
        &self.lexed.tokens[i].tok
    }

    pub fn offset(&self) -> usize {
        self.lexed.tokens[self.pos].offset
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.lexed.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.lexed.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        self.lexed.error_at(self.offset(), message)
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {tok}, found {}", self.peek())))
        }
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(self.error(format!("unexpected {t}"))),
        }
    }

    pub fn variable(&mut self) -> Result<Variable, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_keyword(&name) => {
                let v = Variable::new_lenient(&name).map_err(|e| self.error(e.to_string()))?;
                self.bump();
                Ok(v)
            }
            t => Err(self.error(format!("expected a variable, found {t}"))),
        }
    }

    pub fn since(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.or()?;
        if matches!(self.peek(), Tok::Ident(s) if s == "S") {
            self.bump();
            let rhs = self.since()?;
            return Ok(Formula::since(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(k) if k == "Y" || k == "O" || k == "H" => {
                self.bump();
                let f = self.unary()?;
                Ok(match k.as_str() {
                    "Y" => Formula::before(f),
                    "O" => Formula::once(f),
                    _ => Formula::hist(f),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.since()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(k) if k == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(_) => Ok(Formula::Atom(self.variable()?)),
            t => Err(self.error(format!("expected a formula, found {t}"))),
        }
    }
}

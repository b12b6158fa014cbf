//! Tokenizer shared by the formula and program parsers.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
    Comma,
    Dot,
    Turnstile,
    /// A balanced `{ ... }` block, kept verbatim (inline operator automata).
    Json(String),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Not => f.write_str("`!`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Turnstile => f.write_str("`:-`"),
            Tok::Json(_) => f.write_str("inline automaton"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub offset: usize,
}

pub struct Lexed<'a> {
    pub text: &'a str,
    pub tokens: Vec<Token>,
}

impl Lexed<'_> {
    pub fn error_at(&self, offset: usize, message: impl Into<String>) -> SyntaxError {
        let (line, column) = line_col(self.text, offset);
        SyntaxError {
            line,
            column,
            message: message.into(),
        }
    }
}

pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, column)
}

/// Tokenizes `text`. `%` starts a comment running to the end of the line.
/// Identifiers may contain `$` only when `allow_generated` is set.
pub fn lex(text: &str, allow_generated: bool) -> Result<Lexed<'_>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    let err = |offset: usize, message: String| {
        let (line, column) = line_col(text, offset);
        SyntaxError {
            line,
            column,
            message,
        }
    };
    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => pos += 1,
            b'%' => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            b'!' => push(&mut tokens, Tok::Not, start, &mut pos, 1),
            b'&' => push(&mut tokens, Tok::And, start, &mut pos, 1),
            b'|' => push(&mut tokens, Tok::Or, start, &mut pos, 1),
            b'(' => push(&mut tokens, Tok::LParen, start, &mut pos, 1),
            b')' => push(&mut tokens, Tok::RParen, start, &mut pos, 1),
            b',' => push(&mut tokens, Tok::Comma, start, &mut pos, 1),
            b'.' => push(&mut tokens, Tok::Dot, start, &mut pos, 1),
            b':' if bytes.get(pos + 1) == Some(&b'-') => {
                push(&mut tokens, Tok::Turnstile, start, &mut pos, 2)
            }
            b'{' => {
                let mut depth = 0usize;
                let mut in_string = false;
                while pos < bytes.len() {
                    let b = bytes[pos];
                    if in_string {
                        if b == b'\\' {
                            pos += 1;
                        } else if b == b'"' {
                            in_string = false;
                        }
                    } else if b == b'"' {
                        in_string = true;
                    } else if b == b'{' {
                        depth += 1;
                    } else if b == b'}' {
                        depth -= 1;
                        if depth == 0 {
                            pos += 1;
                            break;
                        }
                    }
                    pos += 1;
                }
                if depth != 0 {
                    return Err(err(start, "unterminated `{` block".into()));
                }
                tokens.push(Token {
                    tok: Tok::Json(text[start..pos].to_string()),
                    offset: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while pos < bytes.len() {
                    let b = bytes[pos];
                    if b.is_ascii_alphanumeric() || b == b'_' || b == b'\'' || (allow_generated && b == b'$') {
                        pos += 1;
                    } else {
                        break;
                    }
                }
                if !allow_generated && bytes.get(pos) == Some(&b'$') {
                    return Err(err(pos, "`$` is reserved for generated names".into()));
                }
                tokens.push(Token {
                    tok: Tok::Ident(text[start..pos].to_string()),
                    offset: start,
                });
            }
            _ => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                return Err(err(pos, format!("unexpected character `{ch}`")));
            }
        }
    }
    tokens.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(Lexed { text, tokens })
}

fn push(tokens: &mut Vec<Token>, tok: Tok, start: usize, pos: &mut usize, width: usize) {
    tokens.push(Token { tok, offset: start });
    *pos += width;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }

    #[test]
    fn json_blocks_are_balanced() {
        let l = lex(r#"p :- {"a":{"b":"}"}}(x)."#, false).unwrap();
        assert!(matches!(&l.tokens[2].tok, Tok::Json(s) if s == r#"{"a":{"b":"}"}}"#));
        assert!(lex("{", false).is_err());
    }

    #[test]
    fn dollar_is_reserved() {
        assert!(lex("a$1", false).is_err());
        assert!(lex("a$1", true).is_ok());
    }
}

//! Text syntax for (∈,=)-formulas.
//!
//! ASCII-first grammar with Unicode aliases accepted on input:
//!
//! ```text
//! atom   := ident ("in" | "∈" | "notin" | "∉" | "=" | "!=" | "≠") ident
//! unit   := atom | "~" unit | "(" formula ")" | "[" formula "]"
//!         | ("A" | "forall" | "∀") ident "."? formula      (maximal scope)
//!         | ("E" | "exists" | "∃") ident "."? formula      (maximal scope)
//! binary := "&" > "|" > "->" > "<->"   (all right-associative,
//!           listed tightest first; "∧ ∨ → ↔" are aliases)
//! ```
//!
//! `notin`/`∉` and `!=`/`≠` are sugar for a negated atom, expanded at
//! construction. Quantifier bodies extend maximally to the right;
//! parentheses (or brackets, which must match in kind) override.

use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, Var};

/// Words that cannot be used as variable names.
pub const RESERVED: [&str; 6] = ["in", "notin", "forall", "exists", "A", "E"];

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    In,
    NotIn,
    Eq,
    Neq,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Forall,
    Exists,
    Dot,
    Open(char),
    Close(char),
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::In => "`in`".into(),
            Token::NotIn => "`notin`".into(),
            Token::Eq => "`=`".into(),
            Token::Neq => "`!=`".into(),
            Token::Not => "`~`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::Iff => "`<->`".into(),
            Token::Forall => "quantifier `A`".into(),
            Token::Exists => "quantifier `E`".into(),
            Token::Dot => "`.`".into(),
            Token::Open(c) => format!("`{c}`"),
            Token::Close(c) => format!("`{c}`"),
        }
    }

    /// Lexeme count under the symbol-counting convention: every primitive
    /// symbol is one token, and the sugared relations `∉`/`≠` stand for a
    /// negation plus an atom symbol.
    fn official_weight(&self) -> usize {
        match self {
            Token::NotIn | Token::Neq => 2,
            Token::Dot => 0,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '*'
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn lex(mut self) -> Result<Vec<(Token, Pos)>, ParseError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let pos = Pos {
                line: self.line,
                col: self.col,
            };
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '(' | '[' => {
                    self.bump();
                    out.push((Token::Open(c), pos));
                }
                ')' | ']' => {
                    self.bump();
                    out.push((Token::Close(c), pos));
                }
                '.' => {
                    self.bump();
                    out.push((Token::Dot, pos));
                }
                '~' | '¬' => {
                    self.bump();
                    out.push((Token::Not, pos));
                }
                '&' | '∧' => {
                    self.bump();
                    out.push((Token::And, pos));
                }
                '|' | '∨' => {
                    self.bump();
                    out.push((Token::Or, pos));
                }
                '→' => {
                    self.bump();
                    out.push((Token::Implies, pos));
                }
                '↔' => {
                    self.bump();
                    out.push((Token::Iff, pos));
                }
                '∀' => {
                    self.bump();
                    out.push((Token::Forall, pos));
                }
                '∃' => {
                    self.bump();
                    out.push((Token::Exists, pos));
                }
                '∈' => {
                    self.bump();
                    out.push((Token::In, pos));
                }
                '∉' => {
                    self.bump();
                    out.push((Token::NotIn, pos));
                }
                '=' => {
                    self.bump();
                    out.push((Token::Eq, pos));
                }
                '≠' => {
                    self.bump();
                    out.push((Token::Neq, pos));
                }
                '!' => {
                    self.bump();
                    match self.chars.peek() {
                        Some('=') => {
                            self.bump();
                            out.push((Token::Neq, pos));
                        }
                        _ => return Err(self.error("expected `=` after `!`")),
                    }
                }
                '-' => {
                    self.bump();
                    match self.chars.peek() {
                        Some('>') => {
                            self.bump();
                            out.push((Token::Implies, pos));
                        }
                        _ => return Err(self.error("expected `>` after `-`")),
                    }
                }
                '<' => {
                    self.bump();
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        if self.chars.peek() == Some(&'>') {
                            self.bump();
                            out.push((Token::Iff, pos));
                            continue;
                        }
                    }
                    return Err(self.error("expected `<->`"));
                }
                c if is_ident_start(c) => {
                    let mut word = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if is_ident_continue(c) {
                            word.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let token = match word.as_str() {
                        "in" => Token::In,
                        "notin" => Token::NotIn,
                        "A" | "forall" => Token::Forall,
                        "E" | "exists" => Token::Exists,
                        _ => Token::Ident(word),
                    };
                    out.push((token, pos));
                }
                other => {
                    return Err(self.error(format!("unexpected character `{other}`")))
                }
            }
        }
        Ok(out)
    }
}

/// Binding strength of the binary connectives; `~` and atoms bind
/// tighter than all of them.
fn binary_prec(token: &Token) -> Option<u8> {
    match token {
        Token::Iff => Some(1),
        Token::Implies => Some(2),
        Token::Or => Some(3),
        Token::And => Some(4),
        _ => None,
    }
}

struct Parser {
    tokens: Vec<(Token, Pos)>,
    index: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.tokens
            .get(self.index)
            .map(|(_, p)| *p)
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.index).map(|(t, _)| t.clone());
        if t.is_some() {
            self.index += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let p = self.pos();
        ParseError {
            line: p.line,
            col: p.col,
            message: message.into(),
        }
    }

    fn describe_next(&self) -> String {
        match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".into(),
        }
    }

    fn expect_variable(&mut self, context: &str) -> Result<Var, ParseError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.next();
                Ok(Var(name))
            }
            Some(t @ (Token::In | Token::NotIn | Token::Forall | Token::Exists)) => {
                Err(self.error_here(format!(
                    "reserved word {} cannot be used as a variable {context}",
                    t.describe()
                )))
            }
            _ => Err(self.error_here(format!(
                "expected variable {context}, found {}",
                self.describe_next()
            ))),
        }
    }

    fn parse_formula(&mut self, min_prec: u8) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_unit()?;
        while let Some(prec) = self.peek().and_then(binary_prec) {
            if prec < min_prec {
                break;
            }
            let op = self.next().unwrap();
            // Right-associative: the right side re-admits the same level.
            let rhs = self.parse_formula(prec)?;
            lhs = match op {
                Token::And => lhs.and(rhs),
                Token::Or => lhs.or(rhs),
                Token::Implies => lhs.implies(rhs),
                Token::Iff => lhs.iff(rhs),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn parse_unit(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.next();
                Ok(self.parse_unit()?.not())
            }
            Some(q @ (Token::Forall | Token::Exists)) => {
                self.next();
                let var = self.expect_variable("after quantifier")?;
                if self.peek() == Some(&Token::Dot) {
                    self.next();
                }
                let body = self.parse_formula(1)?;
                Ok(match q {
                    Token::Forall => Formula::forall(var, body),
                    _ => Formula::exists(var, body),
                })
            }
            Some(Token::Open(open)) => {
                self.next();
                let inner = self.parse_formula(1)?;
                let want = if open == '(' { ')' } else { ']' };
                match self.next() {
                    Some(Token::Close(c)) if c == want => Ok(inner),
                    Some(t) => {
                        self.index -= 1;
                        Err(self.error_here(format!(
                            "expected `{want}`, found {}",
                            t.describe()
                        )))
                    }
                    None => Err(self.error_here(format!(
                        "expected `{want}`, found end of input"
                    ))),
                }
            }
            Some(Token::Ident(_)) => {
                let lhs = self.expect_variable("")?;
                match self.next() {
                    Some(Token::In) => Ok(Formula::Member(lhs, self.expect_variable("")?)),
                    Some(Token::NotIn) => {
                        Ok(Formula::Member(lhs, self.expect_variable("")?).not())
                    }
                    Some(Token::Eq) => Ok(Formula::Equal(lhs, self.expect_variable("")?)),
                    Some(Token::Neq) => {
                        Ok(Formula::Equal(lhs, self.expect_variable("")?).not())
                    }
                    Some(t) => {
                        self.index -= 1;
                        Err(self.error_here(format!(
                            "expected `in` or `=` after `{lhs}`, found {}",
                            t.describe()
                        )))
                    }
                    None => Err(self.error_here(format!(
                        "expected `in` or `=` after `{lhs}`, found end of input"
                    ))),
                }
            }
            _ => Err(self.error_here(format!(
                "expected a formula, found {}",
                self.describe_next()
            ))),
        }
    }
}

/// Parses a formula from source text.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let lexer = Lexer::new(text);
    let end_probe = {
        // Track where the input ends for end-of-input diagnostics.
        let mut line = 1;
        let mut col = 1;
        for c in text.chars() {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        Pos { line, col }
    };
    let tokens = lexer.lex()?;
    let mut parser = Parser {
        tokens,
        index: 0,
        end: end_probe,
    };
    let formula = parser.parse_formula(1)?;
    if parser.peek().is_some() {
        return Err(parser.error_here(format!(
            "unexpected {} after formula",
            parser.describe_next()
        )));
    }
    Ok(formula)
}

/// Counts the primitive symbols of a rendering: each atomic formula is 3
/// (two variables and the relation), each binary connective 1, each `¬` 1,
/// each quantifier-with-variable 2, each parenthesis or bracket character
/// 1. The sugared `∉`/`≠` count as negation plus relation.
pub fn symbol_count(text: &str) -> Result<usize, ParseError> {
    // Validate first so counts are only reported for well-formed input.
    parse(text)?;
    let tokens = Lexer::new(text).lex()?;
    Ok(tokens.iter().map(|(t, _)| t.official_weight()).sum())
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}", crate::printer::print(self))
    }
}

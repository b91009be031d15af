//! Lexer and recursive-descent parser for the program syntax.
//!
//! The accepted language is a Prolog subset: facts and rules built from
//! atoms, variables, integers, reals, compounds, and lists, plus directive
//! clauses (`:- Goal, Goal.`). Infix operators follow standard priorities:
//! comparison and `is` at 700 (non-associative), `+`/`-` at 500 and `*`/`/`
//! at 400 (both left-associative), unary minus tightest.

use crate::term::Term;
use std::fmt;

/// A top-level program item.
#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    /// `Head.` or `Head :- Body.`
    Clause { head: Term, body: Vec<Term> },
    /// `:- Goal, Goal.` (each conjunct is one directive term)
    Directive(Vec<Term>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Atom(String),
    Var(String),
    Int(i64),
    Real(f64),
    Punct(&'static str),
    ClauseEnd,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Atom(a) => write!(f, "atom '{a}'"),
            Tok::Var(v) => write!(f, "variable '{v}'"),
            Tok::Int(i) => write!(f, "integer {i}"),
            Tok::Real(r) => write!(f, "real {r}"),
            Tok::Punct(p) => write!(f, "'{p}'"),
            Tok::ClauseEnd => write!(f, "'.'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn advance(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.advance();
                }
                Some('%') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.advance();
                    }
                }
                _ => break,
            }
        }
    }

    fn next_tok(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let tok = self.lex()?;
        Ok((tok, line, col))
    }

    fn lex(&mut self) -> Result<Tok, ParseError> {
        let c = match self.peek() {
            None => return Ok(Tok::Eof),
            Some(c) => c,
        };
        if c.is_ascii_digit() {
            return self.lex_number();
        }
        if c.is_ascii_lowercase() {
            return Ok(Tok::Atom(self.lex_ident()));
        }
        if c.is_ascii_uppercase() || c == '_' {
            return Ok(Tok::Var(self.lex_ident()));
        }
        if c == '\'' {
            return self.lex_quoted();
        }
        // Punctuation; longest match first.
        let two: String = self.chars[self.pos..(self.pos + 2).min(self.chars.len())]
            .iter()
            .collect();
        let three: String = self.chars[self.pos..(self.pos + 3).min(self.chars.len())]
            .iter()
            .collect();
        if three == "=:=" {
            for _ in 0..3 {
                self.advance();
            }
            return Ok(Tok::Punct("=:="));
        }
        for p in [":-", "=<", ">="] {
            if two == p {
                self.advance();
                self.advance();
                return Ok(Tok::Punct(match p {
                    ":-" => ":-",
                    "=<" => "=<",
                    _ => ">=",
                }));
            }
        }
        let single = match c {
            '(' => "(",
            ')' => ")",
            '[' => "[",
            ']' => "]",
            ',' => ",",
            '|' => "|",
            '=' => "=",
            '<' => "<",
            '>' => ">",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '.' => {
                self.advance();
                // A clause-terminating dot is followed by layout or EOF;
                // anything else is malformed here since numbers lex their
                // own decimal point.
                match self.peek() {
                    None => return Ok(Tok::ClauseEnd),
                    Some(c) if c.is_whitespace() || c == '%' => return Ok(Tok::ClauseEnd),
                    Some(c) => return Err(self.err(format!("unexpected '{c}' after '.'"))),
                }
            }
            other => return Err(self.err(format!("unexpected character '{other}'"))),
        };
        self.advance();
        Ok(Tok::Punct(single))
    }

    fn lex_ident(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.advance();
            } else {
                break;
            }
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn lex_number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let mut is_real = false;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.advance();
        }
        if self.peek() == Some('.') && self.peek2().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            is_real = true;
            self.advance();
            while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                self.advance();
            }
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = self.pos;
            self.advance();
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.advance();
            }
            if self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                is_real = true;
                while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                    self.advance();
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if is_real {
            text.parse::<f64>()
                .map(Tok::Real)
                .map_err(|e| self.err(format!("bad real literal '{text}': {e}")))
        } else {
            text.parse::<i64>()
                .map(Tok::Int)
                .map_err(|e| self.err(format!("bad integer literal '{text}': {e}")))
        }
    }

    fn lex_quoted(&mut self) -> Result<Tok, ParseError> {
        self.advance();
        let mut s = String::new();
        loop {
            match self.advance() {
                None => return Err(self.err("unterminated quoted atom")),
                Some('\\') => match self.advance() {
                    Some('\\') => s.push('\\'),
                    Some('\'') => s.push('\''),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    other => return Err(self.err(format!("bad escape {other:?} in quoted atom"))),
                },
                Some('\'') => return Ok(Tok::Atom(s)),
                Some(c) => s.push(c),
            }
        }
    }

    #[allow(dead_code)]
    fn src(&self) -> &'a str {
        self.src
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    line: usize,
    col: usize,
    anon: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, line, col) = lexer.next_tok()?;
        Ok(Parser {
            lexer,
            tok,
            line,
            col,
            anon: 0,
        })
    }

    fn bump(&mut self) -> Result<Tok, ParseError> {
        let (tok, line, col) = self.lexer.next_tok()?;
        self.line = line;
        self.col = col;
        Ok(std::mem::replace(&mut self.tok, tok))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), ParseError> {
        if self.tok == Tok::Punct(p) {
            self.bump()?;
            Ok(())
        } else {
            Err(self.err(format!("expected '{p}', found {}", self.tok)))
        }
    }

    fn expect_clause_end(&mut self) -> Result<(), ParseError> {
        if self.tok == Tok::ClauseEnd {
            self.bump()?;
            Ok(())
        } else {
            Err(self.err(format!("expected '.', found {}", self.tok)))
        }
    }

    fn parse_program(&mut self) -> Result<Vec<Item>, ParseError> {
        let mut items = Vec::new();
        while self.tok != Tok::Eof {
            items.push(self.parse_item()?);
        }
        Ok(items)
    }

    fn parse_item(&mut self) -> Result<Item, ParseError> {
        if self.tok == Tok::Punct(":-") {
            self.bump()?;
            let goals = self.parse_conjunction()?;
            self.expect_clause_end()?;
            return Ok(Item::Directive(goals));
        }
        let head = self.parse_expr()?;
        match &head {
            Term::Atom(_) | Term::Compound(_, _) => {}
            other => {
                return Err(self.err(format!(
                    "clause head must be an atom or compound, found {other}"
                )))
            }
        }
        if self.tok == Tok::Punct(":-") {
            self.bump()?;
            let body = self.parse_conjunction()?;
            self.expect_clause_end()?;
            Ok(Item::Clause { head, body })
        } else {
            self.expect_clause_end()?;
            Ok(Item::Clause {
                head,
                body: Vec::new(),
            })
        }
    }

    fn parse_conjunction(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut goals = vec![self.parse_expr()?];
        while self.tok == Tok::Punct(",") {
            self.bump()?;
            goals.push(self.parse_expr()?);
        }
        Ok(goals)
    }

    /// Priority 700: `Left op Right` with a comparison/unification operator,
    /// non-associative.
    fn parse_expr(&mut self) -> Result<Term, ParseError> {
        let left = self.parse_additive()?;
        let op = match &self.tok {
            Tok::Punct(p @ ("=" | "<" | ">" | "=<" | ">=" | "=:=")) => Some(p.to_string()),
            Tok::Atom(a) if a == "is" => Some("is".to_string()),
            _ => None,
        };
        if let Some(op) = op {
            self.bump()?;
            let right = self.parse_additive()?;
            Ok(Term::Compound(op, vec![left, right]))
        } else {
            Ok(left)
        }
    }

    fn parse_additive(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.parse_multiplicative()?;
        while let Tok::Punct(p @ ("+" | "-")) = &self.tok {
            let op = p.to_string();
            self.bump()?;
            let rhs = self.parse_multiplicative()?;
            acc = Term::Compound(op, vec![acc, rhs]);
        }
        Ok(acc)
    }

    fn parse_multiplicative(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.parse_primary()?;
        while let Tok::Punct(p @ ("*" | "/")) = &self.tok {
            let op = p.to_string();
            self.bump()?;
            let rhs = self.parse_primary()?;
            acc = Term::Compound(op, vec![acc, rhs]);
        }
        Ok(acc)
    }

    fn parse_primary(&mut self) -> Result<Term, ParseError> {
        match self.tok.clone() {
            Tok::Punct("-") => {
                self.bump()?;
                let inner = self.parse_primary()?;
                Ok(match inner {
                    Term::Int(i) => Term::Int(-i),
                    Term::Real(r) => Term::Real(-r),
                    other => Term::Compound("-".to_string(), vec![other]),
                })
            }
            Tok::Int(i) => {
                self.bump()?;
                Ok(Term::Int(i))
            }
            Tok::Real(r) => {
                self.bump()?;
                Ok(Term::Real(r))
            }
            Tok::Var(name) => {
                self.bump()?;
                if name == "_" {
                    self.anon += 1;
                    Ok(Term::var(&format!("_A{}", self.anon)))
                } else {
                    Ok(Term::var(&name))
                }
            }
            Tok::Atom(name) => {
                self.bump()?;
                if self.tok == Tok::Punct("(") {
                    self.bump()?;
                    let mut args = vec![self.parse_expr()?];
                    while self.tok == Tok::Punct(",") {
                        self.bump()?;
                        args.push(self.parse_expr()?);
                    }
                    self.expect_punct(")")?;
                    Ok(Term::Compound(name, args))
                } else {
                    Ok(Term::Atom(name))
                }
            }
            Tok::Punct("(") => {
                self.bump()?;
                let inner = self.parse_expr()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            Tok::Punct("[") => {
                self.bump()?;
                if self.tok == Tok::Punct("]") {
                    self.bump()?;
                    return Ok(Term::atom("[]"));
                }
                let mut items = vec![self.parse_expr()?];
                while self.tok == Tok::Punct(",") {
                    self.bump()?;
                    items.push(self.parse_expr()?);
                }
                let tail = if self.tok == Tok::Punct("|") {
                    self.bump()?;
                    self.parse_expr()?
                } else {
                    Term::atom("[]")
                };
                self.expect_punct("]")?;
                let mut t = tail;
                for item in items.into_iter().rev() {
                    t = Term::Compound(".".to_string(), vec![item, t]);
                }
                Ok(t)
            }
            other => Err(self.err(format!("expected a term, found {other}"))),
        }
    }
}

/// Parse a complete program source into clauses and directives.
pub fn parse_program(src: &str) -> Result<Vec<Item>, ParseError> {
    let mut p = Parser::new(src)?;
    p.parse_program()
}

/// Parse a query: a conjunction of goals, with or without a trailing `.`.
pub fn parse_query(src: &str) -> Result<Vec<Term>, ParseError> {
    let mut p = Parser::new(src)?;
    let goals = p.parse_conjunction()?;
    if p.tok == Tok::ClauseEnd {
        p.bump()?;
    }
    if p.tok != Tok::Eof {
        return Err(p.err(format!("unexpected {} after query", p.tok)));
    }
    Ok(goals)
}

/// Parse a single term (used in tests and by the CLI grid option).
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.parse_expr()?;
    if p.tok == Tok::ClauseEnd {
        p.bump()?;
    }
    if p.tok != Tok::Eof {
        return Err(p.err(format!("unexpected {} after term", p.tok)));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rule_with_operators() {
        let items = parse_program("w(X) :- msw(m, M), msw(st(M), Z), X = Y + Z.").unwrap();
        assert_eq!(items.len(), 1);
        match &items[0] {
            Item::Clause { head, body } => {
                assert_eq!(head, &Term::compound("w", vec![Term::var("X")]));
                assert_eq!(body.len(), 3);
                assert_eq!(
                    body[2],
                    Term::compound(
                        "=",
                        vec![
                            Term::var("X"),
                            Term::compound("+", vec![Term::var("Y"), Term::var("Z")])
                        ]
                    )
                );
            }
            other => panic!("expected clause, got {other:?}"),
        }
    }

    #[test]
    fn parses_directives_and_lists() {
        let items = parse_program(
            ":- values(m, [a, b]), set_sw(m, [0.3, 0.7]).\n:- set_sw(st(a), norm(2.0, 1.0)).",
        )
        .unwrap();
        assert_eq!(items.len(), 2);
        match &items[0] {
            Item::Directive(goals) => {
                assert_eq!(goals.len(), 2);
                let list = goals[0].clone();
                if let Term::Compound(_, args) = list {
                    let elems = args[1].as_list().unwrap();
                    assert_eq!(elems, vec![Term::atom("a"), Term::atom("b")]);
                } else {
                    panic!("expected values/2");
                }
            }
            other => panic!("expected directive, got {other:?}"),
        }
    }

    #[test]
    fn number_lexing() {
        assert_eq!(parse_term("3").unwrap(), Term::Int(3));
        assert_eq!(parse_term("3.5").unwrap(), Term::Real(3.5));
        assert_eq!(parse_term("-2.5e-1").unwrap(), Term::Real(-0.25));
        assert_eq!(parse_term("1e3").unwrap(), Term::Real(1000.0));
    }

    #[test]
    fn operator_precedence() {
        let t = parse_term("A + B * C - D").unwrap();
        assert_eq!(
            t,
            Term::compound(
                "-",
                vec![
                    Term::compound(
                        "+",
                        vec![
                            Term::var("A"),
                            Term::compound("*", vec![Term::var("B"), Term::var("C")])
                        ]
                    ),
                    Term::var("D"),
                ]
            )
        );
    }

    #[test]
    fn is_expression() {
        let t = parse_term("N1 is N - 1").unwrap();
        assert_eq!(
            t,
            Term::compound(
                "is",
                vec![
                    Term::var("N1"),
                    Term::compound("-", vec![Term::var("N"), Term::Int(1)])
                ]
            )
        );
    }

    #[test]
    fn clause_end_vs_decimal_point() {
        let items = parse_program("f(3.5).\ng(a).").unwrap();
        assert_eq!(items.len(), 2);
    }

    #[test]
    fn anonymous_vars_are_distinct() {
        let t = parse_term("f(_, _)").unwrap();
        if let Term::Compound(_, args) = t {
            assert_ne!(args[0], args[1]);
        } else {
            panic!("expected compound");
        }
    }

    #[test]
    fn quoted_atoms() {
        assert_eq!(
            parse_term("'Hello world'").unwrap(),
            Term::atom("Hello world")
        );
    }

    #[test]
    fn error_reports_position() {
        let err = parse_program("f(a) :- ).").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.msg.contains("expected a term"));
    }

    #[test]
    fn list_display_round_trip() {
        let t = parse_term("[a, 1, 2.5]").unwrap();
        assert_eq!(format!("{t}"), "[a, 1, 2.5]");
        assert_eq!(parse_term(&format!("{t}")).unwrap(), t);
    }
}

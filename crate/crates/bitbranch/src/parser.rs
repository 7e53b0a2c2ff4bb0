//! Parser and pretty-printer for the mini-C subset.
//!
//! The accepted language: `int` declarations with optional initializers,
//! assignments (including `x = *` / `x = __VERIFIER_nondet_int()` havoc and
//! `x++` / `x--` sugar), `assume`, `assert`, `if`/`else`, `while`, and
//! blocks. An optional `int main() { ... return 0; }` wrapper is accepted
//! and emitted so the printed output compiles against a standard prelude.

use std::fmt;

use thiserror::Error;

use crate::ast::{BinOpTag, Expr, Program, Stmt, StmtKind, UnOpTag, DEFAULT_WIDTH, RESERVED_PREFIX};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at {span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub width: u32,
    /// Accept identifiers with the reserved `__bwb_` prefix. Used when
    /// reloading output this tool produced (golden fixtures, tests).
    pub allow_reserved: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            width: DEFAULT_WIDTH,
            allow_reserved: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    KwInt,
    KwIf,
    KwElse,
    KwWhile,
    KwAssume,
    KwAssert,
    KwReturn,
    KwVoid,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Assign,
    Question,
    Colon,
    PlusPlus,
    MinusMinus,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Amp,
    Pipe,
    Caret,
    Tilde,
    Bang,
    AmpAmp,
    PipePipe,
    Shl,
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::KwInt => "int",
            Tok::KwIf => "if",
            Tok::KwElse => "else",
            Tok::KwWhile => "while",
            Tok::KwAssume => "assume",
            Tok::KwAssert => "assert",
            Tok::KwReturn => "return",
            Tok::KwVoid => "void",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Assign => "=",
            Tok::Question => "?",
            Tok::Colon => ":",
            Tok::PlusPlus => "++",
            Tok::MinusMinus => "--",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Caret => "^",
            Tok::Tilde => "~",
            Tok::Bang => "!",
            Tok::AmpAmp => "&&",
            Tok::PipePipe => "||",
            Tok::Shl => "<<",
            Tok::Shr => ">>",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            _ => "",
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

type Spanned = (Tok, SourceSpan);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn here(&self) -> SourceSpan {
        SourceSpan {
            start_line: self.line,
            start_col: self.col,
            end_line: self.line,
            end_col: self.col,
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.peek2() == Some(b'/') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'/') if self.peek2() == Some(b'*') => {
                    let open = self.here();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            Some(b'*') if self.peek2() == Some(b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => {
                                self.bump();
                            }
                            None => {
                                return Err(ParseError {
                                    span: open,
                                    message: "unterminated block comment".to_string(),
                                })
                            }
                        }
                    }
                }
                Some(b'#') => {
                    return Err(ParseError {
                        span: self.here(),
                        message: "preprocessor directives are not supported".to_string(),
                    })
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Spanned, ParseError> {
        self.skip_trivia()?;
        let start = self.here();
        let span_to = |l: &Lexer<'_>| SourceSpan {
            start_line: start.start_line,
            start_col: start.start_col,
            end_line: l.line,
            end_col: l.col,
        };
        let c = match self.peek() {
            None => return Ok((Tok::Eof, start)),
            Some(c) => c,
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut name = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == b'_' {
                    name.push(self.bump() as char);
                } else {
                    break;
                }
            }
            let tok = match name.as_str() {
                "int" => Tok::KwInt,
                "if" => Tok::KwIf,
                "else" => Tok::KwElse,
                "while" => Tok::KwWhile,
                "assume" => Tok::KwAssume,
                "assert" => Tok::KwAssert,
                "return" => Tok::KwReturn,
                "void" => Tok::KwVoid,
                _ => Tok::Ident(name),
            };
            return Ok((tok, span_to(self)));
        }
        if c.is_ascii_digit() {
            let mut text = String::new();
            let hex = c == b'0' && matches!(self.peek2(), Some(b'x') | Some(b'X'));
            if hex {
                self.bump();
                self.bump();
                while let Some(c) = self.peek() {
                    if c.is_ascii_hexdigit() {
                        text.push(self.bump() as char);
                    } else {
                        break;
                    }
                }
                if text.is_empty() {
                    return Err(ParseError {
                        span: span_to(self),
                        message: "expected hex digits after 0x".to_string(),
                    });
                }
            } else {
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() {
                        text.push(self.bump() as char);
                    } else {
                        break;
                    }
                }
            }
            let radix = if hex { 16 } else { 10 };
            let value = u64::from_str_radix(&text, radix).map_err(|_| ParseError {
                span: span_to(self),
                message: "integer literal out of range".to_string(),
            })?;
            // Range check against the configured width happens in the parser.
            return Ok((Tok::Int(value as i64), span_to(self)));
        }
        self.bump();
        let two = |l: &mut Lexer<'_>, tok| {
            l.bump();
            tok
        };
        let tok = match (c, self.peek()) {
            (b'+', Some(b'+')) => two(self, Tok::PlusPlus),
            (b'-', Some(b'-')) => two(self, Tok::MinusMinus),
            (b'&', Some(b'&')) => two(self, Tok::AmpAmp),
            (b'|', Some(b'|')) => two(self, Tok::PipePipe),
            (b'<', Some(b'<')) => two(self, Tok::Shl),
            (b'>', Some(b'>')) => two(self, Tok::Shr),
            (b'<', Some(b'=')) => two(self, Tok::Le),
            (b'>', Some(b'=')) => two(self, Tok::Ge),
            (b'=', Some(b'=')) => two(self, Tok::EqEq),
            (b'!', Some(b'=')) => two(self, Tok::Ne),
            (b'+', _) => Tok::Plus,
            (b'-', _) => Tok::Minus,
            (b'*', _) => Tok::Star,
            (b'/', _) => Tok::Slash,
            (b'%', _) => Tok::Percent,
            (b'&', _) => Tok::Amp,
            (b'|', _) => Tok::Pipe,
            (b'^', _) => Tok::Caret,
            (b'~', _) => Tok::Tilde,
            (b'!', _) => Tok::Bang,
            (b'<', _) => Tok::Lt,
            (b'>', _) => Tok::Gt,
            (b'=', _) => Tok::Assign,
            (b'(', _) => Tok::LParen,
            (b')', _) => Tok::RParen,
            (b'{', _) => Tok::LBrace,
            (b'}', _) => Tok::RBrace,
            (b';', _) => Tok::Semi,
            (b',', _) => Tok::Comma,
            (b'?', _) => Tok::Question,
            (b':', _) => Tok::Colon,
            other => {
                return Err(ParseError {
                    span: start,
                    message: format!("unexpected character `{}`", other.0 as char),
                })
            }
        };
        Ok((tok, span_to(self)))
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut lexer = Lexer::new(src);
    let mut toks = Vec::new();
    loop {
        let t = lexer.next_token()?;
        let eof = t.0 == Tok::Eof;
        toks.push(t);
        if eof {
            return Ok(toks);
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    opts: ParseOptions,
    declared: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            span: self.span(),
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => Err(self.err(format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn check_declared(&self, name: &str) -> Result<(), ParseError> {
        if self.declared.iter().any(|d| d == name) {
            Ok(())
        } else {
            Err(self.err(format!("use of undeclared identifier `{name}`")))
        }
    }

    fn lit_range_check(&self, raw: i64) -> Result<i64, ParseError> {
        let w = self.opts.width;
        let unsigned_max = if w >= 64 { u64::MAX } else { (1u64 << w) - 1 };
        let raw_u = raw as u64;
        if raw_u > unsigned_max {
            return Err(self.err(format!(
                "integer literal does not fit in {w} bits"
            )));
        }
        // Wrap into signed two's complement at width w.
        let half = 1i64 << (w - 1);
        let v = raw_u as i64;
        Ok(if w < 64 && v >= half { v - (1i64 << w) } else { v })
    }

    fn parse_program(&mut self) -> Result<Program, ParseError> {
        let mut program = Program::new(self.opts.width);
        // Optional `int main() {` wrapper.
        let wrapped = *self.peek() == Tok::KwInt
            && matches!(self.peek_at(1), Tok::Ident(n) if n == "main");
        if wrapped {
            self.bump();
            self.bump();
            self.expect(Tok::LParen)?;
            if *self.peek() == Tok::KwVoid {
                self.bump();
            }
            self.expect(Tok::RParen)?;
            self.expect(Tok::LBrace)?;
        }
        // Declarations first.
        while *self.peek() == Tok::KwInt {
            self.bump();
            loop {
                let span = self.span();
                let name = self.expect_ident()?;
                if !self.opts.allow_reserved && name.starts_with(RESERVED_PREFIX) {
                    return Err(ParseError {
                        span,
                        message: format!("identifier prefix `{RESERVED_PREFIX}` is reserved"),
                    });
                }
                if self.declared.iter().any(|d| *d == name) {
                    return Err(ParseError {
                        span,
                        message: format!("duplicate declaration of `{name}`"),
                    });
                }
                self.declared.push(name.clone());
                let init = if *self.peek() == Tok::Assign {
                    self.bump();
                    Some(self.parse_expr()?)
                } else {
                    None
                };
                program.decls.push((name, init));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Semi)?;
        }
        // Statements.
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::KwReturn => {
                    self.bump();
                    if *self.peek() != Tok::Semi {
                        self.parse_expr()?;
                    }
                    self.expect(Tok::Semi)?;
                    break;
                }
                Tok::RBrace if wrapped => break,
                _ => program.body.push(self.parse_stmt()?),
            }
        }
        if wrapped {
            // A trailing `return ...;` may already have consumed up to here.
            if *self.peek() == Tok::KwReturn {
                self.bump();
                if *self.peek() != Tok::Semi {
                    self.parse_expr()?;
                }
                self.expect(Tok::Semi)?;
            }
            self.expect(Tok::RBrace)?;
        }
        if *self.peek() != Tok::Eof {
            return Err(self.err(format!(
                "expected end of input, found {}",
                self.peek().describe()
            )));
        }
        Ok(program)
    }

    fn parse_stmt(&mut self) -> Result<Stmt, ParseError> {
        match self.peek().clone() {
            Tok::KwInt => Err(self.err("declarations must precede statements")),
            Tok::Semi => {
                self.bump();
                Ok(Stmt::new(StmtKind::Block(Vec::new())))
            }
            Tok::LBrace => {
                self.bump();
                let mut stmts = Vec::new();
                while *self.peek() != Tok::RBrace {
                    if *self.peek() == Tok::Eof {
                        return Err(self.err("expected `}`, found end of input"));
                    }
                    stmts.push(self.parse_stmt()?);
                }
                self.bump();
                Ok(Stmt::new(StmtKind::Block(stmts)))
            }
            Tok::KwIf => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                let then_branch = self.parse_branch()?;
                let else_branch = if *self.peek() == Tok::KwElse {
                    self.bump();
                    self.parse_branch()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::new(StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                }))
            }
            Tok::KwWhile => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                let body = self.parse_branch()?;
                Ok(Stmt::new(StmtKind::While { cond, body }))
            }
            Tok::KwAssume => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::new(StmtKind::Assume(cond)))
            }
            Tok::KwAssert => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::new(StmtKind::Assert(cond)))
            }
            Tok::Ident(name) => {
                self.check_declared(&name)?;
                self.bump();
                match self.bump() {
                    Tok::PlusPlus => {
                        self.expect(Tok::Semi)?;
                        let rhs =
                            Expr::binary(BinOpTag::Add, Expr::var(name.clone()), Expr::lit(1));
                        Ok(Stmt::assign(name, rhs))
                    }
                    Tok::MinusMinus => {
                        self.expect(Tok::Semi)?;
                        let rhs =
                            Expr::binary(BinOpTag::Sub, Expr::var(name.clone()), Expr::lit(1));
                        Ok(Stmt::assign(name, rhs))
                    }
                    Tok::Assign => {
                        if self.is_nondet_rhs() {
                            self.consume_nondet_rhs()?;
                            self.expect(Tok::Semi)?;
                            Ok(Stmt::havoc(name))
                        } else {
                            let rhs = self.parse_expr()?;
                            self.expect(Tok::Semi)?;
                            Ok(Stmt::assign(name, rhs))
                        }
                    }
                    other => Err(self.err(format!(
                        "expected `=`, `++`, or `--` after identifier, found {}",
                        other.describe()
                    ))),
                }
            }
            other => Err(self.err(format!("expected statement, found {}", other.describe()))),
        }
    }

    /// Branch body of if/while: a braced block or a single statement.
    fn parse_branch(&mut self) -> Result<Vec<Stmt>, ParseError> {
        if *self.peek() == Tok::LBrace {
            match self.parse_stmt()?.kind {
                StmtKind::Block(stmts) => Ok(stmts),
                _ => unreachable!(),
            }
        } else {
            Ok(vec![self.parse_stmt()?])
        }
    }

    fn is_nondet_rhs(&self) -> bool {
        match self.peek() {
            Tok::Star => *self.peek_at(1) == Tok::Semi,
            Tok::Ident(name) if name == "__VERIFIER_nondet_int" => true,
            _ => false,
        }
    }

    fn consume_nondet_rhs(&mut self) -> Result<(), ParseError> {
        match self.bump() {
            Tok::Star => Ok(()),
            Tok::Ident(_) => {
                self.expect(Tok::LParen)?;
                self.expect(Tok::RParen)?;
                Ok(())
            }
            _ => unreachable!(),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let cond = self.parse_binary(1)?;
        if *self.peek() == Tok::Question {
            self.bump();
            let then_branch = self.parse_expr()?;
            self.expect(Tok::Colon)?;
            let else_branch = self.parse_expr()?;
            Ok(Expr::ternary(cond, then_branch, else_branch, false))
        } else {
            Ok(cond)
        }
    }

    fn parse_binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let (op, prec) = match self.peek() {
                Tok::PipePipe => (BinOpTag::LogOr, 1),
                Tok::AmpAmp => (BinOpTag::LogAnd, 2),
                Tok::Pipe => (BinOpTag::BitOr, 3),
                Tok::Caret => (BinOpTag::BitXor, 4),
                Tok::Amp => (BinOpTag::BitAnd, 5),
                Tok::EqEq => (BinOpTag::Eq, 6),
                Tok::Ne => (BinOpTag::Ne, 6),
                Tok::Lt => (BinOpTag::Lt, 7),
                Tok::Le => (BinOpTag::Le, 7),
                Tok::Gt => (BinOpTag::Gt, 7),
                Tok::Ge => (BinOpTag::Ge, 7),
                Tok::Shl => (BinOpTag::Shl, 8),
                Tok::Shr => (BinOpTag::Shr, 8),
                Tok::Plus => (BinOpTag::Add, 9),
                Tok::Minus => (BinOpTag::Sub, 9),
                Tok::Star => (BinOpTag::Mul, 10),
                Tok::Slash => (BinOpTag::Div, 10),
                Tok::Percent => (BinOpTag::Mod, 10),
                _ => break,
            };
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.parse_binary(prec + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                let operand = self.parse_unary()?;
                // Fold negation of a literal so negative constants round-trip.
                if let Expr::IntLit(v) = operand {
                    let w = self.opts.width;
                    let half = 1i64 << (w - 1);
                    let neg = v.checked_neg().ok_or_else(|| self.err("literal overflow"))?;
                    if neg < -half {
                        return Err(self.err(format!("integer literal does not fit in {w} bits")));
                    }
                    Ok(Expr::lit(neg))
                } else {
                    Ok(Expr::unary(UnOpTag::Neg, operand))
                }
            }
            Tok::Tilde => {
                self.bump();
                Ok(Expr::unary(UnOpTag::BitNot, self.parse_unary()?))
            }
            Tok::Bang => {
                self.bump();
                Ok(Expr::unary(UnOpTag::LogNot, self.parse_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let e = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Int(raw) => {
                let v = self.lit_range_check(raw)?;
                self.bump();
                Ok(Expr::lit(v))
            }
            Tok::Ident(name) => {
                if name == "__VERIFIER_nondet_int" {
                    return Err(self.err(
                        "nondeterministic value allowed only as a full assignment right-hand side",
                    ));
                }
                self.check_declared(&name)?;
                self.bump();
                Ok(Expr::var(name))
            }
            Tok::Star => Err(self.err(
                "nondeterministic value `*` allowed only as a full assignment right-hand side",
            )),
            other => Err(self.err(format!("expected expression, found {}", other.describe()))),
        }
    }
}

/// Parses mini-C source at the default 32-bit width.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    parse_with_options(text, ParseOptions::default())
}

pub fn parse_with_options(text: &str, opts: ParseOptions) -> Result<Program, ParseError> {
    assert!((2..=63).contains(&opts.width), "width must be in 2..=63");
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        opts,
        declared: Vec::new(),
    };
    parser.parse_program()
}

// ---------------------------------------------------------------------------
// Pretty-printer
// ---------------------------------------------------------------------------

const TERNARY_PREC: u8 = 0;
const UNARY_PREC: u8 = 11;

fn bin_prec(op: BinOpTag) -> u8 {
    match op {
        BinOpTag::LogOr => 1,
        BinOpTag::LogAnd => 2,
        BinOpTag::BitOr => 3,
        BinOpTag::BitXor => 4,
        BinOpTag::BitAnd => 5,
        BinOpTag::Eq | BinOpTag::Ne => 6,
        BinOpTag::Lt | BinOpTag::Le | BinOpTag::Gt | BinOpTag::Ge => 7,
        BinOpTag::Shl | BinOpTag::Shr => 8,
        BinOpTag::Add | BinOpTag::Sub => 9,
        BinOpTag::Mul | BinOpTag::Div | BinOpTag::Mod => 10,
    }
}

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => bin_prec(*op),
        Expr::Unary { .. } => UNARY_PREC,
        // Ternaries and negative literals are always printed parenthesized.
        Expr::Ternary { .. } => u8::MAX,
        Expr::IntLit(v) if *v < 0 => u8::MAX,
        _ => u8::MAX,
    }
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let prec = expr_prec(e);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Var(name) => out.push_str(name),
        Expr::IntLit(v) => {
            if *v < 0 {
                out.push_str(&format!("(-{})", v.unsigned_abs()));
            } else {
                out.push_str(&v.to_string());
            }
        }
        Expr::Nondet => out.push_str("__VERIFIER_nondet_int()"),
        Expr::Meta(m) => out.push_str(&m.to_string()),
        Expr::Unary { op, operand } => {
            out.push_str(match op {
                UnOpTag::Neg => "-",
                UnOpTag::BitNot => "~",
                UnOpTag::LogNot => "!",
            });
            // `-(-x)` must not print as `--x`, which lexes as a decrement.
            let nested_neg = *op == UnOpTag::Neg
                && matches!(**operand, Expr::Unary { op: UnOpTag::Neg, .. });
            if nested_neg {
                out.push('(');
                write_expr(out, operand, TERNARY_PREC);
                out.push(')');
            } else {
                write_expr(out, operand, UNARY_PREC);
            }
        }
        Expr::Binary { op, left, right } => {
            let p = bin_prec(*op);
            write_expr(out, left, p);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(out, right, p + 1);
        }
        Expr::Ternary {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            out.push('(');
            write_expr(out, cond, TERNARY_PREC + 1);
            out.push_str(" ? ");
            write_expr(out, then_branch, TERNARY_PREC);
            out.push_str(" : ");
            write_expr(out, else_branch, TERNARY_PREC);
            out.push(')');
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders one expression as C text with minimal parentheses.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, TERNARY_PREC);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_stmt(out: &mut String, s: &Stmt, level: usize) {
    for note in &s.notes {
        indent(out, level);
        out.push_str("// bwb: ");
        out.push_str(note);
        out.push('\n');
    }
    match &s.kind {
        StmtKind::Assign { target, rhs } => {
            indent(out, level);
            out.push_str(&format!("{target} = {};\n", print_expr(rhs)));
        }
        StmtKind::Havoc { target, .. } => {
            indent(out, level);
            out.push_str(&format!("{target} = __VERIFIER_nondet_int();\n"));
        }
        StmtKind::Assume(cond) => {
            indent(out, level);
            out.push_str(&format!("assume({});\n", print_expr(cond)));
        }
        StmtKind::Assert(cond) => {
            indent(out, level);
            out.push_str(&format!("assert({});\n", print_expr(cond)));
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            indent(out, level);
            out.push_str(&format!("if ({}) {{\n", print_expr(cond)));
            for st in then_branch {
                write_stmt(out, st, level + 1);
            }
            indent(out, level);
            out.push('}');
            write_else(out, else_branch, level);
            out.push('\n');
        }
        StmtKind::While { cond, body } => {
            indent(out, level);
            out.push_str(&format!("while ({}) {{\n", print_expr(cond)));
            for st in body {
                write_stmt(out, st, level + 1);
            }
            indent(out, level);
            out.push_str("}\n");
        }
        StmtKind::Block(stmts) => {
            indent(out, level);
            out.push_str("{\n");
            for st in stmts {
                write_stmt(out, st, level + 1);
            }
            indent(out, level);
            out.push_str("}\n");
        }
    }
}

/// `else if` chains print flat rather than nesting braces.
fn write_else(out: &mut String, else_branch: &[Stmt], level: usize) {
    if else_branch.is_empty() {
        return;
    }
    if else_branch.len() == 1 {
        if let StmtKind::If {
            cond,
            then_branch,
            else_branch: inner_else,
        } = &else_branch[0].kind
        {
            if else_branch[0].notes.is_empty() {
                out.push_str(&format!(" else if ({}) {{\n", print_expr(cond)));
                for st in then_branch {
                    write_stmt(out, st, level + 1);
                }
                indent(out, level);
                out.push('}');
                write_else(out, inner_else, level);
                return;
            }
        }
    }
    out.push_str(" else {\n");
    for st in else_branch {
        write_stmt(out, st, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn collect_notes(stmts: &[Stmt], tally: &mut Vec<(String, usize)>) {
    for s in stmts {
        for note in &s.notes {
            match tally.iter_mut().find(|(n, _)| n == note) {
                Some((_, c)) => *c += 1,
                None => tally.push((note.clone(), 1)),
            }
        }
        match &s.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                collect_notes(then_branch, tally);
                collect_notes(else_branch, tally);
            }
            StmtKind::While { body, .. } => collect_notes(body, tally),
            StmtKind::Block(stmts) => collect_notes(stmts, tally),
            _ => {}
        }
    }
}

/// Pretty-prints a program as C text. Output reparses to a struct_eq
/// program and compiles against a prelude defining `assume`, `assert`,
/// and `__VERIFIER_nondet_int`.
pub fn print(p: &Program) -> String {
    let mut out = String::new();
    out.push_str("// bitbranch: bitwise branching transformer\n");
    out.push_str("// prelude: assume(int), assert(int), int __VERIFIER_nondet_int(void)\n");
    let mut tally = Vec::new();
    collect_notes(&p.body, &mut tally);
    if !tally.is_empty() {
        let listing: Vec<String> = tally
            .iter()
            .map(|(n, c)| format!("{n} x{c}"))
            .collect();
        out.push_str(&format!("// rules fired: {}\n", listing.join(", ")));
    }
    out.push_str("int main() {\n");
    for (name, init) in &p.decls {
        match init {
            Some(e) => out.push_str(&format!("  int {name} = {};\n", print_expr(e))),
            None => out.push_str(&format!("  int {name};\n")),
        }
    }
    for s in &p.body {
        write_stmt(&mut out, s, 1);
    }
    out.push_str("  return 0;\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{stmts_struct_eq, BinOpTag};

    #[test]
    fn parses_example_one() {
        let src = "int a; int x; a = *; assume(a>0); while (x>0){ a--; x = x & a; }";
        let p = parse(src).unwrap();
        assert_eq!(p.decls.len(), 2);
        assert_eq!(p.body.len(), 3);
        match &p.body[0].kind {
            StmtKind::Havoc { target, original } => {
                assert_eq!(target, "a");
                assert!(original.is_none());
            }
            other => panic!("expected havoc, got {other:?}"),
        }
        match &p.body[2].kind {
            StmtKind::While { body, .. } => {
                // a-- desugars to a = a - 1
                let desugared = Stmt::assign(
                    "a",
                    Expr::binary(BinOpTag::Sub, Expr::var("a"), Expr::lit(1)),
                );
                assert!(body[0].struct_eq(&desugared));
            }
            other => panic!("expected while, got {other:?}"),
        }
    }

    #[test]
    fn empty_program() {
        let p = parse("").unwrap();
        assert!(p.decls.is_empty());
        assert!(p.body.is_empty());
        let printed = print(&p);
        let back = parse(&printed).unwrap();
        assert!(back.struct_eq(&p));
    }

    #[test]
    fn missing_operand_is_parse_error() {
        let err = parse("int x = 1; x = x & ;").unwrap_err();
        assert!(err.message.contains("expected expression"), "{err}");
    }

    #[test]
    fn undeclared_identifier_rejected() {
        let err = parse("int x; x = y + 1;").unwrap_err();
        assert!(err.message.contains("undeclared"), "{err}");
    }

    #[test]
    fn nondet_only_as_full_rhs() {
        let err = parse("int x; x = 1 + __VERIFIER_nondet_int();").unwrap_err();
        assert!(err.message.contains("nondeterministic"), "{err}");
    }

    #[test]
    fn reserved_prefix_rejected() {
        let err = parse("int __bwb_t0;").unwrap_err();
        assert!(err.message.contains("reserved"), "{err}");
        let opts = ParseOptions {
            allow_reserved: true,
            ..ParseOptions::default()
        };
        assert!(parse_with_options("int __bwb_t0;", opts).is_ok());
    }

    #[test]
    fn precedence_matches_c() {
        // a | b ^ c & d == e < f << g + h * i  parses bottom-up
        let p = parse(
            "int a; int b; int c; int d; int e; int f; int g; int h; int i; int x;\n\
             x = a | b ^ c & d == e < f << g + h * i;",
        )
        .unwrap();
        let rhs = match &p.body[0].kind {
            StmtKind::Assign { rhs, .. } => rhs.clone(),
            _ => panic!(),
        };
        // Top node must be `|`.
        match &rhs {
            Expr::Binary { op, .. } => assert_eq!(*op, BinOpTag::BitOr),
            other => panic!("expected binary, got {other:?}"),
        }
        // Round trip reproduces the same tree.
        let text = print_expr(&rhs);
        let p2 = parse(&format!(
            "int a; int b; int c; int d; int e; int f; int g; int h; int i; int x; x = {text};"
        ))
        .unwrap();
        match &p2.body[0].kind {
            StmtKind::Assign { rhs: rhs2, .. } => assert!(rhs2.struct_eq(&rhs)),
            _ => panic!(),
        }
    }

    #[test]
    fn hex_literals_wrap_to_signed() {
        let opts = ParseOptions {
            width: 8,
            ..ParseOptions::default()
        };
        let p = parse_with_options("int x = 0xFF;", opts).unwrap();
        assert!(p.decls[0].1.as_ref().unwrap().struct_eq(&Expr::lit(-1)));
        let err = parse_with_options("int x = 0x100;", opts).unwrap_err();
        assert!(err.message.contains("fit"), "{err}");
    }

    #[test]
    fn main_wrapper_roundtrip() {
        let src = "int main() {\n  int x = 1;\n  x = x + 1;\n  return 0;\n}\n";
        let p = parse(src).unwrap();
        let bare = parse("int x = 1; x = x + 1;").unwrap();
        assert!(p.struct_eq(&bare));
        let reparsed = parse(&print(&p)).unwrap();
        assert!(reparsed.struct_eq(&p));
    }

    #[test]
    fn blocks_and_branches_roundtrip() {
        let src = "int x; int y;\n\
                   if (x < y) { x = y; } else { y = x; }\n\
                   while (x > 0) x--;\n\
                   { x = 0; }";
        let p = parse(src).unwrap();
        let reparsed = parse(&print(&p)).unwrap();
        assert!(stmts_struct_eq(&reparsed.body, &p.body));
    }
}

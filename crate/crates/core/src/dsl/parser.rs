//! Recursive-descent parser for `.story` files.
//!
//! ```text
//! model     := (highlevel | eventdef | story)*
//! highlevel := "highlevel" IDENT ("," IDENT)*
//! eventdef  := "event" IDENT "(" params? ")" "=" "[" template ("," template)* "]"
//! story     := "story" STRING "{" stmt* "}"
//! stmt      := "request" eventexpr
//!            | "waitFor" patternset
//!            | "block" patternset "until" pattern
//!            | "repeat" INT "{" stmt* "}"
//!            | "forever" "{" stmt* "}"
//!            | "choose" "{" "{" stmt* "}" ("or" "{" stmt* "}")+ "}"
//!            | "session" IDENT "{" stmt* "}"
//! eventexpr := IDENT ("(" (field ("," field)*)? ")")?
//! field     := IDENT ":" (STRING | INT | IDENT)
//! ```

use super::ast::*;
use super::diag::Diagnostic;
use super::lexer::{tokenize, Token, TokenKind};
use super::source::{SourceFile, Span};

/// Statement nesting beyond this depth is rejected instead of recursing.
pub const MAX_NESTING: usize = 64;

/// Parses one source file. `file` is the id the spans will carry.
pub fn parse_file(file: u32, source: &SourceFile) -> Result<ModelAst, Vec<Diagnostic>> {
    let (tokens, mut diags) = tokenize(file, &source.content);
    let mut parser = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let mut model = ModelAst::default();
    while !parser.at(&TokenKind::Eof) {
        if let Err(d) = parser.top_level(&mut model) {
            diags.push(d);
            parser.recover();
        }
    }
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(diags)
    }
}

/// Parses a single source file as file 0.
pub fn parse(source: &SourceFile) -> Result<ModelAst, Vec<Diagnostic>> {
    parse_file(0, source)
}

/// Parses raw bytes, reporting invalid UTF-8 as a diagnostic.
pub fn parse_bytes(file: u32, path: &str, bytes: &[u8]) -> Result<ModelAst, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_file(file, &SourceFile::new(path, text)),
        Err(e) => {
            let at = e.valid_up_to();
            Err(vec![Diagnostic::error(
                "invalid-utf8",
                "source file is not valid UTF-8",
                Span::new(file, at, at + e.error_len().unwrap_or(1)),
            )])
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> Option<Token> {
        if self.at(kind) {
            Some(self.bump())
        } else {
            None
        }
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let tok = self.peek();
        if tok.kind == TokenKind::Eof {
            Diagnostic::error(
                "unexpected-eof",
                format!("unexpected end of file, expected {expected}"),
                tok.span,
            )
        } else {
            Diagnostic::error(
                "unexpected-token",
                format!("unexpected {}, expected {expected}", tok.kind),
                tok.span,
            )
        }
    }

    fn expect(&mut self, kind: &TokenKind) -> PResult<Token> {
        self.eat(kind)
            .ok_or_else(|| self.unexpected(&kind.to_string()))
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// Skips to the next token that can start a top-level item.
    fn recover(&mut self) {
        self.bump();
        while !matches!(
            self.peek().kind,
            TokenKind::Eof | TokenKind::Event | TokenKind::Story | TokenKind::HighLevel
        ) {
            self.bump();
        }
    }

    fn top_level(&mut self, model: &mut ModelAst) -> PResult<()> {
        match self.peek().kind {
            TokenKind::HighLevel => {
                self.bump();
                model.highlevel.push(self.ident("a high-level event name")?);
                while self.eat(&TokenKind::Comma).is_some() {
                    model.highlevel.push(self.ident("a high-level event name")?);
                }
            }
            TokenKind::Event => {
                let def = self.event_def()?;
                model.event_defs.push(def);
            }
            TokenKind::Story => {
                let story = self.story()?;
                model.stories.push(story);
            }
            _ => return Err(self.unexpected("`event`, `story` or `highlevel`")),
        }
        Ok(())
    }

    fn event_def(&mut self) -> PResult<EventDef> {
        let start = self.expect(&TokenKind::Event)?.span;
        let name = self.ident("an event name")?;
        self.expect(&TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            params.push(self.ident("a parameter name")?);
            while self.eat(&TokenKind::Comma).is_some() {
                params.push(self.ident("a parameter name")?);
            }
        }
        self.expect(&TokenKind::RParen)?;
        self.expect(&TokenKind::Eq)?;
        self.expect(&TokenKind::LBracket)?;
        let mut body = vec![self.event_expr()?];
        while self.eat(&TokenKind::Comma).is_some() {
            body.push(self.event_expr()?);
        }
        let end = self.expect(&TokenKind::RBracket)?.span;
        Ok(EventDef {
            name,
            params,
            body,
            span: start.to(end),
        })
    }

    fn story(&mut self) -> PResult<StoryDef> {
        let start = self.expect(&TokenKind::Story)?.span;
        let (name, name_span) = match &self.peek().kind {
            TokenKind::Str(s) => {
                let s = s.clone();
                (s, self.bump().span)
            }
            _ => return Err(self.unexpected("a story name string")),
        };
        let (body, end) = self.block()?;
        Ok(StoryDef {
            name,
            name_span,
            body,
            span: start.to(end),
        })
    }

    /// `"{" stmt* "}"`, returning the closing brace span.
    fn block(&mut self) -> PResult<(Vec<Stmt>, Span)> {
        let open = self.expect(&TokenKind::LBrace)?.span;
        if self.depth >= MAX_NESTING {
            return Err(Diagnostic::error(
                "nesting-too-deep",
                format!("blocks nest deeper than {MAX_NESTING} levels"),
                open,
            ));
        }
        self.depth += 1;
        let mut body = Vec::new();
        let result = loop {
            if let Some(close) = self.eat(&TokenKind::RBrace) {
                break Ok((body, close.span));
            }
            match self.stmt() {
                Ok(s) => body.push(s),
                Err(e) => break Err(e),
            }
        };
        self.depth -= 1;
        result
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.peek().span;
        let kind = match self.peek().kind {
            TokenKind::Request => {
                self.bump();
                StmtKind::Request(self.event_expr()?)
            }
            TokenKind::WaitFor => {
                self.bump();
                StmtKind::WaitFor(self.pattern_set()?)
            }
            TokenKind::Block => {
                self.bump();
                let blocked = self.pattern_set()?;
                self.expect(&TokenKind::Until)?;
                let until = self.event_expr()?;
                StmtKind::BlockUntil { blocked, until }
            }
            TokenKind::Repeat => {
                self.bump();
                let count = match self.peek().kind {
                    TokenKind::Int(n) => {
                        self.bump();
                        n
                    }
                    _ => return Err(self.unexpected("a repeat count")),
                };
                let (body, _) = self.block()?;
                StmtKind::Repeat { count, body }
            }
            TokenKind::Forever => {
                self.bump();
                StmtKind::Forever(self.block()?.0)
            }
            TokenKind::Choose => {
                self.bump();
                self.expect(&TokenKind::LBrace)?;
                let mut branches = vec![self.block()?.0];
                self.expect(&TokenKind::Or)?;
                branches.push(self.block()?.0);
                while self.eat(&TokenKind::Or).is_some() {
                    branches.push(self.block()?.0);
                }
                self.expect(&TokenKind::RBrace)?;
                StmtKind::Choose(branches)
            }
            TokenKind::Session => {
                self.bump();
                let id = self.ident("a session name")?;
                let (body, _) = self.block()?;
                StmtKind::Session { id, body }
            }
            _ => return Err(self.unexpected("a statement")),
        };
        let end = self.tokens[self.pos.saturating_sub(1)].span;
        Ok(Stmt {
            kind,
            span: start.to(end),
        })
    }

    fn pattern_set(&mut self) -> PResult<Vec<EventExpr>> {
        let mut set = vec![self.event_expr()?];
        while self.eat(&TokenKind::Comma).is_some() {
            set.push(self.event_expr()?);
        }
        Ok(set)
    }

    fn event_expr(&mut self) -> PResult<EventExpr> {
        let name = self.ident("an event name")?;
        let mut span = name.span;
        let mut fields = Vec::new();
        if self.eat(&TokenKind::LParen).is_some() {
            if !self.at(&TokenKind::RParen) {
                fields.push(self.field()?);
                while self.eat(&TokenKind::Comma).is_some() {
                    fields.push(self.field()?);
                }
            }
            span = span.to(self.expect(&TokenKind::RParen)?.span);
        }
        Ok(EventExpr { name, fields, span })
    }

    fn field(&mut self) -> PResult<Field> {
        // keywords are valid field names, e.g. `session: S1`
        let key = match keyword_text(&self.peek().kind) {
            Some(word) => Ident {
                name: word.to_string(),
                span: self.bump().span,
            },
            None => self.ident("a field name")?,
        };
        self.expect(&TokenKind::Colon)?;
        let tok = self.peek().clone();
        let value = match tok.kind {
            TokenKind::Str(s) => Literal::Str(s),
            TokenKind::Int(n) => Literal::Int(n),
            TokenKind::Ident(s) => Literal::Ident(s),
            _ => return Err(self.unexpected("a string, integer or identifier value")),
        };
        self.bump();
        Ok(Field {
            span: key.span.to(tok.span),
            key,
            value,
        })
    }
}

fn keyword_text(kind: &TokenKind) -> Option<&'static str> {
    Some(match kind {
        TokenKind::Event => "event",
        TokenKind::Story => "story",
        TokenKind::Request => "request",
        TokenKind::WaitFor => "waitFor",
        TokenKind::Block => "block",
        TokenKind::Until => "until",
        TokenKind::Repeat => "repeat",
        TokenKind::Forever => "forever",
        TokenKind::Choose => "choose",
        TokenKind::Or => "or",
        TokenKind::Session => "session",
        TokenKind::HighLevel => "highlevel",
        _ => return None,
    })
}

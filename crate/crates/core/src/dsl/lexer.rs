use std::fmt;

use super::diag::Diagnostic;
use super::source::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Str(String),
    Int(i64),
    // keywords
    Event,
    Story,
    Request,
    WaitFor,
    Block,
    Until,
    Repeat,
    Forever,
    Choose,
    Or,
    Session,
    HighLevel,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Eq,
    Eof,
}

pub const KEYWORDS: &[&str] = &[
    "event",
    "story",
    "request",
    "waitFor",
    "block",
    "until",
    "repeat",
    "forever",
    "choose",
    "or",
    "session",
    "highlevel",
];

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "event" => TokenKind::Event,
        "story" => TokenKind::Story,
        "request" => TokenKind::Request,
        "waitFor" => TokenKind::WaitFor,
        "block" => TokenKind::Block,
        "until" => TokenKind::Until,
        "repeat" => TokenKind::Repeat,
        "forever" => TokenKind::Forever,
        "choose" => TokenKind::Choose,
        "or" => TokenKind::Or,
        "session" => TokenKind::Session,
        "highlevel" => TokenKind::HighLevel,
        _ => return None,
    })
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Str(_) => f.write_str("string literal"),
            TokenKind::Int(i) => write!(f, "integer `{i}`"),
            TokenKind::Event => f.write_str("`event`"),
            TokenKind::Story => f.write_str("`story`"),
            TokenKind::Request => f.write_str("`request`"),
            TokenKind::WaitFor => f.write_str("`waitFor`"),
            TokenKind::Block => f.write_str("`block`"),
            TokenKind::Until => f.write_str("`until`"),
            TokenKind::Repeat => f.write_str("`repeat`"),
            TokenKind::Forever => f.write_str("`forever`"),
            TokenKind::Choose => f.write_str("`choose`"),
            TokenKind::Or => f.write_str("`or`"),
            TokenKind::Session => f.write_str("`session`"),
            TokenKind::HighLevel => f.write_str("`highlevel`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::LBracket => f.write_str("`[`"),
            TokenKind::RBracket => f.write_str("`]`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::Eq => f.write_str("`=`"),
            TokenKind::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes the whole input. Lexical errors are collected and the offending
/// characters skipped, so the token stream always ends with `Eof`.
pub fn tokenize(file: u32, src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let bytes = src.as_bytes();
    let mut chars = src.char_indices().peekable();
    let span = |s: usize, e: usize| Span::new(file, s, e);

    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '/' && bytes.get(start + 1) == Some(&b'/') {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let punct = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            ',' => Some(TokenKind::Comma),
            ':' => Some(TokenKind::Colon),
            '=' => Some(TokenKind::Eq),
            _ => None,
        };
        if let Some(kind) = punct {
            chars.next();
            tokens.push(Token {
                kind,
                span: span(start, start + 1),
            });
            continue;
        }
        if is_ident_start(c) {
            let mut end = start;
            while let Some(&(i, c)) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            let word = &src[start..end];
            let kind = keyword(word).unwrap_or_else(|| TokenKind::Ident(word.to_string()));
            tokens.push(Token {
                kind,
                span: span(start, end),
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && bytes.get(start + 1).is_some_and(u8::is_ascii_digit))
        {
            chars.next();
            let mut end = start + 1;
            while let Some(&(i, c)) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                end = i + 1;
                chars.next();
            }
            match src[start..end].parse::<i64>() {
                Ok(v) => tokens.push(Token {
                    kind: TokenKind::Int(v),
                    span: span(start, end),
                }),
                Err(_) => diags.push(Diagnostic::error(
                    "int-overflow",
                    format!(
                        "integer literal `{}` does not fit in 64 bits",
                        &src[start..end]
                    ),
                    span(start, end),
                )),
            }
            continue;
        }
        if c == '"' {
            chars.next();
            let mut value = String::new();
            let mut end = None;
            while let Some((i, c)) = chars.next() {
                match c {
                    '"' => {
                        end = Some(i + 1);
                        break;
                    }
                    '\\' => match chars.next() {
                        Some((_, 'n')) => value.push('\n'),
                        Some((_, 't')) => value.push('\t'),
                        Some((_, '"')) => value.push('"'),
                        Some((_, '\\')) => value.push('\\'),
                        Some((j, other)) => {
                            diags.push(Diagnostic::error(
                                "bad-escape",
                                format!("unknown escape sequence `\\{other}`"),
                                span(i, j + other.len_utf8()),
                            ));
                        }
                        None => break,
                    },
                    '\n' => break,
                    c => value.push(c),
                }
            }
            match end {
                Some(end) => tokens.push(Token {
                    kind: TokenKind::Str(value),
                    span: span(start, end),
                }),
                None => diags.push(Diagnostic::error(
                    "unterminated-string",
                    "string literal is not terminated on this line",
                    span(start, start + 1),
                )),
            }
            continue;
        }
        chars.next();
        diags.push(Diagnostic::error(
            "bad-character",
            format!("unexpected character {c:?}"),
            span(start, start + c.len_utf8()),
        ));
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: span(src.len(), src.len()),
    });
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let (toks, diags) = tokenize(0, src);
        assert!(diags.is_empty(), "{diags:?}");
        toks.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn keywords_idents_and_literals() {
        assert_eq!(
            kinds(r#"request push(color: "gr\"een", n: -3) // tail"#),
            vec![
                TokenKind::Request,
                TokenKind::Ident("push".into()),
                TokenKind::LParen,
                TokenKind::Ident("color".into()),
                TokenKind::Colon,
                TokenKind::Str("gr\"een".into()),
                TokenKind::Comma,
                TokenKind::Ident("n".into()),
                TokenKind::Colon,
                TokenKind::Int(-3),
                TokenKind::RParen,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn bad_character_is_reported_and_skipped() {
        let (toks, diags) = tokenize(0, "story # \"s\"");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "bad-character");
        assert_eq!((diags[0].span.start, diags[0].span.end), (6, 7));
        assert_eq!(toks.len(), 3);
    }

    #[test]
    fn unterminated_string() {
        let (_, diags) = tokenize(0, "story \"abc");
        assert_eq!(diags[0].code, "unterminated-string");
    }
}

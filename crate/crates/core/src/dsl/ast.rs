//! Syntax tree of the story language. Every node keeps the span it was
//! parsed from; spans are ignored by `==` (see [`Span`]).

use super::source::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            span: Span::default(),
        }
    }
}

/// Right-hand side of a `key: value` field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Str(String),
    Int(i64),
    /// A bare identifier. Inside an `event` definition it names a parameter;
    /// inside a story it is a symbolic string value.
    Ident(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub key: Ident,
    pub value: Literal,
    pub span: Span,
}

/// `name(key: value, ...)`. Used for requests, patterns and templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventExpr {
    pub name: Ident,
    pub fields: Vec<Field>,
    pub span: Span,
}

impl EventExpr {
    pub fn new(name: &str, fields: &[(&str, Literal)]) -> Self {
        Self {
            name: Ident::new(name),
            fields: fields
                .iter()
                .map(|(k, v)| Field {
                    key: Ident::new(*k),
                    value: v.clone(),
                    span: Span::default(),
                })
                .collect(),
            span: Span::default(),
        }
    }
}

/// `event Name(params) = [templates]`: a high-level event and its
/// low-level refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDef {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub body: Vec<EventExpr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoryDef {
    pub name: String,
    pub name_span: Span,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Request(EventExpr),
    WaitFor(Vec<EventExpr>),
    BlockUntil {
        blocked: Vec<EventExpr>,
        until: EventExpr,
    },
    Repeat {
        count: i64,
        body: Vec<Stmt>,
    },
    Forever(Vec<Stmt>),
    Choose(Vec<Vec<Stmt>>),
    Session {
        id: Ident,
        body: Vec<Stmt>,
    },
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Self {
            kind,
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelAst {
    /// Names declared with `highlevel a, b`: requesting one of them without
    /// a matching `event` definition is an error.
    pub highlevel: Vec<Ident>,
    pub event_defs: Vec<EventDef>,
    pub stories: Vec<StoryDef>,
}

impl ModelAst {
    /// Appends another file's declarations, keeping their order.
    pub fn extend(&mut self, other: ModelAst) {
        self.highlevel.extend(other.highlevel);
        self.event_defs.extend(other.event_defs);
        self.stories.extend(other.stories);
    }
}

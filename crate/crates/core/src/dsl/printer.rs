use std::fmt::Write;

use super::ast::*;

/// Renders an AST back to source text in a canonical layout.
/// `parse(pretty_print(ast)) == ast` for every well-formed AST.
pub fn pretty_print(model: &ModelAst) -> String {
    let mut out = String::new();
    if !model.highlevel.is_empty() {
        let names: Vec<&str> = model.highlevel.iter().map(|i| i.name.as_str()).collect();
        writeln!(out, "highlevel {}", names.join(", ")).unwrap();
    }
    for def in &model.event_defs {
        let params: Vec<&str> = def.params.iter().map(|p| p.name.as_str()).collect();
        let body: Vec<String> = def.body.iter().map(event_expr).collect();
        writeln!(
            out,
            "event {}({}) = [{}]",
            def.name.name,
            params.join(", "),
            body.join(", ")
        )
        .unwrap();
    }
    for story in &model.stories {
        writeln!(out, "story {} {{", quote(&story.name)).unwrap();
        stmts(&mut out, &story.body, 1);
        out.push_str("}\n");
    }
    out
}

pub fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

pub fn event_expr(e: &EventExpr) -> String {
    if e.fields.is_empty() {
        return e.name.name.clone();
    }
    let fields: Vec<String> = e
        .fields
        .iter()
        .map(|f| {
            let v = match &f.value {
                Literal::Str(s) => quote(s),
                Literal::Int(i) => i.to_string(),
                Literal::Ident(s) => s.clone(),
            };
            format!("{}: {v}", f.key.name)
        })
        .collect();
    format!("{}({})", e.name.name, fields.join(", "))
}

fn pattern_set(set: &[EventExpr]) -> String {
    set.iter().map(event_expr).collect::<Vec<_>>().join(", ")
}

fn stmts(out: &mut String, body: &[Stmt], indent: usize) {
    for s in body {
        stmt(out, s, indent);
    }
}

fn block(out: &mut String, body: &[Stmt], indent: usize) {
    out.push_str("{\n");
    stmts(out, body, indent + 1);
    out.push_str(&"  ".repeat(indent));
    out.push('}');
}

fn stmt(out: &mut String, s: &Stmt, indent: usize) {
    let pad = "  ".repeat(indent);
    out.push_str(&pad);
    match &s.kind {
        StmtKind::Request(e) => write!(out, "request {}", event_expr(e)).unwrap(),
        StmtKind::WaitFor(set) => write!(out, "waitFor {}", pattern_set(set)).unwrap(),
        StmtKind::BlockUntil { blocked, until } => write!(
            out,
            "block {} until {}",
            pattern_set(blocked),
            event_expr(until)
        )
        .unwrap(),
        StmtKind::Repeat { count, body } => {
            write!(out, "repeat {count} ").unwrap();
            block(out, body, indent);
        }
        StmtKind::Forever(body) => {
            out.push_str("forever ");
            block(out, body, indent);
        }
        StmtKind::Choose(branches) => {
            out.push_str("choose {\n");
            for (i, branch) in branches.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                if i > 0 {
                    out.push_str("or ");
                }
                block(out, branch, indent + 1);
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
        StmtKind::Session { id, body } => {
            write!(out, "session {} ", id.name).unwrap();
            block(out, body, indent);
        }
    }
    out.push('\n');
}

//! Semantic checks: name resolution, arity, structural rules.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::*;
use super::diag::{has_errors, Diagnostic};
use super::expand::expand_refinements;
use super::model::{CheckedModel, CheckedStory, Refinement, Step, Template, TemplateValue};
use super::source::Span;
use crate::engine::{Event, EventPattern, Value, SESSION_FIELD};

/// Resolves and validates an AST and returns the expanded low-level model.
/// Warnings ride along in [`CheckedModel::warnings`]; on any error the full
/// diagnostic list (errors and warnings) is returned instead.
pub fn check(ast: &ModelAst) -> Result<CheckedModel, Vec<Diagnostic>> {
    let mut checker = Checker {
        diags: Vec::new(),
        highlevel: ast.highlevel.iter().map(|i| i.name.as_str()).collect(),
        refinements: BTreeMap::new(),
    };
    checker.event_defs(&ast.event_defs);
    let mut stories = Vec::new();
    let mut seen: HashMap<&str, Span> = HashMap::new();
    for story in &ast.stories {
        if seen.insert(&story.name, story.name_span).is_some() {
            checker.diags.push(Diagnostic::error(
                "duplicate-name",
                format!("story {:?} is defined more than once", story.name),
                story.name_span,
            ));
        }
        let body = checker.block(&story.body, false);
        stories.push(CheckedStory {
            name: story.name.clone(),
            body,
        });
    }
    if has_errors(&checker.diags) {
        return Err(checker.diags);
    }

    let unexpanded = CheckedModel {
        refinements: checker.refinements,
        stories,
        ..Default::default()
    };
    let mut model = expand_refinements(&unexpanded);
    let mut warnings = checker.diags;
    for story in &ast.stories {
        unmatched_patterns(&story.body, &model.vocabulary, &mut warnings);
    }
    model.warnings = warnings;
    Ok(model)
}

struct Checker<'a> {
    diags: Vec<Diagnostic>,
    highlevel: BTreeSet<&'a str>,
    refinements: BTreeMap<String, Refinement>,
}

impl<'a> Checker<'a> {
    fn error(&mut self, code: &'static str, msg: String, span: Span) {
        self.diags.push(Diagnostic::error(code, msg, span));
    }

    fn event_defs(&mut self, defs: &'a [EventDef]) {
        let mut spans: HashMap<&str, Span> = HashMap::new();
        for def in defs {
            if spans.insert(&def.name.name, def.name.span).is_some() {
                self.error(
                    "duplicate-name",
                    format!("event `{}` is defined more than once", def.name.name),
                    def.name.span,
                );
                continue;
            }
            let mut params = Vec::new();
            for p in &def.params {
                if params.contains(&p.name) {
                    self.error(
                        "duplicate-name",
                        format!("parameter `{}` is declared twice", p.name),
                        p.span,
                    );
                }
                params.push(p.name.clone());
            }
            let mut body = Vec::new();
            for t in &def.body {
                let mut fields = BTreeMap::new();
                for f in &t.fields {
                    let value = match &f.value {
                        Literal::Ident(p) if params.contains(p) => TemplateValue::Param(p.clone()),
                        Literal::Ident(p) => {
                            self.error(
                                "undeclared-param",
                                format!("`{p}` is not a parameter of event `{}`", def.name.name),
                                f.span,
                            );
                            continue;
                        }
                        Literal::Str(s) => TemplateValue::Literal(Value::Str(s.clone())),
                        Literal::Int(i) => TemplateValue::Literal(Value::Int(*i)),
                    };
                    if fields.insert(f.key.name.clone(), value).is_some() {
                        self.duplicate_field(&f.key);
                    }
                }
                body.push(Template {
                    name: t.name.name.clone(),
                    fields,
                });
            }
            self.refinements
                .insert(def.name.name.clone(), Refinement { params, body });
        }
        self.refinement_cycles(defs);
    }

    fn refinement_cycles(&mut self, defs: &[EventDef]) {
        // colour: 1 = on stack, 2 = done
        fn visit(
            name: &str,
            refs: &BTreeMap<String, Refinement>,
            colour: &mut HashMap<String, u8>,
        ) -> bool {
            match colour.get(name) {
                Some(1) => return true,
                Some(2) => return false,
                _ => {}
            }
            colour.insert(name.to_string(), 1);
            let cyclic = refs[name]
                .body
                .iter()
                .filter(|t| refs.contains_key(&t.name))
                .any(|t| visit(&t.name, refs, colour));
            colour.insert(name.to_string(), 2);
            cyclic
        }
        let mut colour = HashMap::new();
        for def in defs {
            if self.refinements.contains_key(&def.name.name)
                && visit(&def.name.name, &self.refinements, &mut colour)
            {
                self.error(
                    "recursive-event-def",
                    format!("event `{}` refines into itself", def.name.name),
                    def.name.span,
                );
            }
        }
    }

    fn duplicate_field(&mut self, key: &Ident) {
        self.error(
            "duplicate-field",
            format!("field `{}` is given twice", key.name),
            key.span,
        );
    }

    fn fields(&mut self, expr: &EventExpr) -> BTreeMap<String, Value> {
        let mut map = BTreeMap::new();
        for f in &expr.fields {
            let v = match &f.value {
                Literal::Str(s) | Literal::Ident(s) => Value::Str(s.clone()),
                Literal::Int(i) => Value::Int(*i),
            };
            if map.insert(f.key.name.clone(), v).is_some() {
                self.duplicate_field(&f.key);
            }
        }
        map
    }

    fn pattern(&mut self, expr: &EventExpr) -> EventPattern {
        EventPattern {
            name: expr.name.name.clone(),
            constraints: self.fields(expr),
        }
    }

    fn request(&mut self, expr: &EventExpr, in_session: bool) -> Event {
        let fields = self.fields(expr);
        let name = &expr.name.name;
        if let Some(def) = self.refinements.get(name) {
            let given: BTreeSet<&String> = fields.keys().collect();
            let wanted: BTreeSet<&String> = def.params.iter().collect();
            if given != wanted {
                let msg = format!(
                    "event `{name}` takes ({}) but was given ({})",
                    def.params.join(", "),
                    fields.keys().cloned().collect::<Vec<_>>().join(", ")
                );
                self.error("arity-mismatch", msg, expr.span);
            }
        } else if self.highlevel.contains(name.as_str()) {
            self.error(
                "undefined-event-def",
                format!("high-level event `{name}` has no `event` definition"),
                expr.name.span,
            );
        } else if in_session && fields.contains_key(SESSION_FIELD) {
            self.error(
                "session-conflict",
                "an event inside a `session` block cannot set its own session".into(),
                expr.span,
            );
        }
        Event {
            name: name.clone(),
            fields,
        }
    }

    fn block(&mut self, body: &[Stmt], in_session: bool) -> Vec<Step> {
        body.iter().map(|s| self.stmt(s, in_session)).collect()
    }

    fn stmt(&mut self, stmt: &Stmt, in_session: bool) -> Step {
        match &stmt.kind {
            StmtKind::Request(e) => Step::Request(self.request(e, in_session)),
            StmtKind::WaitFor(set) => Step::WaitFor(set.iter().map(|p| self.pattern(p)).collect()),
            StmtKind::BlockUntil { blocked, until } => Step::BlockUntil {
                blocked: blocked.iter().map(|p| self.pattern(p)).collect(),
                until: self.pattern(until),
            },
            StmtKind::Repeat { count, body } => {
                let count = match u32::try_from(*count) {
                    Ok(c) if c >= 1 => c,
                    _ => {
                        self.error(
                            "bad-repeat-count",
                            format!(
                                "repeat count must be between 1 and {}, got {count}",
                                u32::MAX
                            ),
                            stmt.span,
                        );
                        1
                    }
                };
                Step::Repeat {
                    count,
                    body: self.block(body, in_session),
                }
            }
            StmtKind::Forever(body) => {
                let body = self.block(body, in_session);
                if !must_sync(&body) {
                    self.error(
                        "non-syncing-loop",
                        "a `forever` body must reach a request, waitFor or block on every pass"
                            .into(),
                        stmt.span,
                    );
                }
                Step::Forever(body)
            }
            StmtKind::Choose(branches) => {
                let branches: Vec<Vec<Step>> =
                    branches.iter().map(|b| self.block(b, in_session)).collect();
                if !branches.iter().all(|b| must_sync(b)) {
                    self.error(
                        "non-syncing-branch",
                        "every `choose` branch must start with a synchronization point".into(),
                        stmt.span,
                    );
                }
                Step::Choose(branches)
            }
            StmtKind::Session { id, body } => {
                if in_session {
                    self.error(
                        "nested-session",
                        format!("session `{}` is nested inside another session", id.name),
                        id.span,
                    );
                }
                Step::Session {
                    id: id.name.clone(),
                    body: self.block(body, true),
                }
            }
        }
    }
}

/// True when executing `body` always reaches at least one sync point.
pub(crate) fn must_sync(body: &[Step]) -> bool {
    body.iter().any(|s| match s {
        Step::Request(_) | Step::WaitFor(_) | Step::BlockUntil { .. } => true,
        Step::Repeat { body, .. } | Step::Forever(body) | Step::Session { body, .. } => {
            must_sync(body)
        }
        Step::Choose(branches) => branches.iter().all(|b| must_sync(b)),
    })
}

fn unmatched_patterns(body: &[Stmt], vocabulary: &BTreeSet<String>, out: &mut Vec<Diagnostic>) {
    let warn = |p: &EventExpr, out: &mut Vec<Diagnostic>| {
        if !vocabulary.contains(&p.name.name) {
            out.push(Diagnostic::warning(
                "unmatched-pattern",
                format!("no story ever requests an event named `{}`", p.name.name),
                p.span,
            ));
        }
    };
    for stmt in body {
        match &stmt.kind {
            StmtKind::WaitFor(set) => set.iter().for_each(|p| warn(p, out)),
            StmtKind::BlockUntil { blocked, until } => {
                blocked.iter().for_each(|p| warn(p, out));
                warn(until, out);
            }
            StmtKind::Request(_) => {}
            StmtKind::Repeat { body, .. } | StmtKind::Forever(body) => {
                unmatched_patterns(body, vocabulary, out)
            }
            StmtKind::Session { body, .. } => unmatched_patterns(body, vocabulary, out),
            StmtKind::Choose(branches) => branches
                .iter()
                .for_each(|b| unmatched_patterns(b, vocabulary, out)),
        }
    }
}

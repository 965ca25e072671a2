use std::collections::BTreeMap;

use super::model::{vocabulary_of, CheckedModel, CheckedStory, Refinement, Step, TemplateValue};
use crate::engine::{Event, Value, SESSION_FIELD};

/// Replaces every request of a high-level event by its low-level sequence
/// and pushes session tags onto the events emitted inside `session` blocks.
/// Loops stay symbolic. Expanding an already expanded model is a no-op.
pub fn expand_refinements(model: &CheckedModel) -> CheckedModel {
    let stories = model
        .stories
        .iter()
        .map(|s| CheckedStory {
            name: s.name.clone(),
            body: expand_body(&model.refinements, &s.body, None),
        })
        .collect::<Vec<_>>();
    CheckedModel {
        refinements: model.refinements.clone(),
        vocabulary: vocabulary_of(&stories),
        stories,
        warnings: model.warnings.clone(),
    }
}

fn expand_body(
    defs: &BTreeMap<String, Refinement>,
    body: &[Step],
    session: Option<&str>,
) -> Vec<Step> {
    let mut out = Vec::with_capacity(body.len());
    for step in body {
        match step {
            Step::Request(event) => {
                let mut events = Vec::new();
                expand_event(defs, event, &mut Vec::new(), &mut events);
                for mut e in events {
                    if let Some(s) = session {
                        e.fields
                            .insert(SESSION_FIELD.to_string(), Value::Str(s.to_string()));
                    }
                    out.push(Step::Request(e));
                }
            }
            Step::Session { id, body } => out.extend(expand_body(defs, body, Some(id))),
            Step::Repeat { count, body } => out.push(Step::Repeat {
                count: *count,
                body: expand_body(defs, body, session),
            }),
            Step::Forever(body) => out.push(Step::Forever(expand_body(defs, body, session))),
            Step::Choose(branches) => out.push(Step::Choose(
                branches
                    .iter()
                    .map(|b| expand_body(defs, b, session))
                    .collect(),
            )),
            Step::WaitFor(_) | Step::BlockUntil { .. } => out.push(step.clone()),
        }
    }
    out
}

/// `stack` holds the definitions being expanded; a name already on it is
/// left as a plain event (cycles are rejected earlier by the checker).
fn expand_event<'a>(
    defs: &'a BTreeMap<String, Refinement>,
    event: &Event,
    stack: &mut Vec<&'a str>,
    out: &mut Vec<Event>,
) {
    let Some((name, def)) = defs.get_key_value(&event.name) else {
        out.push(event.clone());
        return;
    };
    if stack.contains(&name.as_str()) {
        out.push(event.clone());
        return;
    }
    stack.push(name);
    for template in &def.body {
        let mut low = Event::new(template.name.clone());
        for (key, value) in &template.fields {
            let resolved = match value {
                TemplateValue::Literal(v) => Some(v.clone()),
                TemplateValue::Param(p) => event.fields.get(p).cloned(),
            };
            if let Some(v) = resolved {
                low.fields.insert(key.clone(), v);
            }
        }
        expand_event(defs, &low, stack, out);
    }
    stack.pop();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::model::Template;

    fn hot_model(body: Vec<Step>) -> CheckedModel {
        let template = |n: &str| Template {
            name: n.into(),
            fields: BTreeMap::new(),
        };
        let mut refinements = BTreeMap::new();
        refinements.insert(
            "HOT".to_string(),
            Refinement {
                params: vec![],
                body: vec![template("hot_1"), template("hot_2"), template("hot_3")],
            },
        );
        CheckedModel {
            refinements,
            stories: vec![CheckedStory {
                name: "s".into(),
                body,
            }],
            ..Default::default()
        }
    }

    #[test]
    fn session_block_expands_and_tags() {
        let model = hot_model(vec![Step::Session {
            id: "S1".into(),
            body: vec![Step::Request(Event::new("HOT"))],
        }]);
        let expanded = expand_refinements(&model);
        let expected: Vec<Step> = (1..=3)
            .map(|i| Step::Request(Event::new(format!("hot_{i}")).with("session", "S1")))
            .collect();
        assert_eq!(expanded.stories[0].body, expected);
        assert_eq!(
            expanded.vocabulary.iter().cloned().collect::<Vec<_>>(),
            vec!["hot_1", "hot_2", "hot_3"]
        );
    }

    #[test]
    fn low_level_only_is_unchanged() {
        let body = vec![
            Step::Request(Event::new("a")),
            Step::Repeat {
                count: 2,
                body: vec![Step::Request(Event::new("b").with("k", 1))],
            },
        ];
        let model = hot_model(body.clone());
        assert_eq!(expand_refinements(&model).stories[0].body, body);
    }

    /// Hand-written oracle: unroll loops first, then expand each request.
    fn unroll_then_expand(body: &[Step], out: &mut Vec<String>) {
        for step in body {
            match step {
                Step::Request(e) if e.name == "HOT" => {
                    out.extend(["hot_1", "hot_2", "hot_3"].map(String::from))
                }
                Step::Request(e) => out.push(e.name.clone()),
                Step::Repeat { count, body } => {
                    for _ in 0..*count {
                        unroll_then_expand(body, out);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    fn unroll(body: &[Step], out: &mut Vec<String>) {
        for step in body {
            match step {
                Step::Request(e) => out.push(e.name.clone()),
                Step::Repeat { count, body } => {
                    for _ in 0..*count {
                        unroll(body, out);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn repeat_of_high_level_event() {
        let body = vec![Step::Repeat {
            count: 2,
            body: vec![Step::Request(Event::new("HOT"))],
        }];
        let mut oracle = Vec::new();
        unroll_then_expand(&body, &mut oracle);
        assert_eq!(oracle.len(), 6);

        let expanded = expand_refinements(&hot_model(body));
        let mut got = Vec::new();
        unroll(&expanded.stories[0].body, &mut got);
        assert_eq!(got, oracle);
    }

    #[test]
    fn idempotent() {
        let model = hot_model(vec![Step::Session {
            id: "S".into(),
            body: vec![
                Step::Request(Event::new("HOT")),
                Step::Forever(vec![Step::Request(Event::new("HOT"))]),
            ],
        }]);
        let once = expand_refinements(&model);
        let twice = expand_refinements(&once);
        assert_eq!(once.to_canonical_json(), twice.to_canonical_json());
    }
}

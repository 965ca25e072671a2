//! Scenario files: one canonical JSON object per line.

use thiserror::Error;

use crate::engine::Scenario;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ScenarioFileError {
    pub line: usize,
    pub message: String,
}

pub fn write_scenarios(scenarios: &[Scenario]) -> String {
    let mut out = String::new();
    for s in scenarios {
        out.push_str(&s.canonical());
        out.push('\n');
    }
    out
}

/// Parses newline-delimited scenarios; blank lines are skipped.
pub fn read_scenarios(text: &str) -> Result<Vec<Scenario>, ScenarioFileError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ScenarioFileError {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Event, Terminal};

    #[test]
    fn canonical_line_format() {
        let s = Scenario {
            events: vec![
                Event::new("a").with("k", 1),
                Event::new("b").with("session", "S1"),
            ],
            terminal: Terminal::DepthCapped,
        };
        let text = write_scenarios(std::slice::from_ref(&s));
        assert_eq!(
            text,
            "{\"events\":[{\"fields\":{\"k\":1},\"name\":\"a\"},{\"fields\":{},\"name\":\"b\",\"session\":\"S1\"}],\"terminal\":\"depth-capped\"}\n"
        );
        assert_eq!(read_scenarios(&text).unwrap(), vec![s]);
    }

    #[test]
    fn bad_line_is_located() {
        let err =
            read_scenarios("\n{\"events\":[],\"terminal\":\"completed\"}\nnope\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = read_scenarios("{\"events\":[],\"terminal\":\"done\"}").unwrap_err();
        assert_eq!(err.line, 1);
    }
}

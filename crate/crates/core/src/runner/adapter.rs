use std::collections::BTreeMap;
use std::io::Read;
use std::ops::RangeInclusive;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

use crate::engine::Event;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("adapter misconfigured: {0}")]
pub struct AdapterError(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adapter {
    /// Verdicts by event name; unlisted events pass.
    Mock { verdicts: BTreeMap<String, Verdict> },
    /// Runs `program <event-name> <args...>` with the event fields in the
    /// environment as `KEY=VALUE` (keys upper-cased).
    Exec {
        program: String,
        args: Vec<String>,
        timeout: Duration,
    },
    /// POSTs the canonical event to `<base_url>/events`.
    Http {
        base_url: String,
        timeout: Duration,
        expected_status: RangeInclusive<u16>,
    },
}

/// Result of dispatching one event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispatch {
    pub verdict: Verdict,
    pub detail: String,
    pub duration_ms: u64,
}

impl Adapter {
    pub fn mock() -> Adapter {
        Adapter::Mock {
            verdicts: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Adapter::Mock { .. } => "mock",
            Adapter::Exec { .. } => "exec",
            Adapter::Http { .. } => "http",
        }
    }

    /// Everything that can be checked without dispatching an event.
    pub fn validate(&self) -> Result<(), AdapterError> {
        let err = |m: String| Err(AdapterError(m));
        match self {
            Adapter::Mock { .. } => Ok(()),
            Adapter::Exec {
                program, timeout, ..
            } => {
                if timeout.is_zero() {
                    return err("exec timeout must be positive".into());
                }
                if program.is_empty() {
                    return err("exec adapter has no command".into());
                }
                which::which(program)
                    .map(|_| ())
                    .map_err(|_| AdapterError(format!("exec command `{program}` not found")))
            }
            Adapter::Http {
                base_url,
                timeout,
                expected_status,
            } => {
                if timeout.is_zero() {
                    return err("http timeout must be positive".into());
                }
                if !(base_url.starts_with("http://") || base_url.starts_with("https://")) {
                    return err(format!("http base url `{base_url}` is not an http(s) url"));
                }
                if expected_status.is_empty() {
                    return err("http expected status range is empty".into());
                }
                Ok(())
            }
        }
    }

    pub fn dispatch(&self, event: &Event) -> Dispatch {
        let start = Instant::now();
        let (verdict, detail) = match self {
            Adapter::Mock { verdicts } => {
                let v = verdicts.get(&event.name).copied().unwrap_or(Verdict::Pass);
                return Dispatch {
                    verdict: v,
                    detail: String::new(),
                    duration_ms: 0,
                };
            }
            Adapter::Exec {
                program,
                args,
                timeout,
            } => exec(program, args, *timeout, event),
            Adapter::Http {
                base_url,
                timeout,
                expected_status,
            } => http(base_url, *timeout, expected_status, event),
        };
        Dispatch {
            verdict,
            detail,
            duration_ms: start.elapsed().as_millis() as u64,
        }
    }
}

fn exec(program: &str, args: &[String], timeout: Duration, event: &Event) -> (Verdict, String) {
    let mut cmd = Command::new(program);
    cmd.arg(&event.name)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped());
    for (k, v) in &event.fields {
        cmd.env(k.to_uppercase(), v.to_string());
    }
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return (Verdict::Error, format!("spawn failed: {e}")),
    };
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let status = match child.wait_timeout(timeout) {
        Ok(Some(status)) => status,
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            return (
                Verdict::Error,
                format!("timed out after {}s", timeout.as_secs_f64()),
            );
        }
        Err(e) => return (Verdict::Error, format!("wait failed: {e}")),
    };
    let err_text = reader.join().unwrap_or_default();
    let first = err_text.lines().next().unwrap_or("").trim();
    if status.success() {
        (Verdict::Pass, String::new())
    } else {
        let code = status
            .code()
            .map_or("signal".to_string(), |c| c.to_string());
        let detail = if first.is_empty() {
            format!("exit {code}")
        } else {
            format!("exit {code}: {first}")
        };
        (Verdict::Fail, detail)
    }
}

fn http(
    base_url: &str,
    timeout: Duration,
    expected: &RangeInclusive<u16>,
    event: &Event,
) -> (Verdict, String) {
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let url = format!("{}/events", base_url.trim_end_matches('/'));
    let status = match agent
        .post(&url)
        .set("Content-Type", "application/json")
        .send_string(&event.canonical())
    {
        Ok(resp) => resp.status(),
        Err(ureq::Error::Status(code, _)) => code,
        Err(e) => return (Verdict::Error, e.to_string()),
    };
    if expected.contains(&status) {
        (Verdict::Pass, status.to_string())
    } else {
        (Verdict::Fail, status.to_string())
    }
}

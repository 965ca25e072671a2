//! `config.toml` in the project directory. Every key is optional.
//!
//! ```toml
//! seed = 0
//! max_depth = 10000
//! max_nodes = 1000000
//! renderer = "dot"
//! tags = ["nightly"]
//! stop_on_failure = true
//! workers = 1
//!
//! [ensemble]
//! enumerate_limit = 10000
//! walk_pool = 1000
//!
//! [weights]
//! push = 3
//!
//! [adapter]
//! kind = "mock"              # mock | exec | http
//!
//! [adapter.mock.verdicts]
//! StartSearch = "fail"
//!
//! [adapter.exec]
//! command = "./sut.sh"       # relative paths resolve against the project
//! args = []
//! timeout = 10               # seconds
//!
//! [adapter.http]
//! base_url = "http://localhost:8080"
//! timeout = 10
//! expected_status = [200, 299]
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use bpweave::runner::{Adapter, AdapterError, Verdict};
use serde::{Deserialize, Serialize};

pub const FILE_NAME: &str = "config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub max_depth: usize,
    pub max_nodes: usize,
    pub renderer: String,
    pub tags: Vec<String>,
    pub stop_on_failure: bool,
    pub workers: usize,
    pub ensemble: EnsembleConfig,
    pub weights: BTreeMap<String, u64>,
    pub adapter: AdapterConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            max_depth: 10_000,
            max_nodes: 1_000_000,
            renderer: "dot".into(),
            tags: Vec::new(),
            stop_on_failure: true,
            workers: 1,
            ensemble: EnsembleConfig::default(),
            weights: BTreeMap::new(),
            adapter: AdapterConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    /// Enumerate the pool when the model has at most this many runs.
    pub enumerate_limit: u64,
    /// Otherwise draw this many random walks.
    pub walk_pool: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            enumerate_limit: 10_000,
            walk_pool: 1_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdapterConfig {
    pub kind: String,
    pub mock: MockConfig,
    pub exec: Option<ExecConfig>,
    pub http: Option<HttpConfig>,
}

impl Default for AdapterConfig {
    fn default() -> Self {
        AdapterConfig {
            kind: "mock".into(),
            mock: MockConfig::default(),
            exec: None,
            http: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockConfig {
    pub verdicts: BTreeMap<String, Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecConfig {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpConfig {
    pub base_url: String,
    #[serde(default = "default_timeout")]
    pub timeout: f64,
    #[serde(default = "default_status")]
    pub expected_status: [u16; 2],
}

fn default_timeout() -> f64 {
    10.0
}

fn default_status() -> [u16; 2] {
    [200, 299]
}

fn timeout(secs: f64) -> Result<Duration, AdapterError> {
    if secs.is_finite() && secs > 0.0 {
        Ok(Duration::from_secs_f64(secs))
    } else {
        Err(AdapterError(format!(
            "timeout must be a positive number of seconds, got {secs}"
        )))
    }
}

impl Config {
    /// Reads `config.toml` from `dir`; a missing file gives the defaults.
    pub fn load(dir: &Path) -> Result<Config, String> {
        let path = dir.join(FILE_NAME);
        match std::fs::read_to_string(&path) {
            Ok(text) => toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Config::default()),
            Err(e) => Err(format!("{}: {e}", path.display())),
        }
    }

    /// Builds the adapter named by `kind` (or the configured one).
    pub fn adapter(&self, kind: Option<&str>, project: &Path) -> Result<Adapter, AdapterError> {
        let kind = kind.unwrap_or(&self.adapter.kind);
        match kind {
            "mock" => Ok(Adapter::Mock {
                verdicts: self.adapter.mock.verdicts.clone(),
            }),
            "exec" => {
                let c = self.adapter.exec.as_ref().ok_or_else(|| {
                    AdapterError("exec adapter selected but [adapter.exec] is missing".into())
                })?;
                let program = if c.command.contains('/') && Path::new(&c.command).is_relative() {
                    project.join(&c.command).to_string_lossy().into_owned()
                } else {
                    c.command.clone()
                };
                Ok(Adapter::Exec {
                    program,
                    args: c.args.clone(),
                    timeout: timeout(c.timeout)?,
                })
            }
            "http" => {
                let c = self.adapter.http.as_ref().ok_or_else(|| {
                    AdapterError("http adapter selected but [adapter.http] is missing".into())
                })?;
                let [lo, hi] = c.expected_status;
                Ok(Adapter::Http {
                    base_url: c.base_url.clone(),
                    timeout: timeout(c.timeout)?,
                    expected_status: lo..=hi,
                })
            }
            other => Err(AdapterError(format!(
                "unknown adapter kind `{other}` (expected mock, exec or http)"
            ))),
        }
    }
}

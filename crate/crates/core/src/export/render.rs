use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use thiserror::Error;

/// Config key naming the dot renderer executable.
pub const RENDERER_CONFIG_KEY: &str = "renderer";

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("renderer `{name}` not found on the search path; set `{key}` in config.toml")]
    NotFound { name: String, key: &'static str },
    #[error("renderer failed: {stderr}")]
    Failed { stderr: String },
    #[error("could not run renderer: {0}")]
    Io(#[from] std::io::Error),
}

fn locate(renderer: &str) -> Result<PathBuf, RenderError> {
    which::which(renderer).map_err(|_| RenderError::NotFound {
        name: renderer.to_string(),
        key: RENDERER_CONFIG_KEY,
    })
}

/// Pipes `description` into `renderer -Tpdf -o output`.
pub fn render_pdf(description: &str, output: &Path, renderer: &str) -> Result<(), RenderError> {
    let exe = locate(renderer)?;
    let mut child = Command::new(exe)
        .arg("-Tpdf")
        .arg("-o")
        .arg(output)
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()?;
    {
        let mut stdin = child.stdin.take().expect("stdin is piped");
        // a renderer that exits early closes the pipe; its status tells the story
        let _ = stdin.write_all(description.as_bytes());
    }
    let out = child.wait_with_output()?;
    let written = std::fs::metadata(output)
        .map(|m| m.len() > 0)
        .unwrap_or(false);
    if !out.status.success() || !written {
        let mut stderr = String::from_utf8_lossy(&out.stderr).trim().to_string();
        if stderr.is_empty() {
            stderr = format!("exit status {}", out.status);
        }
        return Err(RenderError::Failed { stderr });
    }
    Ok(())
}

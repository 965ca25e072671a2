//! A project is a directory of `.story` files plus an optional
//! `config.toml`. A single `.story` file is accepted as a one-file project.

use std::path::{Path, PathBuf};

use bpweave::dsl::{check, parse_bytes, SourceFile, SourceMap};
use bpweave::{CheckedModel, ModelAst};

use crate::config::Config;

pub struct Project {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub config: Config,
}

pub struct Loaded {
    pub model: CheckedModel,
    /// Rendered warnings, one per line.
    pub warnings: Vec<String>,
}

impl Project {
    pub fn open(path: &Path) -> Result<Project, String> {
        let (dir, files) = if path.is_file() {
            let dir = path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            (dir, vec![path.to_path_buf()])
        } else if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)
                .map_err(|e| format!("{}: {e}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "story"))
                .collect();
            files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
            if files.is_empty() {
                return Err(format!("{}: no .story files in project", path.display()));
            }
            (path.to_path_buf(), files)
        } else {
            return Err(format!("{}: no such project", path.display()));
        };
        let config = Config::load(&dir)?;
        Ok(Project { dir, files, config })
    }

    /// Parses each file, merges them in file-name order and checks the
    /// result. On failure returns every rendered diagnostic.
    pub fn load(&self) -> Result<Loaded, Vec<String>> {
        let mut sources = SourceMap::new();
        let mut ast = ModelAst::default();
        let mut diags = Vec::new();
        for path in &self.files {
            let bytes =
                std::fs::read(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
            let name = path.display().to_string();
            let id = sources.add(SourceFile::new(
                name.clone(),
                String::from_utf8_lossy(&bytes),
            ));
            match parse_bytes(id, &name, &bytes) {
                Ok(a) => ast.extend(a),
                Err(d) => diags.extend(d),
            }
        }
        let render = |d: &bpweave::Diagnostic| d.render(&sources);
        if !diags.is_empty() {
            return Err(diags.iter().map(render).collect());
        }
        match check(&ast) {
            Ok(model) => {
                let warnings = model.warnings.iter().map(render).collect();
                Ok(Loaded { model, warnings })
            }
            Err(d) => Err(d.iter().map(render).collect()),
        }
    }
}

//! Front end of the story language: lexing, parsing, checking and
//! refinement expansion.

pub mod ast;
mod check;
mod diag;
mod expand;
mod lexer;
pub mod model;
mod parser;
mod printer;
mod source;

pub use ast::ModelAst;
pub use check::check;
pub(crate) use check::must_sync;
pub use diag::{has_errors, Diagnostic, Severity};
pub use expand::expand_refinements;
pub use lexer::KEYWORDS;
pub use model::{CheckedModel, CheckedStory, Refinement, Step, Template, TemplateValue};
pub use parser::{parse, parse_bytes, parse_file, MAX_NESTING};
pub use printer::pretty_print;
pub use source::{Location, SourceFile, SourceMap, Span};

/// Parses and checks one source text as a complete model.
pub fn compile_str(path: &str, text: &str) -> Result<CheckedModel, Vec<Diagnostic>> {
    let ast = parse(&SourceFile::new(path, text))?;
    check(&ast)
}

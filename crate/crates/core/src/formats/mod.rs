//! Text and binary file formats shared by the pipelines.
//!
//! Text formats are whitespace separated with `#` comment lines. Floats are
//! written with Rust's shortest round-trip formatting, so a load/save/load
//! cycle reproduces every value bit for bit.

mod intrinsics;
mod pfm;
mod poses;

use std::io::{self, Write};

pub use intrinsics::{read_intrinsics, write_intrinsics, CameraId};
pub use pfm::{read_pfm, read_pfm_file, write_pfm, write_pfm_file};
pub use poses::{read_poses, read_poses_file, write_poses, PoseConvention};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl FormatError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse { line, message: message.into() }
    }
}

/// Writes each line prefixed with `# `.
pub fn write_comment_header<W: Write>(w: &mut W, lines: &[String]) -> io::Result<()> {
    for l in lines {
        writeln!(w, "# {l}")?;
    }
    Ok(())
}

/// Iterates over non-empty, non-comment lines with 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, FormatError> {
    let tok = tok.ok_or_else(|| FormatError::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| FormatError::parse(line, format!("bad {what}: {tok:?}")))
}

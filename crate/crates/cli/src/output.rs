use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    Lib(bifree::Error),
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 1 for bad input or unreadable files, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if !caller_fault(e) => 2,
            _ => 1,
        }
    }
}

/// Bad files and parameters, and evaluation points the caller put off the domain or on a pole.
fn caller_fault(e: &bifree::Error) -> bool {
    match e {
        bifree::Error::Stage { source, .. } => caller_fault(source),
        bifree::Error::Domain(_) | bifree::Error::Pole(_) => true,
        e => e.is_input_error(),
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) if caller_fault(e) => write!(f, "{e}"),
            CliError::Lib(e) => write!(f, "numerical failure: {e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<bifree::Error> for CliError {
    fn from(e: bifree::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Lib(bifree::Error::Invalid(msg.into()))
}

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Where an artifact goes when no path was given.
#[derive(Clone, Copy)]
pub enum Fallback {
    Stdout,
    Stderr,
}

pub fn emit(path: Option<&Path>, fallback: Fallback, text: &str) -> CliResult<()> {
    let res = match (path, fallback) {
        (Some(p), _) => fs::write(p, text),
        (None, Fallback::Stdout) => io::stdout().lock().write_all(text.as_bytes()),
        (None, Fallback::Stderr) => io::stderr().lock().write_all(text.as_bytes()),
    };
    res.map_err(|source| CliError::Io {
        path: path.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("-")),
        source,
    })
}

/// Comment line naming the tool, version, command and every parameter.
pub fn header(command: &str, params: &impl Serialize) -> String {
    let echo = serde_json::to_string(params).expect("argument structs serialize");
    format!("# bifree {VERSION} {command} {echo}\n")
}

/// JSON document wrapping `result` with the tool version and parameter echo.
pub fn envelope(command: &str, params: &impl Serialize, result: Value) -> String {
    let doc = json!({
        "tool": "bifree",
        "version": VERSION,
        "command": command,
        "params": params,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

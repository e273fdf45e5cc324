//! Exit codes and the one-line error report on stderr.

use std::fmt;
use std::path::Path;

use mccle_core::Error;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            kind,
            message: message.into(),
        }
    }

    pub fn unwritable(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(2, "unwritable", format!("{}: {err}", path.display()))
    }

    pub fn input(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(1, "input", format!("{}: {err}", path.display()))
    }

    pub fn geometry(err: impl fmt::Display) -> Self {
        Self::new(5, "geometry", err.to_string())
    }

    /// Single line: `mccle-error code=<n> kind=<kind>: <message>`.
    pub fn report(&self) -> String {
        let msg = self.message.replace('\n', " ");
        format!("mccle-error code={} kind={}: {msg}", self.code, self.kind)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DatasetLine { .. } => Self::new(3, "dataset", e.to_string()),
            Error::CheckpointVersion(_) | Error::CheckpointShape(_) => Self::new(4, "checkpoint", e.to_string()),
            _ => Self::new(1, "runtime", e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

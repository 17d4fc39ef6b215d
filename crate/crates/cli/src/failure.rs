use std::fmt;

use free_entropy::Error;
use serde_json::json;

/// A failed run: exit code plus a one-line JSON reason for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub path: Option<String>,
    pub message: String,
}

pub const USAGE: u8 = 1;
pub const INVALID_MEASURE: u8 = 2;
pub const ENERGY: u8 = 3;
pub const NO_SOLUTION: u8 = 4;

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: USAGE, kind: "usage", path: None, message: message.into() }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Failure { code: INVALID_MEASURE, kind: "io", path: Some(path.display().to_string()), message: err.to_string() }
    }

    pub fn divergent(what: &str) -> Self {
        Failure {
            code: ENERGY,
            kind: "energy_divergent",
            path: None,
            message: format!("{what} fell below the divergence floor"),
        }
    }

    pub fn line(&self) -> String {
        let mut v = json!({"error": self.kind, "code": self.code, "message": self.message});
        if let Some(p) = &self.path {
            v["path"] = json!(p);
        }
        v.to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Spec { path, message } => {
                Failure { code: INVALID_MEASURE, kind: "invalid_spec", path: Some(path), message }
            }
            Error::InvalidMeasure(_) => Failure { code: INVALID_MEASURE, kind: "invalid_measure", path: None, message },
            Error::NotConverged { .. } => Failure { code: ENERGY, kind: "not_converged", path: None, message },
            Error::NoSolution { .. } => Failure { code: NO_SOLUTION, kind: "no_solution", path: None, message },
            Error::Domain(_) | Error::Precondition(_) | Error::QuantileUndefined { .. } => {
                Failure { code: USAGE, kind: "usage", path: None, message }
            }
        }
    }
}

impl From<clap::Error> for Failure {
    fn from(e: clap::Error) -> Self {
        let text = e.to_string();
        let first = text.lines().next().unwrap_or("invalid arguments");
        Failure::usage(first.trim_start_matches("error: "))
    }
}

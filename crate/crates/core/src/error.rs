use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid fact at line {line}: {message}")]
    Fact { line: usize, message: String },

    #[error("invalid database: {0}")]
    Database(String),

    #[error("invalid fitting problem: {0}")]
    Problem(String),

    #[error("name `{0}` uses a reserved prefix")]
    ReservedName(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("individuals `{0}` and `{1}` are bisimilar; no separating concept exists")]
    Bisimilar(String, String),

    #[error("examples are not separable")]
    NotSeparable,

    #[error("concept expansion exceeds the node budget of {0}")]
    ExpansionBudget(u64),

    #[error("malformed CNF: {0}")]
    MalformedCnf(String),

    #[error("external solver failed to run `{command}`: {message}")]
    SolverProcess { command: String, message: String },

    #[error("unparseable solver output: {0}")]
    SolverOutput(String),

    #[error("solver model violates clause {0}")]
    ModelVerification(usize),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

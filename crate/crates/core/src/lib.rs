//! Learning description logic concepts from positive and negative examples.
//!
//! The crate covers concepts from ALC up to ALCQI with numerical features
//! over closed-world databases: evaluation, bisimulation and quotients,
//! polynomial-time (approximate) fitting, a SAT encoding of size-bounded
//! fitting with a built-in CDCL solver, and the bounded-fitting driver.

pub mod bench;
pub mod bisim;
pub mod cnf;
pub mod concept;
pub mod database;
pub mod driver;
pub mod encode;
pub mod error;
pub mod eval;
pub mod metrics;
pub mod parse;
pub mod polyfit;
pub mod reduce;
pub mod solve;
pub mod value;

pub use concept::{node_count, string_size, Concept, ConceptFactory, Node, Role};
pub use database::{parse_facts, Database, DatabaseBuilder, Ind, Name};
pub use error::{Error, Result};
pub use eval::{eval_concept, fits, FitReport, FittingProblem, ProblemFile};
pub use parse::parse_concept;
pub use value::Value;

//! SAT backends: the built-in CDCL solver and external DIMACS solvers.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cnf::Cnf;
use crate::error::{Error, Result};

mod cdcl;
mod external;

pub use cdcl::solve_builtin;
pub use external::{parse_solver_output, solve_external, SOLVER_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    #[serde(serialize_with = "ser_millis")]
    pub wall: Duration,
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Present iff SAT; `model[v]` is the value of variable `v` (index 0 unused).
    pub model: Option<Vec<bool>>,
    pub stats: SolveStats,
}

/// Limits for one solve call. Cancellation through `stop` reports TIMEOUT.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub stop: Option<Arc<AtomicBool>>,
    pub max_conflicts: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_timeout(d: Duration) -> Self {
        Budget {
            deadline: Some(Instant::now() + d),
            ..Self::default()
        }
    }

    pub fn stopped(&self) -> bool {
        self.stop.as_ref().is_some_and(|f| f.load(Ordering::Relaxed))
    }

    fn exhausted(&self, conflicts: u64) -> bool {
        self.stopped()
            || self.deadline.is_some_and(|d| Instant::now() >= d)
            || self.max_conflicts.is_some_and(|m| conflicts >= m)
    }
}

/// Which solver runs the instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Builtin,
    /// A command line; the DIMACS file path is appended as last argument.
    External(String),
}

/// Solves `cnf` and verifies any model against every clause.
pub fn solve(cnf: &Cnf, budget: &Budget) -> Result<SolveResult> {
    let res = solve_builtin(cnf, budget);
    verify(cnf, &res)?;
    Ok(res)
}

pub fn solve_with(backend: &Backend, cnf: &Cnf, budget: &Budget) -> Result<SolveResult> {
    match backend {
        Backend::Builtin => solve(cnf, budget),
        Backend::External(cmd) => solve_external(cnf, cmd, budget),
    }
}

pub(crate) fn verify(cnf: &Cnf, res: &SolveResult) -> Result<()> {
    if let Some(model) = &res.model {
        if model.len() != cnf.num_vars() as usize + 1 {
            return Err(Error::SolverOutput(format!(
                "model covers {} variables, expected {}",
                model.len().saturating_sub(1),
                cnf.num_vars()
            )));
        }
        if let Some(i) = cnf.first_violated(model) {
            return Err(Error::ModelVerification(i));
        }
    }
    Ok(())
}

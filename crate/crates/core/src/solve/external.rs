//! Running an external DIMACS solver as a child process.

use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::{verify, Budget, SolveResult, SolveStats, SolveStatus};
use crate::cnf::Cnf;
use crate::error::{Error, Result};

/// Environment variable that overrides the solver command.
pub const SOLVER_ENV: &str = "DLFIT_SOLVER";

/// Writes `cnf` to a temporary file, runs `command <file>` and reads the
/// SAT-competition style answer from its standard output.
pub fn solve_external(cnf: &Cnf, command: &str, budget: &Budget) -> Result<SolveResult> {
    let start = Instant::now();
    let mut parts = command.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| Error::Config("empty solver command".into()))?;
    let args: Vec<&str> = parts.collect();

    let mut file = tempfile::Builder::new()
        .suffix(".cnf")
        .tempfile()
        .map_err(|source| Error::Io {
            path: std::env::temp_dir(),
            source,
        })?;
    cnf.write_dimacs(std::io::BufWriter::new(file.as_file_mut()))
        .map_err(|source| Error::Io {
            path: file.path().to_path_buf(),
            source,
        })?;

    let mut child = Command::new(program)
        .args(&args)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::Config(format!("solver command `{program}` not found"))
            } else {
                Error::SolverProcess {
                    command: command.to_string(),
                    message: e.to_string(),
                }
            }
        })?;

    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut out = String::new();
        stdout.read_to_string(&mut out).map(|_| out)
    });

    let status = loop {
        match child.try_wait() {
            Ok(Some(st)) => break Some(st),
            Ok(None) => {}
            Err(e) => {
                return Err(Error::SolverProcess {
                    command: command.to_string(),
                    message: e.to_string(),
                })
            }
        }
        let expired = budget.stopped() || budget.deadline.is_some_and(|d| Instant::now() >= d);
        if expired {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let output = reader
        .join()
        .map_err(|_| Error::SolverOutput("reader thread panicked".into()))?
        .map_err(|e| Error::SolverProcess {
            command: command.to_string(),
            message: e.to_string(),
        })?;

    let stats = SolveStats {
        wall: start.elapsed(),
        ..SolveStats::default()
    };
    let Some(status) = status else {
        return Ok(SolveResult {
            status: SolveStatus::Timeout,
            model: None,
            stats,
        });
    };
    let parsed = match parse_solver_output(&output, cnf.num_vars()) {
        Ok(p) => p,
        Err(e) if !status.success() && !matches!(status.code(), Some(10 | 20)) => {
            return Err(Error::SolverProcess {
                command: command.to_string(),
                message: format!("exited with {status} ({e})"),
            })
        }
        Err(e) => return Err(e),
    };
    let res = SolveResult {
        status: parsed.0,
        model: parsed.1,
        stats,
    };
    verify(cnf, &res)?;
    Ok(res)
}

/// Parses `s ...` and `v ...` lines. Variables missing from the `v` lines
/// default to false.
pub fn parse_solver_output(text: &str, num_vars: u32) -> Result<(SolveStatus, Option<Vec<bool>>)> {
    let mut status = None;
    let mut model = vec![false; num_vars as usize + 1];
    let mut terminated = false;
    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => SolveStatus::Sat,
                "UNSATISFIABLE" => SolveStatus::Unsat,
                "UNKNOWN" => SolveStatus::Timeout,
                other => return Err(Error::SolverOutput(format!("unknown status `{other}`"))),
            });
        } else if let Some(rest) = t.strip_prefix("v") {
            for tok in rest.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| Error::SolverOutput(format!("bad model literal `{tok}`")))?;
                if x == 0 {
                    terminated = true;
                    continue;
                }
                let v = x.unsigned_abs();
                if v > num_vars as u64 {
                    return Err(Error::SolverOutput(format!("model literal {x} out of range")));
                }
                model[v as usize] = x > 0;
            }
        }
    }
    match status {
        Some(SolveStatus::Sat) => {
            if !terminated && num_vars > 0 {
                return Err(Error::SolverOutput("model is not terminated by 0".into()));
            }
            Ok((SolveStatus::Sat, Some(model)))
        }
        Some(s) => Ok((s, None)),
        None => Err(Error::SolverOutput("no `s` status line".into())),
    }
}

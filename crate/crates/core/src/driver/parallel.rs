//! Splitting one stage over worker threads by tree shape.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use log::debug;

use super::topology::{enumerate_topologies, Topology};
use crate::cnf::Cnf;
use crate::encode::Encoding;
use crate::error::{Error, Result};
use crate::solve::{solve_with, Backend, Budget, SolveResult, SolveStats, SolveStatus};

/// Adds a selector per shape, each forcing the node arities, the
/// breadth-first wiring and the unused suffix of its shape, plus a clause
/// demanding one of the selectors.
pub fn pin_topologies(enc: &Encoding, cnf: &mut Cnf, shapes: &[Topology]) {
    let k = enc.k();
    let mut any = Vec::with_capacity(shapes.len());
    for t in shapes {
        assert!(t.len() <= k, "shape larger than the node bound");
        let s = cnf.new_var();
        any.push(s);
        for (i, &a) in t.arities.iter().enumerate() {
            match a {
                0 => {
                    cnf.add_clause(&[!s, !enc.unary(i)]);
                    cnf.add_clause(&[!s, !enc.binary(i)]);
                    cnf.add_clause(&[!s, !enc.unused(i)]);
                }
                1 => cnf.add_clause(&[!s, enc.unary(i)]),
                _ => cnf.add_clause(&[!s, enc.binary(i)]),
            }
        }
        if t.len() < k {
            cnf.add_clause(&[!s, enc.unused(t.len())]);
        }
        for (i, j) in t.wiring() {
            let y = if t.arities[i] == 1 { enc.y1(i, j) } else { enc.y2(i, j) };
            cnf.add_clause(&[!s, y.expect("breadth-first wiring fits the bound")]);
        }
    }
    cnf.add_clause(&any);
}

/// Solves `cnf` (the stage instance `enc`, possibly with extra clauses).
/// With more than one thread the shapes with at most `k` nodes are dealt
/// round-robin into buckets, one worker per bucket; the first satisfiable
/// bucket stops the others.
pub fn parallel_stage(
    enc: &Encoding,
    cnf: &Cnf,
    threads: usize,
    backend: &Backend,
    budget: &Budget,
) -> Result<SolveResult> {
    if threads <= 1 {
        return solve_with(backend, cnf, budget);
    }
    let start = Instant::now();
    let shapes = enumerate_topologies(enc.k());
    let buckets: Vec<Vec<Topology>> = (0..threads.min(shapes.len()))
        .map(|b| shapes.iter().skip(b).step_by(threads).cloned().collect())
        .collect();
    let stop = Arc::new(AtomicBool::new(false));
    let mailbox: Mutex<Option<SolveResult>> = Mutex::new(None);
    let outcomes: Vec<Result<SolveResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = buckets
            .iter()
            .enumerate()
            .map(|(b, bucket)| {
                let stop = stop.clone();
                let mailbox = &mailbox;
                scope.spawn(move || -> Result<SolveResult> {
                    let mut local = cnf.clone();
                    pin_topologies(enc, &mut local, bucket);
                    let worker_budget = Budget {
                        deadline: budget.deadline,
                        stop: Some(stop.clone()),
                        max_conflicts: budget.max_conflicts,
                    };
                    let res = solve_with(backend, &local, &worker_budget)?;
                    debug!("bucket {b} ({} shapes): {:?}", bucket.len(), res.status);
                    if res.status == SolveStatus::Sat {
                        let mut slot = mailbox.lock().expect("mailbox lock");
                        if slot.is_none() {
                            let mut trimmed = res.clone();
                            if let Some(m) = trimmed.model.as_mut() {
                                m.truncate(cnf.num_vars() as usize + 1);
                            }
                            *slot = Some(trimmed);
                        }
                        stop.store(true, Ordering::SeqCst);
                    }
                    Ok(res)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Internal("stage worker panicked".into())))
            })
            .collect()
    });

    let mut stats = SolveStats::default();
    let mut all_unsat = true;
    for o in &outcomes {
        match o {
            Ok(r) => {
                stats.conflicts += r.stats.conflicts;
                stats.decisions += r.stats.decisions;
                stats.propagations += r.stats.propagations;
                stats.restarts += r.stats.restarts;
                all_unsat &= r.status == SolveStatus::Unsat;
            }
            Err(_) => all_unsat = false,
        }
    }
    stats.wall = start.elapsed();
    if let Some(mut res) = mailbox.into_inner().expect("mailbox lock") {
        res.stats = stats;
        return Ok(res);
    }
    for o in outcomes {
        o?;
    }
    Ok(SolveResult {
        status: if all_unsat {
            SolveStatus::Unsat
        } else {
            SolveStatus::Timeout
        },
        model: None,
        stats,
    })
}

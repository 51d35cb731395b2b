use std::time::Instant;

use log::warn;

use super::{feasibility, refresh, FitResult, FitStatus, StageData, StageRole, StageRunner, StageStats};
use crate::concept::Concept;
use crate::driver::SearchConfig;
use crate::encode::counter;
use crate::error::{Error, Result};
use crate::eval::{fits, FittingProblem};
use crate::solve::SolveStatus;

/// Runs [`max_fit_with`] without progress reporting.
pub fn max_fit(problem: &FittingProblem, config: &SearchConfig) -> Result<FitResult> {
    max_fit_with(problem, config, &mut |_| {})
}

/// Searches, stage by stage, for a concept classifying as many examples
/// as possible. Within a stage the target count descends from the best
/// achievable by any concept to one above the best found so far.
pub fn max_fit_with(
    problem: &FittingProblem,
    config: &SearchConfig,
    progress: &mut dyn FnMut(&StageStats),
) -> Result<FitResult> {
    let start = Instant::now();
    let warnings = config.validate()?;
    for w in &warnings {
        warn!("{w}");
    }
    let total = problem.num_examples();
    let mut result = FitResult::empty(problem, FitStatus::Budget, warnings);
    if total == 0 {
        result.set_concept(Concept::top(), problem);
        result.stage = Some(1);
        result.status = FitStatus::Exact;
        return Ok(result);
    }
    let feas = feasibility(problem, config)?;
    let upper = feas.best_possible;
    result.selection = Some(feas.selection.clone());

    let mut runner = StageRunner {
        config,
        deadline: config.timeout.map(|d| start + d),
        stats: Vec::new(),
        progress,
    };
    let mut slot: Option<StageData> = None;
    let mut best: Option<(usize, Concept, usize)> = None;
    let mut timed_out = false;

    'stages: for k in 1..=config.max_stage {
        if runner.out_of_time() {
            timed_out = true;
            break;
        }
        refresh(&mut slot, problem, config, k)?;
        let data = slot.as_ref().expect("refreshed");
        let g = runner.g_for(data, k);
        let (enc, et) = runner.encode(data, k, g, false)?;
        let mut base = enc.cnf.clone();
        let indicators: Vec<_> = data
            .positives
            .iter()
            .map(|&p| enc.root(p))
            .chain(data.negatives.iter().map(|&n| !enc.root(n)))
            .collect();
        let regs = counter::registers(&mut base, &indicators, upper);
        let floor = best.as_ref().map_or(0, |b| b.0);
        for t in (floor + 1..=upper).rev() {
            let mut cnf = base.clone();
            cnf.add_clause(&[regs.at_least(t).expect("target within cap")]);
            let res = runner.solve(data, &enc, &cnf, et, StageRole::Target { target: t })?;
            match res.status {
                SolveStatus::Unsat => continue,
                SolveStatus::Timeout => {
                    timed_out = true;
                    break 'stages;
                }
                SolveStatus::Sat => {
                    let model = res.model.as_ref().expect("SAT has a model");
                    let c = data.restore(&enc.decode(model)?);
                    let correct = fits(&c, problem).correct();
                    if correct < t {
                        return Err(Error::Internal(format!(
                            "concept {c} classifies {correct} examples, expected at least {t}"
                        )));
                    }
                    best = Some((correct, c, k));
                    break;
                }
            }
        }
        if best.as_ref().is_some_and(|b| b.0 >= upper) {
            break;
        }
    }

    if let Some((correct, c, k)) = best {
        result.set_concept(c, problem);
        result.stage = Some(k);
        result.status = if correct == total {
            FitStatus::Exact
        } else if timed_out {
            FitStatus::Budget
        } else {
            FitStatus::Approx
        };
    }
    result.stages = runner.stats;
    result.wall = start.elapsed();
    Ok(result)
}

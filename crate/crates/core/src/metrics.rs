//! Classification metrics and cross-validation.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::concept::{node_count, Concept};
use crate::database::Ind;
use crate::error::{Error, Result};
use crate::eval::{eval_concept, FittingProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when nothing was predicted positive or precision and recall are
    /// both zero; `f1` is then reported as 0.
    pub f1_undefined: bool,
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Metrics {
        let total = tp + fp + tn + fn_;
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let accuracy = ratio(tp + tn, total);
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1_undefined = tp + fp == 0 || precision + recall == 0.0;
        let f1 = if f1_undefined {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            tp,
            fp,
            tn,
            fn_,
            accuracy,
            precision,
            recall,
            f1,
            f1_undefined,
        }
    }
}

/// Metrics of `c` on the given examples.
pub fn evaluate(c: &Concept, problem: &FittingProblem) -> Metrics {
    let ext = eval_concept(c, &problem.db);
    let tp = problem.positives.iter().filter(|&&a| ext.contains(a as usize)).count();
    let fp = problem.negatives.iter().filter(|&&b| ext.contains(b as usize)).count();
    Metrics::from_counts(tp, fp, problem.negatives.len() - fp, problem.positives.len() - tp)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fold {
    pub test_positives: Vec<Ind>,
    pub test_negatives: Vec<Ind>,
}

/// Splits positives and negatives separately into `folds` parts after a
/// seeded shuffle, dealing examples round-robin.
pub fn stratified_folds(positives: &[Ind], negatives: &[Ind], folds: usize, seed: u64) -> Result<Vec<Fold>> {
    if folds < 2 {
        return Err(Error::Config("cross-validation needs at least 2 folds".into()));
    }
    if positives.len() + negatives.len() < folds {
        return Err(Error::Config(format!(
            "{} examples are too few for {folds} folds",
            positives.len() + negatives.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = positives.to_vec();
    let mut n = negatives.to_vec();
    p.shuffle(&mut rng);
    n.shuffle(&mut rng);
    let mut out = vec![
        Fold {
            test_positives: Vec::new(),
            test_negatives: Vec::new(),
        };
        folds
    ];
    for (i, &a) in p.iter().enumerate() {
        out[i % folds].test_positives.push(a);
    }
    let offset = p.len();
    for (i, &b) in n.iter().enumerate() {
        out[(offset + i) % folds].test_negatives.push(b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation.
    pub fn of(xs: &[f64]) -> MeanStd {
        if xs.is_empty() {
            return MeanStd { mean: 0.0, std: 0.0 };
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let std = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
        };
        MeanStd { mean, std }
    }
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct FoldReport {
    pub fold: usize,
    pub concept: Concept,
    pub node_count: u64,
    /// The learner produced nothing and `top` was evaluated instead.
    pub fallback: bool,
    pub train: Metrics,
    pub test: Metrics,
    #[serde(serialize_with = "ser_millis", rename = "runtime_ms")]
    pub runtime: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValReport {
    pub folds: Vec<FoldReport>,
    pub node_count: MeanStd,
    pub accuracy: MeanStd,
    pub f1: MeanStd,
    #[serde(serialize_with = "ser_millis", rename = "runtime_ms")]
    pub runtime: Duration,
}

/// Learns on all folds but one and evaluates on the held-out fold, for
/// every fold.
pub fn cross_validate(
    problem: &FittingProblem,
    folds: usize,
    seed: u64,
    learner: &mut dyn FnMut(&FittingProblem) -> Result<Option<Concept>>,
) -> Result<CrossValReport> {
    let start = Instant::now();
    let split = stratified_folds(&problem.positives, &problem.negatives, folds, seed)?;
    let mut reports = Vec::with_capacity(folds);
    for (i, fold) in split.iter().enumerate() {
        let t = Instant::now();
        let train_p: Vec<Ind> = problem
            .positives
            .iter()
            .copied()
            .filter(|a| !fold.test_positives.contains(a))
            .collect();
        let train_n: Vec<Ind> = problem
            .negatives
            .iter()
            .copied()
            .filter(|b| !fold.test_negatives.contains(b))
            .collect();
        let train = FittingProblem::new(problem.db.clone(), train_p, train_n)?;
        let test = FittingProblem::new(
            problem.db.clone(),
            fold.test_positives.clone(),
            fold.test_negatives.clone(),
        )?;
        let learned = learner(&train)?;
        let fallback = learned.is_none();
        let concept = learned.unwrap_or_else(Concept::top);
        reports.push(FoldReport {
            fold: i,
            node_count: node_count(&concept),
            fallback,
            train: evaluate(&concept, &train),
            test: evaluate(&concept, &test),
            concept,
            runtime: t.elapsed(),
        });
    }
    let collect = |f: &dyn Fn(&FoldReport) -> f64| MeanStd::of(&reports.iter().map(f).collect::<Vec<_>>());
    Ok(CrossValReport {
        node_count: collect(&|r| r.node_count as f64),
        accuracy: collect(&|r| r.test.accuracy),
        f1: collect(&|r| r.test.f1),
        folds: reports,
        runtime: start.elapsed(),
    })
}

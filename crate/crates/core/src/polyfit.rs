//! Polynomial-time fitting through bisimulations: existence, maximal
//! separable example selection and the explicit fitting concept.

use serde::Serialize;

use crate::bisim::{max_bisimulation, BisimKind, BisimPartition, Separator};
use crate::concept::Concept;
use crate::database::{Database, Ind};
use crate::error::{Error, Result};
use crate::eval::FittingProblem;

/// Whether some concept of the kind's logic fits: no positive is
/// bisimilar to a negative.
pub fn fitting_exists(problem: &FittingProblem, kind: BisimKind) -> bool {
    let p = max_bisimulation(&problem.db, kind);
    separable(&p, &problem.positives, &problem.negatives)
}

pub fn separable(partition: &BisimPartition, positives: &[Ind], negatives: &[Ind]) -> bool {
    positives
        .iter()
        .all(|&a| negatives.iter().all(|&b| !partition.bisimilar(a, b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kept {
    Positives,
    Negatives,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub class: u32,
    pub positives: usize,
    pub negatives: usize,
    pub kept: Kept,
}

/// A largest separable subset of the examples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxSelection {
    pub kept_positives: Vec<Ind>,
    pub kept_negatives: Vec<Ind>,
    pub class_report: Vec<ClassReport>,
}

impl ApproxSelection {
    pub fn kept(&self) -> usize {
        self.kept_positives.len() + self.kept_negatives.len()
    }
}

/// Per bisimulation class keeps the positives when they are at least as
/// many as the negatives, and the negatives otherwise.
pub fn approx_select(problem: &FittingProblem, kind: BisimKind) -> ApproxSelection {
    let p = max_bisimulation(&problem.db, kind);
    approx_select_with(&p, &problem.positives, &problem.negatives)
}

pub fn approx_select_with(
    partition: &BisimPartition,
    positives: &[Ind],
    negatives: &[Ind],
) -> ApproxSelection {
    let mut pos = vec![0usize; partition.num_classes];
    let mut neg = vec![0usize; partition.num_classes];
    for &a in positives {
        pos[partition.class_of(a) as usize] += 1;
    }
    for &b in negatives {
        neg[partition.class_of(b) as usize] += 1;
    }
    let class_report: Vec<ClassReport> = (0..partition.num_classes)
        .filter(|&c| pos[c] + neg[c] > 0)
        .map(|c| ClassReport {
            class: c as u32,
            positives: pos[c],
            negatives: neg[c],
            kept: if pos[c] >= neg[c] {
                Kept::Positives
            } else {
                Kept::Negatives
            },
        })
        .collect();
    let keeps_pos = |a: Ind| pos[partition.class_of(a) as usize] >= neg[partition.class_of(a) as usize];
    ApproxSelection {
        kept_positives: positives.iter().copied().filter(|&a| keeps_pos(a)).collect(),
        kept_negatives: negatives.iter().copied().filter(|&b| !keeps_pos(b)).collect(),
        class_report,
    }
}

/// The disjunction over positives `a` of the conjunction over negatives
/// `b` of separating concepts `C_ab`, as a shared DAG.
///
/// With no positives the result is `bot`; with no negatives it is `top`.
pub fn construct_fitting(
    db: &Database,
    partition: &BisimPartition,
    positives: &[Ind],
    negatives: &[Ind],
) -> Result<Concept> {
    if !separable(partition, positives, negatives) {
        return Err(Error::NotSeparable);
    }
    let mut sep = Separator::new(db, partition);
    let mut disjuncts = Vec::with_capacity(positives.len());
    for &a in positives {
        let mut conjuncts = Vec::with_capacity(negatives.len());
        for &b in negatives {
            conjuncts.push(sep.separate(a, b)?);
        }
        let c = sep.factory().and_all(conjuncts);
        disjuncts.push(c);
    }
    Ok(sep.factory().or_all(disjuncts))
}

/// Fitting concept for the whole problem, or an error when the examples
/// are not separable.
pub fn fit_problem(problem: &FittingProblem, kind: BisimKind) -> Result<Concept> {
    let p = max_bisimulation(&problem.db, kind);
    construct_fitting(&problem.db, &p, &problem.positives, &problem.negatives)
}

/// Fitting concept for the selection of [`approx_select`].
pub fn approx_fit(problem: &FittingProblem, kind: BisimKind) -> (ApproxSelection, Concept) {
    let p = max_bisimulation(&problem.db, kind);
    let sel = approx_select_with(&p, &problem.positives, &problem.negatives);
    let c = construct_fitting(&problem.db, &p, &sel.kept_positives, &sel.kept_negatives)
        .expect("per-class selection is separable");
    (sel, c)
}

//! Closed-world evaluation of concepts and the fitting check.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::concept::{Concept, Node};
use crate::database::{Database, Ind};
use crate::error::{Error, Result};

/// Set of individuals of one database.
pub type IndSet = FixedBitSet;

/// Evaluates concepts over one database, memoizing shared nodes.
pub struct Evaluator<'db> {
    db: &'db Database,
    memo: HashMap<usize, (Concept, IndSet)>,
}

impl<'db> Evaluator<'db> {
    pub fn new(db: &'db Database) -> Self {
        Evaluator {
            db,
            memo: HashMap::new(),
        }
    }

    pub fn eval(&mut self, c: &Concept) -> IndSet {
        if let Some((_, set)) = self.memo.get(&c.id()) {
            return set.clone();
        }
        let n = self.db.len();
        let set = match c.node() {
            Node::Top => {
                let mut s = FixedBitSet::with_capacity(n);
                s.insert_range(..);
                s
            }
            Node::Bot => FixedBitSet::with_capacity(n),
            Node::Name(a) => match self.db.concept_extension(a) {
                Some(ext) => ext.clone(),
                None => FixedBitSet::with_capacity(n),
            },
            Node::Not(inner) => {
                let mut s = self.eval(inner);
                s.toggle_range(..);
                s
            }
            Node::And(l, r) => {
                let mut s = self.eval(l);
                s.intersect_with(&self.eval(r));
                s
            }
            Node::Or(l, r) => {
                let mut s = self.eval(l);
                s.union_with(&self.eval(r));
                s
            }
            Node::AtLeast(k, role, inner) | Node::AtMost(k, role, inner) => {
                let at_least = matches!(c.node(), Node::AtLeast(..));
                let filler = self.eval(inner);
                let mut s = FixedBitSet::with_capacity(n);
                for a in self.db.individuals() {
                    let count = self
                        .db
                        .successors(role, a)
                        .iter()
                        .filter(|&&b| filler.contains(b as usize))
                        .count() as u64;
                    let holds = if at_least {
                        count >= *k as u64
                    } else {
                        count <= *k as u64
                    };
                    s.set(a as usize, holds);
                }
                s
            }
            Node::FeatureGeq(f, v) | Node::FeatureLeq(f, v) => {
                let geq = matches!(c.node(), Node::FeatureGeq(..));
                let mut s = FixedBitSet::with_capacity(n);
                for a in self.db.individuals() {
                    if let Some(val) = self.db.feature_value(f, a) {
                        s.set(a as usize, if geq { val >= *v } else { val <= *v });
                    }
                }
                s
            }
        };
        // Keep the node alive so its address cannot be reused while memoized.
        self.memo.insert(c.id(), (c.clone(), set.clone()));
        set
    }
}

/// Extension `C^I` of a concept.
pub fn eval_concept(c: &Concept, db: &Database) -> IndSet {
    Evaluator::new(db).eval(c)
}

/// A database with positive and negative examples.
#[derive(Debug, Clone)]
pub struct FittingProblem {
    pub db: Arc<Database>,
    pub positives: Vec<Ind>,
    pub negatives: Vec<Ind>,
}

impl FittingProblem {
    /// Validates that examples are in the domain and `P` and `N` are disjoint.
    pub fn new(db: Arc<Database>, positives: Vec<Ind>, negatives: Vec<Ind>) -> Result<Self> {
        for &e in positives.iter().chain(&negatives) {
            if e as usize >= db.len() {
                return Err(Error::Problem(format!("example index {e} outside the domain")));
            }
        }
        if let Some(&clash) = positives.iter().find(|p| negatives.contains(p)) {
            return Err(Error::Problem(format!(
                "individual `{}` is both a positive and a negative example",
                db.name(clash)
            )));
        }
        Ok(FittingProblem {
            db,
            positives,
            negatives,
        })
    }

    pub fn from_names<S: AsRef<str>>(db: Arc<Database>, positives: &[S], negatives: &[S]) -> Result<Self> {
        let resolve = |names: &[S]| -> Result<Vec<Ind>> {
            names
                .iter()
                .map(|n| {
                    db.ind(n.as_ref()).ok_or_else(|| {
                        Error::Problem(format!("unknown example individual `{}`", n.as_ref()))
                    })
                })
                .collect()
        };
        let p = resolve(positives)?;
        let n = resolve(negatives)?;
        Self::new(db, p, n)
    }

    pub fn num_examples(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }
}

/// Example lists as stored in problem files:
/// `{"positive": [names], "negative": [names]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Problem(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem files serialize")
    }

    pub fn resolve(&self, db: Arc<Database>) -> Result<FittingProblem> {
        FittingProblem::from_names(db, &self.positive, &self.negative)
    }
}

/// Per-example classification of a concept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FitReport {
    pub fits: bool,
    /// `positives[i]` is true iff the i-th positive is in the extension.
    pub positives: Vec<bool>,
    /// `negatives[i]` is true iff the i-th negative is outside the extension.
    pub negatives: Vec<bool>,
}

impl FitReport {
    pub fn correct(&self) -> usize {
        self.positives.iter().chain(&self.negatives).filter(|&&b| b).count()
    }
}

pub fn fits(c: &Concept, problem: &FittingProblem) -> FitReport {
    fits_examples(c, &problem.db, &problem.positives, &problem.negatives)
}

pub fn fits_examples(c: &Concept, db: &Database, positives: &[Ind], negatives: &[Ind]) -> FitReport {
    let ext = eval_concept(c, db);
    let positives: Vec<bool> = positives.iter().map(|&a| ext.contains(a as usize)).collect();
    let negatives: Vec<bool> = negatives.iter().map(|&b| !ext.contains(b as usize)).collect();
    FitReport {
        fits: positives.iter().chain(&negatives).all(|&b| b),
        positives,
        negatives,
    }
}

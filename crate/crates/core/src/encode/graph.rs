//! Weighted graphs the encoder works on.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::bisim::BisimPartition;
use crate::concept::{Concept, Node};
use crate::database::{Database, Name};
use crate::error::{Error, Result};

/// A database view with edge multiplicities.
///
/// Built either directly from a database (every weight 1) or from a
/// bisimulation partition, with one vertex per class and the weight of an
/// edge counting the successors a member has in the target class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeGraph {
    pub names: Vec<Name>,
    pub concepts: Vec<(Name, FixedBitSet)>,
    pub roles: Vec<Name>,
    /// `succ[r][a]` lists `(target, weight)` pairs sorted by target.
    pub succ: Vec<Vec<Vec<(u32, u32)>>>,
}

impl EncodeGraph {
    pub fn from_database(db: &Database) -> Self {
        let n = db.len();
        let concepts = db
            .concept_names()
            .map(|c| {
                let ext = db.concept_extension(c).cloned().unwrap_or_else(|| FixedBitSet::with_capacity(n));
                (c.clone(), ext)
            })
            .collect();
        let roles: Vec<Name> = db.role_names().cloned().collect();
        let succ = roles
            .iter()
            .map(|r| {
                db.individuals()
                    .map(|a| {
                        let mut v: Vec<(u32, u32)> =
                            db.successors_by_name(r, a).iter().map(|&b| (b, 1)).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect()
            })
            .collect();
        EncodeGraph {
            names: db.names().to_vec(),
            concepts,
            roles,
            succ,
        }
    }

    /// Collapses each class of `partition` to one vertex named after its
    /// first member. Exact for concepts invariant under the partition,
    /// which holds for every concept when the partition is the maximal
    /// counting bisimulation.
    pub fn from_partition(db: &Database, partition: &BisimPartition) -> Self {
        let members = partition.members();
        let reps: Vec<u32> = members.iter().map(|m| m[0]).collect();
        let k = reps.len();
        let concepts = db
            .concept_names()
            .map(|c| {
                let mut ext = FixedBitSet::with_capacity(k);
                for (cls, &a) in reps.iter().enumerate() {
                    if db.has_concept(c, a) {
                        ext.insert(cls);
                    }
                }
                (c.clone(), ext)
            })
            .collect();
        let roles: Vec<Name> = db.role_names().cloned().collect();
        let succ = roles
            .iter()
            .map(|r| {
                reps.iter()
                    .map(|&a| {
                        let mut counts: HashMap<u32, u32> = HashMap::new();
                        for &b in db.successors_by_name(r, a) {
                            *counts.entry(partition.class_of(b)).or_default() += 1;
                        }
                        let mut v: Vec<(u32, u32)> = counts.into_iter().collect();
                        v.sort_unstable();
                        v
                    })
                    .collect()
            })
            .collect();
        EncodeGraph {
            names: reps.iter().map(|&a| db.name(a).clone()).collect(),
            concepts,
            roles,
            succ,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Largest weighted out-degree over all roles.
    pub fn max_degree(&self) -> u32 {
        self.succ
            .iter()
            .flat_map(|per| per.iter())
            .map(|s| s.iter().map(|&(_, w)| w).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Evaluates a feature-free concept over forward roles.
    pub fn eval(&self, c: &Concept) -> Result<FixedBitSet> {
        let mut memo = HashMap::new();
        self.eval_memo(c, &mut memo)
    }

    fn eval_memo(&self, c: &Concept, memo: &mut HashMap<usize, FixedBitSet>) -> Result<FixedBitSet> {
        if let Some(s) = memo.get(&c.id()) {
            return Ok(s.clone());
        }
        let n = self.len();
        let full = || {
            let mut s = FixedBitSet::with_capacity(n);
            s.insert_range(..);
            s
        };
        let out = match c.node() {
            Node::Top => full(),
            Node::Bot => FixedBitSet::with_capacity(n),
            Node::Name(a) => self
                .concepts
                .iter()
                .find(|(x, _)| x == a)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| FixedBitSet::with_capacity(n)),
            Node::Not(x) => {
                let mut s = self.eval_memo(x, memo)?;
                s.toggle_range(..);
                s
            }
            Node::And(x, y) => {
                let mut s = self.eval_memo(x, memo)?;
                s.intersect_with(&self.eval_memo(y, memo)?);
                s
            }
            Node::Or(x, y) => {
                let mut s = self.eval_memo(x, memo)?;
                s.union_with(&self.eval_memo(y, memo)?);
                s
            }
            Node::AtLeast(k, role, x) | Node::AtMost(k, role, x) => {
                if role.inverse {
                    return Err(Error::Internal(format!("inverse role `{}` in encoder graph", role.name)));
                }
                let inner = self.eval_memo(x, memo)?;
                let r = self.roles.iter().position(|r| *r == role.name);
                let at_least = matches!(c.node(), Node::AtLeast(..));
                let mut s = FixedBitSet::with_capacity(n);
                for a in 0..n {
                    let cnt: u64 = r.map_or(0, |r| {
                        self.succ[r][a]
                            .iter()
                            .filter(|&&(b, _)| inner.contains(b as usize))
                            .map(|&(_, w)| w as u64)
                            .sum()
                    });
                    s.set(a, if at_least { cnt >= *k as u64 } else { cnt <= *k as u64 });
                }
                s
            }
            Node::FeatureGeq(..) | Node::FeatureLeq(..) => {
                return Err(Error::Internal("feature comparison in encoder graph".into()))
            }
        };
        memo.insert(c.id(), out.clone());
        Ok(out)
    }
}

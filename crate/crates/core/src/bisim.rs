//! Maximal bisimulations by partition refinement, separating concepts and
//! the counting quotient.

use std::collections::HashMap;

use serde::Serialize;

use crate::concept::{Concept, ConceptFactory, Role};
use crate::database::{Database, DatabaseBuilder, Ind, Name};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BisimKind {
    /// Successor classes compared as sets.
    Alc,
    /// Successor classes compared with multiplicities.
    Alcq,
}

/// The coarsest bisimulation of a database together with every
/// intermediate partition of the refinement.
#[derive(Debug, Clone, Serialize)]
pub struct BisimPartition {
    pub kind: BisimKind,
    /// Final class id per individual.
    pub classes: Vec<u32>,
    pub num_classes: usize,
    /// `rounds[i]` is the partition after `i` refinement steps; the last
    /// entry equals `classes`.
    #[serde(skip)]
    pub rounds: Vec<Vec<u32>>,
    #[serde(skip)]
    roles: Vec<Name>,
}

/// Why two individuals were split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Labels differ on this concept name; `first` tells whether the first
    /// individual carries it.
    Label { name: Name, first: bool },
    /// Successor counts into `class` (of round `round - 1`) differ.
    Successors {
        round: usize,
        role: Name,
        class: u32,
        first: usize,
        second: usize,
    },
}

/// Computes the maximal bisimulation of the given kind.
///
/// Only concept and role facts are considered; features must have been
/// booleanized and inverse roles materialized beforehand.
pub fn max_bisimulation(db: &Database, kind: BisimKind) -> BisimPartition {
    let n = db.len();
    let roles: Vec<Name> = db.role_names().cloned().collect();

    let mut ids: HashMap<Vec<&Name>, u32> = HashMap::new();
    let mut current = Vec::with_capacity(n);
    for a in db.individuals() {
        let next = ids.len() as u32;
        current.push(*ids.entry(db.labels(a)).or_insert(next));
    }
    let mut count = ids.len();
    let mut rounds = vec![current.clone()];

    loop {
        let mut sigs: HashMap<(u32, Vec<(u32, u32, u32)>), u32> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for a in db.individuals() {
            let mut profile: Vec<(u32, u32, u32)> = Vec::new();
            for (ri, r) in roles.iter().enumerate() {
                let start = profile.len();
                for &b in db.successors_by_name(r, a) {
                    profile.push((ri as u32, current[b as usize], 1));
                }
                let slice = &mut profile[start..];
                slice.sort_unstable();
                let mut merged: Vec<(u32, u32, u32)> = Vec::with_capacity(slice.len());
                for &(r, c, _) in slice.iter() {
                    match merged.last_mut() {
                        Some(last) if last.0 == r && last.1 == c => last.2 += 1,
                        _ => merged.push((r, c, 1)),
                    }
                }
                if kind == BisimKind::Alc {
                    for m in merged.iter_mut() {
                        m.2 = 1;
                    }
                }
                profile.truncate(start);
                profile.extend(merged);
            }
            let fresh = sigs.len() as u32;
            next.push(*sigs.entry((current[a as usize], profile)).or_insert(fresh));
        }
        let new_count = sigs.len();
        if new_count == count {
            break;
        }
        count = new_count;
        rounds.push(next.clone());
        current = next;
    }

    BisimPartition {
        kind,
        classes: current,
        num_classes: count,
        rounds,
        roles,
    }
}

impl BisimPartition {
    pub fn class_of(&self, a: Ind) -> u32 {
        self.classes[a as usize]
    }

    pub fn bisimilar(&self, a: Ind, b: Ind) -> bool {
        self.classes[a as usize] == self.classes[b as usize]
    }

    /// Members of each class, in individual order.
    pub fn members(&self) -> Vec<Vec<Ind>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (a, &c) in self.classes.iter().enumerate() {
            out[c as usize].push(a as Ind);
        }
        out
    }

    /// Number of refinement steps that changed the partition.
    pub fn num_rounds(&self) -> usize {
        self.rounds.len() - 1
    }

    /// First round in which `a` and `b` are in different classes.
    pub fn split_round(&self, a: Ind, b: Ind) -> Option<usize> {
        self.rounds
            .iter()
            .position(|p| p[a as usize] != p[b as usize])
    }

    /// Witness for the split of `a` and `b`, smallest role name first and
    /// then smallest class id.
    pub fn witness(&self, db: &Database, a: Ind, b: Ind) -> Option<Witness> {
        let round = self.split_round(a, b)?;
        if round == 0 {
            let la = db.labels(a);
            let lb = db.labels(b);
            let name = la
                .iter()
                .find(|n| !lb.contains(n))
                .map(|n| ((*n).clone(), true))
                .or_else(|| {
                    lb.iter()
                        .find(|n| !la.contains(n))
                        .map(|n| ((*n).clone(), false))
                })?;
            return Some(Witness::Label {
                name: name.0,
                first: name.1,
            });
        }
        let prev = &self.rounds[round - 1];
        for r in &self.roles {
            let count = |x: Ind| {
                let mut m: HashMap<u32, usize> = HashMap::new();
                for &s in db.successors_by_name(r, x) {
                    *m.entry(prev[s as usize]).or_default() += 1;
                }
                m
            };
            let (ca, cb) = (count(a), count(b));
            let mut keys: Vec<u32> = ca.keys().chain(cb.keys()).copied().collect();
            keys.sort_unstable();
            keys.dedup();
            for class in keys {
                let (x, y) = (
                    ca.get(&class).copied().unwrap_or(0),
                    cb.get(&class).copied().unwrap_or(0),
                );
                let differs = match self.kind {
                    BisimKind::Alcq => x != y,
                    BisimKind::Alc => (x == 0) != (y == 0),
                };
                if differs {
                    return Some(Witness::Successors {
                        round,
                        role: r.clone(),
                        class,
                        first: x,
                        second: y,
                    });
                }
            }
        }
        None
    }

    /// Class id per individual name, for debugging output.
    pub fn to_json(&self, db: &Database) -> serde_json::Value {
        let classes: serde_json::Map<String, serde_json::Value> = db
            .individuals()
            .map(|a| (db.name(a).to_string(), self.class_of(a).into()))
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "num_classes": self.num_classes,
            "rounds": self.num_rounds(),
            "classes": classes,
        })
    }
}

/// Builds separating concepts for pairs of non-bisimilar individuals,
/// sharing subconcepts across calls.
pub struct Separator<'a> {
    db: &'a Database,
    partition: &'a BisimPartition,
    factory: ConceptFactory,
    memo: HashMap<(Ind, Ind), Concept>,
}

impl<'a> Separator<'a> {
    pub fn new(db: &'a Database, partition: &'a BisimPartition) -> Self {
        Separator {
            db,
            partition,
            factory: ConceptFactory::new(),
            memo: HashMap::new(),
        }
    }

    pub fn factory(&mut self) -> &mut ConceptFactory {
        &mut self.factory
    }

    /// A concept holding at `a` but not at `b`.
    ///
    /// For the ALC kind the result uses only names, negation, conjunction,
    /// disjunction and existential restrictions.
    pub fn separate(&mut self, a: Ind, b: Ind) -> Result<Concept> {
        if self.partition.bisimilar(a, b) {
            return Err(Error::Bisimilar(
                self.db.name(a).to_string(),
                self.db.name(b).to_string(),
            ));
        }
        Ok(self.build(a, b))
    }

    fn build(&mut self, a: Ind, b: Ind) -> Concept {
        if let Some(c) = self.memo.get(&(a, b)) {
            return c.clone();
        }
        let witness = self
            .partition
            .witness(self.db, a, b)
            .expect("individuals in different classes have a witness");
        let c = match witness {
            Witness::Label { name, first } => {
                let atom = self.factory.name(&name);
                if first {
                    atom
                } else {
                    self.factory.not(atom)
                }
            }
            Witness::Successors {
                round,
                role,
                class,
                first,
                second,
            } => {
                let prev = self.partition.rounds[round - 1].clone();
                let mut near: Vec<Ind> = self
                    .db
                    .successors_by_name(&role, a)
                    .iter()
                    .chain(self.db.successors_by_name(&role, b))
                    .copied()
                    .collect();
                near.sort_unstable();
                near.dedup();
                let (inside, outside): (Vec<Ind>, Vec<Ind>) =
                    near.into_iter().partition(|&d| prev[d as usize] == class);
                let mut disjuncts = Vec::with_capacity(inside.len());
                for &d in &inside {
                    let mut conjuncts = Vec::with_capacity(outside.len());
                    for &e in &outside {
                        conjuncts.push(self.build(d, e));
                    }
                    disjuncts.push(self.factory.and_all(conjuncts));
                }
                let dx = self.factory.or_all(disjuncts);
                let r = Role {
                    name: role,
                    inverse: false,
                };
                match self.partition.kind {
                    BisimKind::Alcq if first < second => {
                        self.factory.at_most(first as u32, r, dx)
                    }
                    BisimKind::Alcq => {
                        let inner = self.factory.at_most(second as u32, r, dx);
                        self.factory.not(inner)
                    }
                    BisimKind::Alc if first == 0 => {
                        let inner = self.factory.at_least(1, r, dx);
                        self.factory.not(inner)
                    }
                    BisimKind::Alc => self.factory.at_least(1, r, dx),
                }
            }
        };
        self.memo.insert((a, b), c.clone());
        c
    }
}

/// Separating concept for one pair; see [`Separator`] for batches.
pub fn separating_concept(
    db: &Database,
    a: Ind,
    b: Ind,
    partition: &BisimPartition,
) -> Result<Concept> {
    Separator::new(db, partition).separate(a, b)
}

/// The counting quotient of a database.
#[derive(Debug, Clone)]
pub struct QuotientDatabase {
    pub db: Database,
    /// Original individual to its first copy `<[a], 1>`.
    pub example_map: Vec<Ind>,
    /// Number of copies per class.
    pub copies: Vec<u32>,
    pub partition: BisimPartition,
}

/// Quotient by the maximal ALCQ bisimulation, keeping as many copies of
/// each class as some individual has successors in it over one role.
///
/// Copy `i` of the class of `a` is named `{rep}_{i}` where `rep` is the
/// first member of the class.
pub fn quotient(db: &Database) -> QuotientDatabase {
    let partition = max_bisimulation(db, BisimKind::Alcq);
    quotient_with(db, partition)
}

pub fn quotient_with(db: &Database, partition: BisimPartition) -> QuotientDatabase {
    let members = partition.members();
    let reps: Vec<Ind> = members.iter().map(|m| m[0]).collect();
    let roles: Vec<Name> = db.role_names().cloned().collect();

    let mut copies = vec![1u32; partition.num_classes];
    // Successor counts per (role, class) are equal on bisimilar individuals,
    // so the representatives suffice.
    let mut counts: Vec<Vec<Vec<(u32, u32)>>> = Vec::with_capacity(reps.len());
    for &rep in &reps {
        let mut per_role = Vec::with_capacity(roles.len());
        for r in &roles {
            let mut m: Vec<(u32, u32)> = Vec::new();
            let mut cls: Vec<u32> = db
                .successors_by_name(r, rep)
                .iter()
                .map(|&s| partition.class_of(s))
                .collect();
            cls.sort_unstable();
            for c in cls {
                match m.last_mut() {
                    Some(last) if last.0 == c => last.1 += 1,
                    _ => m.push((c, 1)),
                }
            }
            for &(c, k) in &m {
                copies[c as usize] = copies[c as usize].max(k);
            }
            per_role.push(m);
        }
        counts.push(per_role);
    }

    let mut b = DatabaseBuilder::default();
    let mut first_copy = Vec::with_capacity(reps.len());
    let mut ids: Vec<Vec<Ind>> = Vec::with_capacity(reps.len());
    for (c, &rep) in reps.iter().enumerate() {
        let mut row = Vec::new();
        for i in 1..=copies[c] {
            row.push(b.individual(&format!("{}_{}", db.name(rep), i)));
        }
        first_copy.push(row[0]);
        ids.push(row);
    }
    for (c, &rep) in reps.iter().enumerate() {
        for name in db.labels(rep) {
            for &q in &ids[c] {
                b.concept_fact_ind(name, q);
            }
        }
        for (ri, r) in roles.iter().enumerate() {
            for &(target, k) in &counts[c][ri] {
                for &src in &ids[c] {
                    for &dst in &ids[target as usize][..k as usize] {
                        b.role_fact_ind(r, src, dst);
                    }
                }
            }
        }
    }
    let qdb = b.build().expect("quotient of a valid database is valid");
    let example_map = db
        .individuals()
        .map(|a| first_copy[partition.class_of(a) as usize])
        .collect();
    QuotientDatabase {
        db: qdb,
        example_map,
        copies,
        partition,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::parse_facts;
    use crate::eval::eval_concept;

    fn two_successors() -> Database {
        parse_facts("r(a,c1)\nr(a,c2)\nr(b,d1)").unwrap()
    }

    #[test]
    fn isolated_twins_share_a_class() {
        let db = parse_facts("A(a)\nA(b)").unwrap();
        let p = max_bisimulation(&db, BisimKind::Alcq);
        assert_eq!(p.num_classes, 1);
    }

    #[test]
    fn counting_splits_but_sets_do_not() {
        let db = two_successors();
        let ind = |n| db.ind(n).unwrap();
        let q = max_bisimulation(&db, BisimKind::Alcq);
        assert_eq!(q.num_classes, 3);
        assert!(!q.bisimilar(ind("a"), ind("b")));
        assert!(q.bisimilar(ind("c1"), ind("d1")));
        let s = max_bisimulation(&db, BisimKind::Alc);
        assert_eq!(s.num_classes, 2);
        assert!(s.bisimilar(ind("a"), ind("b")));
    }

    #[test]
    fn separator_for_counts() {
        let db = two_successors();
        let (a, b) = (db.ind("a").unwrap(), db.ind("b").unwrap());
        let p = max_bisimulation(&db, BisimKind::Alcq);
        let c = separating_concept(&db, a, b, &p).unwrap();
        let ext = eval_concept(&c, &db);
        assert!(ext.contains(a as usize) && !ext.contains(b as usize));
        let c = separating_concept(&db, b, a, &p).unwrap();
        let ext = eval_concept(&c, &db);
        assert!(ext.contains(b as usize) && !ext.contains(a as usize));
        assert!(separating_concept(&db, db.ind("c1").unwrap(), db.ind("d1").unwrap(), &p).is_err());
    }

    #[test]
    fn separator_base_case() {
        let mut bld = DatabaseBuilder::default();
        bld.concept_fact("A", "a");
        bld.individual("b");
        let db = bld.build().unwrap();
        let p = max_bisimulation(&db, BisimKind::Alcq);
        let c = separating_concept(&db, 0, 1, &p).unwrap();
        assert_eq!(c, Concept::name("A"));
    }

    #[test]
    fn quotient_keeps_copies() {
        let db = parse_facts("r(a,b1)\nr(a,b2)").unwrap();
        let q = quotient(&db);
        assert_eq!(q.db.len(), 3);
        assert_eq!(q.db.num_facts(), 2);
        let names: Vec<&str> = q.db.names().iter().map(|n| &**n).collect();
        assert_eq!(names, ["a_1", "b1_1", "b1_2"]);
        assert_eq!(q.example_map[db.ind("a").unwrap() as usize], 0);
    }

    #[test]
    fn quotient_of_rigid_database_is_isomorphic() {
        let db = parse_facts("r(a,b)\nr(b,c)\nA(c)").unwrap();
        let q = quotient(&db);
        assert_eq!(q.db.len(), db.len());
        assert_eq!(q.db.num_facts(), db.num_facts());
    }
}

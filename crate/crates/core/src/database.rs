//! Closed-world databases of unary, binary and feature facts.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::concept::Role;
use crate::error::{Error, Result};
use crate::value::Value;

/// Interned identifier for concept, role, feature and individual names.
pub type Name = Arc<str>;

/// Index of an individual inside one [`Database`].
pub type Ind = u32;

/// Prefixes reserved for names introduced by the reductions.
pub const RESERVED_PREFIXES: [&str; 2] = ["__inv_", "__fge_"];

pub fn is_reserved(name: &str) -> bool {
    RESERVED_PREFIXES.iter().any(|p| name.starts_with(p))
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fact {
    Concept(Name, Name),
    Role(Name, Name, Name),
    Feature(Name, Name, Value),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureDomain {
    Integer,
    Decimal,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub concept_names: BTreeSet<Name>,
    pub role_names: BTreeSet<Name>,
    pub feature_names: BTreeMap<Name, FeatureDomain>,
}

impl Signature {
    pub fn contains_concept(&self, name: &str) -> bool {
        self.concept_names.contains(name)
    }

    pub fn contains_role(&self, name: &str) -> bool {
        self.role_names.contains(name)
    }

    pub fn contains_feature(&self, name: &str) -> bool {
        self.feature_names.contains_key(name)
    }
}

#[derive(Debug, Clone, Default)]
struct RoleEdges {
    forward: Vec<Vec<Ind>>,
    backward: Vec<Vec<Ind>>,
    count: usize,
}

/// An immutable database with forward and backward adjacency per role.
///
/// The active domain is every individual mentioned in a fact plus any
/// individual declared explicitly through [`DatabaseBuilder::individual`];
/// transformations use the latter to keep the domain stable when facts
/// about an individual disappear.
#[derive(Debug, Clone, Default)]
pub struct Database {
    names: Vec<Name>,
    index: HashMap<Name, Ind>,
    concepts: BTreeMap<Name, FixedBitSet>,
    roles: BTreeMap<Name, RoleEdges>,
    features: BTreeMap<Name, Vec<Option<Value>>>,
}

impl Database {
    pub fn builder() -> DatabaseBuilder {
        DatabaseBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn individuals(&self) -> impl Iterator<Item = Ind> + '_ {
        0..self.names.len() as Ind
    }

    pub fn name(&self, ind: Ind) -> &Name {
        &self.names[ind as usize]
    }

    pub fn names(&self) -> &[Name] {
        &self.names
    }

    pub fn ind(&self, name: &str) -> Option<Ind> {
        self.index.get(name).copied()
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &Name> {
        self.concepts.keys()
    }

    pub fn role_names(&self) -> impl Iterator<Item = &Name> {
        self.roles.keys()
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &Name> {
        self.features.keys()
    }

    pub fn has_features(&self) -> bool {
        !self.features.is_empty()
    }

    pub fn has_concept(&self, name: &str, ind: Ind) -> bool {
        self.concepts
            .get(name)
            .is_some_and(|ext| ext.contains(ind as usize))
    }

    /// Extension of a concept name, `None` when the name has no facts.
    pub fn concept_extension(&self, name: &str) -> Option<&FixedBitSet> {
        self.concepts.get(name)
    }

    /// Sorted concept names holding at `ind`.
    pub fn labels(&self, ind: Ind) -> Vec<&Name> {
        self.concepts
            .iter()
            .filter(|(_, ext)| ext.contains(ind as usize))
            .map(|(n, _)| n)
            .collect()
    }

    /// `R`-successors of `ind`, sorted; inverse roles use the backward index.
    pub fn successors(&self, role: &Role, ind: Ind) -> &[Ind] {
        match self.roles.get(&*role.name) {
            Some(edges) if role.inverse => &edges.backward[ind as usize],
            Some(edges) => &edges.forward[ind as usize],
            None => &[],
        }
    }

    pub fn successors_by_name(&self, role: &str, ind: Ind) -> &[Ind] {
        match self.roles.get(role) {
            Some(edges) => &edges.forward[ind as usize],
            None => &[],
        }
    }

    pub fn predecessors_by_name(&self, role: &str, ind: Ind) -> &[Ind] {
        match self.roles.get(role) {
            Some(edges) => &edges.backward[ind as usize],
            None => &[],
        }
    }

    pub fn role_edge_count(&self, role: &str) -> usize {
        self.roles.get(role).map_or(0, |e| e.count)
    }

    pub fn feature_value(&self, feature: &str, ind: Ind) -> Option<Value> {
        self.features
            .get(feature)
            .and_then(|vals| vals[ind as usize])
    }

    /// Sorted, deduplicated values observed for `feature`.
    pub fn observed_values(&self, feature: &str) -> Vec<Value> {
        let mut vals: Vec<Value> = self
            .features
            .get(feature)
            .map(|v| v.iter().flatten().copied().collect())
            .unwrap_or_default();
        vals.sort();
        vals.dedup();
        vals
    }

    /// Whether every individual carries a value for `feature`.
    pub fn feature_is_total(&self, feature: &str) -> bool {
        self.features
            .get(feature)
            .is_some_and(|vals| vals.iter().all(Option::is_some))
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature {
            concept_names: self.concepts.keys().cloned().collect(),
            role_names: self.roles.keys().cloned().collect(),
            feature_names: BTreeMap::new(),
        };
        for (f, vals) in &self.features {
            let integral = vals
                .iter()
                .flatten()
                .all(|v| v.units() % Value::from_int(1).units() == 0);
            let dom = if integral {
                FeatureDomain::Integer
            } else {
                FeatureDomain::Decimal
            };
            sig.feature_names.insert(f.clone(), dom);
        }
        sig
    }

    pub fn facts(&self) -> Vec<Fact> {
        let mut out = Vec::new();
        for (name, ext) in &self.concepts {
            for i in ext.ones() {
                out.push(Fact::Concept(name.clone(), self.names[i].clone()));
            }
        }
        for (name, edges) in &self.roles {
            for (a, succ) in edges.forward.iter().enumerate() {
                for &b in succ {
                    out.push(Fact::Role(
                        name.clone(),
                        self.names[a].clone(),
                        self.names[b as usize].clone(),
                    ));
                }
            }
        }
        for (name, vals) in &self.features {
            for (a, v) in vals.iter().enumerate() {
                if let Some(v) = v {
                    out.push(Fact::Feature(name.clone(), self.names[a].clone(), *v));
                }
            }
        }
        out
    }

    pub fn num_facts(&self) -> usize {
        self.concepts.values().map(|e| e.count_ones(..)).sum::<usize>()
            + self.roles.values().map(|e| e.count).sum::<usize>()
            + self
                .features
                .values()
                .map(|v| v.iter().flatten().count())
                .sum::<usize>()
    }

    /// Renders the database in the line-oriented fact format.
    pub fn to_fact_text(&self) -> String {
        let mut out = String::new();
        for fact in self.facts() {
            match fact {
                Fact::Concept(n, a) => writeln!(out, "{n}({a})"),
                Fact::Role(r, a, b) => writeln!(out, "{r}({a},{b})"),
                Fact::Feature(f, a, v) => writeln!(out, "{f}({a}, {v})"),
            }
            .expect("writing to a String");
        }
        out
    }

    /// Rebuilds the database keeping only the listed individuals (in order).
    pub fn restrict(&self, keep: &[Ind]) -> Database {
        let mut b = DatabaseBuilder::default();
        let mut map = vec![None; self.len()];
        for &a in keep {
            map[a as usize] = Some(b.individual(&self.names[a as usize]));
        }
        for (name, ext) in &self.concepts {
            for i in ext.ones() {
                if let Some(ni) = map[i] {
                    b.concept_fact_ind(name, ni);
                }
            }
        }
        for (name, edges) in &self.roles {
            for (a, succ) in edges.forward.iter().enumerate() {
                for &t in succ {
                    if let (Some(na), Some(nt)) = (map[a], map[t as usize]) {
                        b.role_fact_ind(name, na, nt);
                    }
                }
            }
        }
        for (name, vals) in &self.features {
            for (a, v) in vals.iter().enumerate() {
                if let (Some(v), Some(na)) = (v, map[a]) {
                    b.feature_facts
                        .entry(name.clone())
                        .or_default()
                        .insert(na, *v);
                }
            }
        }
        b.build().expect("restriction of a valid database is valid")
    }
}

/// Incremental construction of a [`Database`].
#[derive(Debug, Clone, Default)]
pub struct DatabaseBuilder {
    names: Vec<Name>,
    index: HashMap<Name, Ind>,
    concept_facts: BTreeMap<Name, BTreeSet<Ind>>,
    role_facts: BTreeMap<Name, BTreeSet<(Ind, Ind)>>,
    feature_facts: BTreeMap<Name, BTreeMap<Ind, Value>>,
}

impl DatabaseBuilder {
    /// Declares (or looks up) an individual.
    pub fn individual(&mut self, name: &str) -> Ind {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let n: Name = Arc::from(name);
        let i = self.names.len() as Ind;
        self.names.push(n.clone());
        self.index.insert(n, i);
        i
    }

    pub fn concept_fact(&mut self, concept: &str, ind: &str) -> &mut Self {
        let i = self.individual(ind);
        self.concept_fact_ind(concept, i)
    }

    pub fn concept_fact_ind(&mut self, concept: &str, ind: Ind) -> &mut Self {
        self.concept_facts
            .entry(Arc::from(concept))
            .or_default()
            .insert(ind);
        self
    }

    pub fn role_fact(&mut self, role: &str, source: &str, target: &str) -> &mut Self {
        let a = self.individual(source);
        let b = self.individual(target);
        self.role_fact_ind(role, a, b)
    }

    pub fn role_fact_ind(&mut self, role: &str, source: Ind, target: Ind) -> &mut Self {
        self.role_facts
            .entry(Arc::from(role))
            .or_default()
            .insert((source, target));
        self
    }

    /// Adds `feature(ind, value)`; a second, different value for the same
    /// individual and feature is an error.
    pub fn feature_fact(&mut self, feature: &str, ind: &str, value: Value) -> Result<&mut Self> {
        let i = self.individual(ind);
        let slot = self.feature_facts.entry(Arc::from(feature)).or_default();
        match slot.get(&i) {
            Some(old) if *old != value => Err(Error::Database(format!(
                "individual `{ind}` has two values for feature `{feature}` ({old} and {value})"
            ))),
            _ => {
                slot.insert(i, value);
                Ok(self)
            }
        }
    }

    pub fn build(self) -> Result<Database> {
        for c in self.concept_facts.keys() {
            if self.role_facts.contains_key(c) || self.feature_facts.contains_key(c) {
                return Err(Error::Database(format!(
                    "name `{c}` is used for more than one kind of symbol"
                )));
            }
        }
        for r in self.role_facts.keys() {
            if self.feature_facts.contains_key(r) {
                return Err(Error::Database(format!(
                    "name `{r}` is used both as role and feature"
                )));
            }
        }
        let n = self.names.len();
        let concepts = self
            .concept_facts
            .into_iter()
            .map(|(name, inds)| {
                let mut ext = FixedBitSet::with_capacity(n);
                for i in inds {
                    ext.insert(i as usize);
                }
                (name, ext)
            })
            .collect();
        let roles = self
            .role_facts
            .into_iter()
            .map(|(name, pairs)| {
                let mut edges = RoleEdges {
                    forward: vec![Vec::new(); n],
                    backward: vec![Vec::new(); n],
                    count: pairs.len(),
                };
                for (a, b) in pairs {
                    edges.forward[a as usize].push(b);
                    edges.backward[b as usize].push(a);
                }
                for list in edges.backward.iter_mut() {
                    list.sort_unstable();
                }
                (name, edges)
            })
            .collect();
        let features = self
            .feature_facts
            .into_iter()
            .map(|(name, vals)| {
                let mut col = vec![None; n];
                for (i, v) in vals {
                    col[i as usize] = Some(v);
                }
                (name, col)
            })
            .collect();
        Ok(Database {
            names: self.names,
            index: self.index,
            concepts,
            roles,
            features,
        })
    }
}

/// Parses the line-oriented fact format.
///
/// Names starting with a reserved prefix are rejected.
pub fn parse_facts(text: &str) -> Result<Database> {
    let mut b = DatabaseBuilder::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fail = |message: String| Error::Fact {
            line: line_no,
            message,
        };
        let open = line
            .find('(')
            .ok_or_else(|| fail(format!("expected `name(...)`, found `{line}`")))?;
        if !line.ends_with(')') {
            return Err(fail("missing closing parenthesis".into()));
        }
        let head = line[..open].trim();
        let args: Vec<&str> = line[open + 1..line.len() - 1]
            .split(',')
            .map(str::trim)
            .collect();
        if !is_identifier(head) {
            return Err(fail(format!("invalid name `{head}`")));
        }
        if is_reserved(head) {
            return Err(Error::ReservedName(head.to_string()));
        }
        for (pos, a) in args.iter().enumerate() {
            let is_value_slot = pos == 1 && !is_identifier(a);
            if !is_value_slot {
                if !is_identifier(a) {
                    return Err(fail(format!("invalid individual name `{a}`")));
                }
                if is_reserved(a) {
                    return Err(Error::ReservedName(a.to_string()));
                }
            }
        }
        match args.as_slice() {
            [a] => {
                b.concept_fact(head, a);
            }
            [a, second] if is_identifier(second) => {
                b.role_fact(head, a, second);
            }
            [a, second] => {
                let v: Value = second
                    .parse()
                    .map_err(|e: crate::value::ParseValueError| fail(e.to_string()))?;
                b.feature_fact(head, a, v)
                    .map_err(|e| fail(e.to_string()))?;
            }
            _ => return Err(fail(format!("expected 1 or 2 arguments, found {}", args.len()))),
        }
    }
    b.build()
}

pub fn load_facts(path: &Path) -> Result<Database> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_facts(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# family
child(a, a1)
child(a,a2)
child(b,b1)
child(b,b2)
height(a1, 121)
height(a2, 145)
height(b1, 152)
height(b2, 163)
Person(a)
";

    #[test]
    fn parses_fact_file() {
        let db = parse_facts(EXAMPLE).unwrap();
        assert_eq!(db.len(), 6);
        let a = db.ind("a").unwrap();
        let succ: Vec<&str> = db
            .successors_by_name("child", a)
            .iter()
            .map(|&i| &**db.name(i))
            .collect();
        assert_eq!(succ, ["a1", "a2"]);
        assert_eq!(
            db.feature_value("height", db.ind("b2").unwrap()),
            Some(Value::from_int(163))
        );
        assert!(db.has_concept("Person", a));
        assert_eq!(db.num_facts(), 9);
        assert_eq!(db.observed_values("height").len(), 4);
        assert!(!db.feature_is_total("height"));
    }

    #[test]
    fn backward_index_inverts_forward() {
        let db = parse_facts(EXAMPLE).unwrap();
        for a in db.individuals() {
            for &b in db.successors_by_name("child", a) {
                assert!(db.predecessors_by_name("child", b).contains(&a));
            }
            for &b in db.predecessors_by_name("child", a) {
                assert!(db.successors_by_name("child", b).contains(&a));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_facts("h(a, 1)\nh(a, 2)\n"),
            Err(Error::Fact { line: 2, .. })
        ));
        assert!(matches!(parse_facts("__inv_r(a,b)"), Err(Error::ReservedName(_))));
        assert!(matches!(parse_facts("A(a)\nA(a,b)"), Err(Error::Database(_))));
        assert!(matches!(parse_facts("A(1x)"), Err(Error::Fact { .. })));
        assert!(matches!(parse_facts("A(a"), Err(Error::Fact { .. })));
        assert!(parse_facts("h(a, 1)\nh(a, 1.0)\n").is_ok());
    }

    #[test]
    fn fact_text_round_trip() {
        let db = parse_facts(EXAMPLE).unwrap();
        let again = parse_facts(&db.to_fact_text()).unwrap();
        assert_eq!(db.facts(), again.facts());
    }

    #[test]
    fn restrict_keeps_internal_edges() {
        let db = parse_facts(EXAMPLE).unwrap();
        let keep = [db.ind("a").unwrap(), db.ind("a1").unwrap()];
        let sub = db.restrict(&keep);
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.num_facts(), 3);
    }
}

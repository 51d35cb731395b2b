//! Concepts as shared syntax DAGs, their size measures and textual form.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::database::Name;
use crate::error::{Error, Result};
use crate::value::Value;

/// A role name or the inverse of one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Role {
    pub name: Name,
    pub inverse: bool,
}

impl Role {
    pub fn new(name: &str) -> Self {
        Role {
            name: Arc::from(name),
            inverse: false,
        }
    }

    pub fn inverse_of(name: &str) -> Self {
        Role {
            name: Arc::from(name),
            inverse: true,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "inv({})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One constructor of a concept.
#[derive(Clone, PartialEq, Eq)]
pub enum Node {
    Top,
    Bot,
    Name(Name),
    Not(Concept),
    And(Concept, Concept),
    Or(Concept, Concept),
    /// `(>= n R . C)` with `n >= 1`.
    AtLeast(u32, Role, Concept),
    /// `(<= n R . C)`.
    AtMost(u32, Role, Concept),
    FeatureGeq(Name, Value),
    FeatureLeq(Name, Value),
}

/// A reference-counted concept node. Cloning is cheap and subconcepts may
/// be shared, so a `Concept` is in general a DAG.
#[derive(Clone)]
pub struct Concept(Arc<Node>);

impl PartialEq for Concept {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Concept {}

impl Concept {
    pub fn new(node: Node) -> Self {
        if let Node::AtLeast(n, ..) = &node {
            assert!(*n >= 1, "at-least restrictions need n >= 1");
        }
        Concept(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Address of the shared node, stable while any clone is alive.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn top() -> Self {
        Concept::new(Node::Top)
    }

    pub fn bot() -> Self {
        Concept::new(Node::Bot)
    }

    pub fn name(name: &str) -> Self {
        Concept::new(Node::Name(Arc::from(name)))
    }

    pub fn not(c: Concept) -> Self {
        Concept::new(Node::Not(c))
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::new(Node::And(a, b))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::new(Node::Or(a, b))
    }

    pub fn at_least(n: u32, role: Role, c: Concept) -> Self {
        Concept::new(Node::AtLeast(n, role, c))
    }

    pub fn at_most(n: u32, role: Role, c: Concept) -> Self {
        Concept::new(Node::AtMost(n, role, c))
    }

    /// `exists R . C`, stored as `(>= 1 R . C)`.
    pub fn exists(role: Role, c: Concept) -> Self {
        Concept::at_least(1, role, c)
    }

    /// `forall R . C`, stored as `(<= 0 R . not C)`.
    pub fn forall(role: Role, c: Concept) -> Self {
        Concept::at_most(0, role, Concept::not(c))
    }

    pub fn feature_geq(f: &str, v: Value) -> Self {
        Concept::new(Node::FeatureGeq(Arc::from(f), v))
    }

    pub fn feature_leq(f: &str, v: Value) -> Self {
        Concept::new(Node::FeatureLeq(Arc::from(f), v))
    }

    /// If this node is `forall R . C` sugar, returns `(R, C)`.
    pub fn as_forall(&self) -> Option<(&Role, &Concept)> {
        match self.node() {
            Node::AtMost(0, role, inner) => match inner.node() {
                Node::Not(body) => Some((role, body)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Direct subconcepts in syntactic order.
    pub fn children(&self) -> Vec<&Concept> {
        match self.node() {
            Node::Top | Node::Bot | Node::Name(_) | Node::FeatureGeq(..) | Node::FeatureLeq(..) => {
                vec![]
            }
            Node::Not(c) | Node::AtLeast(_, _, c) | Node::AtMost(_, _, c) => vec![c],
            Node::And(a, b) | Node::Or(a, b) => vec![a, b],
        }
    }

    /// Number of distinct shared nodes.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            if seen.insert(c.id()) {
                stack.extend(c.children());
            }
        }
        seen.len()
    }

    /// Rebuilds the concept bottom-up, letting `f` replace each rebuilt
    /// node. Shared nodes are visited once.
    pub fn rewrite(&self, f: &mut impl FnMut(Concept) -> Concept) -> Concept {
        let mut memo = HashMap::new();
        self.rewrite_memo(f, &mut memo)
    }

    fn rewrite_memo(
        &self,
        f: &mut impl FnMut(Concept) -> Concept,
        memo: &mut HashMap<usize, Concept>,
    ) -> Concept {
        if let Some(c) = memo.get(&self.id()) {
            return c.clone();
        }
        let rebuilt = match self.node() {
            Node::Top | Node::Bot | Node::Name(_) | Node::FeatureGeq(..) | Node::FeatureLeq(..) => {
                self.clone()
            }
            Node::Not(c) => Concept::not(c.rewrite_memo(f, memo)),
            Node::And(a, b) => Concept::and(a.rewrite_memo(f, memo), b.rewrite_memo(f, memo)),
            Node::Or(a, b) => Concept::or(a.rewrite_memo(f, memo), b.rewrite_memo(f, memo)),
            Node::AtLeast(n, r, c) => Concept::at_least(*n, r.clone(), c.rewrite_memo(f, memo)),
            Node::AtMost(n, r, c) => Concept::at_most(*n, r.clone(), c.rewrite_memo(f, memo)),
        };
        let out = f(rebuilt);
        memo.insert(self.id(), out.clone());
        out
    }

    /// Copies the concept into a tree without shared nodes, failing when
    /// the tree would have more than `limit` nodes.
    pub fn expand(&self, limit: u64) -> Result<Concept> {
        if node_count(self) > limit {
            return Err(Error::ExpansionBudget(limit));
        }
        Ok(self.deep_copy())
    }

    fn deep_copy(&self) -> Concept {
        match self.node() {
            Node::Top | Node::Bot | Node::Name(_) | Node::FeatureGeq(..) | Node::FeatureLeq(..) => {
                Concept::new(self.node().clone())
            }
            Node::Not(c) => Concept::not(c.deep_copy()),
            Node::And(a, b) => Concept::and(a.deep_copy(), b.deep_copy()),
            Node::Or(a, b) => Concept::or(a.deep_copy(), b.deep_copy()),
            Node::AtLeast(n, r, c) => Concept::at_least(*n, r.clone(), c.deep_copy()),
            Node::AtMost(n, r, c) => Concept::at_most(*n, r.clone(), c.deep_copy()),
        }
    }
}

/// Node count of the syntax tree (sharing expanded, saturating).
///
/// Every constructor, name and feature comparison counts one node; the
/// number of a restriction adds nothing. `forall R . C` counts as one node
/// over `C`, matching its single-label form in the encoding.
pub fn node_count(c: &Concept) -> u64 {
    fn go(c: &Concept, memo: &mut HashMap<usize, u64>) -> u64 {
        if let Some(&n) = memo.get(&c.id()) {
            return n;
        }
        let n = if let Some((_, body)) = c.as_forall() {
            1u64.saturating_add(go(body, memo))
        } else {
            c.children()
                .into_iter()
                .fold(1u64, |acc, ch| acc.saturating_add(go(ch, memo)))
        };
        memo.insert(c.id(), n);
        n
    }
    go(c, &mut HashMap::new())
}

/// String-representation size with unary numbers.
///
/// Non-strict mode charges `exists`/`forall` sugar nothing for its number;
/// strict mode charges every restriction its number.
pub fn string_size(c: &Concept, strict: bool) -> u64 {
    fn go(c: &Concept, strict: bool, memo: &mut HashMap<usize, u64>) -> u64 {
        if let Some(&n) = memo.get(&c.id()) {
            return n;
        }
        let n = if let Some((_, body)) = c.as_forall() {
            1u64.saturating_add(go(body, strict, memo))
        } else {
            let own = match c.node() {
                Node::AtLeast(1, ..) if !strict => 0,
                Node::AtLeast(n, ..) | Node::AtMost(n, ..) => *n as u64,
                _ => 0,
            };
            c.children()
                .into_iter()
                .fold(1u64.saturating_add(own), |acc, ch| {
                    acc.saturating_add(go(ch, strict, memo))
                })
        };
        memo.insert(c.id(), n);
        n
    }
    go(c, strict, &mut HashMap::new())
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((role, body)) = self.as_forall() {
            return write!(f, "(forall {role} . {body})");
        }
        match self.node() {
            Node::Top => write!(f, "top"),
            Node::Bot => write!(f, "bot"),
            Node::Name(n) => write!(f, "{n}"),
            Node::Not(c) => write!(f, "not {c}"),
            Node::And(a, b) => write!(f, "({a} and {b})"),
            Node::Or(a, b) => write!(f, "({a} or {b})"),
            Node::AtLeast(1, r, c) => write!(f, "(exists {r} . {c})"),
            Node::AtLeast(n, r, c) => write!(f, "(atleast {n} {r} . {c})"),
            Node::AtMost(n, r, c) => write!(f, "(atmost {n} {r} . {c})"),
            Node::FeatureGeq(name, v) => write!(f, "({name} >= {v})"),
            Node::FeatureLeq(name, v) => write!(f, "({name} <= {v})"),
        }
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Concept {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum ShallowKey {
    Top,
    Bot,
    Name(Name),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    AtLeast(u32, Role, usize),
    AtMost(u32, Role, usize),
    FeatureGeq(Name, Value),
    FeatureLeq(Name, Value),
}

/// Hash-consing constructor: structurally equal concepts built through
/// one factory are the same shared node.
#[derive(Default)]
pub struct ConceptFactory {
    table: HashMap<ShallowKey, Concept>,
}

impl ConceptFactory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns a node whose children were built by this factory.
    pub fn intern(&mut self, node: Node) -> Concept {
        let key = match &node {
            Node::Top => ShallowKey::Top,
            Node::Bot => ShallowKey::Bot,
            Node::Name(n) => ShallowKey::Name(n.clone()),
            Node::Not(c) => ShallowKey::Not(c.id()),
            Node::And(a, b) => ShallowKey::And(a.id(), b.id()),
            Node::Or(a, b) => ShallowKey::Or(a.id(), b.id()),
            Node::AtLeast(n, r, c) => ShallowKey::AtLeast(*n, r.clone(), c.id()),
            Node::AtMost(n, r, c) => ShallowKey::AtMost(*n, r.clone(), c.id()),
            Node::FeatureGeq(f, v) => ShallowKey::FeatureGeq(f.clone(), *v),
            Node::FeatureLeq(f, v) => ShallowKey::FeatureLeq(f.clone(), *v),
        };
        self.table
            .entry(key)
            .or_insert_with(|| Concept::new(node))
            .clone()
    }

    pub fn top(&mut self) -> Concept {
        self.intern(Node::Top)
    }

    pub fn bot(&mut self) -> Concept {
        self.intern(Node::Bot)
    }

    pub fn name(&mut self, name: &Name) -> Concept {
        self.intern(Node::Name(name.clone()))
    }

    pub fn not(&mut self, c: Concept) -> Concept {
        self.intern(Node::Not(c))
    }

    pub fn at_most(&mut self, n: u32, role: Role, c: Concept) -> Concept {
        self.intern(Node::AtMost(n, role, c))
    }

    pub fn at_least(&mut self, n: u32, role: Role, c: Concept) -> Concept {
        self.intern(Node::AtLeast(n, role, c))
    }

    /// Conjunction of all parts: `top` when empty, duplicates and `top`
    /// parts dropped, `bot` absorbing.
    pub fn and_all(&mut self, parts: impl IntoIterator<Item = Concept>) -> Concept {
        self.fold(parts, true)
    }

    /// Disjunction of all parts: `bot` when empty, duplicates and `bot`
    /// parts dropped, `top` absorbing.
    pub fn or_all(&mut self, parts: impl IntoIterator<Item = Concept>) -> Concept {
        self.fold(parts, false)
    }

    fn fold(&mut self, parts: impl IntoIterator<Item = Concept>, conj: bool) -> Concept {
        let (unit, zero) = if conj {
            (Node::Top, Node::Bot)
        } else {
            (Node::Bot, Node::Top)
        };
        let mut seen = std::collections::HashSet::new();
        let mut kept: Vec<Concept> = Vec::new();
        for p in parts {
            if *p.node() == unit {
                continue;
            }
            if *p.node() == zero {
                return self.intern(zero);
            }
            if seen.insert(p.id()) {
                kept.push(p);
            }
        }
        let mut iter = kept.into_iter();
        let Some(mut acc) = iter.next() else {
            return self.intern(unit);
        };
        for p in iter {
            acc = if conj {
                self.intern(Node::And(acc, p))
            } else {
                self.intern(Node::Or(acc, p))
            };
        }
        acc
    }
}

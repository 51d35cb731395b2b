//! CNF encoding of size-bounded fitting over a weighted graph.
//!
//! Nodes `0..k` of a syntax tree are labelled by [`Label`]s; node 0 is the
//! root, every other used node has exactly one parent with a smaller index,
//! and the two children of a binary node are consecutive. Nodes labelled
//! `Unused` form a suffix, so one instance covers every size up to `k`.
//! Variable `z(i, a)` holds iff individual `a` is in the extension of the
//! subconcept rooted at node `i`.

pub mod counter;
pub mod graph;
pub mod labels;

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::cnf::{Cnf, Lit};
use crate::concept::{Concept, Role};
use crate::database::Name;
use crate::error::{Error, Result};

pub use graph::EncodeGraph;
pub use labels::{label_set, Label};

/// Largest accepted node bound.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EncodeOptions {
    pub k: usize,
    pub g: u32,
    pub qualified: bool,
    /// Adds the unit clauses asking the root to accept every positive and
    /// reject every negative.
    pub fitting: bool,
}

/// What a variable stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum VarMeaning {
    X { node: usize, label: String },
    A1 { node: usize },
    A2 { node: usize },
    Y1 { parent: usize, child: usize },
    Y2 { parent: usize, child: usize },
    Z { node: usize, individual: Name },
    W1 { node: usize, individual: Name },
    W2 { node: usize, individual: Name },
    Counter {
        node: usize,
        role: Name,
        individual: Name,
        prefix: usize,
        count: usize,
    },
    Extra,
}

/// An encoded instance together with its variable map.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub cnf: Cnf,
    pub options: EncodeOptions,
    pub labels: Vec<Label>,
    pub graph: Arc<EncodeGraph>,
    pub positives: Vec<u32>,
    pub negatives: Vec<u32>,
    x: Vec<Vec<Lit>>,
    a1: Vec<Lit>,
    a2: Vec<Lit>,
    y1: Vec<Vec<Option<Lit>>>,
    y2: Vec<Vec<Option<Lit>>>,
    z: Vec<Vec<Option<Lit>>>,
    meanings: Vec<VarMeaning>,
}

impl Encoding {
    pub fn k(&self) -> usize {
        self.options.k
    }

    pub fn label_lit(&self, node: usize, label: usize) -> Lit {
        self.x[node][label]
    }

    pub fn unused(&self, node: usize) -> Lit {
        *self.x[node].last().expect("unused label is last")
    }

    /// True iff the node carries a unary label.
    pub fn unary(&self, node: usize) -> Lit {
        self.a1[node]
    }

    /// True iff the node carries a binary label.
    pub fn binary(&self, node: usize) -> Lit {
        self.a2[node]
    }

    /// `child` is the only child of `parent`.
    pub fn y1(&self, parent: usize, child: usize) -> Option<Lit> {
        self.y1[parent][child]
    }

    /// `child` and `child + 1` are the children of `parent`.
    pub fn y2(&self, parent: usize, child: usize) -> Option<Lit> {
        self.y2[parent][child]
    }

    /// `z(0, a)`: the root concept holds at `a`.
    pub fn root(&self, a: u32) -> Lit {
        self.z[0][a as usize].expect("root variables exist for examples")
    }

    pub fn z(&self, node: usize, a: u32) -> Option<Lit> {
        self.z[node][a as usize]
    }

    pub fn meaning(&self, var: u32) -> Option<&VarMeaning> {
        self.meanings.get(var as usize - 1)
    }

    /// Reads the syntax tree off a model and checks that the concept's
    /// extension agrees with the root variables on every example.
    pub fn decode(&self, model: &[bool]) -> Result<Concept> {
        let k = self.options.k;
        let mut labels = Vec::with_capacity(k);
        for i in 0..k {
            let set: Vec<usize> = (0..self.labels.len())
                .filter(|&l| self.x[i][l].eval(model))
                .collect();
            if set.len() != 1 {
                return Err(Error::Internal(format!("node {i} has {} labels", set.len())));
            }
            labels.push(self.labels[set[0]]);
        }
        let c = self.build(0, &labels, model)?;
        let ext = self.graph.eval(&c)?;
        for &a in self.positives.iter().chain(&self.negatives) {
            if ext.contains(a as usize) != self.root(a).eval(model) {
                return Err(Error::Internal(format!(
                    "decoded concept {c} disagrees with the model at `{}`",
                    self.graph.names[a as usize]
                )));
            }
        }
        Ok(c)
    }

    fn build(&self, i: usize, labels: &[Label], model: &[bool]) -> Result<Concept> {
        let g = &self.graph;
        let role = |r: u32| Role::new(&g.roles[r as usize]);
        let child = || -> Result<Concept> {
            let j = (i + 1..self.options.k)
                .find(|&j| self.y1[i][j].is_some_and(|l| l.eval(model)))
                .ok_or_else(|| Error::Internal(format!("unary node {i} has no child")))?;
            self.build(j, labels, model)
        };
        Ok(match labels[i] {
            Label::Top => Concept::top(),
            Label::Bot => Concept::bot(),
            Label::Name(a) => Concept::name(&g.concepts[a as usize].0),
            Label::Not => Concept::not(child()?),
            Label::Exists(r) => Concept::exists(role(r), child()?),
            Label::Forall(r) => Concept::forall(role(r), child()?),
            Label::AtLeast(n, r) => Concept::at_least(n, role(r), child()?),
            Label::AtMost(n, r) => Concept::at_most(n, role(r), child()?),
            Label::And | Label::Or => {
                let j = (i + 1..self.options.k)
                    .find(|&j| self.y2[i][j].is_some_and(|l| l.eval(model)))
                    .ok_or_else(|| Error::Internal(format!("binary node {i} has no children")))?;
                let l = self.build(j, labels, model)?;
                let r = self.build(j + 1, labels, model)?;
                if labels[i] == Label::And {
                    Concept::and(l, r)
                } else {
                    Concept::or(l, r)
                }
            }
            Label::Unused => return Err(Error::Internal(format!("node {i} is referenced but unused"))),
        })
    }

    /// JSON description of every variable.
    pub fn sidecar(&self) -> serde_json::Value {
        let vars: Vec<serde_json::Value> = self
            .meanings
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut v = serde_json::to_value(m).expect("meanings serialize");
                v["var"] = serde_json::json!(i + 1);
                v
            })
            .collect();
        serde_json::json!({
            "num_vars": self.cnf.num_vars(),
            "num_clauses": self.cnf.num_clauses(),
            "k": self.options.k,
            "g": self.options.g,
            "qualified": self.options.qualified,
            "positives": self.positives.iter().map(|&a| &self.graph.names[a as usize]).collect::<Vec<_>>(),
            "negatives": self.negatives.iter().map(|&a| &self.graph.names[a as usize]).collect::<Vec<_>>(),
            "variables": vars,
        })
    }
}

struct Builder {
    cnf: Cnf,
    meanings: Vec<VarMeaning>,
}

impl Builder {
    fn var(&mut self, m: VarMeaning) -> Lit {
        self.meanings.push(m);
        self.cnf.new_var()
    }

    fn clause(&mut self, c: &[Lit]) {
        self.cnf.add_clause(c);
    }

    fn at_most_one(&mut self, lits: &[Lit]) {
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i + 1..] {
                self.clause(&[!a, !b]);
            }
        }
    }
}

/// Encodes "some concept with at most `k` nodes and numbers at most `g`
/// fits the examples". Example indices refer to `graph`.
pub fn encode(
    graph: Arc<EncodeGraph>,
    positives: &[u32],
    negatives: &[u32],
    options: EncodeOptions,
) -> Result<Encoding> {
    let k = options.k;
    if k == 0 || k > MAX_NODES {
        return Err(Error::Config(format!("node bound {k} outside 1..={MAX_NODES}")));
    }
    let n = graph.len();
    for &a in positives.iter().chain(negatives) {
        if a as usize >= n {
            return Err(Error::Problem(format!("example index {a} outside the graph")));
        }
    }
    let labels = label_set(&graph, options.qualified, options.g);
    let mut b = Builder {
        cnf: Cnf::new(),
        meanings: Vec::new(),
    };

    // Distance from the examples; node i is only evaluated within radius i.
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &a in positives.iter().chain(negatives) {
        if dist[a as usize] == usize::MAX {
            dist[a as usize] = 0;
            queue.push_back(a);
        }
    }
    while let Some(a) = queue.pop_front() {
        let d = dist[a as usize];
        if d + 1 >= k {
            continue;
        }
        for per in &graph.succ {
            for &(t, _) in &per[a as usize] {
                if dist[t as usize] == usize::MAX {
                    dist[t as usize] = d + 1;
                    queue.push_back(t);
                }
            }
        }
    }
    let within = |r: usize| -> Vec<u32> { (0..n as u32).filter(|&a| dist[a as usize] <= r).collect() };

    let x: Vec<Vec<Lit>> = (0..k)
        .map(|i| {
            labels
                .iter()
                .map(|l| {
                    b.var(VarMeaning::X {
                        node: i,
                        label: l.describe(&graph),
                    })
                })
                .collect()
        })
        .collect();
    let a1: Vec<Lit> = (0..k).map(|i| b.var(VarMeaning::A1 { node: i })).collect();
    let a2: Vec<Lit> = (0..k).map(|i| b.var(VarMeaning::A2 { node: i })).collect();
    let mut y1 = vec![vec![None; k]; k];
    let mut y2 = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            y1[i][j] = Some(b.var(VarMeaning::Y1 { parent: i, child: j }));
            if j + 1 < k {
                y2[i][j] = Some(b.var(VarMeaning::Y2 { parent: i, child: j }));
            }
        }
    }
    let mut z = vec![vec![None; n]; k];
    for (i, zi) in z.iter_mut().enumerate() {
        for a in within(i) {
            zi[a as usize] = Some(b.var(VarMeaning::Z {
                node: i,
                individual: graph.names[a as usize].clone(),
            }));
        }
    }
    let mut w1 = vec![vec![None; n]; k];
    let mut w2 = vec![vec![None; n]; k];
    for i in 0..k {
        if i + 1 < k {
            for a in within(i + 1) {
                w1[i][a as usize] = Some(b.var(VarMeaning::W1 {
                    node: i,
                    individual: graph.names[a as usize].clone(),
                }));
            }
        }
        if i + 2 < k {
            for a in within(i) {
                w2[i][a as usize] = Some(b.var(VarMeaning::W2 {
                    node: i,
                    individual: graph.names[a as usize].clone(),
                }));
            }
        }
    }

    // Structure.
    let unused = |i: usize| *x[i].last().expect("unused label");
    for i in 0..k {
        b.clause(&x[i]);
        b.at_most_one(&x[i]);
        let unary: Vec<Lit> = (0..labels.len()).filter(|&l| labels[l].arity() == 1).map(|l| x[i][l]).collect();
        let binary: Vec<Lit> = (0..labels.len()).filter(|&l| labels[l].arity() == 2).map(|l| x[i][l]).collect();
        for (flag, group) in [(a1[i], &unary), (a2[i], &binary)] {
            let mut c = vec![!flag];
            c.extend(group.iter().copied());
            b.clause(&c);
            for &l in group.iter() {
                b.clause(&[!l, flag]);
            }
        }
        let ys1: Vec<Lit> = y1[i].iter().flatten().copied().collect();
        let ys2: Vec<Lit> = y2[i].iter().flatten().copied().collect();
        for (flag, ys) in [(a1[i], &ys1), (a2[i], &ys2)] {
            let mut c = vec![!flag];
            c.extend(ys.iter().copied());
            b.clause(&c);
            for &y in ys.iter() {
                b.clause(&[!y, flag]);
            }
        }
        let all: Vec<Lit> = ys1.iter().chain(&ys2).copied().collect();
        b.at_most_one(&all);
        if i + 1 < k {
            b.clause(&[!unused(i), unused(i + 1)]);
        }
    }
    b.clause(&[!unused(0)]);
    for j in 1..k {
        let mut incoming: Vec<Lit> = Vec::new();
        for i in 0..j {
            incoming.extend(y1[i][j]);
            incoming.extend(y2[i][j]);
            if j >= 1 && i < j - 1 {
                incoming.extend(y2[i][j - 1]);
            }
        }
        let mut c = vec![unused(j)];
        c.extend(incoming.iter().copied());
        b.clause(&c);
        b.at_most_one(&incoming);
        for &p in &incoming {
            b.clause(&[!p, !unused(j)]);
        }
    }

    // Child values.
    for i in 0..k {
        for j in i + 1..k {
            for a in 0..n {
                if let Some(w) = w1[i][a] {
                    let zj = z[j][a].expect("child radius covers parent successors");
                    for y in [y1[i][j], y2[i][j]].into_iter().flatten() {
                        b.clause(&[!y, !w, zj]);
                        b.clause(&[!y, w, !zj]);
                    }
                }
                if let (Some(w), Some(y)) = (w2[i][a], y2[i][j]) {
                    let zj = z[j + 1][a].expect("sibling radius covers parent");
                    b.clause(&[!y, !w, zj]);
                    b.clause(&[!y, w, !zj]);
                }
            }
        }
    }

    // Semantics.
    for i in 0..k {
        for a in within(i) {
            let zi = z[i][a as usize].expect("allocated above");
            let au = a as usize;
            let mut regs: Vec<Option<(counter::Registers, usize)>> = vec![None; graph.roles.len()];
            for (li, &label) in labels.iter().enumerate() {
                let xl = x[i][li];
                let w1a = |b: u32| w1[i][b as usize];
                match label {
                    Label::Top => b.clause(&[!xl, zi]),
                    Label::Bot | Label::Unused => b.clause(&[!xl, !zi]),
                    Label::Name(c) => {
                        if graph.concepts[c as usize].1.contains(au) {
                            b.clause(&[!xl, zi]);
                        } else {
                            b.clause(&[!xl, !zi]);
                        }
                    }
                    Label::Not => {
                        if let Some(w) = w1[i][au] {
                            b.clause(&[!xl, !zi, !w]);
                            b.clause(&[!xl, zi, w]);
                        } else {
                            b.clause(&[!xl]);
                        }
                    }
                    Label::And | Label::Or => {
                        if let (Some(l), Some(r)) = (w1[i][au], w2[i][au]) {
                            if label == Label::And {
                                b.clause(&[!xl, !zi, l]);
                                b.clause(&[!xl, !zi, r]);
                                b.clause(&[!xl, zi, !l, !r]);
                            } else {
                                b.clause(&[!xl, zi, !l]);
                                b.clause(&[!xl, zi, !r]);
                                b.clause(&[!xl, !zi, l, r]);
                            }
                        } else {
                            b.clause(&[!xl]);
                        }
                    }
                    Label::Exists(r) | Label::Forall(r) => {
                        if i + 1 >= k {
                            b.clause(&[!xl]);
                            continue;
                        }
                        let succ: Vec<Lit> = graph.succ[r as usize][au]
                            .iter()
                            .map(|&(t, _)| w1a(t).expect("successor within radius"))
                            .collect();
                        if matches!(label, Label::Exists(_)) {
                            let mut c = vec![!xl, !zi];
                            c.extend(succ.iter().copied());
                            b.clause(&c);
                            for &s in &succ {
                                b.clause(&[!xl, zi, !s]);
                            }
                        } else {
                            let mut c = vec![!xl, zi];
                            c.extend(succ.iter().map(|&s| !s));
                            b.clause(&c);
                            for &s in &succ {
                                b.clause(&[!xl, !zi, s]);
                            }
                        }
                    }
                    Label::AtLeast(m, r) | Label::AtMost(m, r) => {
                        if i + 1 >= k {
                            b.clause(&[!xl]);
                            continue;
                        }
                        let ru = r as usize;
                        let total: u64 = graph.succ[ru][au].iter().map(|&(_, w)| w as u64).sum();
                        if regs[ru].is_none() {
                            let cap = (options.g as usize + 1).min(total as usize);
                            let mut lits = Vec::new();
                            for &(t, w) in &graph.succ[ru][au] {
                                let l = w1a(t).expect("successor within radius");
                                lits.extend(std::iter::repeat(l).take((w as usize).min(cap)));
                            }
                            let start = b.cnf.num_vars();
                            let made = counter::registers(&mut b.cnf, &lits, cap);
                            debug_assert_eq!(start as usize, b.meanings.len());
                            for &(_, prefix, count) in &made.aux {
                                b.meanings.push(VarMeaning::Counter {
                                    node: i,
                                    role: graph.roles[ru].clone(),
                                    individual: graph.names[au].clone(),
                                    prefix,
                                    count,
                                });
                            }
                            regs[ru] = Some((made, total as usize));
                        }
                        let (made, total) = regs[ru].as_ref().expect("built above");
                        // "at least t" literal, or a constant when t is out of range
                        let reach = |t: usize| -> Option<Option<Lit>> {
                            if t == 0 {
                                Some(None)
                            } else if t > *total {
                                None
                            } else {
                                Some(Some(made.at_least(t).expect("cap covers g + 1")))
                            }
                        };
                        let (t, positive) = match label {
                            Label::AtLeast(..) => (m as usize, true),
                            _ => (m as usize + 1, false),
                        };
                        match reach(t) {
                            None => {
                                // count >= t impossible
                                if positive {
                                    b.clause(&[!xl, !zi]);
                                } else {
                                    b.clause(&[!xl, zi]);
                                }
                            }
                            Some(None) => {
                                if positive {
                                    b.clause(&[!xl, zi]);
                                } else {
                                    b.clause(&[!xl, !zi]);
                                }
                            }
                            Some(Some(rl)) => {
                                let rl = if positive { rl } else { !rl };
                                b.clause(&[!xl, !zi, rl]);
                                b.clause(&[!xl, zi, !rl]);
                            }
                        }
                    }
                }
            }
        }
    }

    if options.fitting {
        for &p in positives {
            b.clause(&[z[0][p as usize].expect("examples at radius 0")]);
        }
        for &q in negatives {
            b.clause(&[!z[0][q as usize].expect("examples at radius 0")]);
        }
    }
    debug_assert_eq!(b.meanings.len(), b.cnf.num_vars() as usize);

    Ok(Encoding {
        cnf: b.cnf,
        options,
        labels,
        graph,
        positives: positives.to_vec(),
        negatives: negatives.to_vec(),
        x,
        a1,
        a2,
        y1,
        y2,
        z,
        meanings: b.meanings,
    })
}

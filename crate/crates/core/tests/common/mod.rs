//! Reference implementations used by the integration tests. Everything
//! here is written directly from the definitions and shares no code with
//! the library beyond its data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use dlfit::cnf::Cnf;
use dlfit::concept::{Concept, Node, Role};
use dlfit::database::{Database, DatabaseBuilder, Fact};
use dlfit::value::Value;

/// A database as plain fact sets.
pub struct Naive {
    pub n: usize,
    labels: BTreeSet<(String, usize)>,
    edges: BTreeSet<(String, usize, usize)>,
    values: BTreeMap<(String, usize), Value>,
}

impl Naive {
    pub fn of(db: &Database) -> Self {
        let idx = |name: &str| db.names().iter().position(|x| &**x == name).expect("known individual");
        let mut out = Naive {
            n: db.len(),
            labels: BTreeSet::new(),
            edges: BTreeSet::new(),
            values: BTreeMap::new(),
        };
        for f in db.facts() {
            match f {
                Fact::Concept(c, a) => {
                    out.labels.insert((c.to_string(), idx(&a)));
                }
                Fact::Role(r, a, b) => {
                    out.edges.insert((r.to_string(), idx(&a), idx(&b)));
                }
                Fact::Feature(f, a, v) => {
                    out.values.insert((f.to_string(), idx(&a)), v);
                }
            }
        }
        out
    }

    pub fn successors(&self, role: &Role, a: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&b| {
                let (x, y) = if role.inverse { (b, a) } else { (a, b) };
                self.edges.contains(&(role.name.to_string(), x, y))
            })
            .collect()
    }

    pub fn has_label(&self, name: &str, a: usize) -> bool {
        self.labels.contains(&(name.to_string(), a))
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        self.edges.iter().map(|e| e.0.clone()).collect()
    }

    pub fn label_names(&self) -> BTreeSet<String> {
        self.labels.iter().map(|e| e.0.clone()).collect()
    }

    /// `{a | a ∈ C}` straight from the semantics, without memoization.
    pub fn eval(&self, c: &Concept) -> BTreeSet<usize> {
        (0..self.n).filter(|&a| self.holds(c, a)).collect()
    }

    pub fn holds(&self, c: &Concept, a: usize) -> bool {
        match c.node() {
            Node::Top => true,
            Node::Bot => false,
            Node::Name(x) => self.has_label(x, a),
            Node::Not(d) => !self.holds(d, a),
            Node::And(d, e) => self.holds(d, a) && self.holds(e, a),
            Node::Or(d, e) => self.holds(d, a) || self.holds(e, a),
            Node::AtLeast(n, r, d) => {
                self.successors(r, a).into_iter().filter(|&b| self.holds(d, b)).count() >= *n as usize
            }
            Node::AtMost(n, r, d) => {
                self.successors(r, a).into_iter().filter(|&b| self.holds(d, b)).count() <= *n as usize
            }
            Node::FeatureGeq(f, v) => self.values.get(&(f.to_string(), a)).is_some_and(|w| w >= v),
            Node::FeatureLeq(f, v) => self.values.get(&(f.to_string(), a)).is_some_and(|w| w <= v),
        }
    }
}

pub fn to_set(bits: &FixedBitSet) -> BTreeSet<usize> {
    bits.ones().collect()
}

/// Random database over individuals `i0..`, every one declared.
pub struct DbShape<'a> {
    pub individuals: usize,
    pub concepts: &'a [&'a str],
    pub roles: &'a [&'a str],
    pub label_prob: f64,
    pub edge_prob: f64,
    pub feature: Option<&'a str>,
}

pub fn random_db(rng: &mut impl Rng, shape: &DbShape) -> Database {
    let mut b = DatabaseBuilder::default();
    let names: Vec<String> = (0..shape.individuals).map(|i| format!("i{i}")).collect();
    for x in &names {
        b.individual(x);
    }
    for x in &names {
        for c in shape.concepts {
            if rng.gen_bool(shape.label_prob) {
                b.concept_fact(c, x);
            }
        }
        for r in shape.roles {
            for y in &names {
                if rng.gen_bool(shape.edge_prob) {
                    b.role_fact(r, x, y);
                }
            }
        }
        if let Some(f) = shape.feature {
            if rng.gen_bool(0.8) {
                b.feature_fact(f, x, Value::from_int(rng.gen_range(0..6))).unwrap();
            }
        }
    }
    b.build().unwrap()
}

/// Building blocks for random concepts.
pub struct Vocab {
    pub names: Vec<String>,
    pub roles: Vec<Role>,
    pub features: Vec<(String, Vec<Value>)>,
    pub max_number: u32,
}

/// A random concept with exactly `size` tree nodes.
pub fn random_concept(rng: &mut impl Rng, vocab: &Vocab, size: usize) -> Concept {
    assert!(size >= 1);
    if size == 1 {
        let leaves = 2 + vocab.names.len() + 2 * vocab.features.len();
        let i = rng.gen_range(0..leaves);
        return if i == 0 {
            Concept::top()
        } else if i == 1 {
            Concept::bot()
        } else if i < 2 + vocab.names.len() {
            Concept::name(&vocab.names[i - 2])
        } else {
            let j = i - 2 - vocab.names.len();
            let (f, vals) = &vocab.features[j / 2];
            let v = *vals.choose(rng).unwrap();
            if j % 2 == 0 {
                Concept::feature_geq(f, v)
            } else {
                Concept::feature_leq(f, v)
            }
        };
    }
    let binary = size >= 3 && rng.gen_bool(0.4);
    if binary {
        let left = rng.gen_range(1..size - 1);
        let a = random_concept(rng, vocab, left);
        let b = random_concept(rng, vocab, size - 1 - left);
        return if rng.gen_bool(0.5) { Concept::and(a, b) } else { Concept::or(a, b) };
    }
    let c = random_concept(rng, vocab, size - 1);
    if vocab.roles.is_empty() || rng.gen_bool(0.25) {
        return Concept::not(c);
    }
    let r = vocab.roles.choose(rng).unwrap().clone();
    if rng.gen_bool(0.5) {
        Concept::at_least(rng.gen_range(1..=vocab.max_number.max(1)), r, c)
    } else {
        Concept::at_most(rng.gen_range(0..=vocab.max_number), r, c)
    }
}

/// All concepts (as trees) with exactly `size` nodes.
pub fn enumerate_concepts(vocab: &Vocab, size: usize) -> Vec<Concept> {
    let mut by_size: Vec<Vec<Concept>> = vec![Vec::new()];
    for s in 1..=size {
        let mut here = Vec::new();
        if s == 1 {
            here.push(Concept::top());
            here.push(Concept::bot());
            for a in &vocab.names {
                here.push(Concept::name(a));
            }
            for (f, vals) in &vocab.features {
                for &v in vals {
                    here.push(Concept::feature_geq(f, v));
                    here.push(Concept::feature_leq(f, v));
                }
            }
        } else {
            for c in &by_size[s - 1] {
                here.push(Concept::not(c.clone()));
                for r in &vocab.roles {
                    for n in 1..=vocab.max_number.max(1) {
                        here.push(Concept::at_least(n, r.clone(), c.clone()));
                    }
                    for n in 0..=vocab.max_number {
                        here.push(Concept::at_most(n, r.clone(), c.clone()));
                    }
                }
            }
            for left in 1..s.saturating_sub(1) {
                let right = s - 1 - left;
                for a in &by_size[left] {
                    for b in &by_size[right] {
                        here.push(Concept::and(a.clone(), b.clone()));
                        here.push(Concept::or(a.clone(), b.clone()));
                    }
                }
            }
        }
        by_size.push(here);
    }
    by_size.pop().unwrap()
}

/// The extensions reachable by concepts of each size, computed
/// semantically over an unweighted database. `qualified` adds number
/// restrictions `(>= n)` for `2 <= n <= g` and `(<= n)` for `0 <= n <= g`
/// to the always present `exists`/`forall`.
pub struct Extensions {
    pub by_size: Vec<Vec<FixedBitSet>>,
}

pub fn extensions(db: &Naive, k: usize, g: u32, qualified: bool) -> Extensions {
    extensions_with(db, k, g, qualified, false)
}

/// As [`extensions`], optionally with the inverse of every role.
pub fn extensions_with(db: &Naive, k: usize, g: u32, qualified: bool, inverse: bool) -> Extensions {
    let n = db.n;
    let mut roles: Vec<Role> = db.role_names().iter().map(|r| Role::new(r)).collect();
    if inverse {
        roles.extend(db.role_names().iter().map(|r| Role::inverse_of(r)));
    }
    let succ: Vec<Vec<Vec<usize>>> = roles
        .iter()
        .map(|r| (0..n).map(|a| db.successors(r, a)).collect())
        .collect();
    let full = {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        s
    };
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut by_size: Vec<Vec<FixedBitSet>> = vec![Vec::new()];
    fn push(set: FixedBitSet, level: &mut Vec<FixedBitSet>, seen: &mut HashSet<FixedBitSet>) {
        if seen.insert(set.clone()) {
            level.push(set);
        }
    }
    for s in 1..=k {
        let mut level = Vec::new();
        if s == 1 {
            push(full.clone(), &mut level, &mut seen);
            push(FixedBitSet::with_capacity(n), &mut level, &mut seen);
            for name in db.label_names() {
                let mut e = FixedBitSet::with_capacity(n);
                for a in 0..n {
                    e.set(a, db.has_label(&name, a));
                }
                push(e, &mut level, &mut seen);
            }
        } else {
            let prev: Vec<FixedBitSet> = by_size[s - 1].clone();
            for c in &prev {
                let mut neg = full.clone();
                neg.difference_with(c);
                push(neg, &mut level, &mut seen);
                for rs in &succ {
                    let counts: Vec<usize> = rs.iter().map(|bs| bs.iter().filter(|&&b| c.contains(b)).count()).collect();
                    let emit = |pred: &dyn Fn(usize, usize) -> bool| {
                        let mut e = FixedBitSet::with_capacity(n);
                        for a in 0..n {
                            e.set(a, pred(counts[a], rs[a].len()));
                        }
                        e
                    };
                    let ex = emit(&|cnt, _| cnt >= 1);
                    push(ex, &mut level, &mut seen);
                    let all = emit(&|cnt, deg| cnt == deg);
                    push(all, &mut level, &mut seen);
                    if qualified {
                        for m in 2..=g as usize {
                            let e = emit(&|cnt, _| cnt >= m);
                            push(e, &mut level, &mut seen);
                        }
                        for m in 0..=g as usize {
                            let e = emit(&|cnt, _| cnt <= m);
                            push(e, &mut level, &mut seen);
                        }
                    }
                }
            }
            for left in 1..s.saturating_sub(1) {
                let right = s - 1 - left;
                let (ls, rs) = (by_size[left].clone(), by_size[right].clone());
                for a in &ls {
                    for b in &rs {
                        let mut x = a.clone();
                        x.intersect_with(b);
                        push(x, &mut level, &mut seen);
                        let mut y = a.clone();
                        y.union_with(b);
                        push(y, &mut level, &mut seen);
                    }
                }
            }
        }
        by_size.push(level);
    }
    Extensions { by_size }
}

impl Extensions {
    /// Smallest size of a concept whose extension satisfies `ok`.
    pub fn min_size(&self, ok: impl Fn(&FixedBitSet) -> bool) -> Option<usize> {
        (1..self.by_size.len()).find(|&s| self.by_size[s].iter().any(&ok))
    }

    pub fn best(&self, score: impl Fn(&FixedBitSet) -> usize) -> usize {
        self.by_size.iter().flatten().map(score).max().unwrap_or(0)
    }
}

pub fn fits_set(e: &FixedBitSet, positives: &[u32], negatives: &[u32]) -> bool {
    positives.iter().all(|&a| e.contains(a as usize)) && negatives.iter().all(|&b| !e.contains(b as usize))
}

pub fn correct_count(e: &FixedBitSet, positives: &[u32], negatives: &[u32]) -> usize {
    positives.iter().filter(|&&a| e.contains(a as usize)).count()
        + negatives.iter().filter(|&&b| !e.contains(b as usize)).count()
}

/// The greatest relation satisfying the bisimulation conditions over the
/// named roles: equal labels, and for each role either a bijection between
/// the successor sets inside the relation (`counting`) or the forth/back
/// conditions.
pub fn naive_bisimulation(db: &Naive, counting: bool) -> Vec<Vec<bool>> {
    let n = db.n;
    let roles: Vec<Role> = db.role_names().iter().map(|r| Role::new(r)).collect();
    let labels = db.label_names();
    let mut rel = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            rel[a][b] = labels.iter().all(|l| db.has_label(l, a) == db.has_label(l, b));
        }
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if !rel[a][b] {
                    continue;
                }
                let ok = roles.iter().all(|r| {
                    let sa = db.successors(r, a);
                    let sb = db.successors(r, b);
                    if counting {
                        sa.len() == sb.len() && has_bijection(&sa, &sb, &rel, &mut vec![false; sb.len()], 0)
                    } else {
                        sa.iter().all(|&d| sb.iter().any(|&e| rel[d][e]))
                            && sb.iter().all(|&e| sa.iter().any(|&d| rel[d][e]))
                    }
                });
                if !ok {
                    rel[a][b] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

fn has_bijection(sa: &[usize], sb: &[usize], rel: &[Vec<bool>], used: &mut Vec<bool>, i: usize) -> bool {
    if i == sa.len() {
        return true;
    }
    for j in 0..sb.len() {
        if !used[j] && rel[sa[i]][sb[j]] {
            used[j] = true;
            if has_bijection(sa, sb, rel, used, i + 1) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// Satisfiability by enumerating all assignments.
pub fn truth_table(cnf: &Cnf) -> bool {
    let n = cnf.num_vars() as usize;
    assert!(n <= 24, "truth table over {n} variables");
    let clauses: Vec<Vec<i32>> = cnf.clauses().map(|c| c.iter().map(|l| l.dimacs()).collect()).collect();
    (0u64..1 << n).any(|mask| {
        clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = (l.unsigned_abs() - 1) as u64;
                (mask >> v & 1 == 1) == (l > 0)
            })
        })
    })
}

/// Satisfiability by a plain recursive DPLL: unit propagation and
/// branching on the first literal of the first open clause.
pub fn backtrack_sat(cnf: &Cnf) -> bool {
    let clauses: Vec<Vec<i32>> = cnf.clauses().map(|c| c.iter().map(|l| l.dimacs()).collect()).collect();
    fn simplify(clauses: &[Vec<i32>], lit: i32) -> Option<Vec<Vec<i32>>> {
        let mut out = Vec::with_capacity(clauses.len());
        for c in clauses {
            if c.contains(&lit) {
                continue;
            }
            let rest: Vec<i32> = c.iter().copied().filter(|&l| l != -lit).collect();
            if rest.is_empty() {
                return None;
            }
            out.push(rest);
        }
        Some(out)
    }
    fn dpll(mut clauses: Vec<Vec<i32>>) -> bool {
        while let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) {
            match simplify(&clauses, unit) {
                Some(next) => clauses = next,
                None => return false,
            }
        }
        let Some(first) = clauses.first() else {
            return true;
        };
        let v = first[0];
        [v, -v].into_iter().any(|l| simplify(&clauses, l).is_some_and(dpll))
    }
    !clauses.iter().any(Vec::is_empty) && dpll(clauses)
}

/// Random 3-CNF with `vars` variables and `clauses` clauses.
pub fn random_3cnf(rng: &mut impl Rng, vars: u32, clauses: usize) -> Cnf {
    let mut cnf = Cnf::new();
    cnf.reserve_vars(vars);
    for _ in 0..clauses {
        let lits: Vec<_> = (0..3)
            .map(|_| {
                let v = rng.gen_range(1..=vars) as i32;
                dlfit::cnf::Lit::from_dimacs(if rng.gen_bool(0.5) { v } else { -v })
            })
            .collect();
        cnf.add_clause(&lits);
    }
    cnf
}

/// The largest number of examples that some subset admitting a separation
/// can contain, with separability judged by `bisimilar`.
pub fn brute_force_max_separable(positives: &[u32], negatives: &[u32], bisimilar: &dyn Fn(u32, u32) -> bool) -> usize {
    let all: Vec<(u32, bool)> = positives
        .iter()
        .map(|&a| (a, true))
        .chain(negatives.iter().map(|&b| (b, false)))
        .collect();
    let mut best = 0;
    for mask in 0u32..1 << all.len() {
        let chosen: Vec<(u32, bool)> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let ok = chosen
            .iter()
            .filter(|x| x.1)
            .all(|p| chosen.iter().filter(|x| !x.1).all(|q| !bisimilar(p.0, q.0)));
        if ok {
            best = best.max(chosen.len());
        }
    }
    best
}

/// A random encoder instance: at most 6 individuals, at most 3 signature
/// symbols, `k <= 5`, `g <= 3`.
pub struct EncodeCase {
    pub db: Database,
    pub positives: Vec<u32>,
    pub negatives: Vec<u32>,
    pub k: usize,
    pub g: u32,
    pub qualified: bool,
}

pub fn encode_case(seed: u64) -> EncodeCase {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let individuals = rng.gen_range(1..=6);
    let names = rng.gen_range(0..=2usize);
    let roles = rng.gen_range(usize::from(names == 0)..=3 - names);
    let concept_names = ["A", "B"];
    let role_names = ["r", "s", "t"];
    let db = random_db(
        &mut rng,
        &DbShape {
            individuals,
            concepts: &concept_names[..names],
            roles: &role_names[..roles],
            label_prob: 0.4,
            edge_prob: [0.2, 0.35, 0.5][seed as usize % 3],
            feature: None,
        },
    );
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for a in db.individuals() {
        match rng.gen_range(0..3) {
            0 => positives.push(a),
            1 => negatives.push(a),
            _ => {}
        }
    }
    if positives.is_empty() && negatives.is_empty() {
        positives.push(0);
    }
    EncodeCase {
        db,
        positives,
        negatives,
        k: rng.gen_range(1..=5),
        g: rng.gen_range(1..=3),
        qualified: rng.gen_bool(0.6),
    }
}

/// Solves the encoding of `case` and compares with the enumeration.
/// Returns whether the instance was satisfiable.
pub fn check_encode_case(case: &EncodeCase) -> Result<bool, String> {
    use dlfit::encode::{encode, EncodeGraph, EncodeOptions};
    use dlfit::solve::{solve, Budget, SolveStatus};
    let graph = std::sync::Arc::new(EncodeGraph::from_database(&case.db));
    let enc = encode(
        graph,
        &case.positives,
        &case.negatives,
        EncodeOptions {
            k: case.k,
            g: case.g,
            qualified: case.qualified,
            fitting: true,
        },
    )
    .map_err(|e| e.to_string())?;
    let res = solve(&enc.cnf, &Budget::unlimited()).map_err(|e| e.to_string())?;
    let naive = Naive::of(&case.db);
    let brute = extensions(&naive, case.k, case.g, case.qualified)
        .min_size(|e| fits_set(e, &case.positives, &case.negatives));
    match (res.status, brute) {
        (SolveStatus::Sat, Some(min)) => {
            let c = enc.decode(res.model.as_ref().unwrap()).map_err(|e| e.to_string())?;
            let size = dlfit::node_count(&c) as usize;
            let ext = naive.eval(&c);
            let ok = case.positives.iter().all(|&a| ext.contains(&(a as usize)))
                && case.negatives.iter().all(|&b| !ext.contains(&(b as usize)));
            if !ok {
                return Err(format!("decoded {c} does not fit"));
            }
            if size < min || size > case.k {
                return Err(format!("decoded {c} has {size} nodes, enumeration minimum {min}, bound {}", case.k));
            }
            if numbers(&c).into_iter().any(|n| n > case.g) {
                return Err(format!("decoded {c} exceeds number bound {}", case.g));
            }
            Ok(true)
        }
        (SolveStatus::Unsat, None) => Ok(false),
        (status, brute) => Err(format!("solver says {status:?}, enumeration minimum {brute:?}")),
    }
}

/// Numbers used in restrictions, the `exists`/`forall` sugar excluded.
pub fn numbers(c: &Concept) -> Vec<u32> {
    let mut out = Vec::new();
    if let Some((_, body)) = c.as_forall() {
        out.extend(numbers(body));
        return out;
    }
    match c.node() {
        Node::AtLeast(n, ..) if *n > 1 => out.push(*n),
        Node::AtMost(n, ..) => out.push(*n),
        _ => {}
    }
    for ch in c.children() {
        out.extend(numbers(ch));
    }
    out
}

/// Whether the counter over `n` fresh literals agrees with counting on
/// every assignment, for the given bound and direction, with and without
/// an activation literal.
pub fn check_counter(n: usize, bound: usize, at_least: bool) -> Result<(), String> {
    use dlfit::cnf::Lit;
    use dlfit::encode::counter;
    use dlfit::solve::{solve, Budget, SolveStatus};
    for guarded in [false, true] {
        let mut cnf = Cnf::new();
        let lits: Vec<Lit> = (0..n).map(|_| cnf.new_var()).collect();
        let act = guarded.then(|| cnf.new_var());
        if at_least {
            counter::at_least(&mut cnf, act, &lits, bound);
        } else {
            counter::at_most(&mut cnf, act, &lits, bound);
        }
        if bound == 0 && at_least && cnf.num_clauses() != 0 {
            return Err("vacuous lower bound emitted clauses".into());
        }
        let aux = cnf.num_vars() as usize - n - usize::from(guarded);
        if aux > (bound + 1) * (n + 1) {
            return Err(format!("{aux} auxiliaries for bound {bound} over {n} literals"));
        }
        for mask in 0u32..1 << n {
            for active in [true, false] {
                if !guarded && !active {
                    continue;
                }
                let mut c = cnf.clone();
                for (i, &l) in lits.iter().enumerate() {
                    c.add_clause(&[if mask >> i & 1 == 1 { l } else { !l }]);
                }
                if let Some(a) = act {
                    c.add_clause(&[if active { a } else { !a }]);
                }
                let count = mask.count_ones() as usize;
                let want = !active || if at_least { count >= bound } else { count <= bound };
                let got = solve(&c, &Budget::unlimited()).map_err(|e| e.to_string())?.status == SolveStatus::Sat;
                if got != want {
                    return Err(format!(
                        "n={n} bound={bound} at_least={at_least} guarded={guarded} mask={mask:b}: got {got}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Whether the full-equivalence registers over `n` literals equal the
/// counts on every assignment.
pub fn check_registers(n: usize, cap: usize) -> Result<(), String> {
    use dlfit::cnf::Lit;
    use dlfit::encode::counter;
    use dlfit::solve::{solve, Budget, SolveStatus};
    let mut cnf = Cnf::new();
    let lits: Vec<Lit> = (0..n).map(|_| cnf.new_var()).collect();
    let regs = counter::registers(&mut cnf, &lits, cap);
    for mask in 0u32..1 << n {
        let count = mask.count_ones() as usize;
        for m in 1..=cap.min(n) {
            let reg = regs.at_least(m).ok_or("missing register")?;
            for value in [true, false] {
                let mut c = cnf.clone();
                for (i, &l) in lits.iter().enumerate() {
                    c.add_clause(&[if mask >> i & 1 == 1 { l } else { !l }]);
                }
                c.add_clause(&[if value { reg } else { !reg }]);
                let sat = solve(&c, &Budget::unlimited()).map_err(|e| e.to_string())?.status == SolveStatus::Sat;
                if sat != (value == (count >= m)) {
                    return Err(format!("register {m} over mask {mask:b} can be {value}"));
                }
            }
        }
    }
    Ok(())
}

/// The learning problems under `data/` plus generated ones, by name.
pub fn corpus() -> Vec<(String, dlfit::FittingProblem)> {
    use std::sync::Arc;
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mut dirs: Vec<_> = std::fs::read_dir(&root)
        .expect("data directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.join("facts.txt").exists())
        .collect();
    dirs.sort();
    let mut out = Vec::new();
    for d in dirs {
        let db = Arc::new(dlfit::database::load_facts(&d.join("facts.txt")).unwrap());
        let p = dlfit::ProblemFile::load(&d.join("problem.json")).unwrap().resolve(db).unwrap();
        out.push((d.file_name().unwrap().to_string_lossy().into_owned(), p));
    }
    for (sets, k) in [(vec![vec![1, 3], vec![2, 4]], 2), (vec![vec![1], vec![2]], 1), (vec![vec![1, 2], vec![2, 3]], 1)] {
        let inst = dlfit::bench::gen_hitting_set(&sets, k, None).unwrap();
        let p = inst.problem.resolve(Arc::new(inst.db.clone())).unwrap();
        out.push((format!("hitting-set {sets:?} k={k}"), p));
    }
    let sep_db = Arc::new(
        dlfit::parse_facts("r(a,c1)\nr(a,c2)\nr(b,d1)\nr(e,f1)\nr(e,f2)\nr(e,f3)\nr(h,f1)\nr(h,c1)\nA(c1)").unwrap(),
    );
    for (i, sp) in dlfit::bench::gen_alcq_separation(&sep_db, 1).unwrap().into_iter().enumerate() {
        out.push((format!("separation {i}"), sp.problem.resolve(sep_db.clone()).unwrap()));
    }
    out
}

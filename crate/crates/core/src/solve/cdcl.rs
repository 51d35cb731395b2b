//! Conflict-driven clause learning with two watched literals, first-UIP
//! learning, VSIDS, phase saving, Luby restarts and LBD-based cleanup.

use std::sync::atomic::Ordering;
use std::time::Instant;

use super::{Budget, SolveResult, SolveStats, SolveStatus};
use crate::cnf::Cnf;

const TRUE: u8 = 1;
const FALSE: u8 = 0;
const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

#[inline]
fn lit_of(l: crate::cnf::Lit) -> u32 {
    (l.var() - 1) * 2 + (!l.is_positive()) as u32
}

#[inline]
fn var(l: u32) -> usize {
    (l >> 1) as usize
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: u32,
}

struct Clause {
    lits: Vec<u32>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

struct VarHeap {
    heap: Vec<u32>,
    index: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap {
            heap: Vec::with_capacity(n),
            index: vec![NOT_IN_HEAP; n],
        }
    }

    fn contains(&self, v: usize) -> bool {
        self.index[v] != NOT_IN_HEAP
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.index[self.heap[i] as usize] = i as u32;
            i = p;
        }
        self.heap[i] = v;
        self.index[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.index[self.heap[i] as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.index[v as usize] = i as u32;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v as u32);
        self.index[v] = (self.heap.len() - 1) as u32;
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().expect("non-empty heap");
        self.index[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last as usize] = 0;
            self.down(0, act);
        }
        Some(top as usize)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.index[v] as usize, act);
        }
    }
}

struct Solver {
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    stats: SolveStats,
    max_learnts: f64,
}

enum Outcome {
    Sat,
    Unsat,
    Restart,
    Stop,
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq as i32)
}

impl Solver {
    fn new(num_vars: usize) -> Self {
        let mut s = Solver {
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assigns: vec![UNDEF; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            phase: vec![false; num_vars],
            activity: vec![0.0; num_vars],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::new(num_vars),
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; num_vars],
            stats: SolveStats::default(),
            max_learnts: 0.0,
        };
        for v in 0..num_vars {
            s.heap.insert(v, &s.activity);
        }
        s
    }

    #[inline]
    fn value(&self, l: u32) -> u8 {
        let a = self.assigns[var(l)];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ (l & 1) as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: u32, reason: u32) {
        let v = var(l);
        self.assigns[v] = ((l & 1) ^ 1) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, cref: u32) {
        let c = &self.clauses[cref as usize];
        let (l0, l1) = (c.lits[0], c.lits[1]);
        self.watches[(l0 ^ 1) as usize].push(Watcher { cref, blocker: l1 });
        self.watches[(l1 ^ 1) as usize].push(Watcher { cref, blocker: l0 });
    }

    /// Adds an original clause at level 0; returns false on conflict.
    fn add_input_clause(&mut self, lits: &mut Vec<u32>) -> bool {
        lits.sort_unstable();
        lits.dedup();
        for w in lits.windows(2) {
            if w[0] ^ 1 == w[1] {
                return true;
            }
        }
        lits.retain(|&l| self.value(l) != FALSE);
        if lits.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        match lits.len() {
            0 => false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                self.propagate().is_none()
            }
            _ => {
                let cref = self.clauses.len() as u32;
                self.clauses.push(Clause {
                    lits: lits.clone(),
                    learnt: false,
                    deleted: false,
                    lbd: 0,
                    activity: 0.0,
                });
                self.attach(cref);
                true
            }
        }
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[p as usize]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[(l ^ 1) as usize].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[p as usize] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, u32, u32) {
        let mut learnt: Vec<u32> = vec![0];
        let mut path = 0usize;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        let dl = self.decision_level();
        loop {
            let cref = confl as usize;
            if self.clauses[cref].learnt {
                self.bump_clause(cref);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[cref].lits.len() {
                let q = self.clauses[cref].lits[k];
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let pl = self.trail[idx];
            p = Some(pl);
            self.seen[var(pl)] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[var(pl)];
        }
        learnt[0] = p.expect("conflict has a UIP") ^ 1;

        // Drop literals implied by other literals of the clause.
        let original = learnt.clone();
        let mut kept = 1;
        for k in 1..learnt.len() {
            let l = learnt[k];
            let r = self.reason[var(l)];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|&q| {
                    let v = var(q);
                    self.seen[v] || self.level[v] == 0
                });
            if !redundant {
                learnt[kept] = l;
                kept += 1;
            }
        }
        for &l in &original {
            self.seen[var(l)] = false;
        }
        learnt.truncate(kept);

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[var(learnt[k])] > self.level[var(learnt[max_i])] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[var(learnt[1])];
        }
        let mut levels: Vec<u32> = learnt.iter().map(|&l| self.level[var(l)]).collect();
        levels.sort_unstable();
        levels.dedup();
        (learnt, bt, levels.len() as u32)
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn locked(&self, cref: u32) -> bool {
        let l0 = self.clauses[cref as usize].lits[0];
        self.value(l0) == TRUE && self.reason[var(l0)] == cref
    }

    fn reduce_db(&mut self) {
        let mut ls = std::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.partial_cmp(&cb.activity).unwrap_or(std::cmp::Ordering::Equal))
        });
        let half = ls.len() / 2;
        let mut keep = Vec::with_capacity(ls.len());
        for (k, &cref) in ls.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if k < half && c.lbd > 2 && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
            } else {
                keep.push(cref);
            }
        }
        self.learnts = keep;
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some((v as u32) * 2 + u32::from(!self.phase[v]));
            }
        }
        None
    }

    fn search(&mut self, conflicts_allowed: u64, budget: &Budget) -> Outcome {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    return Outcome::Unsat;
                }
                let (learnt, bt, lbd) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let cref = self.clauses.len() as u32;
                    let first = learnt[0];
                    self.clauses.push(Clause {
                        lits: learnt,
                        learnt: true,
                        deleted: false,
                        lbd,
                        activity: 0.0,
                    });
                    self.attach(cref);
                    self.learnts.push(cref);
                    self.bump_clause(cref as usize);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.stats.conflicts % 256 == 0 && budget.exhausted(self.stats.conflicts) {
                    return Outcome::Stop;
                }
            } else {
                if conflicts >= conflicts_allowed {
                    self.cancel_until(0);
                    return Outcome::Restart;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                }
                match self.pick_branch() {
                    None => return Outcome::Sat,
                    Some(l) => {
                        self.stats.decisions += 1;
                        if self.stats.decisions % 4096 == 0
                            && budget.exhausted(self.stats.conflicts)
                        {
                            return Outcome::Stop;
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }
}

/// Solves with the built-in CDCL solver.
pub fn solve_builtin(cnf: &Cnf, budget: &Budget) -> SolveResult {
    let start = Instant::now();
    let n = cnf.num_vars() as usize;
    let mut s = Solver::new(n);
    let finish = |mut stats: SolveStats, status, model| {
        stats.wall = start.elapsed();
        SolveResult {
            status,
            model,
            stats,
        }
    };
    let mut buf = Vec::new();
    for c in cnf.clauses() {
        buf.clear();
        buf.extend(c.iter().map(|&l| lit_of(l)));
        if !s.add_input_clause(&mut buf) {
            return finish(s.stats, SolveStatus::Unsat, None);
        }
    }
    if s.propagate().is_some() {
        return finish(s.stats, SolveStatus::Unsat, None);
    }
    s.max_learnts = (cnf.num_clauses() as f64 / 3.0).max(2000.0);
    let mut restart = 0u64;
    loop {
        if budget.exhausted(s.stats.conflicts) {
            return finish(s.stats, SolveStatus::Timeout, None);
        }
        let allowed = (luby(2.0, restart) * 100.0) as u64;
        match s.search(allowed, budget) {
            Outcome::Sat => {
                let mut model = vec![false; n + 1];
                for v in 0..n {
                    model[v + 1] = s.assigns[v] == TRUE;
                }
                return finish(s.stats, SolveStatus::Sat, Some(model));
            }
            Outcome::Unsat => return finish(s.stats, SolveStatus::Unsat, None),
            Outcome::Stop => return finish(s.stats, SolveStatus::Timeout, None),
            Outcome::Restart => {
                restart += 1;
                s.stats.restarts += 1;
                s.max_learnts *= 1.05;
                if let Some(flag) = &budget.stop {
                    if flag.load(Ordering::Relaxed) {
                        return finish(s.stats, SolveStatus::Timeout, None);
                    }
                }
            }
        }
    }
}

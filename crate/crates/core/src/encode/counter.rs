//! Sequential counters over literals.

use crate::cnf::{Cnf, Lit};

#[derive(Clone, Copy)]
enum Bit {
    True,
    False,
    Var(Lit),
}

/// Partial-sum registers: `registers[m-1]` is true iff at least `m` of the
/// counted literals are true, for `m` in `1..=cap`. Both directions of the
/// sums are encoded, so the registers are functions of the literals.
#[derive(Debug, Clone)]
pub struct Registers {
    pub registers: Vec<Lit>,
    /// Every auxiliary variable with its prefix length and count.
    pub aux: Vec<(Lit, usize, usize)>,
}

impl Registers {
    /// Literal for "at least `m` true", `None` when `m` exceeds the cap or
    /// the number of literals. `m` must be at least 1.
    pub fn at_least(&self, m: usize) -> Option<Lit> {
        assert!(m >= 1);
        self.registers.get(m - 1).copied()
    }
}

/// Builds registers counting `lits` up to `cap`.
pub fn registers(cnf: &mut Cnf, lits: &[Lit], cap: usize) -> Registers {
    let cap = cap.min(lits.len());
    let mut aux = Vec::new();
    // prev[m] is the register "count over the prefix >= m"; prev[0] is true.
    let mut prev: Vec<Bit> = vec![Bit::True];
    for (t, &l) in lits.iter().enumerate() {
        let width = (t + 1).min(cap);
        let mut cur = vec![Bit::True];
        for m in 1..=width {
            let s = cnf.new_var();
            aux.push((s, t + 1, m));
            let keep = prev.get(m).copied().unwrap_or(Bit::False);
            let below = prev[m - 1];
            // keep -> s
            clause(cnf, &[neg(keep), Bit::Var(s)]);
            // l & below -> s
            clause(cnf, &[Bit::Var(!l), neg(below), Bit::Var(s)]);
            // s -> keep | l
            clause(cnf, &[Bit::Var(!s), keep, Bit::Var(l)]);
            // s -> keep | below
            clause(cnf, &[Bit::Var(!s), keep, below]);
            cur.push(Bit::Var(s));
        }
        prev = cur;
    }
    let registers = prev
        .into_iter()
        .skip(1)
        .map(|b| match b {
            Bit::Var(l) => l,
            _ => unreachable!("registers above zero are variables"),
        })
        .collect();
    Registers { registers, aux }
}

fn neg(b: Bit) -> Bit {
    match b {
        Bit::True => Bit::False,
        Bit::False => Bit::True,
        Bit::Var(l) => Bit::Var(!l),
    }
}

fn clause(cnf: &mut Cnf, bits: &[Bit]) {
    let mut lits = Vec::with_capacity(bits.len());
    for b in bits {
        match *b {
            Bit::True => return,
            Bit::False => {}
            Bit::Var(l) => lits.push(l),
        }
    }
    cnf.add_clause(&lits);
}

/// Enforces `act -> (at least bound of lits are true)`. With no activation
/// literal the constraint is unconditional.
pub fn at_least(cnf: &mut Cnf, act: Option<Lit>, lits: &[Lit], bound: usize) {
    if bound == 0 {
        return;
    }
    let guard: Vec<Lit> = act.map(|a| !a).into_iter().collect();
    if bound > lits.len() {
        cnf.add_clause(&guard);
        return;
    }
    let regs = registers(cnf, lits, bound);
    let mut c = guard;
    c.push(regs.at_least(bound).expect("bound within cap"));
    cnf.add_clause(&c);
}

/// Enforces `act -> (at most bound of lits are true)`.
pub fn at_most(cnf: &mut Cnf, act: Option<Lit>, lits: &[Lit], bound: usize) {
    if bound >= lits.len() {
        return;
    }
    let regs = registers(cnf, lits, bound + 1);
    let mut c: Vec<Lit> = act.map(|a| !a).into_iter().collect();
    c.push(!regs.at_least(bound + 1).expect("bound within cap"));
    cnf.add_clause(&c);
}

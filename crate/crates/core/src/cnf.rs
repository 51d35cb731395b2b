//! Propositional formulas in conjunctive normal form and DIMACS I/O.

use std::fmt;
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};

/// A literal in DIMACS convention: variable `v >= 1` is `v`, its negation `-v`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1 && var <= i32::MAX as u32, "variable out of range");
        Lit(if positive { var as i32 } else { -(var as i32) })
    }

    pub fn from_dimacs(x: i32) -> Self {
        assert!(x != 0);
        Lit(x)
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Truth value under a model indexed by variable.
    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var() as usize] == self.is_positive()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A clause list over variables `1..=num_vars`, stored flat.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    num_vars: u32,
    lits: Vec<Lit>,
    ends: Vec<u32>,
}

impl fmt::Debug for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cnf({} vars, {} clauses)", self.num_vars, self.num_clauses())
    }
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.ends.len()
    }

    pub fn num_literals(&self) -> usize {
        self.lits.len()
    }

    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::new(self.num_vars, true)
    }

    /// Makes sure variables up to `n` exist.
    pub fn reserve_vars(&mut self, n: u32) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn add_clause(&mut self, clause: &[Lit]) {
        for l in clause {
            debug_assert!(l.var() <= self.num_vars, "clause uses unallocated variable");
        }
        self.lits.extend_from_slice(clause);
        self.ends.push(self.lits.len() as u32);
    }

    pub fn clause(&self, i: usize) -> &[Lit] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] as usize };
        &self.lits[start..self.ends[i] as usize]
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[Lit]> + '_ {
        (0..self.ends.len()).map(move |i| self.clause(i))
    }

    /// Index of the first clause the model falsifies, if any.
    pub fn first_violated(&self, model: &[bool]) -> Option<usize> {
        self.clauses().position(|c| !c.iter().any(|l| l.eval(model)))
    }

    pub fn write_dimacs<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "p cnf {} {}", self.num_vars, self.num_clauses())?;
        let mut line = String::new();
        for c in self.clauses() {
            line.clear();
            for l in c {
                write!(line, "{} ", l.dimacs()).expect("writing to a String");
            }
            line.push('0');
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_dimacs(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("DIMACS is ASCII")
    }

    /// Parses DIMACS text. Comment lines start with `c`; clauses may span
    /// lines; the header counts are checked.
    pub fn parse_dimacs(text: &str) -> Result<Cnf> {
        let mut header: Option<(u32, usize)> = None;
        let mut cnf = Cnf::new();
        let mut current: Vec<Lit> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            if t.starts_with('p') {
                let parts: Vec<&str> = t.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                    return Err(Error::MalformedCnf(format!("bad header at line {}", lineno + 1)));
                }
                let v = parts[2]
                    .parse()
                    .map_err(|_| Error::MalformedCnf(format!("bad variable count `{}`", parts[2])))?;
                let c = parts[3]
                    .parse()
                    .map_err(|_| Error::MalformedCnf(format!("bad clause count `{}`", parts[3])))?;
                header = Some((v, c));
                cnf.num_vars = v;
                continue;
            }
            let Some((nv, _)) = header else {
                return Err(Error::MalformedCnf("clause before `p cnf` header".into()));
            };
            for tok in t.split_whitespace() {
                let x: i64 = tok.parse().map_err(|_| {
                    Error::MalformedCnf(format!("bad literal `{tok}` at line {}", lineno + 1))
                })?;
                if x == 0 {
                    cnf.add_clause(&current);
                    current.clear();
                } else {
                    if x.unsigned_abs() > nv as u64 {
                        return Err(Error::MalformedCnf(format!(
                            "literal {x} exceeds the declared {nv} variables"
                        )));
                    }
                    current.push(Lit(x as i32));
                }
            }
        }
        let Some((_, nc)) = header else {
            return Err(Error::MalformedCnf("missing `p cnf` header".into()));
        };
        if !current.is_empty() {
            cnf.add_clause(&current);
        }
        if cnf.num_clauses() != nc {
            return Err(Error::MalformedCnf(format!(
                "header declares {nc} clauses but {} were found",
                cnf.num_clauses()
            )));
        }
        Ok(cnf)
    }
}

//! Tree shapes under the encoder's node numbering.

use serde::Serialize;

/// An ordered tree shape given by the arity (0, 1 or 2) of each node in
/// breadth-first order. Children are wired breadth-first: the children of
/// node `i` are the next unassigned indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Topology {
    pub arities: Vec<u8>,
}

impl Topology {
    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// Index of the first child of every inner node.
    pub fn wiring(&self) -> Vec<(usize, usize)> {
        let mut next = 1;
        let mut out = Vec::new();
        for (i, &a) in self.arities.iter().enumerate() {
            if a > 0 {
                out.push((i, next));
                next += a as usize;
            }
        }
        out
    }
}

/// Every shape with at most `k` nodes, ordered by size, then
/// lexicographically by arity sequence.
pub fn enumerate_topologies(k: usize) -> Vec<Topology> {
    (1..=k).flat_map(topologies_of_size).collect()
}

/// Every shape with exactly `m` nodes.
pub fn topologies_of_size(m: usize) -> Vec<Topology> {
    fn go(m: usize, prefix: &mut Vec<u8>, next: usize, out: &mut Vec<Topology>) {
        let i = prefix.len();
        if i == m {
            if next == m {
                out.push(Topology {
                    arities: prefix.clone(),
                });
            }
            return;
        }
        if i >= next {
            return;
        }
        for a in 0..=2u8 {
            if next + a as usize <= m {
                prefix.push(a);
                go(m, prefix, next + a as usize, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        go(m, &mut Vec::with_capacity(m), 1, &mut out);
    }
    out
}

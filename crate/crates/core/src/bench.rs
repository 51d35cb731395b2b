//! Benchmark generators: hitting-set instances and problems that need
//! counting to be solved.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bisim::{max_bisimulation, BisimKind};
use crate::database::{Database, DatabaseBuilder};
use crate::error::{Error, Result};
use crate::eval::ProblemFile;
use crate::reduce::{all_thresholds, booleanize_features};

/// A fitting problem encoding a hitting-set instance.
#[derive(Debug, Clone, Serialize)]
pub struct HittingSetInstance {
    #[serde(skip)]
    pub db: Database,
    pub problem: ProblemFile,
    pub n: u32,
    pub k: usize,
    /// `k + n + 2`: a fitting concept of this size exists iff a hitting set
    /// of size at most `k` does (for faithful group sizes).
    pub k_prime: usize,
    pub group_size: usize,
    /// Whether the group size is the faithful `k' + 1`.
    pub faithful: bool,
    /// A smallest hitting set.
    pub min_hitting_set: Vec<u32>,
    pub has_hitting_set: bool,
}

/// A smallest subset of `1..=n` meeting every set, by exhaustive search.
pub fn min_hitting_set(sets: &[Vec<u32>], n: u32) -> Vec<u32> {
    let mut best: Option<u32> = None;
    for mask in 0u32..(1u32 << n) {
        if best.is_some_and(|b| mask.count_ones() >= b.count_ones()) {
            continue;
        }
        let hits = sets
            .iter()
            .all(|s| s.iter().any(|&e| mask >> (e - 1) & 1 == 1));
        if hits {
            best = Some(mask);
        }
    }
    let mask = best.unwrap_or((1u32 << n) - 1);
    (1..=n).filter(|&e| mask >> (e - 1) & 1 == 1).collect()
}

/// Builds the hitting-set database for `sets` over `1..=n` and bound `k`.
///
/// Every node of the construction is a group of `group_size` individuals
/// (default `k' + 1`) that are pairwise connected along edges. Group
/// members are named `<group>_<t>`: `a`, `a<i>`, `ap<i>` for the path of
/// the empty set, `b`, `b<j>_<i>`, `bp<j>_<i>` for the path of set `j`.
/// The positive is `a_0`, the negative `b_0`.
pub fn gen_hitting_set(sets: &[Vec<u32>], k: usize, group_size: Option<usize>) -> Result<HittingSetInstance> {
    if sets.is_empty() {
        return Err(Error::Config("the set collection is empty".into()));
    }
    let universe: BTreeSet<u32> = sets.iter().flatten().copied().collect();
    let n = universe.len() as u32;
    if n == 0 || n > 20 || universe.iter().copied().ne(1..=n) {
        return Err(Error::Config(
            "the sets must cover exactly 1..n for some n between 1 and 20".into(),
        ));
    }
    let k_prime = k + n as usize + 2;
    let group_size = group_size.unwrap_or(k_prime + 1);
    if group_size == 0 {
        return Err(Error::Config("group size must be positive".into()));
    }
    let m = sets.len();
    let mut b = DatabaseBuilder::default();
    let group = |name: &str| -> Vec<String> { (0..group_size).map(|t| format!("{name}_{t}")).collect() };
    let a_root = group("a");
    let b_root = group("b");
    let a_path: Vec<Vec<String>> = (0..=n).map(|i| group(&format!("a{i}"))).collect();
    let a_detour: Vec<Vec<String>> = (0..=n).map(|i| group(&format!("ap{i}"))).collect();
    let b_path: Vec<Vec<Vec<String>>> = (1..=m)
        .map(|j| (0..=n).map(|i| group(&format!("b{j}_{i}"))).collect())
        .collect();
    let b_detour: Vec<Vec<Vec<String>>> = (1..=m)
        .map(|j| (0..=n).map(|i| group(&format!("bp{j}_{i}"))).collect())
        .collect();

    // Declare in a fixed order so individual indices are predictable.
    let mut declare = |g: &[String]| {
        for x in g {
            b.individual(x);
        }
    };
    declare(&a_root);
    declare(&b_root);
    for i in 0..=n as usize {
        declare(&a_path[i]);
        if i > 0 {
            declare(&a_detour[i]);
        }
    }
    for j in 0..m {
        for i in 0..=n as usize {
            declare(&b_path[j][i]);
            if i > 0 && !sets[j].contains(&(i as u32)) {
                declare(&b_detour[j][i]);
            }
        }
    }

    let edge = |b: &mut DatabaseBuilder, role: &str, from: &[String], to: &[String]| {
        for x in from {
            for y in to {
                b.role_fact(role, x, y);
            }
        }
    };
    for x in &a_path[n as usize] {
        b.concept_fact("A", x);
    }
    for path in &b_path {
        for x in &path[n as usize] {
            b.concept_fact("A", x);
        }
    }
    edge(&mut b, "r", &a_root, &a_path[0]);
    for path in &b_path {
        edge(&mut b, "r", &a_root, &path[0]);
        edge(&mut b, "r", &b_root, &path[0]);
    }
    for i in 1..=n as usize {
        edge(&mut b, "r", &a_path[i - 1], &a_path[i]);
        edge(&mut b, "s", &a_path[i - 1], &a_detour[i]);
        edge(&mut b, "s", &a_detour[i], &a_path[i]);
    }
    for (j, set) in sets.iter().enumerate() {
        for i in 1..=n as usize {
            edge(&mut b, "r", &b_path[j][i - 1], &b_path[j][i]);
            if !set.contains(&(i as u32)) {
                edge(&mut b, "s", &b_path[j][i - 1], &b_detour[j][i]);
                edge(&mut b, "s", &b_detour[j][i], &b_path[j][i]);
            }
        }
    }
    let db = b.build()?;
    let min = min_hitting_set(sets, n);
    Ok(HittingSetInstance {
        db,
        problem: ProblemFile {
            positive: vec![a_root[0].clone()],
            negative: vec![b_root[0].clone()],
        },
        n,
        k,
        k_prime,
        group_size,
        faithful: group_size > k_prime,
        has_hitting_set: min.len() <= k,
        min_hitting_set: min,
    })
}

/// A generated problem with the class it came from.
#[derive(Debug, Clone, Serialize)]
pub struct SeparationProblem {
    #[serde(flatten)]
    pub problem: ProblemFile,
    /// Indices (in generation order) of the problems merged into this one;
    /// a single index for first-pass problems.
    pub sources: Vec<usize>,
    /// Whether an odd number of counting classes gave the extra one to the
    /// positives.
    pub extra_to_positives: Option<bool>,
}

/// For every class of the non-counting bisimulation that splits into
/// several counting classes, takes one representative per counting class
/// and assigns half of them to the positives and the rest to the
/// negatives. A second pass merges consecutive pairs of problems.
///
/// Every problem is separable by a counting concept and by no concept
/// without counting.
pub fn gen_alcq_separation(db: &Database, seed: u64) -> Result<Vec<SeparationProblem>> {
    let (db, _) = booleanize_features(db, &all_thresholds(db))?;
    let alc = max_bisimulation(&db, BisimKind::Alc);
    let alcq = max_bisimulation(&db, BisimKind::Alcq);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for members in alc.members() {
        let mut reps: Vec<u32> = Vec::new();
        let mut seen = BTreeSet::new();
        for &a in &members {
            if seen.insert(alcq.class_of(a)) {
                reps.push(a);
            }
        }
        if reps.len() < 2 {
            continue;
        }
        reps.shuffle(&mut rng);
        let half = reps.len() / 2;
        let (cut, extra) = if reps.len() % 2 == 1 {
            let to_pos: bool = rng.gen();
            (if to_pos { half + 1 } else { half }, Some(to_pos))
        } else {
            (half, None)
        };
        let name = |a: &u32| db.name(*a).to_string();
        out.push(SeparationProblem {
            problem: ProblemFile {
                positive: reps[..cut].iter().map(name).collect(),
                negative: reps[cut..].iter().map(name).collect(),
            },
            sources: vec![out.len()],
            extra_to_positives: extra,
        });
    }
    let first = out.len();
    for i in (0..first.saturating_sub(1)).step_by(2) {
        let (x, y) = (&out[i], &out[i + 1]);
        let merged = SeparationProblem {
            problem: ProblemFile {
                positive: x.problem.positive.iter().chain(&y.problem.positive).cloned().collect(),
                negative: x.problem.negative.iter().chain(&y.problem.negative).cloned().collect(),
            },
            sources: vec![i, i + 1],
            extra_to_positives: None,
        };
        out.push(merged);
    }
    Ok(out)
}

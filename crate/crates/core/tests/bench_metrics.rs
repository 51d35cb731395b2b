mod common;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_db, DbShape};
use dlfit::bench::{gen_alcq_separation, gen_hitting_set, min_hitting_set};
use dlfit::bisim::{max_bisimulation, BisimKind};
use dlfit::driver::{bounded_fit, FitStatus, Fragment, SearchConfig};
use dlfit::metrics::{cross_validate, evaluate, stratified_folds, Metrics};
use dlfit::polyfit::fitting_exists;
use dlfit::{eval_concept, parse_concept, parse_facts, Concept, Database, FittingProblem};

fn random(seed: u64, individuals: usize) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_db(
        &mut rng,
        &DbShape {
            individuals,
            concepts: &["A", "B"],
            roles: &["r"],
            label_prob: 0.3,
            edge_prob: 0.15,
            feature: None,
        },
    )
}

/// Hubs with varying numbers of successors among a few leaf kinds.
fn stars(seed: u64) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut facts = String::new();
    let mut leaf = 0;
    for h in 0..rng.gen_range(3..8) {
        for kind in ["A", "B"] {
            for _ in 0..rng.gen_range(0..4) {
                facts += &format!("r(h{h},l{leaf})\n{kind}(l{leaf})\n");
                leaf += 1;
            }
        }
    }
    facts += "A(z)\n";
    parse_facts(&facts).unwrap()
}

#[test]
fn separation_problems_need_counting() {
    let mut total = 0;
    for seed in 0..40 {
        let db = Arc::new(stars(seed));
        let alcq = max_bisimulation(&db, BisimKind::Alcq);
        for sp in gen_alcq_separation(&db, seed).unwrap() {
            total += 1;
            let p = sp.problem.resolve(db.clone()).unwrap();
            assert!(!p.positives.is_empty() && !p.negatives.is_empty());
            assert!(fitting_exists(&p, BisimKind::Alcq), "seed {seed}");
            assert!(!fitting_exists(&p, BisimKind::Alc), "seed {seed}");
            let mut classes: Vec<u32> = p.positives.iter().chain(&p.negatives).map(|&a| alcq.class_of(a)).collect();
            let n = classes.len();
            classes.sort();
            classes.dedup();
            assert_eq!(classes.len(), n, "one representative per class");
            match sp.sources.len() {
                1 => {
                    let (np, nn) = (p.positives.len(), p.negatives.len());
                    match sp.extra_to_positives {
                        None => assert_eq!(np, nn),
                        Some(true) => assert_eq!(np, nn + 1),
                        Some(false) => assert_eq!(nn, np + 1),
                    }
                }
                2 => assert!(sp.extra_to_positives.is_none()),
                _ => panic!("unexpected sources {:?}", sp.sources),
            }
        }
    }
    assert!(total > 10, "{total} problems");
}

#[test]
fn separation_is_seeded() {
    let db = random(3, 12);
    let a = serde_json::to_string(&gen_alcq_separation(&db, 9).unwrap()).unwrap();
    let b = serde_json::to_string(&gen_alcq_separation(&db, 9).unwrap()).unwrap();
    assert_eq!(a, b);
    let twins = parse_facts("A(a)\nA(b)").unwrap();
    assert!(gen_alcq_separation(&twins, 0).unwrap().is_empty());
}

#[test]
fn hitting_set_metadata() {
    let inst = gen_hitting_set(&[vec![1, 3], vec![2, 4]], 2, None).unwrap();
    assert_eq!((inst.n, inst.k_prime, inst.group_size), (4, 8, 9));
    assert!(inst.faithful && inst.has_hitting_set);
    assert_eq!(inst.min_hitting_set.len(), 2);
    let p = inst.problem.resolve(Arc::new(inst.db.clone())).unwrap();
    assert!(fitting_exists(&p, BisimKind::Alcq));
    let small = gen_hitting_set(&[vec![1, 2], vec![2, 3]], 1, Some(2)).unwrap();
    assert!(!small.faithful);
    assert_eq!(min_hitting_set(&[vec![1, 2], vec![2, 3]], 3), vec![2]);
}

#[test]
fn metric_formulas() {
    let m = Metrics::from_counts(3, 1, 4, 2);
    assert_eq!(m.accuracy, 0.7);
    assert_eq!(m.precision, 0.75);
    assert_eq!(m.recall, 0.6);
    assert!((m.f1 - 2.0 * 0.75 * 0.6 / 1.35).abs() < 1e-12);
    assert!(!m.f1_undefined);
    let none = Metrics::from_counts(0, 0, 5, 3);
    assert!(none.f1_undefined);
    assert_eq!(none.f1, 0.0);
    assert_eq!(Metrics::from_counts(4, 0, 6, 0).f1, 1.0);
}

#[test]
fn top_accuracy_is_the_positive_share() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..50 {
        let db = Arc::new(random(seed, 12));
        let inds: Vec<u32> = db.individuals().collect();
        let pos: Vec<u32> = inds.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        let neg: Vec<u32> = inds.iter().copied().filter(|a| !pos.contains(a)).collect();
        if pos.is_empty() && neg.is_empty() {
            continue;
        }
        let p = FittingProblem::new(db, pos.clone(), neg.clone()).unwrap();
        let m = evaluate(&Concept::top(), &p);
        assert_eq!(m.accuracy, pos.len() as f64 / (pos.len() + neg.len()) as f64);
    }
}

#[test]
fn folds_partition_the_examples() {
    let pos: Vec<u32> = (0..23).collect();
    let neg: Vec<u32> = (100..117).collect();
    let folds = stratified_folds(&pos, &neg, 10, 4).unwrap();
    assert_eq!(folds, stratified_folds(&pos, &neg, 10, 4).unwrap());
    let mut seen: Vec<u32> = folds.iter().flat_map(|f| f.test_positives.iter().chain(&f.test_negatives)).copied().collect();
    seen.sort();
    let mut all: Vec<u32> = pos.iter().chain(&neg).copied().collect();
    all.sort();
    assert_eq!(seen, all);
    let sizes: Vec<usize> = folds.iter().map(|f| f.test_positives.len() + f.test_negatives.len()).collect();
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    for f in &folds {
        assert!((2..=3).contains(&f.test_positives.len()));
    }
    assert!(stratified_folds(&pos[..3], &[], 10, 0).is_err());
    assert!(stratified_folds(&pos, &neg, 1, 0).is_err());
}

#[test]
fn top_learner_on_positive_only_data() {
    let db = Arc::new(random(2, 30));
    let p = FittingProblem::new(db.clone(), db.individuals().collect(), vec![]).unwrap();
    let report = cross_validate(&p, 10, 0, &mut |_| Ok(Some(Concept::top()))).unwrap();
    assert_eq!(report.folds.len(), 10);
    for f in &report.folds {
        assert_eq!(f.test.accuracy, 1.0);
    }
    assert_eq!(report.accuracy.mean, 1.0);
    assert_eq!(report.accuracy.std, 0.0);
}

#[test]
fn hidden_concept_is_recovered() {
    let db = Arc::new(random(11, 80));
    let hidden = parse_concept("(atleast 2 r . A)").unwrap();
    let ext = eval_concept(&hidden, &db);
    let (pos, neg): (Vec<u32>, Vec<u32>) = db.individuals().partition(|&a| ext.contains(a as usize));
    assert!(pos.len() >= 10 && neg.len() >= 10, "{} / {}", pos.len(), neg.len());
    let p = FittingProblem::new(db, pos, neg).unwrap();
    let mut cfg = SearchConfig::with_fragment(Fragment::Alcq);
    cfg.max_stage = 3;
    let report = cross_validate(&p, 10, 0, &mut |train| {
        let r = bounded_fit(train, &cfg)?;
        assert_eq!(r.status, FitStatus::Exact);
        Ok(r.concept)
    })
    .unwrap();
    for f in &report.folds {
        assert!(!f.fallback);
        assert_eq!(f.train.f1, 1.0);
        assert_eq!(f.test.f1, 1.0, "fold {}: {}", f.fold, f.concept);
    }
    assert_eq!(report.f1.mean, 1.0);
}

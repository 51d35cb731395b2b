//! Reductions to the inverse-free, feature-free setting and the
//! translations of concepts back to the original signature.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::concept::{Concept, Node, Role};
use crate::database::{is_reserved, Database, DatabaseBuilder, Fact, Name};
use crate::error::{Error, Result};
use crate::value::Value;

pub const INVERSE_PREFIX: &str = "__inv_";
pub const FEATURE_PREFIX: &str = "__fge_";

/// Maps each role `r` to the fresh role holding its reversed edges.
#[derive(Debug, Clone, Default, Serialize)]
pub struct InverseContext {
    pub role_map: BTreeMap<Name, Name>,
}

fn check_no_reserved(db: &Database) -> Result<()> {
    for n in db
        .concept_names()
        .chain(db.role_names())
        .chain(db.feature_names())
    {
        if is_reserved(n) {
            return Err(Error::ReservedName(n.to_string()));
        }
    }
    Ok(())
}

fn copy_individuals(db: &Database, b: &mut DatabaseBuilder) {
    for name in db.names() {
        b.individual(name);
    }
}

/// Adds a fresh role `__inv_r` with `__inv_r(b,a)` for every `r(a,b)`.
pub fn add_inverse_roles(db: &Database) -> Result<(Database, InverseContext)> {
    if let Some(r) = db.role_names().find(|r| r.starts_with(INVERSE_PREFIX)) {
        return Err(Error::ReservedName(r.to_string()));
    }
    let mut b = DatabaseBuilder::default();
    copy_individuals(db, &mut b);
    let mut ctx = InverseContext::default();
    for r in db.role_names() {
        ctx.role_map
            .insert(r.clone(), Arc::from(format!("{INVERSE_PREFIX}{r}")));
    }
    for fact in db.facts() {
        match fact {
            Fact::Concept(c, a) => {
                b.concept_fact(&c, &a);
            }
            Fact::Role(r, x, y) => {
                b.role_fact(&r, &x, &y);
                b.role_fact(&ctx.role_map[&r], &y, &x);
            }
            Fact::Feature(f, a, v) => {
                b.feature_fact(&f, &a, v)?;
            }
        }
    }
    Ok((b.build()?, ctx))
}

impl InverseContext {
    /// Replaces `inv(r)` by the fresh forward role.
    pub fn forward(&self, c: &Concept) -> Concept {
        c.rewrite(&mut |node| {
            let swap = |r: &Role| match self.role_map.get(&r.name) {
                Some(fresh) if r.inverse => Role {
                    name: fresh.clone(),
                    inverse: false,
                },
                _ => r.clone(),
            };
            match node.node() {
                Node::AtLeast(n, r, d) => Concept::at_least(*n, swap(r), d.clone()),
                Node::AtMost(n, r, d) => Concept::at_most(*n, swap(r), d.clone()),
                _ => node,
            }
        })
    }

    /// Replaces each fresh role by the inverse of its original role.
    pub fn restore(&self, c: &Concept) -> Concept {
        let back: BTreeMap<&Name, &Name> = self.role_map.iter().map(|(k, v)| (v, k)).collect();
        c.rewrite(&mut |node| {
            let swap = |r: &Role| match back.get(&r.name) {
                Some(orig) => Role {
                    name: (*orig).clone(),
                    inverse: !r.inverse,
                },
                None => r.clone(),
            };
            match node.node() {
                Node::AtLeast(n, r, d) => Concept::at_least(*n, swap(r), d.clone()),
                Node::AtMost(n, r, d) => Concept::at_most(*n, swap(r), d.clone()),
                _ => node,
            }
        })
    }
}

pub fn restore_inverse_roles(c: &Concept, ctx: &InverseContext) -> Concept {
    ctx.restore(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapMode {
    /// Each cut point moves to the smallest observed value at or above it.
    #[default]
    Up,
    /// Cut points are used as they are.
    Raw,
}

/// Thresholds for `feature`: the minimum observed value plus the `n_f - 1`
/// interior cut points of `n_f` equal-width intervals, deduplicated and
/// increasing. When `n_f` reaches the number of distinct values, all of
/// them are returned.
pub fn select_thresholds(db: &Database, feature: &str, n_f: usize, snap: SnapMode) -> Vec<Value> {
    assert!(n_f >= 1, "n_f must be positive");
    let vals = db.observed_values(feature);
    if vals.is_empty() {
        return vals;
    }
    if n_f >= vals.len() {
        return vals;
    }
    let (min, max) = (vals[0], vals[vals.len() - 1]);
    let mut out = vec![min];
    for i in 1..n_f {
        let cut = Value::interpolate(min, max, i as u64, n_f as u64);
        let t = match snap {
            SnapMode::Raw => cut,
            SnapMode::Up => match vals.iter().find(|&&v| v >= cut) {
                Some(&v) => v,
                None => max,
            },
        };
        out.push(t);
    }
    out.sort();
    out.dedup();
    out
}

/// Name of the fresh concept `A_{f>=v}`.
pub fn threshold_name(feature: &str, v: Value) -> Name {
    let enc: String = v
        .to_string()
        .chars()
        .map(|c| match c {
            '-' => 'm',
            '.' => 'p',
            other => other,
        })
        .collect();
    Arc::from(format!("{FEATURE_PREFIX}{feature}_{enc}"))
}

/// Per feature, the thresholds and their concept names, plus what is
/// needed to translate back.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FeatureContext {
    pub thresholds: BTreeMap<Name, Vec<(Value, Name)>>,
    #[serde(skip)]
    observed: BTreeMap<Name, Vec<Value>>,
    #[serde(skip)]
    total: BTreeMap<Name, bool>,
    #[serde(skip)]
    by_name: BTreeMap<Name, (Name, Value)>,
}

/// Replaces feature facts by `A_{f>=v}(a)` for every selected threshold `v`
/// with `f(a, v')` and `v' >= v`. Features without thresholds are dropped.
pub fn booleanize_features(
    db: &Database,
    thresholds: &BTreeMap<Name, Vec<Value>>,
) -> Result<(Database, FeatureContext)> {
    check_no_reserved(db)?;
    let mut ctx = FeatureContext::default();
    for f in db.feature_names() {
        ctx.observed.insert(f.clone(), db.observed_values(f));
        ctx.total.insert(f.clone(), db.feature_is_total(f));
    }
    for (f, ts) in thresholds {
        if ts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "thresholds for feature `{f}` are not strictly increasing"
            )));
        }
        let named: Vec<(Value, Name)> = ts.iter().map(|&v| (v, threshold_name(f, v))).collect();
        for (v, n) in &named {
            ctx.by_name.insert(n.clone(), (f.clone(), *v));
        }
        ctx.thresholds.insert(f.clone(), named);
    }

    let mut b = DatabaseBuilder::default();
    copy_individuals(db, &mut b);
    for fact in db.facts() {
        match fact {
            Fact::Concept(c, a) => {
                b.concept_fact(&c, &a);
            }
            Fact::Role(r, x, y) => {
                b.role_fact(&r, &x, &y);
            }
            Fact::Feature(f, a, v) => {
                if let Some(named) = ctx.thresholds.get(&f) {
                    for (t, n) in named {
                        if v >= *t {
                            b.concept_fact(n, &a);
                        }
                    }
                }
            }
        }
    }
    Ok((b.build()?, ctx))
}

/// Thresholds at every observed value of every feature.
pub fn all_thresholds(db: &Database) -> BTreeMap<Name, Vec<Value>> {
    db.feature_names()
        .map(|f| (f.clone(), db.observed_values(f)))
        .collect()
}

impl FeatureContext {
    fn predecessor(&self, f: &Name, v: Value) -> Option<Value> {
        self.observed
            .get(f)?
            .iter()
            .rev()
            .find(|&&w| w < v)
            .copied()
    }

    /// Replaces `A_{f>=v}` by `(f >= v)`. When every individual has a value
    /// for `f` and an observed value below `v` exists, `not A_{f>=v}`
    /// becomes `(f <= pred(v))`.
    pub fn restore(&self, c: &Concept) -> Concept {
        c.rewrite(&mut |node| match node.node() {
            Node::Name(n) => match self.by_name.get(n) {
                Some((f, v)) => Concept::feature_geq(f, *v),
                None => node,
            },
            Node::Not(inner) => match inner.node() {
                Node::FeatureGeq(f, v) if self.total.get(f).copied().unwrap_or(false) => {
                    match self.predecessor(f, *v) {
                        Some(p) => Concept::feature_leq(f, p),
                        None => node,
                    }
                }
                _ => node,
            },
            _ => node,
        })
    }

    /// Translates feature comparisons into the booleanized signature.
    ///
    /// Exact when every observed value of the feature is a threshold;
    /// otherwise `(f >= v)` uses the smallest threshold at or above `v`.
    pub fn forward(&self, c: &Concept) -> Concept {
        c.rewrite(&mut |node| match node.node() {
            Node::FeatureGeq(f, v) => self.forward_geq(f, *v),
            Node::FeatureLeq(f, v) => {
                let Some(ts) = self.thresholds.get(f) else {
                    return Concept::bot();
                };
                let Some((_, has)) = ts.first() else {
                    return Concept::bot();
                };
                if ts[0].0 > *v {
                    return Concept::bot();
                }
                match ts.iter().find(|(t, _)| *t > *v) {
                    Some((_, above)) => Concept::and(
                        Concept::name(has),
                        Concept::not(Concept::name(above)),
                    ),
                    None => Concept::name(has),
                }
            }
            _ => node,
        })
    }

    fn forward_geq(&self, f: &Name, v: Value) -> Concept {
        match self
            .thresholds
            .get(f)
            .and_then(|ts| ts.iter().find(|(t, _)| *t >= v))
        {
            Some((_, n)) => Concept::name(n),
            None => Concept::bot(),
        }
    }
}

pub fn restore_features(c: &Concept, ctx: &FeatureContext) -> Concept {
    ctx.restore(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::parse_facts;
    use crate::eval::eval_concept;
    use crate::parse::parse_concept;

    const HEIGHTS: &str = "child(a,a1)\nchild(a,a2)\nchild(b,b1)\nchild(b,b2)\n\
        height(a1,121)\nheight(a2,145)\nheight(b1,152)\nheight(b2,163)\n";

    fn v(x: i64) -> Value {
        Value::from_int(x)
    }

    #[test]
    fn inverse_roles_are_added() {
        let db = parse_facts("r(a,b)").unwrap();
        let (j, ctx) = add_inverse_roles(&db).unwrap();
        assert_eq!(j.num_facts(), 2);
        assert_eq!(
            j.successors_by_name("__inv_r", j.ind("b").unwrap()),
            &[j.ind("a").unwrap()]
        );
        let c = Concept::at_least(2, Role::new("__inv_r"), Concept::top());
        assert_eq!(
            ctx.restore(&c),
            Concept::at_least(2, Role::inverse_of("r"), Concept::top())
        );
        let plain = parse_concept("(exists r . A)").unwrap();
        assert_eq!(ctx.restore(&plain), plain);
    }

    #[test]
    fn no_roles_no_inverses() {
        let db = parse_facts("A(a)").unwrap();
        let (j, ctx) = add_inverse_roles(&db).unwrap();
        assert_eq!(j.facts(), db.facts());
        assert!(ctx.role_map.is_empty());
    }

    #[test]
    fn reserved_roles_are_rejected() {
        let mut b = DatabaseBuilder::default();
        b.role_fact("__inv_r", "a", "b");
        let db = b.build().unwrap();
        assert!(matches!(add_inverse_roles(&db), Err(Error::ReservedName(_))));
    }

    #[test]
    fn thresholds_on_example_heights() {
        let db = parse_facts(HEIGHTS).unwrap();
        assert_eq!(select_thresholds(&db, "height", 2, SnapMode::Up), [v(121), v(145)]);
        assert_eq!(select_thresholds(&db, "height", 2, SnapMode::Raw), [v(121), v(142)]);
        assert_eq!(select_thresholds(&db, "height", 1, SnapMode::Up), [v(121)]);
        assert_eq!(select_thresholds(&db, "height", 4, SnapMode::Up).len(), 4);
        assert_eq!(select_thresholds(&db, "height", 9, SnapMode::Up).len(), 4);
        assert!(select_thresholds(&db, "weight", 3, SnapMode::Up).is_empty());
    }

    #[test]
    fn booleanize_example() {
        let db = parse_facts(HEIGHTS).unwrap();
        let th: BTreeMap<Name, Vec<Value>> = [(Arc::from("height"), vec![v(140)])].into();
        let (j, ctx) = booleanize_features(&db, &th).unwrap();
        let name = threshold_name("height", v(140));
        let ext: Vec<&str> = j
            .concept_extension(&name)
            .unwrap()
            .ones()
            .map(|i| &**j.name(i as u32))
            .collect();
        assert_eq!(ext, ["a2", "b1", "b2"]);
        assert!(!j.has_features());
        assert_eq!(
            ctx.restore(&Concept::name(&name)),
            Concept::feature_geq("height", v(140))
        );
        let (j, _) = booleanize_features(&db, &BTreeMap::new()).unwrap();
        assert_eq!(j.num_facts(), 4);
        assert_eq!(j.len(), db.len());
    }

    #[test]
    fn negated_threshold_becomes_upper_bound_only_for_total_features() {
        let db = parse_facts("h(a,1)\nh(b,2)\nh(c,3)").unwrap();
        let (_, ctx) = booleanize_features(&db, &all_thresholds(&db)).unwrap();
        let c = Concept::not(Concept::name(&threshold_name("h", v(3))));
        assert_eq!(ctx.restore(&c), Concept::feature_leq("h", v(2)));
        let partial = parse_facts("h(a,1)\nh(b,2)\nr(a,c)").unwrap();
        let (_, ctx) = booleanize_features(&partial, &all_thresholds(&partial)).unwrap();
        let c = Concept::not(Concept::name(&threshold_name("h", v(2))));
        assert_eq!(ctx.restore(&c).to_string(), "not (h >= 2)");
    }

    #[test]
    fn forward_translation_matches_on_all_thresholds() {
        let db = parse_facts(HEIGHTS).unwrap();
        let (j, ctx) = booleanize_features(&db, &all_thresholds(&db)).unwrap();
        for text in [
            "(height >= 140)",
            "(height >= 145)",
            "(height <= 150)",
            "(height <= 100)",
            "(height <= 200)",
            "(height >= 500)",
        ] {
            let c = parse_concept(text).unwrap();
            assert_eq!(eval_concept(&c, &db), eval_concept(&ctx.forward(&c), &j), "{text}");
        }
    }
}

//! Bounded fitting: stage-wise search for a smallest fitting concept.

mod config;
mod max_fit;
pub mod parallel;
pub mod topology;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::{debug, info, warn};
use serde::Serialize;

use crate::bisim::{max_bisimulation, BisimKind, BisimPartition};
use crate::concept::{node_count, Concept};
use crate::database::{Database, Name};
use crate::encode::{encode, EncodeGraph, EncodeOptions, Encoding};
use crate::error::{Error, Result};
use crate::eval::{fits, FittingProblem};
use crate::polyfit::{approx_select_with, construct_fitting, separable, ApproxSelection};
use crate::reduce::{
    add_inverse_roles, all_thresholds, booleanize_features, restore_features, restore_inverse_roles,
    select_thresholds, FeatureContext, InverseContext, SnapMode,
};
use crate::solve::{Budget, SolveResult, SolveStatus};
use crate::value::Value;

pub use config::{Fragment, GMode, NfMode, SearchConfig};
pub use max_fit::max_fit;
pub use parallel::{parallel_stage, pin_topologies};
pub use topology::{enumerate_topologies, topologies_of_size, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FitStatus {
    Exact,
    Approx,
    None,
    Budget,
}

/// What a solve call was for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StageRole {
    /// The regular stage query.
    Stage,
    /// Re-solving with fewer nodes and the same thresholds.
    Shrink { nodes: usize },
    /// Asking for at least `target` correctly classified examples.
    Target { target: usize },
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct StageStats {
    pub k: usize,
    pub role: StageRole,
    pub g: u32,
    pub thresholds: usize,
    pub graph_size: usize,
    pub vars: u32,
    pub clauses: usize,
    #[serde(serialize_with = "ser_millis", rename = "encode_ms")]
    pub encode_time: Duration,
    #[serde(serialize_with = "ser_millis", rename = "solve_ms")]
    pub solve_time: Duration,
    pub conflicts: u64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub status: FitStatus,
    pub concept: Option<Concept>,
    pub stage: Option<usize>,
    pub node_count: Option<u64>,
    /// Per positive: whether the concept accepts it.
    pub positives: Vec<bool>,
    /// Per negative: whether the concept rejects it.
    pub negatives: Vec<bool>,
    pub correct: usize,
    pub total: usize,
    pub stages: Vec<StageStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<ApproxSelection>,
    pub warnings: Vec<String>,
    #[serde(serialize_with = "ser_millis", rename = "wall_ms")]
    pub wall: Duration,
}

impl FitResult {
    fn empty(problem: &FittingProblem, status: FitStatus, warnings: Vec<String>) -> Self {
        FitResult {
            status,
            concept: None,
            stage: None,
            node_count: None,
            positives: vec![false; problem.positives.len()],
            negatives: vec![false; problem.negatives.len()],
            correct: 0,
            total: problem.num_examples(),
            stages: Vec::new(),
            selection: None,
            warnings,
            wall: Duration::ZERO,
        }
    }

    fn set_concept(&mut self, c: Concept, problem: &FittingProblem) {
        let report = fits(&c, problem);
        self.correct = report.correct();
        self.positives = report.positives;
        self.negatives = report.negatives;
        self.node_count = Some(node_count(&c));
        self.concept = Some(c);
    }
}

/// The reduced view of one threshold set.
pub(crate) struct StageData {
    pub version: usize,
    pub thresholds: BTreeMap<Name, Vec<Value>>,
    pub fctx: FeatureContext,
    pub ictx: Option<InverseContext>,
    pub graph: Arc<EncodeGraph>,
    pub positives: Vec<u32>,
    pub negatives: Vec<u32>,
}

impl StageData {
    pub fn num_thresholds(&self) -> usize {
        self.thresholds.values().map(Vec::len).sum()
    }

    /// Booleanizes with `thresholds`, adds inverse roles when asked, and
    /// builds the encoder graph.
    pub fn build(
        problem: &FittingProblem,
        config: &SearchConfig,
        thresholds: BTreeMap<Name, Vec<Value>>,
        version: usize,
    ) -> Result<StageData> {
        let (db, fctx, ictx) = reduce(&problem.db, config.fragment, &thresholds)?;
        let (graph, positives, negatives) = if config.quotient {
            let part = max_bisimulation(&db, BisimKind::Alcq);
            let map = |xs: &[u32]| xs.iter().map(|&a| part.class_of(a)).collect::<Vec<_>>();
            (
                EncodeGraph::from_partition(&db, &part),
                map(&problem.positives),
                map(&problem.negatives),
            )
        } else {
            (
                EncodeGraph::from_database(&db),
                problem.positives.clone(),
                problem.negatives.clone(),
            )
        };
        Ok(StageData {
            version,
            thresholds,
            fctx,
            ictx,
            graph: Arc::new(graph),
            positives,
            negatives,
        })
    }

    pub fn restore(&self, c: &Concept) -> Concept {
        restore(c, &self.fctx, self.ictx.as_ref())
    }
}

/// Translates a concept over the reduced signature back.
fn restore(c: &Concept, fctx: &FeatureContext, ictx: Option<&InverseContext>) -> Concept {
    let c = match ictx {
        Some(ictx) => restore_inverse_roles(c, ictx),
        None => c.clone(),
    };
    restore_features(&c, fctx)
}

fn reduce(
    db: &Database,
    fragment: Fragment,
    thresholds: &BTreeMap<Name, Vec<Value>>,
) -> Result<(Database, FeatureContext, Option<InverseContext>)> {
    let (db, fctx) = booleanize_features(db, thresholds)?;
    if fragment.inverse() {
        let (db, ictx) = add_inverse_roles(&db)?;
        Ok((db, fctx, Some(ictx)))
    } else {
        Ok((db, fctx, None))
    }
}

pub(crate) fn stage_thresholds(db: &Database, config: &SearchConfig, k: usize) -> BTreeMap<Name, Vec<Value>> {
    if !config.fragment.features() {
        return BTreeMap::new();
    }
    let n_f = config.nf_mode.n_f(k);
    db.feature_names()
        .map(|f| (f.clone(), select_thresholds(db, f, n_f, SnapMode::Up)))
        .collect()
}

/// Keeps the stage data current for stage `k`, rebuilding only when the
/// threshold set changes.
pub(crate) fn refresh(
    slot: &mut Option<StageData>,
    problem: &FittingProblem,
    config: &SearchConfig,
    k: usize,
) -> Result<()> {
    let thresholds = stage_thresholds(&problem.db, config, k);
    let stale = slot.as_ref().map_or(true, |d| d.thresholds != thresholds);
    if stale {
        let version = slot.as_ref().map_or(0, |d| d.version + 1);
        *slot = Some(StageData::build(problem, config, thresholds, version)?);
    }
    Ok(())
}

/// Outcome of the polynomial-time separability check on the database
/// booleanized at every observed value.
pub(crate) struct Feasibility {
    pub separable: bool,
    /// Largest number of examples any concept classifies correctly.
    pub best_possible: usize,
    pub selection: ApproxSelection,
    db: Database,
    partition: BisimPartition,
    fctx: FeatureContext,
    ictx: Option<InverseContext>,
}

pub(crate) fn feasibility(problem: &FittingProblem, config: &SearchConfig) -> Result<Feasibility> {
    let thresholds = if config.fragment.features() {
        all_thresholds(&problem.db)
    } else {
        BTreeMap::new()
    };
    let (db, fctx, ictx) = reduce(&problem.db, config.fragment, &thresholds)?;
    let partition = max_bisimulation(&db, config.fragment.bisim_kind());
    let selection = approx_select_with(&partition, &problem.positives, &problem.negatives);
    Ok(Feasibility {
        separable: separable(&partition, &problem.positives, &problem.negatives),
        best_possible: selection.kept(),
        selection,
        db,
        partition,
        fctx,
        ictx,
    })
}

impl Feasibility {
    /// The fitting concept for the best separable subset, restored.
    pub fn approximation(&self) -> Result<Concept> {
        let c = construct_fitting(
            &self.db,
            &self.partition,
            &self.selection.kept_positives,
            &self.selection.kept_negatives,
        )?;
        Ok(restore(&c, &self.fctx, self.ictx.as_ref()))
    }
}

/// Encodes and solves one query on the current stage data.
pub(crate) struct StageRunner<'a> {
    pub config: &'a SearchConfig,
    pub deadline: Option<Instant>,
    pub stats: Vec<StageStats>,
    pub progress: &'a mut dyn FnMut(&StageStats),
}

impl StageRunner<'_> {
    pub fn g_for(&self, data: &StageData, k: usize) -> u32 {
        self.config.g_mode.g(k).min(data.graph.max_degree())
    }

    pub fn encode(&self, data: &StageData, k: usize, g: u32, fitting: bool) -> Result<(Encoding, Duration)> {
        let t = Instant::now();
        let enc = encode(
            data.graph.clone(),
            &data.positives,
            &data.negatives,
            EncodeOptions {
                k,
                g,
                qualified: self.config.fragment.qualified(),
                fitting,
            },
        )?;
        Ok((enc, t.elapsed()))
    }

    pub fn budget(&self) -> Budget {
        let stage = self.config.stage_timeout.map(|d| Instant::now() + d);
        let deadline = match (stage, self.deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Budget {
            deadline,
            ..Budget::default()
        }
    }

    pub fn solve(
        &mut self,
        data: &StageData,
        enc: &Encoding,
        cnf: &crate::cnf::Cnf,
        encode_time: Duration,
        role: StageRole,
    ) -> Result<SolveResult> {
        let budget = self.budget();
        let res = parallel_stage(enc, cnf, self.config.threads, &self.config.backend, &budget)?;
        let st = StageStats {
            k: enc.k(),
            role,
            g: enc.options.g,
            thresholds: data.num_thresholds(),
            graph_size: data.graph.len(),
            vars: cnf.num_vars(),
            clauses: cnf.num_clauses(),
            encode_time,
            solve_time: res.stats.wall,
            conflicts: res.stats.conflicts,
            status: res.status,
        };
        debug!("stage {} {:?}: {:?} in {:?}", st.k, st.role, st.status, st.solve_time);
        (self.progress)(&st);
        self.stats.push(st);
        Ok(res)
    }

    pub fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Runs [`bounded_fit_with`] without progress reporting.
pub fn bounded_fit(problem: &FittingProblem, config: &SearchConfig) -> Result<FitResult> {
    bounded_fit_with(problem, config, &mut |_| {})
}

/// Tries stages `k = 1, 2, ...` until a concept with at most `k` nodes
/// fits. The returned concept has the fewest nodes among concepts over the
/// threshold set and number bound of its stage.
pub fn bounded_fit_with(
    problem: &FittingProblem,
    config: &SearchConfig,
    progress: &mut dyn FnMut(&StageStats),
) -> Result<FitResult> {
    let start = Instant::now();
    let warnings = config.validate()?;
    for w in &warnings {
        warn!("{w}");
    }
    let mut result = FitResult::empty(problem, FitStatus::Budget, warnings);

    let feas = feasibility(problem, config)?;
    if !feas.separable {
        info!("examples are not separable in {}", config.fragment);
        result.status = FitStatus::None;
        if config.approx {
            let c = feas.approximation()?;
            result.set_concept(c, problem);
            result.selection = Some(feas.selection);
            result.status = FitStatus::Approx;
        }
        result.wall = start.elapsed();
        return Ok(result);
    }

    if problem.negatives.is_empty() || problem.positives.is_empty() {
        let c = if problem.negatives.is_empty() { Concept::top() } else { Concept::bot() };
        result.set_concept(c, problem);
        result.stage = Some(1);
        result.status = FitStatus::Exact;
        result.wall = start.elapsed();
        return Ok(result);
    }

    let mut runner = StageRunner {
        config,
        deadline: config.timeout.map(|d| start + d),
        stats: Vec::new(),
        progress,
    };
    let mut slot: Option<StageData> = None;
    // (threshold version, g, k) triples known to be unsatisfiable
    let mut refuted: Vec<(usize, u32, usize)> = Vec::new();

    for k in 1..=config.max_stage {
        if runner.out_of_time() {
            break;
        }
        refresh(&mut slot, problem, config, k)?;
        let data = slot.as_ref().expect("refreshed");
        let g = runner.g_for(data, k);
        let (enc, et) = runner.encode(data, k, g, true)?;
        let res = runner.solve(data, &enc, &enc.cnf, et, StageRole::Stage)?;
        match res.status {
            SolveStatus::Unsat => {
                refuted.push((data.version, g, k));
                continue;
            }
            SolveStatus::Timeout => break,
            SolveStatus::Sat => {}
        }
        let mut best = enc.decode(res.model.as_ref().expect("SAT has a model"))?;
        // Shrink while a smaller tree with the same thresholds might fit.
        loop {
            let size = node_count(&best) as usize;
            if size <= 1 {
                break;
            }
            let m = size - 1;
            if refuted.iter().any(|&(v, g2, k2)| v == data.version && g2 >= g && k2 >= m) {
                break;
            }
            let (enc_m, et) = runner.encode(data, m, g, true)?;
            let res = runner.solve(data, &enc_m, &enc_m.cnf, et, StageRole::Shrink { nodes: m })?;
            match res.status {
                SolveStatus::Sat => best = enc_m.decode(res.model.as_ref().expect("SAT has a model"))?,
                SolveStatus::Unsat => {
                    refuted.push((data.version, g, m));
                    break;
                }
                SolveStatus::Timeout => break,
            }
        }
        let restored = data.restore(&best);
        let report = fits(&restored, problem);
        if !report.fits {
            return Err(Error::Internal(format!(
                "concept {restored} found at stage {k} does not fit the original examples"
            )));
        }
        result.set_concept(restored, problem);
        result.stage = Some(k);
        result.status = FitStatus::Exact;
        break;
    }
    result.stages = runner.stats;
    result.wall = start.elapsed();
    Ok(result)
}

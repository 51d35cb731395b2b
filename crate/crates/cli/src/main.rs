use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde_json::json;

use dlfit::bench::{gen_alcq_separation, gen_hitting_set};
use dlfit::bisim::{max_bisimulation, quotient, BisimKind};
use dlfit::cnf::Cnf;
use dlfit::database::load_facts;
use dlfit::driver::{bounded_fit_with, max_fit, FitResult, FitStatus, Fragment, GMode, NfMode, SearchConfig};
use dlfit::encode::{encode, EncodeGraph, EncodeOptions};
use dlfit::metrics::{cross_validate, evaluate};
use dlfit::reduce::{add_inverse_roles, all_thresholds, booleanize_features};
use dlfit::solve::{solve_with, Backend, Budget, SolveStatus, SOLVER_ENV};
use dlfit::{parse_concept, Database, Error, FittingProblem, ProblemFile};

/// Writes to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "dlfit", version, about = "Learn description logic concepts from examples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a smallest fitting concept.
    Learn {
        #[command(flatten)]
        task: Task,
        #[command(flatten)]
        search: SearchArgs,
        /// Return the best approximation when no concept fits.
        #[arg(long)]
        approx: bool,
        /// Also write the concept text to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for a concept classifying as many examples as possible.
    Maxfit {
        #[command(flatten)]
        task: Task,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a concept on a problem.
    Eval {
        #[command(flatten)]
        task: Task,
        /// Concept text.
        #[arg(long)]
        concept: String,
    },
    /// Cross-validate the learner.
    Crossval {
        #[command(flatten)]
        task: Task,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 10)]
        folds: usize,
    },
    /// Print the coarsest bisimulation as JSON.
    Bisim {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Alcq)]
        kind: KindArg,
    },
    /// Print the counting quotient as facts.
    Quotient {
        #[arg(long)]
        facts: PathBuf,
    },
    /// Print the stage-k instance in DIMACS.
    EncodeDimacs {
        #[command(flatten)]
        task: Task,
        #[arg(long, default_value = "alcqi")]
        fragment: Fragment,
        #[arg(long)]
        k: usize,
        /// Largest number in restrictions (default: k).
        #[arg(long)]
        g: Option<u32>,
        /// Write the variable meanings as JSON to this file.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Solve a DIMACS file and print the result in solver format.
    Sat {
        file: PathBuf,
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Write a hitting-set instance.
    GenHittingSet {
        /// Sets separated by `;`, elements by `,`, e.g. `1,3;2,4`.
        #[arg(long)]
        sets: String,
        #[arg(long)]
        k: usize,
        /// Shrinks the groups; below k'+1 the size guarantee is lost.
        #[arg(long)]
        group_size: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write problems separable with counting but not without.
    GenAlcqSep {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct Task {
    #[arg(long)]
    facts: PathBuf,
    /// JSON file with "positive" and "negative" name lists.
    #[arg(long)]
    problem: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value = "alcqif")]
    fragment: Fragment,
    #[arg(long, default_value_t = 12)]
    max_stage: usize,
    #[arg(long, conflicts_with = "g_cap")]
    g_linear: Option<f64>,
    #[arg(long)]
    g_cap: Option<u32>,
    #[arg(long, conflicts_with = "nf_fixed")]
    nf_per_stage: Option<u32>,
    #[arg(long)]
    nf_fixed: Option<u32>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Seconds per solver call.
    #[arg(long)]
    stage_timeout: Option<f64>,
    /// Seconds for the whole search.
    #[arg(long)]
    timeout: Option<f64>,
    /// External solver command; the DIMACS path is appended.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    no_quotient: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Alc,
    Alcq,
}

fn seconds(s: f64) -> Result<Duration, Error> {
    Duration::try_from_secs_f64(s).map_err(|_| Error::Config(format!("invalid duration {s}")))
}

fn backend(solver: Option<&str>) -> Backend {
    match solver.map(str::to_string).or_else(|| std::env::var(SOLVER_ENV).ok()) {
        Some(cmd) if !cmd.trim().is_empty() => Backend::External(cmd),
        _ => Backend::Builtin,
    }
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig, Error> {
        let mut c = SearchConfig::with_fragment(self.fragment);
        c.max_stage = self.max_stage;
        if let Some(x) = self.g_linear {
            c.g_mode = GMode::Linear(x);
        }
        if let Some(n) = self.g_cap {
            c.g_mode = GMode::Cap(n);
        }
        if let Some(m) = self.nf_per_stage {
            c.nf_mode = NfMode::PerStage(m);
        }
        if let Some(n) = self.nf_fixed {
            c.nf_mode = NfMode::Fixed(n);
        }
        c.threads = self.threads;
        c.stage_timeout = self.stage_timeout.map(seconds).transpose()?;
        c.timeout = self.timeout.map(seconds).transpose()?;
        c.quotient = !self.no_quotient;
        c.seed = self.seed;
        c.backend = backend(self.solver.as_deref());
        Ok(c)
    }
}

impl Task {
    fn load(&self) -> Result<FittingProblem, Error> {
        let db = Arc::new(load_facts(&self.facts)?);
        ProblemFile::load(&self.problem)?.resolve(db)
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn status_code(status: FitStatus) -> u8 {
    match status {
        FitStatus::Exact => 0,
        FitStatus::Approx | FitStatus::Budget => 2,
        FitStatus::None => 3,
    }
}

fn report(result: &FitResult, problem: &FittingProblem, output: Option<&Path>) -> Result<u8, Error> {
    let text = result.concept.as_ref().map(|c| c.to_string());
    outln!("{}", text.as_deref().unwrap_or("none"));
    let metrics = result.concept.as_ref().map(|c| evaluate(c, problem));
    let mut record = serde_json::to_value(result).expect("results serialize");
    record["metrics"] = serde_json::to_value(metrics).expect("metrics serialize");
    outln!("{record}");
    if let (Some(path), Some(text)) = (output, text) {
        write_file(path, &format!("{text}\n"))?;
    }
    Ok(status_code(result.status))
}

fn parse_sets(text: &str) -> Result<Vec<Vec<u32>>, Error> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<u32>()
                        .ok()
                        .filter(|&x| x > 0)
                        .ok_or_else(|| Error::Config(format!("invalid set element `{}`", e.trim())))
                })
                .collect()
        })
        .collect()
}

fn dimacs_instance(problem: &FittingProblem, fragment: Fragment, k: usize, g: u32) -> Result<(Cnf, serde_json::Value), Error> {
    let mut db: Database = if fragment.features() {
        booleanize_features(&problem.db, &all_thresholds(&problem.db))?.0
    } else {
        booleanize_features(&problem.db, &Default::default())?.0
    };
    if fragment.inverse() {
        db = add_inverse_roles(&db)?.0;
    }
    let graph = Arc::new(EncodeGraph::from_database(&db));
    let options = EncodeOptions {
        k,
        g,
        qualified: fragment.qualified(),
        fitting: true,
    };
    let enc = encode(graph, &problem.positives, &problem.negatives, options)?;
    let sidecar = enc.sidecar();
    Ok((enc.cnf, sidecar))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Learn {
            task,
            search,
            approx,
            output,
        } => {
            let problem = task.load()?;
            let mut config = search.config()?;
            config.approx = approx;
            let result = bounded_fit_with(&problem, &config, &mut |s| {
                info!("stage {} ({:?}): {:?} after {:?}", s.k, s.role, s.status, s.solve_time)
            })?;
            report(&result, &problem, output.as_deref())
        }
        Command::Maxfit { task, search, output } => {
            let problem = task.load()?;
            let result = max_fit(&problem, &search.config()?)?;
            report(&result, &problem, output.as_deref())
        }
        Command::Eval { task, concept } => {
            let problem = task.load()?;
            let c = parse_concept(&concept)?;
            let m = evaluate(&c, &problem);
            outln!(
                "{}",
                json!({ "concept": c, "node_count": dlfit::node_count(&c), "metrics": m })
            );
            Ok(if m.tp + m.tn == problem.num_examples() { 0 } else { 2 })
        }
        Command::Crossval { task, search, folds } => {
            let problem = task.load()?;
            let mut config = search.config()?;
            config.approx = true;
            let report = cross_validate(&problem, folds, search.seed, &mut |train| {
                Ok(bounded_fit_with(train, &config, &mut |_| {})?.concept)
            })?;
            outln!("{}", serde_json::to_string(&report).expect("reports serialize"));
            Ok(0)
        }
        Command::Bisim { facts, kind } => {
            let db = load_facts(&facts)?;
            let kind = match kind {
                KindArg::Alc => BisimKind::Alc,
                KindArg::Alcq => BisimKind::Alcq,
            };
            outln!("{}", max_bisimulation(&db, kind).to_json(&db));
            Ok(0)
        }
        Command::Quotient { facts } => {
            let db = load_facts(&facts)?;
            let q = quotient(&db);
            info!(
                "{} individuals in {} classes, {} after copying",
                db.len(),
                q.partition.num_classes,
                q.db.len()
            );
            out!("{}", q.db.to_fact_text());
            Ok(0)
        }
        Command::EncodeDimacs {
            task,
            fragment,
            k,
            g,
            sidecar,
        } => {
            let problem = task.load()?;
            let (cnf, meta) = dimacs_instance(&problem, fragment, k, g.unwrap_or(k as u32))?;
            out!("{}", cnf.to_dimacs());
            if let Some(path) = sidecar {
                write_file(&path, &format!("{meta}\n"))?;
            }
            Ok(0)
        }
        Command::Sat { file, timeout } => {
            let text = fs::read_to_string(&file).map_err(|source| Error::Io { path: file.clone(), source })?;
            let cnf = Cnf::parse_dimacs(&text)?;
            let budget = match timeout {
                Some(s) => Budget::with_timeout(seconds(s)?),
                None => Budget::unlimited(),
            };
            let res = solve_with(&Backend::Builtin, &cnf, &budget)?;
            match (res.status, &res.model) {
                (SolveStatus::Sat, Some(model)) => {
                    outln!("s SATISFIABLE");
                    let lits: Vec<String> = (1..model.len())
                        .map(|v| if model[v] { v.to_string() } else { format!("-{v}") })
                        .collect();
                    outln!("v {} 0", lits.join(" "));
                    Ok(10)
                }
                (SolveStatus::Unsat, _) => {
                    outln!("s UNSATISFIABLE");
                    Ok(20)
                }
                _ => {
                    outln!("s UNKNOWN");
                    Ok(0)
                }
            }
        }
        Command::GenHittingSet {
            sets,
            k,
            group_size,
            out_dir,
        } => {
            let sets = parse_sets(&sets)?;
            let inst = gen_hitting_set(&sets, k, group_size)?;
            if !inst.faithful {
                warn!("group size {} is below k'+1 = {}: fits may be smaller than the bound suggests", inst.group_size, inst.k_prime + 1);
            }
            fs::create_dir_all(&out_dir).map_err(|source| Error::Io { path: out_dir.clone(), source })?;
            write_file(&out_dir.join("facts.txt"), &inst.db.to_fact_text())?;
            write_file(&out_dir.join("problem.json"), &format!("{}\n", inst.problem.to_json()))?;
            let meta = serde_json::to_string(&inst).expect("metadata serializes");
            write_file(&out_dir.join("meta.json"), &format!("{meta}\n"))?;
            outln!("{meta}");
            Ok(0)
        }
        Command::GenAlcqSep { facts, seed, out_dir } => {
            let db = load_facts(&facts)?;
            let problems = gen_alcq_separation(&db, seed)?;
            if problems.is_empty() {
                eprintln!("no class splits under counting; nothing generated");
            }
            fs::create_dir_all(&out_dir).map_err(|source| Error::Io { path: out_dir.clone(), source })?;
            for (i, p) in problems.iter().enumerate() {
                write_file(&out_dir.join(format!("problem_{i:03}.json")), &format!("{}\n", p.problem.to_json()))?;
            }
            for p in &problems {
                outln!("{}", serde_json::to_string(p).expect("problems serialize"));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! Command-line driver: `optimize`, `certify`, `decompose` and `featsel`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 failure while solving.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bounds::{ds_decompose, minima_lower_bounds};
use crate::brute::{brute_force_minimize, check_submodular, SUBMODULAR_CHECK_LIMIT};
use crate::dsopt::{
    solve, Algorithm, Constraint, ConstraintSpec, DsInstance, PermutationHeuristic, SolverOptions,
    UpperBoundStrategy,
};
use crate::error::Error;
use crate::featsel::{
    build_objective, naive_bayes_cv, parse_sparse, parse_sparse_dataset, select, BlocksSpec,
    CostModel, DataFormat, Dataset, Method, MiMode,
};
use crate::oracle::Oracle;
use crate::sfm::SfmSolver;
use crate::spec::{build_function, FunctionSpec};

/// Largest ground set `certify` solves by enumeration.
pub const CERTIFY_BRUTE_LIMIT: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "dsmin",
    version,
    about = "Minimize differences of submodular set functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run SubSup, SupSub or ModMod on an instance and write its trace.
    Optimize(OptimizeArgs),
    /// Print the two lower bounds on the minimum and, for small n, the exact minimum.
    Certify(CertifyArgs),
    /// Write an arbitrary set function as a difference of submodular functions.
    Decompose(DecomposeArgs),
    /// Compare feature-selection methods over a grid of cost weights.
    Featsel(FeatselArgs),
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Instance JSON: {"f": <spec>, "g": <spec>}.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// subsup, supsub or modmod.
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// g_gain, v_gain or random.
    #[arg(long)]
    pub heuristic: Option<String>,
    /// best_of_both or alternate.
    #[arg(long)]
    pub ub_strategy: Option<String>,
    /// none, card_le=K, card_eq=K, or @file.json.
    #[arg(long)]
    pub constraint: Option<String>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Writes <OUT>.json and <OUT>.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time per iterate.
    #[arg(long)]
    pub timing: bool,
    /// Cache oracle values.
    #[arg(long)]
    pub memoize: bool,
    /// JSON file with defaults for any of the flags above; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeConfig {
    instance: Option<PathBuf>,
    algo: Option<String>,
    epsilon: Option<f64>,
    seed: Option<u64>,
    heuristic: Option<String>,
    ub_strategy: Option<String>,
    constraint: Option<String>,
    max_iters: Option<usize>,
    out: Option<PathBuf>,
    timing: Option<bool>,
    memoize: Option<bool>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Function spec JSON of v (tabulated, n ≤ 16 unless --alpha-lb is given).
    #[arg(long)]
    pub function: PathBuf,
    /// Known lower bound on the submodularity defect.
    #[arg(long)]
    pub alpha_lb: Option<f64>,
    /// Instance JSON destination; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeatselArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// sparse ("label idx:val ...") or csv ("label,x1,x2,...").
    #[arg(long)]
    pub format: Option<String>,
    /// Number of features for sparse data; defaults to the largest index.
    #[arg(long)]
    pub n_features: Option<usize>,
    /// Comma-separated cost weights.
    #[arg(long)]
    pub lambdas: Option<String>,
    /// "all" or a comma-separated subset of grf, grnf, subsup, supsub, modmod.
    #[arg(long)]
    pub methods: Option<String>,
    /// modular or partition_sqrt.
    #[arg(long)]
    pub cost: Option<String>,
    /// Blocks JSON for partition_sqrt: {"blocks": [[1, 2], [3]], "weights": [...]}.
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    /// Smoothing pseudo-count.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Writes <OUT>.csv and <OUT>.json; the CSV goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatselConfig {
    data: Option<PathBuf>,
    format: Option<String>,
    n_features: Option<usize>,
    lambdas: Option<String>,
    methods: Option<String>,
    cost: Option<String>,
    blocks: Option<PathBuf>,
    alpha: Option<f64>,
    folds: Option<usize>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    max_iters: Option<usize>,
    out: Option<PathBuf>,
}

/// A pair of submodular functions on one ground set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub f: FunctionSpec,
    pub g: FunctionSpec,
}

impl InstanceFile {
    /// Builds both functions. Parts not submodular by construction are
    /// checked exhaustively when `n ≤ 16` and trusted above that.
    pub fn build(&self) -> crate::Result<DsInstance> {
        let part = |name: &str, spec: &FunctionSpec| -> crate::Result<Oracle> {
            let func = build_function(spec)?;
            if !spec.is_provably_submodular()
                && func.n() <= SUBMODULAR_CHECK_LIMIT
                && !check_submodular(&func.detached())?
            {
                return Err(Error::Domain(format!("{name} is not submodular")));
            }
            Ok(func)
        };
        DsInstance::new(part("f", &self.f)?, part("g", &self.g)?)
    }
}

/// One row of feature-selection output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub lambda: f64,
    pub method: Method,
    /// 1-based.
    pub selected_features: Vec<usize>,
    pub objective: f64,
    pub accuracy: f64,
    pub cost: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_flag<T: std::str::FromStr<Err = String>>(value: Option<String>, default: T) -> Outcome<T> {
    value.map_or(Ok(default), |s| s.parse().map_err(usage))
}

/// `none`, `card_le=K`, `card_eq=K`, or `@file.json` holding a constraint spec.
pub fn parse_constraint(arg: &str, n: usize) -> crate::Result<Constraint> {
    let spec = if let Some(path) = arg.strip_prefix('@') {
        serde_json::from_str::<ConstraintSpec>(&fs::read_to_string(path)?)?
    } else if arg == "none" {
        ConstraintSpec::None
    } else {
        let (kind, k) = arg
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad constraint {arg:?}")))?;
        let k: usize = k
            .parse()
            .map_err(|_| Error::Parse(format!("bad constraint size {k:?}")))?;
        match kind {
            "card_le" => ConstraintSpec::CardinalityLe { k },
            "card_eq" => ConstraintSpec::CardinalityEq { k },
            _ => {
                return Err(Error::Parse(format!(
                    "unknown constraint {kind:?} (none, card_le, card_eq, @file)"
                )))
            }
        }
    };
    let c = spec.into_constraint(n)?;
    c.validate(n)?;
    Ok(c)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Optimize(a) => optimize(a, out),
        Command::Certify(a) => certify(a, out),
        Command::Decompose(a) => decompose(a, out),
        Command::Featsel(a) => featsel(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn optimize(a: OptimizeArgs, out: &mut dyn Write) -> Outcome<()> {
    let cfg: OptimizeConfig = a
        .config
        .as_deref()
        .map_or(Ok(OptimizeConfig::default()), read_json)?;
    let instance_path = a
        .instance
        .or(cfg.instance)
        .ok_or_else(|| usage("--instance is required"))?;
    let algo: Algorithm = parse_flag(a.algo.or(cfg.algo), Algorithm::ModMod)?;
    let opts = SolverOptions {
        epsilon: a.epsilon.or(cfg.epsilon).unwrap_or(0.0),
        max_iters: a.max_iters.or(cfg.max_iters).unwrap_or(1000),
        heuristic: parse_flag(
            a.heuristic.or(cfg.heuristic),
            PermutationHeuristic::default(),
        )?,
        ub_strategy: parse_flag(
            a.ub_strategy.or(cfg.ub_strategy),
            UpperBoundStrategy::default(),
        )?,
        seed: a.seed.or(cfg.seed).unwrap_or(0),
        record_time: a.timing || cfg.timing.unwrap_or(false),
        ..SolverOptions::default()
    };
    if opts.epsilon.is_nan() || opts.epsilon < 0.0 {
        return Err(usage(format!(
            "--epsilon must be >= 0, got {}",
            opts.epsilon
        )));
    }
    let constraint_arg = a.constraint.or(cfg.constraint);
    if algo == Algorithm::SubSup && constraint_arg.as_deref().is_some_and(|c| c != "none") {
        return Err(usage(
            "subsup does not support constraints; use supsub or modmod",
        ));
    }
    let file: InstanceFile = read_json(&instance_path)?;
    let mut inst = file.build().map_err(usage)?;
    if a.memoize || cfg.memoize.unwrap_or(false) {
        inst = DsInstance {
            f: inst.f.memoized(),
            g: inst.g.memoized(),
        };
    }
    let constraint = constraint_arg
        .map_or(Ok(Constraint::None), |c| parse_constraint(&c, inst.n()))
        .map_err(usage)?;
    let out_stem = a.out.or(cfg.out);

    let trace = solve(&inst, algo, &opts, &constraint).map_err(runtime)?;
    if let Some(stem) = &out_stem {
        fs::write(stem.with_extension("json"), trace.to_json() + "\n").map_err(runtime)?;
        fs::write(stem.with_extension("csv"), trace.to_csv()).map_err(runtime)?;
    }
    let report = format!(
        "algorithm: {}\nseed: {}\nfinal set: {}\nvalue: {:.6}\niterations: {}\noracle calls: {}\ntermination: {}\nlocally optimal: {}\n",
        algo.name(),
        opts.seed,
        trace.final_set(),
        trace.final_value(),
        trace.accepted_steps(),
        trace.oracle_calls(),
        serde_json::to_value(trace.termination).map_err(runtime)?.as_str().unwrap_or_default(),
        trace.locally_optimal,
    );
    out.write_all(report.as_bytes()).map_err(runtime)
}

fn certify(a: CertifyArgs, out: &mut dyn Write) -> Outcome<()> {
    let file: InstanceFile = read_json(&a.instance)?;
    let inst = file.build().map_err(usage)?;
    let b = minima_lower_bounds(&inst.f, &inst.g, &SfmSolver::default()).map_err(runtime)?;
    let mut report = format!("bound1: {:.6}\nbound2: {:.6}\n", b.bound1, b.bound2);
    if inst.n() <= CERTIFY_BRUTE_LIMIT {
        let (set, min) = brute_force_minimize(&inst.v()).map_err(runtime)?;
        report += &format!(
            "brute-force minimum: {min:.6} at {set}\ngap1: {:.6}\ngap2: {:.6}\n",
            min - b.bound1,
            min - b.bound2
        );
    } else {
        report += &format!(
            "brute-force minimum: skipped (n = {} > {CERTIFY_BRUTE_LIMIT})\n",
            inst.n()
        );
    }
    out.write_all(report.as_bytes()).map_err(runtime)
}

fn decompose(a: DecomposeArgs, out: &mut dyn Write) -> Outcome<()> {
    let spec: FunctionSpec = read_json(&a.function)?;
    let v = build_function(&spec).map_err(usage)?;
    let d = ds_decompose(&v, a.alpha_lb).map_err(runtime)?;
    let (f, g) = d.to_specs(&v).map_err(runtime)?;
    let json = serde_json::to_string_pretty(&InstanceFile { f, g }).map_err(runtime)?;
    let summary = format!(
        "alpha: {:.6}\nbeta: {:.6}\nscale: {:.6}\n",
        d.alpha, d.beta, d.scale
    );
    match a.out {
        Some(path) => {
            fs::write(&path, json + "\n").map_err(runtime)?;
            out.write_all(summary.as_bytes()).map_err(runtime)
        }
        None => writeln!(out, "{json}").map_err(runtime),
    }
}

fn featsel(a: FeatselArgs, out: &mut dyn Write) -> Outcome<()> {
    let cfg: FeatselConfig = a
        .config
        .as_deref()
        .map_or(Ok(FeatselConfig::default()), read_json)?;
    let data = a
        .data
        .or(cfg.data)
        .ok_or_else(|| usage("--data is required"))?;
    let format: DataFormat = parse_flag(a.format.or(cfg.format), DataFormat::Sparse)?;
    let lambdas: Vec<f64> = a
        .lambdas
        .or(cfg.lambdas)
        .unwrap_or_else(|| "0.01".into())
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad lambda {s:?}")))
        })
        .collect::<Outcome<_>>()?;
    if let Some(l) = lambdas.iter().find(|l| l.is_nan() || **l < 0.0) {
        return Err(usage(format!("lambdas must be >= 0, got {l}")));
    }
    let methods = Method::parse_list(&a.methods.or(cfg.methods).unwrap_or_else(|| "all".into()))
        .map_err(usage)?;
    let alpha = a.alpha.or(cfg.alpha).unwrap_or(1.0);
    let folds = a.folds.or(cfg.folds).unwrap_or(10);
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let opts = SolverOptions {
        epsilon: a.epsilon.or(cfg.epsilon).unwrap_or(0.0),
        max_iters: a.max_iters.or(cfg.max_iters).unwrap_or(1000),
        seed,
        ..SolverOptions::default()
    };
    let ds = Arc::new(load_dataset(
        &data,
        format,
        a.n_features.or(cfg.n_features),
    )?);
    let n = ds.features();
    let cost = match a.cost.or(cfg.cost).as_deref().unwrap_or("modular") {
        "modular" => CostModel::modular(0.0),
        "partition_sqrt" => {
            let path = a
                .blocks
                .or(cfg.blocks)
                .ok_or_else(|| usage("--cost partition_sqrt needs --blocks"))?;
            let spec: BlocksSpec = read_json(&path)?;
            CostModel::from_blocks_spec(n, &spec, 0.0).map_err(usage)?
        }
        other => {
            return Err(usage(format!(
                "unknown cost {other:?} (modular, partition_sqrt)"
            )))
        }
    };
    if folds < 2 || folds > ds.rows() {
        return Err(usage(format!("--folds must be in 2..={}", ds.rows())));
    }
    let out_stem = a.out.or(cfg.out);

    let results =
        run_featsel(&ds, &cost, &lambdas, &methods, alpha, folds, &opts).map_err(runtime)?;
    let mut csv = String::from("lambda,method,selected,objective,cost,accuracy\n");
    for r in &results {
        csv += &format!(
            "{},{},{},{:.6},{:.6},{:.6}\n",
            r.lambda,
            r.method.name(),
            r.selected_features.len(),
            r.objective,
            r.cost,
            r.accuracy
        );
    }
    match out_stem {
        Some(stem) => {
            fs::write(stem.with_extension("csv"), &csv).map_err(runtime)?;
            let json = serde_json::to_string_pretty(&results).map_err(runtime)?;
            fs::write(stem.with_extension("json"), json + "\n").map_err(runtime)?;
            writeln!(out, "seed: {seed}\nresults: {}", results.len()).map_err(runtime)
        }
        None => write!(out, "# seed: {seed}\n{csv}").map_err(runtime),
    }
}

fn load_dataset(path: &Path, format: DataFormat, n_features: Option<usize>) -> Outcome<Dataset> {
    let loaded = match (format, n_features) {
        (DataFormat::Sparse, Some(n)) => {
            let text =
                fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            parse_sparse(&text, Some(n))
        }
        _ => parse_sparse_dataset(path, format),
    };
    loaded.map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Every `(λ, method)` pair, in that order. Objectives are the joint
/// (non-factored) `v`, whichever objective the method optimized.
pub fn run_featsel(
    ds: &Arc<Dataset>,
    cost: &CostModel,
    lambdas: &[f64],
    methods: &[Method],
    alpha: f64,
    folds: usize,
    opts: &SolverOptions,
) -> crate::Result<Vec<SelectionResult>> {
    let jobs: Vec<(f64, Method)> = lambdas
        .iter()
        .flat_map(|&l| methods.iter().map(move |&m| (l, m)))
        .collect();
    jobs.into_par_iter()
        .map(|(lambda, method)| {
            let cost = cost.with_lambda(lambda);
            let set = select(ds.clone(), &cost, alpha, method, opts)?;
            let obj = build_objective(ds.clone(), cost, alpha, MiMode::NonFactored)?;
            Ok(SelectionResult {
                lambda,
                method,
                selected_features: set.to_one_based(),
                objective: obj.value(&set),
                accuracy: naive_bayes_cv(ds, &set, folds, alpha, opts.seed)?,
                cost: obj.cost(&set),
            })
        })
        .collect()
}

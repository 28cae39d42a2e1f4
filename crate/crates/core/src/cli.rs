//! The `ising-robust` command-line front end.
//!
//! Each subcommand is a thin adapter over the library. Exit status is 0 on
//! success, 1 on domain errors (the error's stable name is printed on stderr)
//! and 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::contamination::{contaminate, ContaminationScheme};
use crate::error::{Error, Result};
use crate::estimator::{estimate_lambda_grid, EstimatorSettings, OutcomeKind, RootPolicy};
use crate::experiments::{
    predict_leave_one_out, predict_train_test, run_experiment_with_threads, ExperimentSpec,
};
use crate::graphs::{
    build_ensemble, read_edge_list, EnsembleKind, EnsembleSpec, InteractionMatrix,
};
use crate::model::{read_sample_file, samples_to_csv, spins_to_string, SpinConfiguration};
use crate::robustness::{ges_curve, SearchBudget};
use crate::sampler::{gibbs_sample, GibbsSettings, InitKind};

/// Environment variable consulted when `--seed` is not given.
pub const SEED_ENV: &str = "ISING_ROBUST_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "ising-robust",
    version,
    about = "Robust estimation of the Ising coupling strength from one spin configuration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an interaction matrix and write it as an edge list.
    GenerateGraph(GenerateGraphArgs),
    /// Draw spin configurations with the Gibbs sampler.
    Sample(SampleArgs),
    /// Pin or flip a random fraction of the spins of a configuration.
    Contaminate(ContaminateArgs),
    /// Estimate beta for each lambda; prints a JSON array.
    Estimate(EstimateArgs),
    /// Gross error sensitivity for each lambda; prints CSV.
    Ges(GesArgs),
    /// Run a Monte-Carlo study from a JSON config; prints CSV.
    Experiment(ExperimentArgs),
    /// Leave-one-out prediction accuracy for each lambda; prints CSV.
    PredictLoo(PredictLooArgs),
    /// Train/test prediction accuracy for each lambda; prints CSV.
    PredictSplit(PredictSplitArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Path1d,
    Lattice2d,
    ErdosRenyi,
    Sbm,
    Sk,
    Hopfield,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliRootPolicy {
    GlobalObjectiveMin,
    FirstRoot,
}

impl From<CliRootPolicy> for RootPolicy {
    fn from(p: CliRootPolicy) -> Self {
        match p {
            CliRootPolicy::GlobalObjectiveMin => RootPolicy::GlobalObjectiveMin,
            CliRootPolicy::FirstRoot => RootPolicy::FirstRoot,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliInit {
    AllPlus,
    AllMinus,
    UniformRandom,
}

impl From<CliInit> for InitKind {
    fn from(i: CliInit) -> Self {
        match i {
            CliInit::AllPlus => InitKind::AllPlus,
            CliInit::AllMinus => InitKind::AllMinus,
            CliInit::UniformRandom => InitKind::UniformRandom,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Random seed; falls back to $ISING_ROBUST_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenerateGraphArgs {
    /// Graph family.
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    /// Number of nodes (a perfect square for lattice2d).
    #[arg(long)]
    pub n: usize,
    /// Edge probability for erdos-renyi.
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated block sizes for sbm.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Within-block edge probability for sbm.
    #[arg(long)]
    pub p_within: Option<f64>,
    /// Between-block edge probability for sbm.
    #[arg(long)]
    pub q_between: Option<f64>,
    /// Number of stored patterns for hopfield.
    #[arg(long)]
    pub m_attractors: Option<usize>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Inverse temperature.
    #[arg(long)]
    pub beta: f64,
    /// Number of configurations. One is written as a spin file, more as CSV rows.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Sweeps discarded before the first draw.
    #[arg(long, default_value_t = 200)]
    pub burn_in: usize,
    /// Sweeps between draws.
    #[arg(long, default_value_t = 5)]
    pub thin: usize,
    /// Initial state of the chain.
    #[arg(long, value_enum, default_value = "uniform-random")]
    pub init: CliInit,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ContaminateArgs {
    /// Spin file (or single-row CSV).
    #[arg(long)]
    pub sample: PathBuf,
    /// Scheme as kind:fraction, e.g. pin_plus:0.2 or flip:0.05.
    #[arg(long)]
    pub contaminate: String,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Lambda values: a comma list (0,0.5,1) or a range start:stop:step.
    #[arg(long, default_value = "0")]
    pub lambda: String,
    /// Upper end of the search interval for beta.
    #[arg(long, default_value_t = 10.0)]
    pub beta_max: f64,
    /// Points of the bracketing scan.
    #[arg(long, default_value_t = 512)]
    pub grid_points: usize,
    /// Which root to report when there are several.
    #[arg(long, value_enum, default_value = "global-objective-min")]
    pub root_policy: CliRootPolicy,
}

impl SolverArgs {
    fn settings(&self) -> EstimatorSettings {
        EstimatorSettings {
            beta_max: self.beta_max,
            grid_points: self.grid_points,
            root_policy: self.root_policy.into(),
            ..EstimatorSettings::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Spin file (or single-row CSV).
    #[arg(long)]
    pub sample: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct GesArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Observed spin file (or single-row CSV).
    #[arg(long)]
    pub sample: PathBuf,
    /// Inverse temperature at which the influence is evaluated.
    #[arg(long)]
    pub beta: f64,
    /// Lambda values: a comma list or a range start:stop:step.
    #[arg(long, default_value = "0")]
    pub lambda: String,
    /// Random restarts of the local search used above 20 nodes.
    #[arg(long, default_value_t = 50)]
    pub budget: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads; all available cores if omitted.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overrides the config's base_seed.
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct PredictLooArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Spin file (or single-row CSV).
    #[arg(long)]
    pub sample: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct PredictSplitArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Training configurations (CSV, one per row).
    #[arg(long)]
    pub train: PathBuf,
    /// Test configurations (CSV, one per row).
    #[arg(long)]
    pub test: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArg,
}

/// Parses a lambda list: `0,0.5,1` or `start:stop:step` (inclusive).
pub fn parse_lambdas(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidSpec(format!("cannot parse lambda list {text:?}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    let lambdas = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0 && stop >= start) {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|k| start + k as f64 * step).collect()
        }
        [list] => list.split(',').map(number).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(bad());
    }
    Ok(lambdas)
}

fn resolve_seed(seed: &SeedArg) -> Result<u64> {
    if let Some(s) = seed.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidSpec(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer"))
        }),
        Err(_) => Ok(0),
    }
}

fn emit(out: &OutArg, text: &str) -> Result<()> {
    debug_assert!(text.ends_with('\n'));
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn read_one_sample(path: &Path) -> Result<SpinConfiguration> {
    let mut samples = read_sample_file(path)?;
    if samples.len() != 1 {
        return Err(Error::InvalidSpec(format!(
            "{}: expected one configuration, found {}",
            path.display(),
            samples.len()
        )));
    }
    Ok(samples.pop().expect("length checked"))
}

fn required<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidSpec(format!("--{flag} is required for --kind {kind}")))
}

fn generate_graph(a: &GenerateGraphArgs) -> Result<()> {
    let kind = match a.kind {
        GraphKind::Path1d => EnsembleKind::PathLattice1d,
        GraphKind::Lattice2d => EnsembleKind::Lattice2d,
        GraphKind::ErdosRenyi => EnsembleKind::ErdosRenyi {
            p: required(a.p, "p", "erdos-renyi")?,
        },
        GraphKind::Sbm => EnsembleKind::Sbm {
            sizes: a.sizes.clone(),
            p_within: required(a.p_within, "p-within", "sbm")?,
            q_between: required(a.q_between, "q-between", "sbm")?,
        },
        GraphKind::Sk => EnsembleKind::SherringtonKirkpatrick,
        GraphKind::Hopfield => EnsembleKind::Hopfield {
            m_attractors: required(a.m_attractors, "m-attractors", "hopfield")?,
        },
    };
    let j = build_ensemble(&EnsembleSpec::new(kind, a.n, resolve_seed(&a.seed)?))?;
    emit(&a.out, &j.to_edge_list_string())
}

fn sample(a: &SampleArgs) -> Result<()> {
    let j = read_edge_list(&a.graph)?;
    if a.k == 0 || a.thin == 0 {
        return Err(Error::InvalidSpec(
            "--k and --thin must be at least 1".into(),
        ));
    }
    let settings = GibbsSettings {
        burn_in_sweeps: a.burn_in,
        thin_sweeps: a.thin,
        init: a.init.into(),
        seed: resolve_seed(&a.seed)?,
    };
    let draws = gibbs_sample(&j, a.beta, a.k, &settings)?;
    let text = if a.k == 1 {
        spins_to_string(&draws[0])
    } else {
        samples_to_csv(&draws)
    };
    emit(&a.out, &text)
}

fn contaminate_cmd(a: &ContaminateArgs) -> Result<()> {
    let x = read_one_sample(&a.sample)?;
    let scheme = ContaminationScheme {
        seed: resolve_seed(&a.seed)?,
        ..a.contaminate.parse()?
    };
    emit(&a.out, &spins_to_string(&contaminate(&x, &scheme)?))
}

#[derive(Serialize)]
struct EstimateRecord {
    lambda: f64,
    /// `null` when degenerate.
    beta_hat: f64,
    kind: OutcomeKind,
    score: f64,
    objective: f64,
    iterations: usize,
}

fn load_graph_for(graph: &Path, x: &SpinConfiguration) -> Result<InteractionMatrix> {
    let j = read_edge_list(graph)?;
    if j.n() < x.len() {
        // trailing isolated nodes are invisible in an edge list without a header
        let edges = j.edges().to_vec();
        return InteractionMatrix::from_edges(x.len(), edges, j.scaling());
    }
    Ok(j)
}

fn estimate_cmd(a: &EstimateArgs) -> Result<()> {
    let x = read_one_sample(&a.sample)?;
    let j = load_graph_for(&a.graph, &x)?;
    let lambdas = parse_lambdas(&a.solver.lambda)?;
    let records: Vec<EstimateRecord> =
        estimate_lambda_grid(&j, &x, &lambdas, &a.solver.settings())?
            .into_iter()
            .map(|(lambda, o)| EstimateRecord {
                lambda,
                beta_hat: o.beta_hat,
                kind: o.kind,
                score: o.score_at_solution,
                objective: o.objective_at_solution,
                iterations: o.iterations,
            })
            .collect();
    let mut text = serde_json::to_string_pretty(&records).expect("records serialize");
    text.push('\n');
    emit(&a.out, &text)
}

fn ges_cmd(a: &GesArgs) -> Result<()> {
    let x = read_one_sample(&a.sample)?;
    let j = load_graph_for(&a.graph, &x)?;
    let lambdas = parse_lambdas(&a.lambda)?;
    let budget = SearchBudget {
        restarts: a.budget,
        seed: resolve_seed(&a.seed)?,
        ..SearchBudget::default()
    };
    let mut text = String::from("lambda,ges,method\n");
    for (lambda, g) in ges_curve(&j, &x, a.beta, &lambdas, &budget)? {
        text.push_str(&format!("{lambda},{},{}\n", g.ges, g.method.as_str()));
    }
    emit(&a.out, &text)
}

fn experiment_cmd(a: &ExperimentArgs) -> Result<()> {
    let mut spec = ExperimentSpec::from_json_file(&a.config)?;
    if a.seed.seed.is_some() || std::env::var_os(SEED_ENV).is_some() {
        spec.base_seed = resolve_seed(&a.seed)?;
    }
    if a.threads == Some(0) {
        return Err(Error::InvalidSpec("--threads must be at least 1".into()));
    }
    emit(
        &a.out,
        &run_experiment_with_threads(&spec, a.threads)?.to_csv(),
    )
}

fn predict_loo_cmd(a: &PredictLooArgs) -> Result<()> {
    let x = read_one_sample(&a.sample)?;
    let j = load_graph_for(&a.graph, &x)?;
    let lambdas = parse_lambdas(&a.solver.lambda)?;
    let mut text = String::from("lambda,accuracy,fallback_nodes\n");
    for r in predict_leave_one_out(&j, &x, &lambdas, &a.solver.settings())? {
        text.push_str(&format!(
            "{},{},{}\n",
            r.lambda, r.accuracy, r.fallback_nodes
        ));
    }
    emit(&a.out, &text)
}

fn predict_split_cmd(a: &PredictSplitArgs) -> Result<()> {
    let train = read_sample_file(&a.train)?;
    let test = read_sample_file(&a.test)?;
    let j = read_edge_list(&a.graph)?;
    let lambdas = parse_lambdas(&a.solver.lambda)?;
    let mut text = String::from("lambda,beta_bar,accuracy,n_training_used,n_training_excluded\n");
    for r in predict_train_test(&j, &train, &test, &lambdas, &a.solver.settings())? {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.lambda, r.beta_bar, r.accuracy, r.n_training_used, r.n_training_excluded
        ));
    }
    emit(&a.out, &text)
}

/// Executes a parsed command. Everything except `experiment` runs on a
/// single thread.
pub fn dispatch(cli: &Cli) -> Result<()> {
    if let Command::Experiment(a) = &cli.command {
        return experiment_cmd(a);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::GenerateGraph(a) => generate_graph(a),
        Command::Sample(a) => sample(a),
        Command::Contaminate(a) => contaminate_cmd(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Ges(a) => ges_cmd(a),
        Command::PredictLoo(a) => predict_loo_cmd(a),
        Command::PredictSplit(a) => predict_split_cmd(a),
        Command::Experiment(_) => unreachable!("handled above"),
    })
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            1
        }
    }
}

//! Monte-Carlo studies of bias and MSE against `lambda`, and the two
//! prediction protocols.
//!
//! Every replicate draws its graph (for random ensembles), spins and
//! contamination indices from streams derived from `(base_seed, replicate)`.
//! Replicates run in parallel and are reduced in index order, so a report is
//! bit-identical whatever the thread count.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contamination::{self, ContaminationKind, ContaminationScheme};
use crate::error::{Error, Result};
use crate::estimator::{
    estimate_lambda_grid_from, EstimateOutcome, EstimatorSettings, OutcomeKind, ScoreData,
};
use crate::graphs::{build_ensemble, EnsembleSpec, InteractionMatrix};
use crate::model::{conditional_prob_plus, local_fields, SpinConfiguration};
use crate::rng::{self, domain};
use crate::sampler::{gibbs_sample, GibbsSettings};

/// A full study, as read from a JSON config.
///
/// The `seed` fields of `gibbs` and of each contamination scheme are ignored:
/// all streams derive from `base_seed`. `ensemble.seed` is used only when the
/// graph is fixed across replicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub ensemble: EnsembleSpec,
    pub true_beta: f64,
    pub contamination: Vec<ContaminationScheme>,
    pub lambdas: Vec<f64>,
    pub replicates: usize,
    #[serde(default)]
    pub gibbs: GibbsSettings,
    #[serde(default)]
    pub estimator: EstimatorSettings,
    #[serde(default)]
    pub base_seed: u64,
    /// Reuse one graph for every replicate. Defaults to `true` for
    /// deterministic ensembles and `false` for random ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fix_graph: Option<bool>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if !(self.true_beta > 0.0 && self.true_beta.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "true_beta must be positive, got {}",
                self.true_beta
            )));
        }
        if self.contamination.is_empty() {
            return Err(Error::InvalidSpec("contamination list is empty".into()));
        }
        if self.lambdas.is_empty() {
            return Err(Error::InvalidSpec("lambda list is empty".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidSpec("replicates must be at least 1".into()));
        }
        for c in &self.contamination {
            c.validate()?;
        }
        for &lambda in &self.lambdas {
            EstimatorSettings {
                lambda,
                ..self.estimator
            }
            .validate()?;
        }
        Ok(())
    }

    pub fn fixes_graph(&self) -> bool {
        self.fix_graph.unwrap_or(!self.ensemble.kind.is_random())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Summary of one `(contamination, lambda)` cell over all replicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub lambda: f64,
    pub contamination_kind: ContaminationKind,
    pub contamination_fraction: f64,
    /// Over non-degenerate replicates; NaN if there are none.
    pub mse: f64,
    pub bias: f64,
    pub n_interior: usize,
    pub n_left_boundary: usize,
    pub n_right_divergent: usize,
    pub n_degenerate: usize,
    pub replicates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: &str = "lambda,contamination_kind,contamination_fraction,mse,bias,n_interior,n_left_boundary,n_right_divergent,n_degenerate,replicates";

impl ExperimentReport {
    /// Row for the given scheme and `lambda`, compared exactly.
    pub fn row(&self, kind: ContaminationKind, fraction: f64, lambda: f64) -> Option<&ReportRow> {
        self.rows.iter().find(|r| {
            r.contamination_kind == kind
                && r.contamination_fraction == fraction
                && r.lambda == lambda
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.lambda,
                r.contamination_kind.as_str(),
                r.contamination_fraction,
                r.mse,
                r.bias,
                r.n_interior,
                r.n_left_boundary,
                r.n_right_divergent,
                r.n_degenerate,
                r.replicates
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// The estimates of one replicate, indexed `[scheme][lambda]`.
pub type ReplicateOutcomes = Vec<Vec<EstimateOutcome>>;

/// Runs replicate `r` of `spec` on its own streams.
pub fn run_replicate(
    spec: &ExperimentSpec,
    fixed_graph: Option<&InteractionMatrix>,
    r: usize,
) -> Result<ReplicateOutcomes> {
    let r64 = r as u64;
    let fresh;
    let j = match fixed_graph {
        Some(j) => j,
        None => {
            let ensemble = EnsembleSpec {
                seed: rng::derive_seed(spec.base_seed, domain::GRAPH, r64),
                ..spec.ensemble.clone()
            };
            fresh = build_ensemble(&ensemble)?;
            &fresh
        }
    };
    let gibbs = GibbsSettings {
        seed: rng::derive_seed(spec.base_seed, domain::SPINS, r64),
        ..spec.gibbs
    };
    let x = gibbs_sample(j, spec.true_beta, 1, &gibbs)?
        .pop()
        .expect("one draw requested");
    let contamination_seed = rng::derive_seed(spec.base_seed, domain::CONTAMINATION, r64);
    spec.contamination
        .iter()
        .enumerate()
        .map(|(c, scheme)| {
            let scheme = ContaminationScheme {
                seed: rng::derive_seed(contamination_seed, domain::CONTAMINATION, c as u64),
                ..*scheme
            };
            let y = contamination::contaminate(&x, &scheme)?;
            let data = ScoreData::new(j, &y)?;
            Ok(
                estimate_lambda_grid_from(&data, &spec.lambdas, &spec.estimator)?
                    .into_iter()
                    .map(|(_, o)| o)
                    .collect(),
            )
        })
        .collect()
}

/// Runs every replicate on the current rayon pool and returns their raw
/// estimates in replicate order.
pub fn run_replicates(spec: &ExperimentSpec) -> Result<Vec<ReplicateOutcomes>> {
    spec.validate()?;
    let fixed = if spec.fixes_graph() {
        Some(build_ensemble(&spec.ensemble)?)
    } else {
        None
    };
    (0..spec.replicates)
        .into_par_iter()
        .map(|r| {
            run_replicate(spec, fixed.as_ref(), r).map_err(|e| Error::Replicate {
                replicate: r,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let outcomes = run_replicates(spec)?;
    Ok(summarize(spec, &outcomes))
}

/// Runs on a dedicated pool of `threads` workers (all available cores if
/// `None`).
pub fn run_experiment_with_threads(
    spec: &ExperimentSpec,
    threads: Option<usize>,
) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start thread pool: {e}")))?;
    pool.install(|| run_experiment(spec))
}

/// Reduces raw estimates to report rows, serially and in replicate order.
pub fn summarize(spec: &ExperimentSpec, outcomes: &[ReplicateOutcomes]) -> ExperimentReport {
    let beta = spec.true_beta;
    let mut rows = Vec::with_capacity(spec.contamination.len() * spec.lambdas.len());
    for (c, scheme) in spec.contamination.iter().enumerate() {
        for (l, &lambda) in spec.lambdas.iter().enumerate() {
            let mut counts = [0usize; 4];
            let (mut sum_err, mut sum_sq, mut used) = (0.0, 0.0, 0usize);
            for replicate in outcomes {
                let o = &replicate[c][l];
                counts[kind_index(o.kind)] += 1;
                if o.is_finite() {
                    let err = o.beta_hat - beta;
                    sum_err += err;
                    sum_sq += err * err;
                    used += 1;
                }
            }
            let (mse, bias) = if used == 0 {
                (f64::NAN, f64::NAN)
            } else {
                (sum_sq / used as f64, sum_err / used as f64)
            };
            rows.push(ReportRow {
                lambda,
                contamination_kind: scheme.kind,
                contamination_fraction: scheme.fraction,
                mse,
                bias,
                n_interior: counts[0],
                n_left_boundary: counts[1],
                n_right_divergent: counts[2],
                n_degenerate: counts[3],
                replicates: outcomes.len(),
            });
        }
    }
    ExperimentReport { rows }
}

fn kind_index(kind: OutcomeKind) -> usize {
    match kind {
        OutcomeKind::InteriorRoot => 0,
        OutcomeKind::LeftBoundary => 1,
        OutcomeKind::RightDivergent => 2,
        OutcomeKind::Degenerate => 3,
    }
}

/// Predicted spin from the conditional law; ties go to `+1`.
pub fn predict_spin(beta: f64, m: f64) -> i8 {
    if conditional_prob_plus(beta, m) >= 0.5 {
        1
    } else {
        -1
    }
}

/// Usable beta from an outcome: degenerate fits carry no information, and any
/// beta gives the same tie prediction when every field is zero.
fn usable_beta(o: &EstimateOutcome) -> Option<f64> {
    o.is_finite().then_some(o.beta_hat)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LooAccuracy {
    pub lambda: f64,
    pub accuracy: f64,
    /// Nodes whose own fit was degenerate and used the full-sample estimate.
    pub fallback_nodes: usize,
}

/// Leave-one-out prediction: for every node, fit on the graph and sample with
/// that node removed, then predict its spin from its full row of couplings.
pub fn predict_leave_one_out(
    j: &InteractionMatrix,
    x: &SpinConfiguration,
    lambdas: &[f64],
    settings: &EstimatorSettings,
) -> Result<Vec<LooAccuracy>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidSpec(
            "leave-one-out needs at least 2 nodes".into(),
        ));
    }
    let fields = local_fields(j, x)?;
    let full: Vec<f64> = estimate_lambda_grid_from(
        &ScoreData::from_fields(&fields, x.spins()),
        lambdas,
        settings,
    )?
    .iter()
    .map(|(_, o)| usable_beta(o).unwrap_or(0.0))
    .collect();

    // per node: (correct?, fell back?) for each lambda
    let per_node: Vec<Vec<(bool, bool)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = x.get(i);
            let mut sub_fields = fields.clone();
            for (k, w) in j.neighbors(i) {
                sub_fields[k] -= w * xi;
            }
            sub_fields.remove(i);
            let mut sub_spins = x.spins().to_vec();
            sub_spins.remove(i);
            let data = ScoreData::from_fields(&sub_fields, &sub_spins);
            let fits = estimate_lambda_grid_from(&data, lambdas, settings)?;
            Ok(fits
                .iter()
                .zip(&full)
                .map(|((_, o), &fallback)| {
                    let (beta, fell_back) = match usable_beta(o) {
                        Some(b) => (b, false),
                        None => (fallback, true),
                    };
                    (predict_spin(beta, fields[i]) == x.spins()[i], fell_back)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(l, &lambda)| {
            let correct = per_node.iter().filter(|v| v[l].0).count();
            LooAccuracy {
                lambda,
                accuracy: correct as f64 / n as f64,
                fallback_nodes: per_node.iter().filter(|v| v[l].1).count(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainTestAccuracy {
    pub lambda: f64,
    /// Mean of the interior training estimates.
    pub beta_bar: f64,
    pub accuracy: f64,
    pub n_training_used: usize,
    pub n_training_excluded: usize,
}

/// Fits every training sample, averages the interior estimates, and predicts
/// every node of every test sample from its conditional law.
pub fn predict_train_test(
    j: &InteractionMatrix,
    train: &[SpinConfiguration],
    test: &[SpinConfiguration],
    lambdas: &[f64],
    settings: &EstimatorSettings,
) -> Result<Vec<TrainTestAccuracy>> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::InvalidSpec(
            "training and test sets must be nonempty".into(),
        ));
    }
    let fits: Vec<Vec<EstimateOutcome>> = train
        .par_iter()
        .map(|x| {
            let data = ScoreData::new(j, x)?;
            Ok(estimate_lambda_grid_from(&data, lambdas, settings)?
                .into_iter()
                .map(|(_, o)| o)
                .collect())
        })
        .collect::<Result<_>>()?;
    let test_fields: Vec<Vec<f64>> = test
        .iter()
        .map(|x| local_fields(j, x))
        .collect::<Result<_>>()?;
    let total_nodes: usize = test.iter().map(|x| x.len()).sum();

    lambdas
        .iter()
        .enumerate()
        .map(|(l, &lambda)| {
            let interior: Vec<f64> = fits
                .iter()
                .map(|f| &f[l])
                .filter(|o| o.kind == OutcomeKind::InteriorRoot)
                .map(|o| o.beta_hat)
                .collect();
            if interior.is_empty() {
                return Err(Error::NoUsableTrainingFits);
            }
            let beta_bar = interior.iter().sum::<f64>() / interior.len() as f64;
            let correct: usize = test
                .iter()
                .zip(&test_fields)
                .map(|(x, m)| {
                    x.spins()
                        .iter()
                        .zip(m)
                        .filter(|&(&s, &mi)| predict_spin(beta_bar, mi) == s)
                        .count()
                })
                .sum();
            Ok(TrainTestAccuracy {
                lambda,
                beta_bar,
                accuracy: correct as f64 / total_nodes as f64,
                n_training_used: interior.len(),
                n_training_excluded: train.len() - interior.len(),
            })
        })
        .collect()
}

//! Minimum density power divergence estimation of the coupling strength.
//!
//! With `lambda = 0` everything reduces to maximum pseudolikelihood; for
//! `lambda > 0` nodes whose observed spin disagrees strongly with their local
//! field are downweighted by [`dpd_weight`].

mod data;
mod weight;

use serde::{Deserialize, Serialize};

pub use data::{ScoreData, ScoreDerivative};
pub use weight::{dpd_weight, dpd_weight_dbeta, weight_at, weight_elasticity_at, weight_slope_at};

use crate::error::{Error, Result};
use crate::graphs::InteractionMatrix;
use crate::model::SpinConfiguration;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootPolicy {
    /// Among all roots where the score crosses from positive to negative,
    /// keep the one with the smallest objective.
    #[default]
    GlobalObjectiveMin,
    /// Keep the smallest such root.
    FirstRoot,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorSettings {
    pub lambda: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Points of the scan used to bracket roots.
    pub grid_points: usize,
    /// Convergence threshold on `|S|`.
    pub root_tol: f64,
    /// Convergence threshold on the change in beta.
    pub step_tol: f64,
    pub root_policy: RootPolicy,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            beta_min: 0.0,
            beta_max: 10.0,
            grid_points: 512,
            root_tol: 1e-10,
            step_tol: 1e-8,
            root_policy: RootPolicy::GlobalObjectiveMin,
        }
    }
}

impl EstimatorSettings {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!(
                "lambda must be a finite non-negative number, got {}",
                self.lambda
            ));
        }
        if !(self.beta_min >= 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return bad(format!(
                "need 0 <= beta_min < beta_max, got [{}, {}]",
                self.beta_min, self.beta_max
            ));
        }
        if self.grid_points < 2 {
            return bad("grid_points must be at least 2".into());
        }
        if !(self.root_tol > 0.0 && self.step_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    /// The bracketing scan abscissae.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.beta_max - self.beta_min;
        let last = (self.grid_points - 1) as f64;
        (0..self.grid_points)
            .map(|k| self.beta_min + span * k as f64 / last)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    InteriorRoot,
    /// The score is non-positive at `beta_min` and never crosses downward.
    LeftBoundary,
    /// The score stays positive over the whole interval.
    RightDivergent,
    /// All local fields vanish; beta is not identifiable.
    Degenerate,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::InteriorRoot => "interior_root",
            OutcomeKind::LeftBoundary => "left_boundary",
            OutcomeKind::RightDivergent => "right_divergent",
            OutcomeKind::Degenerate => "degenerate",
        }
    }
}

/// The estimate and how it was reached. `beta_hat` is NaN when degenerate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutcome {
    pub beta_hat: f64,
    pub kind: OutcomeKind,
    pub score_at_solution: f64,
    pub objective_at_solution: f64,
    pub iterations: usize,
}

impl EstimateOutcome {
    /// Whether the estimate is a finite number usable in averages.
    pub fn is_finite(&self) -> bool {
        self.kind != OutcomeKind::Degenerate
    }
}

/// `(1/N) log L(beta)`, the mean log conditional likelihood.
pub fn log_pseudolikelihood(
    j: &InteractionMatrix,
    x: &SpinConfiguration,
    beta: f64,
) -> Result<f64> {
    Ok(ScoreData::new(j, x)?.log_pseudolikelihood(beta))
}

/// Kullback-Leibler divergence from the empirical to the model conditional
/// probability vectors. The entropy term of the empirical vector is zero for
/// binary observations, so this is exactly `-log_pseudolikelihood`.
pub fn kl_to_model(j: &InteractionMatrix, x: &SpinConfiguration, beta: f64) -> Result<f64> {
    Ok(-log_pseudolikelihood(j, x, beta)?)
}

pub fn dpd_objective(
    j: &InteractionMatrix,
    x: &SpinConfiguration,
    beta: f64,
    lambda: f64,
) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::LambdaZero);
    }
    Ok(ScoreData::new(j, x)?.dpd_objective(beta, lambda))
}

/// The estimating function `S(beta) = -(2N)^lambda / (1+lambda) * d/dbeta d_lambda`.
pub fn score(j: &InteractionMatrix, x: &SpinConfiguration, beta: f64, lambda: f64) -> Result<f64> {
    Ok(ScoreData::new(j, x)?.score(beta, lambda))
}

pub fn score_derivative_parts(
    j: &InteractionMatrix,
    x: &SpinConfiguration,
    beta: f64,
    lambda: f64,
) -> Result<ScoreDerivative> {
    Ok(ScoreData::new(j, x)?.score_derivative(beta, lambda))
}

/// The quantity the estimator minimizes: the divergence for `lambda > 0`, the
/// KL divergence (negative mean log pseudolikelihood) at `lambda = 0`.
pub fn objective(data: &ScoreData, beta: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        -data.log_pseudolikelihood(beta)
    } else {
        data.dpd_objective(beta, lambda)
    }
}

pub fn estimate(
    j: &InteractionMatrix,
    x: &SpinConfiguration,
    settings: &EstimatorSettings,
) -> Result<EstimateOutcome> {
    settings.validate()?;
    let data = ScoreData::new(j, x)?;
    Ok(solve(&data, settings, None, &mut |_| {}))
}

/// One estimate per `lambda`, each solve warm-started from the previous
/// interior root. The starting point only changes iteration counts.
pub fn estimate_lambda_grid(
    j: &InteractionMatrix,
    x: &SpinConfiguration,
    lambdas: &[f64],
    settings: &EstimatorSettings,
) -> Result<Vec<(f64, EstimateOutcome)>> {
    let data = ScoreData::new(j, x)?;
    estimate_lambda_grid_from(&data, lambdas, settings)
}

pub fn estimate_lambda_grid_from(
    data: &ScoreData,
    lambdas: &[f64],
    settings: &EstimatorSettings,
) -> Result<Vec<(f64, EstimateOutcome)>> {
    if lambdas.is_empty() {
        return Err(Error::InvalidSpec("lambda grid is empty".into()));
    }
    let mut warm = None;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let s = EstimatorSettings {
            lambda,
            ..*settings
        };
        s.validate()?;
        let outcome = solve(data, &s, warm, &mut |_| {});
        warm = (outcome.kind == OutcomeKind::InteriorRoot).then_some(outcome.beta_hat);
        out.push((lambda, outcome));
    }
    Ok(out)
}

/// Runs the solver, reporting every beta at which the score was evaluated.
pub fn estimate_traced(
    data: &ScoreData,
    settings: &EstimatorSettings,
    visit: &mut dyn FnMut(f64),
) -> Result<EstimateOutcome> {
    settings.validate()?;
    Ok(solve(data, settings, None, visit))
}

const MAX_REFINE_ITERATIONS: usize = 200;

/// Scans the score on the grid, refines every downward sign change and picks
/// one according to the root policy. Settings must already be validated.
pub fn solve(
    data: &ScoreData,
    settings: &EstimatorSettings,
    warm_start: Option<f64>,
    visit: &mut dyn FnMut(f64),
) -> EstimateOutcome {
    let lambda = settings.lambda;
    if data.is_degenerate() {
        return EstimateOutcome {
            beta_hat: f64::NAN,
            kind: OutcomeKind::Degenerate,
            score_at_solution: 0.0,
            objective_at_solution: objective(data, settings.beta_min, lambda),
            iterations: 0,
        };
    }
    let mut eval = |beta: f64| {
        visit(beta);
        data.score(beta, lambda)
    };
    let grid = settings.grid();
    let scores: Vec<f64> = grid.iter().map(|&b| eval(b)).collect();

    let brackets: Vec<(f64, f64)> = (0..grid.len() - 1)
        .filter(|&k| scores[k] > 0.0 && scores[k + 1] <= 0.0)
        .map(|k| (grid[k], grid[k + 1]))
        .collect();

    if brackets.is_empty() {
        let (beta_hat, kind, s) = if scores[0] <= 0.0 {
            (settings.beta_min, OutcomeKind::LeftBoundary, scores[0])
        } else {
            (
                settings.beta_max,
                OutcomeKind::RightDivergent,
                scores[grid.len() - 1],
            )
        };
        return EstimateOutcome {
            beta_hat,
            kind,
            score_at_solution: s,
            objective_at_solution: objective(data, beta_hat, lambda),
            iterations: 0,
        };
    }

    let candidates: &[(f64, f64)] = match settings.root_policy {
        RootPolicy::FirstRoot => &brackets[..1],
        RootPolicy::GlobalObjectiveMin => &brackets,
    };
    let mut best: Option<EstimateOutcome> = None;
    for &(lo, hi) in candidates {
        let start = warm_start.filter(|&w| w > lo && w < hi);
        let (root, s, iterations) = refine(data, lambda, lo, hi, start, settings, &mut eval);
        let outcome = EstimateOutcome {
            beta_hat: root,
            kind: OutcomeKind::InteriorRoot,
            score_at_solution: s,
            objective_at_solution: objective(data, root, lambda),
            iterations,
        };
        if best.is_none_or(|b| outcome.objective_at_solution < b.objective_at_solution) {
            best = Some(outcome);
        }
    }
    best.expect("at least one bracket")
}

/// Safeguarded Newton on `[lo, hi]` with `S(lo) > 0 >= S(hi)`. Newton steps
/// that leave the current bracket, or are taken where `S' >= 0`, are replaced
/// by bisection.
fn refine(
    data: &ScoreData,
    lambda: f64,
    mut lo: f64,
    mut hi: f64,
    start: Option<f64>,
    settings: &EstimatorSettings,
    eval: &mut dyn FnMut(f64) -> f64,
) -> (f64, f64, usize) {
    let mut x = start.unwrap_or(0.5 * (lo + hi));
    let mut s = eval(x);
    let mut iterations = 0;
    while iterations < MAX_REFINE_ITERATIONS {
        iterations += 1;
        if s.abs() <= settings.root_tol {
            break;
        }
        if s > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = data.score_derivative(x, lambda).total();
        let newton = x - s / slope;
        let next = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        s = eval(x);
        if step <= settings.step_tol {
            break;
        }
    }
    (x, s, iterations)
}

#[cfg(test)]
mod tests;

//! Influence function and gross error sensitivity (GES) of the estimators.
//!
//! The influence of a contaminating configuration `t` is
//! `-(sum_i Psi(t_i, beta)) / J_lambda(beta)`, where the denominator
//! `J_lambda = N S'_2` is evaluated at the observed configuration. The GES is
//! the largest absolute influence over all `2^N` contaminating points: exact by
//! enumeration for small graphs, a greedy lower bound otherwise.
//!
//! The per-coordinate contamination point is taken to be the joint point
//! itself; [`induced_point`] is the single place that encodes this.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{weight_at, ScoreData};
use crate::graphs::InteractionMatrix;
use crate::model::{self, check_dims, SpinConfiguration};
use crate::rng::{self, domain};
use crate::sampler::{gibbs_sample, GibbsSettings};

/// `Psi(t_i, beta) = f(beta, m_i) m_i (t_i - tanh(beta m_i))` with `m = m(t)`.
fn psi_term(beta: f64, lambda: f64, m: f64, t: f64) -> f64 {
    let u = beta * m;
    weight_at(u, lambda) * m * (t - u.tanh())
}

/// The per-coordinate contamination point induced by a joint point.
pub fn induced_point(t: &SpinConfiguration) -> &SpinConfiguration {
    t
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiEvaluation {
    pub contributions: Vec<f64>,
    pub sum: f64,
}

pub fn psi_sum(
    j: &InteractionMatrix,
    t_star: &SpinConfiguration,
    beta: f64,
    lambda: f64,
) -> Result<PsiEvaluation> {
    let fields = model::local_fields(j, t_star)?;
    let contributions: Vec<f64> = fields
        .iter()
        .zip(t_star.spins())
        .map(|(&m, &t)| psi_term(beta, lambda, m, t as f64))
        .collect();
    let sum = contributions.iter().sum();
    Ok(PsiEvaluation { contributions, sum })
}

/// `J_lambda(beta) = N S'_2` at the observed configuration.
pub fn influence_denominator(
    j: &InteractionMatrix,
    x_observed: &SpinConfiguration,
    beta: f64,
    lambda: f64,
) -> Result<f64> {
    let data = ScoreData::new(j, x_observed)?;
    if data.is_degenerate() {
        return Err(Error::DegenerateDenominator);
    }
    let value = data.n() as f64 * data.score_derivative(beta, lambda).s2;
    if value == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(value)
}

pub fn influence_function(
    j: &InteractionMatrix,
    x_observed: &SpinConfiguration,
    t: &SpinConfiguration,
    beta: f64,
    lambda: f64,
) -> Result<f64> {
    check_dims(j, t)?;
    let denominator = influence_denominator(j, x_observed, beta, lambda)?;
    let numerator = psi_sum(j, induced_point(t), beta, lambda)?.sum;
    Ok(-numerator / denominator)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GesMethod {
    ExactEnumeration,
    /// A lower bound from greedy single-flip ascent.
    LocalSearch,
}

impl GesMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            GesMethod::ExactEnumeration => "exact_enumeration",
            GesMethod::LocalSearch => "local_search",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GesResult {
    pub ges: f64,
    pub argmax_t: SpinConfiguration,
    pub method: GesMethod,
    pub j_lambda: f64,
}

/// How hard to look for the maximizing contamination point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Random restarts of the greedy search, each run in both directions.
    pub restarts: usize,
    /// Graphs with at most this many nodes are enumerated exactly.
    pub exact_limit: usize,
    pub seed: u64,
}

impl SearchBudget {
    pub fn restarts(restarts: usize) -> Self {
        Self {
            restarts,
            ..Self::default()
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 50,
            exact_limit: 20,
            seed: 0,
        }
    }
}

/// Incremental evaluator of `sum_i Psi(t_i)` under single spin flips.
struct PsiState<'a> {
    j: &'a InteractionMatrix,
    beta: f64,
    lambda: f64,
    t: Vec<i8>,
    fields: Vec<f64>,
    terms: Vec<f64>,
    sum: f64,
}

impl<'a> PsiState<'a> {
    fn new(j: &'a InteractionMatrix, beta: f64, lambda: f64, t: Vec<i8>) -> Self {
        let fields = model::local_fields_unchecked(j, &t);
        let terms: Vec<f64> = fields
            .iter()
            .zip(&t)
            .map(|(&m, &s)| psi_term(beta, lambda, m, s as f64))
            .collect();
        let sum = terms.iter().sum();
        Self {
            j,
            beta,
            lambda,
            t,
            fields,
            terms,
            sum,
        }
    }

    /// Change in the sum if spin `k` were flipped.
    fn flip_delta(&self, k: usize) -> f64 {
        let tk = self.t[k] as f64;
        let mut delta = psi_term(self.beta, self.lambda, self.fields[k], -tk) - self.terms[k];
        for (nb, w) in self.j.neighbors(k) {
            let m = self.fields[nb] - 2.0 * tk * w;
            delta += psi_term(self.beta, self.lambda, m, self.t[nb] as f64) - self.terms[nb];
        }
        delta
    }

    fn flip(&mut self, k: usize) {
        let tk = self.t[k] as f64;
        self.t[k] = -self.t[k];
        let new_k = psi_term(self.beta, self.lambda, self.fields[k], -tk);
        self.sum += new_k - self.terms[k];
        self.terms[k] = new_k;
        for (nb, w) in self.j.neighbors(k) {
            self.fields[nb] -= 2.0 * tk * w;
            let new = psi_term(self.beta, self.lambda, self.fields[nb], self.t[nb] as f64);
            self.sum += new - self.terms[nb];
            self.terms[nb] = new;
        }
    }
}

/// `max_t |sum_i Psi(t_i)|` by enumerating all configurations.
fn max_abs_psi_exact(j: &InteractionMatrix, beta: f64, lambda: f64) -> (f64, SpinConfiguration) {
    let n = j.n();
    let mut state = PsiState::new(j, beta, lambda, vec![-1; n]);
    let mut best = (state.sum.abs(), 0u64);
    let mut index = 0u64;
    for step in 1u64..(1u64 << n) {
        let k = step.trailing_zeros() as usize;
        state.flip(k);
        index ^= 1 << k;
        if state.sum.abs() > best.0 {
            best = (state.sum.abs(), index);
        }
    }
    let t = SpinConfiguration::from_index(n, best.1);
    // recompute without accumulated rounding
    let exact = psi_sum(j, &t, beta, lambda)
        .map(|p| p.sum.abs())
        .unwrap_or(best.0);
    (exact, t)
}

/// Greedy best-improvement ascent of `direction * sum Psi` from `start`.
fn ascend(state: &mut PsiState<'_>, direction: f64) {
    let n = state.t.len();
    loop {
        let mut best = (0.0, usize::MAX);
        for k in 0..n {
            let gain = direction * state.flip_delta(k);
            if gain > best.0 + 1e-15 {
                best = (gain, k);
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        state.flip(best.1);
    }
}

fn max_abs_psi_local(
    j: &InteractionMatrix,
    beta: f64,
    lambda: f64,
    budget: &SearchBudget,
) -> (f64, SpinConfiguration) {
    let n = j.n();
    let mut best: Option<(f64, Vec<i8>)> = None;
    for restart in 0..budget.restarts.max(1) {
        let mut rng = rng::stream(budget.seed, domain::SEARCH, restart as u64);
        let start: Vec<i8> = (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        for direction in [1.0, -1.0] {
            let mut state = PsiState::new(j, beta, lambda, start.clone());
            ascend(&mut state, direction);
            let value = state.sum.abs();
            if best.as_ref().is_none_or(|b| value > b.0) {
                best = Some((value, state.t));
            }
        }
    }
    let (value, t) = best.expect("at least one restart");
    let t = SpinConfiguration::new(t).expect("spins stay in {-1, +1}");
    let exact = psi_sum(j, &t, beta, lambda)
        .map(|p| p.sum.abs())
        .unwrap_or(value);
    (exact, t)
}

pub fn ges(
    j: &InteractionMatrix,
    x_observed: &SpinConfiguration,
    beta: f64,
    lambda: f64,
    budget: &SearchBudget,
) -> Result<GesResult> {
    let j_lambda = influence_denominator(j, x_observed, beta, lambda)?;
    let (numerator, argmax_t, method) = if j.n() <= budget.exact_limit.min(30) {
        let (v, t) = max_abs_psi_exact(j, beta, lambda);
        (v, t, GesMethod::ExactEnumeration)
    } else {
        let (v, t) = max_abs_psi_local(j, beta, lambda, budget);
        (v, t, GesMethod::LocalSearch)
    };
    Ok(GesResult {
        ges: numerator / j_lambda.abs(),
        argmax_t,
        method,
        j_lambda,
    })
}

pub fn ges_curve(
    j: &InteractionMatrix,
    x_observed: &SpinConfiguration,
    beta: f64,
    lambdas: &[f64],
    budget: &SearchBudget,
) -> Result<Vec<(f64, GesResult)>> {
    lambdas
        .iter()
        .map(|&lambda| Ok((lambda, ges(j, x_observed, beta, lambda, budget)?)))
        .collect()
}

/// GES over `lambdas` averaged across `replicates` observed configurations
/// drawn from the model at `beta`. Replicate `r` uses Gibbs stream `r` of
/// `gibbs.seed`.
pub fn mean_ges_curve(
    j: &InteractionMatrix,
    beta: f64,
    lambdas: &[f64],
    replicates: usize,
    gibbs: &GibbsSettings,
    budget: &SearchBudget,
) -> Result<Vec<(f64, f64)>> {
    let curves: Vec<Vec<(f64, GesResult)>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let settings = GibbsSettings {
                seed: rng::derive_seed(gibbs.seed, domain::REPLICATE, r as u64),
                ..*gibbs
            };
            let x = gibbs_sample(j, beta, 1, &settings)?
                .pop()
                .expect("one draw");
            ges_curve(j, &x, beta, lambdas, budget)
        })
        .collect::<Result<_>>()?;
    let mut totals = vec![0.0; lambdas.len()];
    for curve in &curves {
        for (total, (_, g)) in totals.iter_mut().zip(curve) {
            *total += g.ges;
        }
    }
    Ok(lambdas
        .iter()
        .zip(totals)
        .map(|(&l, t)| (l, t / replicates as f64))
        .collect())
}

use std::collections::BTreeMap;

use super::weight::{log_cosh, sech2, weight_at, weight_slope_at};
use crate::error::Result;
use crate::graphs::InteractionMatrix;
use crate::model::{self, log_sigmoid, SpinConfiguration};

/// Everything the objectives need from one observation: the multiset of
/// `(m_i, x_i)` pairs. Nodes sharing a pair bit-for-bit are merged, which on
/// unweighted graphs shrinks thousands of nodes to a handful of terms.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreData {
    n: usize,
    /// `(m, x, multiplicity)`, sorted.
    terms: Vec<(f64, f64, f64)>,
}

/// `S'` split into the part driven by the slope of `f` and the part that is
/// never positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreDerivative {
    pub s1: f64,
    pub s2: f64,
}

impl ScoreDerivative {
    pub fn total(&self) -> f64 {
        self.s1 + self.s2
    }
}

impl ScoreData {
    pub fn new(j: &InteractionMatrix, x: &SpinConfiguration) -> Result<Self> {
        let fields = model::local_fields(j, x)?;
        Ok(Self::from_fields(&fields, x.spins()))
    }

    /// From precomputed local fields. `fields` and `spins` must have equal
    /// length.
    pub fn from_fields(fields: &[f64], spins: &[i8]) -> Self {
        assert_eq!(fields.len(), spins.len());
        let mut merged: BTreeMap<(u64, i8), (f64, usize)> = BTreeMap::new();
        for (&m, &s) in fields.iter().zip(spins) {
            // -0.0 and 0.0 are the same field
            let m = if m == 0.0 { 0.0 } else { m };
            merged.entry((m.to_bits(), s)).or_insert((m, 0)).1 += 1;
        }
        let mut terms: Vec<(f64, f64, f64)> = merged
            .into_iter()
            .map(|((_, s), (m, c))| (m, s as f64, c as f64))
            .collect();
        terms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Self {
            n: fields.len(),
            terms,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when every local field is zero, so no value of beta is preferred.
    pub fn is_degenerate(&self) -> bool {
        self.terms.iter().all(|t| t.0 == 0.0)
    }

    /// `(1/N) sum_i log P_beta(x_i | x_{-i})`.
    pub fn log_pseudolikelihood(&self, beta: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(m, x, c)| c * log_sigmoid(2.0 * beta * m * x))
            .sum::<f64>()
            / self.n as f64
    }

    /// Density power divergence between the empirical and model conditional
    /// probability vectors, `lambda > 0`.
    ///
    /// The `N / lambda` constant is folded into each node's term through
    /// `expm1`, which keeps small `lambda` free of catastrophic cancellation.
    pub fn dpd_objective(&self, beta: f64, lambda: f64) -> f64 {
        let a = 1.0 + lambda;
        let total: f64 = self
            .terms
            .iter()
            .map(|&(m, x, c)| {
                let z = 2.0 * beta * m;
                let log_plus = log_sigmoid(z);
                let log_minus = log_sigmoid(-z);
                let log_observed = if x > 0.0 { log_plus } else { log_minus };
                let term = (a * log_plus).exp() + (a * log_minus).exp()
                    - 1.0
                    - (1.0 + 1.0 / lambda) * (lambda * log_observed).exp_m1();
                c * term
            })
            .sum();
        total / (self.n as f64).powf(a)
    }

    /// `S(beta) = (1/N) sum_i f(beta, m_i) m_i (x_i - tanh(beta m_i))`.
    pub fn score(&self, beta: f64, lambda: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(m, x, c)| {
                let u = beta * m;
                c * weight_at(u, lambda) * m * (x - u.tanh())
            })
            .sum::<f64>()
            / self.n as f64
    }

    pub fn score_derivative(&self, beta: f64, lambda: f64) -> ScoreDerivative {
        let (mut s1, mut s2) = (0.0, 0.0);
        for &(m, x, c) in &self.terms {
            let u = beta * m;
            s1 += c * m * weight_slope_at(u, lambda) * m * (x - u.tanh());
            s2 -= c * weight_at(u, lambda) * m * m * sech2(u);
        }
        let n = self.n as f64;
        ScoreDerivative {
            s1: s1 / n,
            s2: s2 / n,
        }
    }

    /// `S'_2` through the single-power form
    /// `-(1/N) sum cosh((lambda-1) beta m) m^2 / cosh^{lambda+3}(beta m)`.
    pub fn score_derivative_s2_direct(&self, beta: f64, lambda: f64) -> f64 {
        -self
            .terms
            .iter()
            .map(|&(m, _, c)| {
                let u = beta * m;
                c * m * m * (log_cosh((lambda - 1.0) * u) - (lambda + 3.0) * log_cosh(u)).exp()
            })
            .sum::<f64>()
            / self.n as f64
    }

    /// Merged `(m, x, multiplicity)` terms.
    pub fn terms(&self) -> &[(f64, f64, f64)] {
        &self.terms
    }
}

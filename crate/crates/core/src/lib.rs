//! Robust estimation of the interaction strength of an Ising model from a
//! single, possibly contaminated, spin configuration on a known network.
//!
//! The estimators minimize the density power divergence between the observed
//! spins and the model's single-site conditional probabilities. The tuning
//! parameter `lambda` trades efficiency for robustness; `lambda = 0` is
//! maximum pseudolikelihood.
//!
//! Modules, bottom-up:
//!
//! - [`graphs`]: interaction matrices, random ensembles, edge-list files.
//! - [`model`]: Hamiltonian, local fields, conditionals, exact enumeration.
//! - [`sampler`]: systematic-scan Gibbs sampling.
//! - [`estimator`]: objectives, score functions and the root solver.
//! - [`robustness`]: influence function and gross error sensitivity.
//! - [`contamination`]: pinning and flipping a fraction of spins.
//! - [`experiments`]: Monte-Carlo studies and prediction protocols.
//! - [`cli`]: the `ising-robust` command-line front end.

pub mod cli;
pub mod contamination;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod graphs;
pub mod model;
pub mod rng;
pub mod robustness;
pub mod sampler;

pub use error::{Error, Result};
pub use estimator::{
    estimate, estimate_lambda_grid, EstimateOutcome, EstimatorSettings, OutcomeKind, RootPolicy,
};
pub use graphs::{build_ensemble, EnsembleKind, EnsembleSpec, InteractionMatrix};
pub use model::SpinConfiguration;
pub use sampler::{gibbs_sample, GibbsSettings};

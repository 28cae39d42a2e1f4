//! Bias and MSE of the estimators on an Erdős–Rényi graph when a tenth of
//! the spins are flipped, compared with clean data.
//!
//! ```bash
//! cargo run --release --example contamination_robustness
//! ```

use ising_robust::contamination::{ContaminationKind, ContaminationScheme};
use ising_robust::experiments::{run_experiment, ExperimentSpec};
use ising_robust::{EnsembleKind, EnsembleSpec, EstimatorSettings, GibbsSettings};

fn main() -> ising_robust::Result<()> {
    let n = 500;
    let spec = ExperimentSpec {
        ensemble: EnsembleSpec::new(EnsembleKind::ErdosRenyi { p: 5.0 / n as f64 }, n, 0),
        true_beta: 0.8,
        contamination: vec![
            ContaminationScheme::new(ContaminationKind::Flip, 0.0, 0)?,
            ContaminationScheme::new(ContaminationKind::Flip, 0.1, 0)?,
        ],
        lambdas: (0..=10).map(|k| k as f64 / 10.0).collect(),
        replicates: 100,
        gibbs: GibbsSettings::default(),
        estimator: EstimatorSettings::default(),
        base_seed: 1,
        fix_graph: None,
    };
    let report = run_experiment(&spec)?;
    print!("{}", report.to_csv());
    Ok(())
}

//! Fit beta on training configurations and predict every spin of held-out
//! configurations from its neighbours.
//!
//! ```bash
//! cargo run --release --example train_test_prediction
//! ```

use ising_robust::experiments::predict_train_test;
use ising_robust::{
    build_ensemble, gibbs_sample, EnsembleKind, EnsembleSpec, EstimatorSettings, GibbsSettings,
};

fn main() -> ising_robust::Result<()> {
    let n = 100;
    let j = build_ensemble(&EnsembleSpec::new(
        EnsembleKind::ErdosRenyi { p: 5.0 / n as f64 },
        n,
        2,
    ))?;
    let settings = GibbsSettings {
        seed: 5,
        ..GibbsSettings::default()
    };
    let mut samples = gibbs_sample(&j, 0.8, 50, &settings)?;
    let test = samples.split_off(25);

    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    println!(
        "{:>7} {:>9} {:>9} {:>6}",
        "lambda", "beta_bar", "accuracy", "fits"
    );
    for r in predict_train_test(&j, &samples, &test, &lambdas, &EstimatorSettings::default())? {
        println!(
            "{:>7} {:>9.4} {:>9.4} {:>3}/{}",
            r.lambda,
            r.beta_bar,
            r.accuracy,
            r.n_training_used,
            r.n_training_used + r.n_training_excluded
        );
    }
    Ok(())
}

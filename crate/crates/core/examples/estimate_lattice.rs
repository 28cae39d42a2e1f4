//! Draw one configuration from a 2-D lattice model and estimate beta for a
//! range of lambda values.
//!
//! ```bash
//! cargo run --release --example estimate_lattice
//! ```

use ising_robust::{
    build_ensemble, estimate_lambda_grid, gibbs_sample, EnsembleKind, EnsembleSpec,
    EstimatorSettings, GibbsSettings,
};

fn main() -> ising_robust::Result<()> {
    let true_beta = 0.5;
    let j = build_ensemble(&EnsembleSpec::new(EnsembleKind::Lattice2d, 1600, 0))?;
    let settings = GibbsSettings {
        seed: 7,
        ..GibbsSettings::default()
    };
    let x = gibbs_sample(&j, true_beta, 1, &settings)?.remove(0);

    let lambdas = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0];
    println!("lattice 40x40, true beta {true_beta}");
    println!(
        "{:>7} {:>10} {:>16} {:>5}",
        "lambda", "beta_hat", "outcome", "iter"
    );
    for (lambda, o) in estimate_lambda_grid(&j, &x, &lambdas, &EstimatorSettings::default())? {
        println!(
            "{lambda:>7} {:>10.5} {:>16} {:>5}",
            o.beta_hat,
            o.kind.as_str(),
            o.iterations
        );
    }
    Ok(())
}

//! Predict each spin from the others with a beta fitted without it.
//!
//! ```bash
//! cargo run --release --example leave_one_out_prediction
//! ```

use ising_robust::contamination::{contaminate, ContaminationKind, ContaminationScheme};
use ising_robust::experiments::predict_leave_one_out;
use ising_robust::{
    build_ensemble, gibbs_sample, EnsembleKind, EnsembleSpec, EstimatorSettings, GibbsSettings,
};

fn main() -> ising_robust::Result<()> {
    let j = build_ensemble(&EnsembleSpec::new(EnsembleKind::Lattice2d, 400, 0))?;
    let settings = GibbsSettings {
        seed: 3,
        ..GibbsSettings::default()
    };
    let x = gibbs_sample(&j, 1.2, 1, &settings)?.remove(0);
    let noisy = contaminate(
        &x,
        &ContaminationScheme::new(ContaminationKind::Flip, 0.05, 9)?,
    )?;
    let lambdas = [0.0, 0.5, 1.0];

    for (label, sample) in [("clean", &x), ("5% flipped", &noisy)] {
        println!("{label}:");
        for r in predict_leave_one_out(&j, sample, &lambdas, &EstimatorSettings::default())? {
            println!(
                "  lambda {:.1}: accuracy {:.4} (fallback nodes {})",
                r.lambda, r.accuracy, r.fallback_nodes
            );
        }
    }
    Ok(())
}

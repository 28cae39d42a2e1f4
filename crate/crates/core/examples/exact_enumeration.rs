//! Small models solved exactly: partition function, and the expected value
//! of the estimating function under the model.
//!
//! ```bash
//! cargo run --release --example exact_enumeration
//! ```

use ising_robust::estimator::score;
use ising_robust::model::exact_summary;
use ising_robust::{build_ensemble, EnsembleKind, EnsembleSpec, SpinConfiguration};

fn main() -> ising_robust::Result<()> {
    let j = build_ensemble(&EnsembleSpec::new(EnsembleKind::Lattice2d, 16, 0))?;
    for beta in [0.25, 0.5, 1.0, 2.0] {
        let summary = exact_summary(&j, beta, true)?;
        let probabilities = summary.probabilities.expect("table requested");
        let aligned = probabilities[0] + probabilities[probabilities.len() - 1];
        let expected_scores: Vec<String> = [0.0, 0.5, 1.0]
            .iter()
            .map(|&lambda| {
                let mean: f64 = probabilities
                    .iter()
                    .enumerate()
                    .map(|(index, p)| {
                        p * score(
                            &j,
                            &SpinConfiguration::from_index(16, index as u64),
                            beta,
                            lambda,
                        )
                        .unwrap()
                    })
                    .sum();
                format!("{mean:+.1e}")
            })
            .collect();
        println!(
            "beta {beta:<4}  log Z / N {:.6}  P(all aligned) {aligned:.4}  E[S] at lambda 0, 0.5, 1: {}",
            summary.log_z_over_n,
            expected_scores.join(", ")
        );
    }
    Ok(())
}

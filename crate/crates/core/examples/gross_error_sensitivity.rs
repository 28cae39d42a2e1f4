//! Gross error sensitivity as a function of lambda: exactly on a small
//! graph, and by local search on a larger one.
//!
//! ```bash
//! cargo run --release --example gross_error_sensitivity
//! ```

use ising_robust::robustness::{ges_curve, influence_function, mean_ges_curve, SearchBudget};
use ising_robust::{
    build_ensemble, gibbs_sample, EnsembleKind, EnsembleSpec, GibbsSettings, SpinConfiguration,
};

fn main() -> ising_robust::Result<()> {
    let lambdas: Vec<f64> = (0..=5).map(|k| k as f64 / 5.0).collect();
    let budget = SearchBudget::default();

    let small = build_ensemble(&EnsembleSpec::new(
        EnsembleKind::ErdosRenyi { p: 0.3 },
        14,
        3,
    ))?;
    let x = gibbs_sample(&small, 1.0, 1, &GibbsSettings::default())?.remove(0);
    println!("n = 14, one observed configuration");
    for (lambda, g) in ges_curve(&small, &x, 1.0, &lambdas, &budget)? {
        println!(
            "  lambda {lambda:.1}: GES {:.4} ({})",
            g.ges,
            g.method.as_str()
        );
    }
    let flipped = x.negated();
    let value = influence_function(&small, &x, &flipped, 1.0, 0.5)?;
    println!("  influence of the globally flipped point at lambda 0.5: {value:.4}");

    let large = build_ensemble(&EnsembleSpec::new(
        EnsembleKind::ErdosRenyi { p: 0.05 },
        100,
        8,
    ))?;
    let gibbs = GibbsSettings {
        seed: 80,
        ..GibbsSettings::default()
    };
    println!("n = 100, averaged over 10 observed configurations");
    for (lambda, g) in mean_ges_curve(&large, 1.0, &lambdas, 10, &gibbs, &budget)? {
        println!("  lambda {lambda:.1}: mean GES {g:.4}");
    }

    let aligned = SpinConfiguration::all_plus(100);
    let worst = ising_robust::robustness::ges(&large, &aligned, 1.0, 0.0, &budget)?;
    println!("  all-plus observation, lambda 0: GES {:.4}", worst.ges);
    Ok(())
}

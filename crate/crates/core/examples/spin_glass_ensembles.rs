//! Build each random ensemble, sample from it and estimate beta.
//!
//! ```bash
//! cargo run --release --example spin_glass_ensembles
//! ```

use ising_robust::{
    build_ensemble, estimate, gibbs_sample, EnsembleKind, EnsembleSpec, EstimatorSettings,
    GibbsSettings,
};

fn main() -> ising_robust::Result<()> {
    let n = 400;
    let ensembles = [
        (
            "Erdős–Rényi p=5/n",
            EnsembleKind::ErdosRenyi { p: 5.0 / n as f64 },
        ),
        (
            "block model",
            EnsembleKind::Sbm {
                sizes: vec![200, 200],
                p_within: 0.06,
                q_between: 0.015,
            },
        ),
        (
            "Sherrington-Kirkpatrick",
            EnsembleKind::SherringtonKirkpatrick,
        ),
        (
            "Hopfield, 5 patterns",
            EnsembleKind::Hopfield { m_attractors: 5 },
        ),
    ];
    let true_beta = 1.0;
    for (name, kind) in ensembles {
        let j = build_ensemble(&EnsembleSpec::new(kind, n, 11))?;
        let x = gibbs_sample(&j, true_beta, 1, &GibbsSettings::default())?.remove(0);
        let mpl = estimate(&j, &x, &EstimatorSettings::default())?;
        let robust = estimate(&j, &x, &EstimatorSettings::with_lambda(0.5))?;
        println!(
            "{name:<26} edges {:>6}  row-sum bound {:>6.3}  beta_0 {:.4}  beta_0.5 {:.4}",
            j.edge_count(),
            j.spectral_norm_upper_bound(),
            mpl.beta_hat,
            robust.beta_hat
        );
    }
    Ok(())
}

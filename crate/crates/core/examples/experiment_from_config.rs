//! Run a Monte-Carlo study described by a JSON config and print its CSV
//! report.
//!
//! ```bash
//! cargo run --release --example experiment_from_config -- crates/core/configs/quick.json
//! ```

use ising_robust::experiments::{run_experiment_with_threads, ExperimentSpec};

fn main() -> ising_robust::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/quick.json").to_owned());
    let spec = ExperimentSpec::from_json_file(&path)?;
    eprintln!(
        "{path}: {} replicates x {} schemes x {} lambdas",
        spec.replicates,
        spec.contamination.len(),
        spec.lambdas.len()
    );
    print!("{}", run_experiment_with_threads(&spec, None)?.to_csv());
    Ok(())
}

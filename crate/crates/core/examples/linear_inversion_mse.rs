//! Scaled MSE of plain and weighted linear inversion against `Tr F⁻¹`.
//!
//! ```bash
//! cargo run --release --example linear_inversion_mse
//! ```

use qttf::estimation::{mse_experiment_with, weight_for_purity, Estimator};
use qttf::operators::{build_basis, haar_pure_state};
use qttf::pom::{mub_povm, qubit_sic};
use qttf::rng;

fn main() -> qttf::Result<()> {
    let basis = build_basis(2)?;
    let w = weight_for_purity(2, 0.99)?;
    let rho = haar_pure_state(2, &mut rng::from_seed(3))?.mix_with_identity(w)?;
    for pom in [qubit_sic(), mub_povm(2)?] {
        for estimator in [Estimator::Linear, Estimator::Weighted] {
            let r = mse_experiment_with(estimator, &rho, &pom, &basis, 100_000, 1000, 11)?;
            println!(
                "{:<5} {:<9} N·MSE = {:.4} ± {:.4}   Tr F⁻¹ = {:.4}",
                pom.label(),
                format!("{estimator:?}"),
                r.scaled_mse,
                r.std_error,
                r.predicted
            );
        }
    }
    Ok(())
}

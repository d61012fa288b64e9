//! Ordered series of the qTTF for a random qubit POM, order by order.
//!
//! ```bash
//! cargo run --example series_expansion
//! ```

use qttf::operators::build_basis;
use qttf::pom::random_pom;
use qttf::qttf::{qttf_monte_carlo, series_value, SeriesBudget, SeriesTerms};
use qttf::rng;

fn main() -> qttf::Result<()> {
    let pom = random_pom(2, 6, 1, &mut rng::from_seed(42))?;
    let basis = build_basis(2)?;
    let terms = SeriesTerms::new(&pom, &basis, SeriesBudget::default())?;
    println!("F2 = {:.6}  F3 = {:.6}  F4 = {:.6}", terms.f2(), terms.f3()?, terms.f4()?);
    println!("alpha0 = {:.6}", terms.aux.alpha0);
    for alpha in [1.0, terms.aux.alpha0] {
        let values: Vec<String> =
            (1..=4).map(|k| series_value(&terms, alpha, k).map(|v| format!("{v:.6}"))).collect::<qttf::Result<_>>()?;
        println!("alpha = {alpha:.4}: orders 1..4 -> {}", values.join("  "));
    }
    let mc = qttf_monte_carlo(&pom, &basis, 100_000, 7)?;
    println!("Monte Carlo: {:.6} ± {:.6}", mc.value, mc.std_error);
    Ok(())
}

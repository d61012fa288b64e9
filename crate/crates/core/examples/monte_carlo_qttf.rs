//! Haar Monte Carlo qTTF for growing outcome counts, approaching 2(D−1).
//!
//! ```bash
//! cargo run --release --example monte_carlo_qttf
//! ```

use qttf::operators::build_basis;
use qttf::pom::random_pom;
use qttf::qttf::{qttf_monte_carlo, qttf_series};
use qttf::rng;

fn main() -> qttf::Result<()> {
    let basis = build_basis(2)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "M", "qTTF", "std_err", "aqTTF");
    for m in [6, 8, 20, 50, 200, 1000] {
        let pom = random_pom(2, m, 1, &mut rng::from_seed(m as u64))?;
        let mc = qttf_monte_carlo(&pom, &basis, 20_000, 1)?;
        let aq = qttf_series(&pom, &basis, 1.0, 2)?;
        println!("{m:>6} {:>10.5} {:>10.5} {:>10.5}", mc.value, mc.std_error, aq.value);
    }
    Ok(())
}

//! Relative error of the halved qTTF for random qubit POMs, with and without noise.
//!
//! ```bash
//! cargo run --release --example random_pom_study
//! ```

use qttf::cli::experiments::{run_fig1, Fig1Config};

fn main() -> qttf::Result<()> {
    let cfg = Fig1Config {
        dims: vec![2],
        mus: vec![1.5, 2.0, 3.0],
        ranks: vec![1],
        epsilons: vec![0.0, 0.05],
        n_poms: 20,
        n_haar: 500,
        bootstrap: 1000,
        seed: 1,
    };
    println!("{:>3} {:>5} {:>4} {:>6} {:>10} {:>20}", "D", "mu", "M", "eps", "rel_err", "95% CI");
    for c in run_fig1(&cfg)? {
        println!(
            "{:>3} {:>5} {:>4} {:>6} {:>10.5} [{:>8.5}, {:>8.5}]",
            c.dim, c.mu, c.outcomes, c.epsilon, c.halved_rel_err, c.ci_lo, c.ci_hi
        );
    }
    Ok(())
}

//! Splitting one outcome changes the condition number but not the qTTF.
//!
//! ```bash
//! cargo run --example duplication_counterexample
//! ```

use qttf::cli::experiments::compare_poms;
use qttf::pom::{duplicate_outcome, qubit_sic};
use qttf::qttf::AutoOptions;

fn main() -> qttf::Result<()> {
    let sic = qubit_sic();
    let split = duplicate_outcome(&sic, 0, &[0.3, 0.7])?.with_label("sic2 split 0.3/0.7");
    let table = compare_poms(&[sic, split], &AutoOptions::default())?;
    println!("{:<22} {:>4} {:>10} {:>10} {:>10}", "POM", "M", "kappa_c", "kappa_c~", "qTTF");
    for row in &table.rows {
        println!(
            "{:<22} {:>4} {:>10.6} {:>10.6} {:>10.6}",
            row.label, row.outcomes, row.kappa_c, row.kappa_c_tilde, row.qttf.value
        );
    }
    println!("ranking inversions: {:?}", table.inversions);
    Ok(())
}

//! Closed-form qTTF of the SIC and MUB POMs next to the reference bounds.
//!
//! ```bash
//! cargo run --example sic_vs_mub
//! ```

use qttf::operators::build_basis;
use qttf::pom::{mub_povm, sic_povm};
use qttf::qttf::{qttf_closed_minimal, qttf_closed_minimal_bases, reference_values};

fn main() -> qttf::Result<()> {
    for dim in [2, 3] {
        let basis = build_basis(dim)?;
        let sic = qttf_closed_minimal(&sic_povm(dim)?, &basis)?;
        let mub = qttf_closed_minimal_bases(&mub_povm(dim)?, &basis)?;
        let refs = reference_values(dim)?;
        println!("D = {dim}");
        println!("  SIC          {:.6}", sic.value);
        println!("  MUB          {:.6}", mub.value);
        println!("  zeroth bound {:.6}", refs.zeroth_bound);
        println!("  covariant    {:.6}", refs.covariant);
    }
    Ok(())
}

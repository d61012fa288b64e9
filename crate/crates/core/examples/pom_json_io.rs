//! Writing a POM to JSON, reading it back and transforming it.
//!
//! ```bash
//! cargo run --example pom_json_io
//! ```

use qttf::linalg::hermitian_eigenvalues;
use qttf::pom::{admix_white_noise, random_pom};
use qttf::{rng, Pom};

fn main() -> qttf::Result<()> {
    let pom = random_pom(3, 12, 2, &mut rng::from_seed(5))?;
    let path = std::env::temp_dir().join("qttf_example_pom.json");
    pom.save(&path)?;
    let back = Pom::load(&path)?;
    println!("{} -> {} ({} bytes)", pom.label(), path.display(), std::fs::metadata(&path)?.len());
    println!("identical after reload: {}", back.to_json() == pom.to_json());
    let noisy = admix_white_noise(&back, 0.1)?;
    println!("first outcome spectrum          {:.4?}", hermitian_eigenvalues(&back.outcomes()[0]).as_slice());
    println!("first outcome spectrum, ε = 0.1 {:.4?}", hermitian_eigenvalues(&noisy.outcomes()[0]).as_slice());
    Ok(())
}

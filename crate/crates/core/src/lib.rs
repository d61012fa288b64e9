//! Tomographic quality of quantum measurements.
//!
//! The central quantity is the quantum tomographic transfer function (qTTF):
//! the Haar average over pure states of `Tr F(ρ)⁻¹`, where `F(ρ) = Cᵀ P⁻¹ C`
//! is the scaled Fisher information of a probability-operator measure (POM)
//! under multinomial statistics. It is the asymptotic mean squared
//! Hilbert–Schmidt error per sampling event of an optimal unbiased estimator,
//! averaged over the unknown state.
//!
//! The crate computes it three ways:
//!
//! * closed forms for minimally complete POMs and for minimally complete
//!   bases ([`qttf::qttf_closed_minimal`], [`qttf::qttf_closed_minimal_bases`]);
//! * the ordered series in Gram tensors of the POM up to fourth order
//!   ([`qttf::qttf_series`]);
//! * Monte-Carlo averaging over Haar-random pure states
//!   ([`qttf::qttf_monte_carlo`]).
//!
//! Alongside these sit the measurement-matrix diagnostics (singular values and
//! condition numbers, which are *not* invariant under channel duplication),
//! linear-inversion estimators and finite-sample MSE experiments.
//!
//! ```
//! use qttf::{operators::build_basis, pom, qttf::qttf_closed_minimal};
//!
//! let basis = build_basis(2).unwrap();
//! let sic = pom::qubit_sic();
//! let est = qttf_closed_minimal(&sic, &basis).unwrap();
//! assert!((est.value - 4.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimation;
pub mod fisher;
pub mod linalg;
pub mod operators;
pub mod pom;
pub mod qttf;
pub mod rng;

pub use error::{Error, Result};
pub use operators::{DensityMatrix, HermitianBasis};
pub use pom::Pom;
pub use qttf::{QttfEstimate, QttfMethod};

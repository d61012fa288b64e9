//! Measurement matrices, Born probabilities and the scaled Fisher information.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, RMatrix};
use crate::operators::{DensityMatrix, HermitianBasis};
use crate::pom::Pom;

/// Probabilities at or below this value are treated as vanishing.
pub const P_FLOOR: f64 = 1e-12;
/// Eigenvalues of `F` below `SINGULAR_REL_TOL · λ_max` make it singular.
pub const SINGULAR_REL_TOL: f64 = 1e-12;
/// Relative threshold on `s_min(C)` for informational completeness.
pub const IC_REL_TOL: f64 = 1e-10;

/// Everything derived from a POM once a basis is fixed.
#[derive(Debug, Clone)]
pub struct TomographyMatrices {
    /// `M × (D²−1)`, `C_jk = Tr(Π_j Ω_k)`.
    pub c_matrix: RMatrix,
    /// `M × D²` over the full basis with the normalized identity first.
    pub c_tilde: RMatrix,
    /// Probabilities of the maximally mixed state, `Tr(Π_j)/D`.
    pub p_bar: Vec<f64>,
    pub singular_values_c: Vec<f64>,
    pub singular_values_c_tilde: Vec<f64>,
    pub kappa_c: f64,
    pub kappa_c_tilde: f64,
}

impl TomographyMatrices {
    pub fn is_informationally_complete(&self) -> bool {
        match (self.singular_values_c.first(), self.singular_values_c.last()) {
            (Some(&hi), Some(&lo)) => hi > 0.0 && lo > IC_REL_TOL * hi,
            _ => false,
        }
    }

    pub fn s_min(&self) -> f64 {
        self.singular_values_c.last().copied().unwrap_or(0.0)
    }

    pub fn require_ic(&self) -> Result<()> {
        if self.is_informationally_complete() {
            Ok(())
        } else {
            Err(Error::NotInformationallyComplete { s_min: self.s_min() })
        }
    }

    pub fn outcomes(&self) -> usize {
        self.c_matrix.nrows()
    }
}

pub fn measurement_matrices(pom: &Pom, basis: &HermitianBasis) -> Result<TomographyMatrices> {
    if pom.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: pom.dim() });
    }
    let m = pom.len();
    let d = pom.dim();
    let ops = basis.traceless_ops();
    let c_matrix =
        RMatrix::from_fn(m, ops.len(), |j, k| linalg::trace_product(&pom.outcomes()[j], &ops[k]).re);
    let traces = pom.traces();
    let sqrt_d = (d as f64).sqrt();
    let c_tilde = RMatrix::from_fn(m, ops.len() + 1, |j, k| {
        if k == 0 {
            traces[j] / sqrt_d
        } else {
            c_matrix[(j, k - 1)]
        }
    });
    let p_bar = traces.iter().map(|t| t / d as f64).collect();
    let singular_values_c = linalg::singular_values(&c_matrix);
    let singular_values_c_tilde = linalg::singular_values(&c_tilde);
    Ok(TomographyMatrices {
        kappa_c: linalg::condition_number(&singular_values_c),
        kappa_c_tilde: linalg::condition_number(&singular_values_c_tilde),
        c_matrix,
        c_tilde,
        p_bar,
        singular_values_c,
        singular_values_c_tilde,
    })
}

/// Born rule, `p_j = Tr(ρ Π_j)`.
pub fn probabilities(rho: &DensityMatrix, pom: &Pom) -> Result<Vec<f64>> {
    if rho.dim() != pom.dim() {
        return Err(Error::DimensionMismatch { expected: pom.dim(), found: rho.dim() });
    }
    Ok(pom.outcomes().iter().map(|op| linalg::trace_product(rho.matrix(), op).re).collect())
}

/// `Cᵀ diag(p)⁻¹ C` for an arbitrary positive weight vector.
///
/// `p` need not be normalized: scaling it by `α` scales `F` by `1/α`.
pub fn fisher_from_probabilities(c: &RMatrix, p: &[f64]) -> Result<RMatrix> {
    if p.len() != c.nrows() {
        return Err(Error::DimensionMismatch { expected: c.nrows(), found: p.len() });
    }
    if let Some((index, &probability)) = p.iter().enumerate().find(|(_, &v)| !(v > P_FLOOR)) {
        return Err(Error::ZeroProbability { index, probability });
    }
    let n = c.ncols();
    let mut f = RMatrix::zeros(n, n);
    for (j, &pj) in p.iter().enumerate() {
        let row = c.row(j);
        for a in 0..n {
            let ra = row[a] / pj;
            if ra == 0.0 {
                continue;
            }
            for b in a..n {
                f[(a, b)] += ra * row[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            f[(a, b)] = f[(b, a)];
        }
    }
    Ok(f)
}

/// `Tr F⁻¹` through the eigenvalues of the symmetric `F`.
pub fn inverse_trace(f: &RMatrix) -> Result<f64> {
    let (values, _) = linalg::symmetric_eigen(f);
    let hi = values.last().copied().unwrap_or(0.0);
    if hi <= 0.0 || values[0] <= SINGULAR_REL_TOL * hi {
        return Err(Error::NotInformationallyComplete { s_min: values[0].max(0.0).sqrt() });
    }
    Ok(values.iter().map(|v| 1.0 / v).sum())
}

#[derive(Debug, Clone)]
pub struct FisherMatrix {
    pub matrix: RMatrix,
    pub at_state: DensityMatrix,
    pub pom_label: String,
}

pub fn fisher_matrix(rho: &DensityMatrix, pom: &Pom, basis: &HermitianBasis) -> Result<FisherMatrix> {
    let tm = measurement_matrices(pom, basis)?;
    let p = probabilities(rho, pom)?;
    Ok(FisherMatrix {
        matrix: fisher_from_probabilities(&tm.c_matrix, &p)?,
        at_state: rho.clone(),
        pom_label: pom.label().to_owned(),
    })
}

/// Optimal scaled accuracy `Tr F(ρ)⁻¹`.
pub fn accuracy(rho: &DensityMatrix, pom: &Pom, basis: &HermitianBasis) -> Result<f64> {
    AccuracyEvaluator::new(pom, basis)?.at_state(rho)
}

/// Caches `C` for repeated evaluations of `Tr F(ρ)⁻¹` on one POM.
#[derive(Debug, Clone)]
pub struct AccuracyEvaluator<'a> {
    pom: &'a Pom,
    c: RMatrix,
}

impl<'a> AccuracyEvaluator<'a> {
    pub fn new(pom: &'a Pom, basis: &HermitianBasis) -> Result<Self> {
        let tm = measurement_matrices(pom, basis)?;
        Ok(Self { pom, c: tm.c_matrix })
    }

    pub fn from_matrix(pom: &'a Pom, c: RMatrix) -> Self {
        Self { pom, c }
    }

    pub fn c_matrix(&self) -> &RMatrix {
        &self.c
    }

    pub fn at_state(&self, rho: &DensityMatrix) -> Result<f64> {
        self.at_probabilities(&probabilities(rho, self.pom)?)
    }

    pub fn at_probabilities(&self, p: &[f64]) -> Result<f64> {
        inverse_trace(&fisher_from_probabilities(&self.c, p)?)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceBound {
    pub tr_fbar: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// `Tr F̄ ≤ D(D−1)` at the maximally mixed state.
pub fn fisher_trace_bound_check(pom: &Pom, basis: &HermitianBasis) -> Result<TraceBound> {
    let tm = measurement_matrices(pom, basis)?;
    let f = fisher_from_probabilities(&tm.c_matrix, &tm.p_bar)?;
    let d = pom.dim() as f64;
    let tr_fbar = f.trace();
    let bound = d * (d - 1.0);
    Ok(TraceBound { tr_fbar, bound, satisfied: tr_fbar <= bound * (1.0 + 1e-12) })
}

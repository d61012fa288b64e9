//! Trace-orthonormal operator basis, density matrices and Haar-random pure
//! states.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::pom::Pom;

/// Tolerance for the structural identities of bases and states.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Slack allowed on the smallest eigenvalue of a positive operator.
pub const PSD_SLACK: f64 = 1e-10;

/// Generalized Gell-Mann basis of the traceless Hermitian operators together
/// with the normalized identity `1/√D`.
///
/// Ordering is fixed: symmetric off-diagonal pairs `(j,k)` with `j<k` in
/// lexicographic order, then the antisymmetric pairs in the same order, then
/// the `D−1` diagonal operators. For `D = 2` this is `(σx, σy, σz)/√2`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    traceless: Vec<CMatrix>,
    identity: CMatrix,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of traceless operators, `D² − 1`.
    pub fn len(&self) -> usize {
        self.traceless.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traceless.is_empty()
    }

    pub fn traceless_ops(&self) -> &[CMatrix] {
        &self.traceless
    }

    pub fn identity_op(&self) -> &CMatrix {
        &self.identity
    }

    /// The full set of `D²` operators with the normalized identity first.
    pub fn full_ops(&self) -> impl Iterator<Item = &CMatrix> {
        std::iter::once(&self.identity).chain(self.traceless.iter())
    }

    /// `1/D + Σ_k t_k Ω_k`.
    pub fn reconstruct(&self, coords: &[f64]) -> Result<CMatrix> {
        if coords.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: coords.len() });
        }
        let mut m = linalg::identity(self.dim) / Complex64::from(self.dim as f64);
        for (t, op) in coords.iter().zip(&self.traceless) {
            m += op * Complex64::from(*t);
        }
        Ok(m)
    }
}

pub fn build_basis(dim: usize) -> Result<HermitianBasis> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut traceless = Vec::with_capacity(dim * dim - 1);
    for j in 0..dim {
        for k in j + 1..dim {
            let mut m = CMatrix::zeros(dim, dim);
            m[(j, k)] = Complex64::new(h, 0.0);
            m[(k, j)] = Complex64::new(h, 0.0);
            traceless.push(m);
        }
    }
    for j in 0..dim {
        for k in j + 1..dim {
            let mut m = CMatrix::zeros(dim, dim);
            m[(j, k)] = Complex64::new(0.0, -h);
            m[(k, j)] = Complex64::new(0.0, h);
            traceless.push(m);
        }
    }
    for l in 1..dim {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..l {
            m[(i, i)] = Complex64::new(1.0 / norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) / norm, 0.0);
        traceless.push(m);
    }
    let identity = linalg::identity(dim) / Complex64::from((dim as f64).sqrt());
    Ok(HermitianBasis { dim, traceless, identity })
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() < 2 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > STRUCTURE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STRUCTURE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lowest = linalg::hermitian_eigenvalues(&matrix)[0];
        if lowest < -PSD_SLACK {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { matrix: linalg::identity(dim) / Complex64::from(dim as f64) })
    }

    /// Projector onto a (not necessarily normalized) vector.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if psi.len() < 2 {
            return Err(Error::InvalidDimension(psi.len()));
        }
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi / Complex64::from(norm);
        Ok(Self { matrix: &v * v.adjoint() })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }

    /// `w ρ + (1 − w) 1/D`.
    pub fn mix_with_identity(&self, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(format!("mixing weight {weight} outside [0, 1]")));
        }
        let d = self.dim();
        let m = &self.matrix * Complex64::from(weight)
            + linalg::identity(d) * Complex64::from((1.0 - weight) / d as f64);
        Ok(Self { matrix: m })
    }
}

/// Coefficients `t_k = Tr(ρ Ω_k)`.
pub fn bloch_coords(rho: &DensityMatrix, basis: &HermitianBasis) -> Result<Vec<f64>> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: rho.dim() });
    }
    Ok(basis
        .traceless_ops()
        .iter()
        .map(|op| linalg::trace_product(rho.matrix(), op).re)
        .collect())
}

/// Normalized vector of `D` independent standard complex Gaussians.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    loop {
        let g = DVector::from_fn(dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = g.norm();
        if n > 0.0 {
            return g / Complex64::from(n);
        }
    }
}

/// Haar-distributed pure state `|ψ⟩⟨ψ|`.
pub fn haar_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let v = haar_vector(dim, rng);
    Ok(DensityMatrix { matrix: &v * v.adjoint() })
}

/// Highest order for which Haar moments are provided.
pub const MAX_MOMENT_ORDER: usize = 4;

/// `E_Haar[p_{j1} ⋯ p_{jn}]` over pure states, with `p_j = Tr(ρ Π_j)`.
///
/// Sum over the symmetric group of products of cycle traces, divided by
/// `D(D+1)⋯(D+n−1)`.
pub fn haar_probability_moment(indices: &[usize], pom: &Pom) -> Result<f64> {
    let n = indices.len();
    if n > MAX_MOMENT_ORDER {
        return Err(Error::UnsupportedOrder(n));
    }
    if let Some(&bad) = indices.iter().find(|&&j| j >= pom.len()) {
        return Err(Error::InvalidArgument(format!("outcome index {bad} out of range")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let outcomes = pom.outcomes();
    let dim = pom.dim();
    let mut total = ZERO;
    for perm in permutations(n) {
        let mut seen = [false; MAX_MOMENT_ORDER];
        let mut term = ONE;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut product = outcomes[indices[start]].clone();
            seen[start] = true;
            let mut next = perm[start];
            while next != start {
                product = &product * &outcomes[indices[next]];
                seen[next] = true;
                next = perm[next];
            }
            term *= product.trace();
        }
        total += term;
    }
    let denom: f64 = (0..n).map(|k| (dim + k) as f64).product();
    let value = total / denom;
    debug_assert!(value.im.abs() < 1e-10, "imaginary Haar moment {value}");
    Ok(value.re)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                extend(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

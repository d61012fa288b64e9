//! Probability-operator measures: validated container, built-in SIC and MUB
//! measurements, the random-POM generator and the duplication and white-noise
//! transforms.

use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::operators::{PSD_SLACK, STRUCTURE_TOL};

/// Completeness tolerance `‖Σ Π_j − 1‖_max`.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Largest condition number of `Σ B_j` accepted by the random generator.
pub const MAX_FRAME_CONDITION: f64 = 1e12;
/// Redraws before [`random_pom`] gives up.
pub const MAX_DRAW_ATTEMPTS: usize = 10;
/// White-noise admixture used for the random full-rank POMs.
pub const DEFAULT_NOISE: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct Pom {
    dim: usize,
    outcomes: Vec<CMatrix>,
    label: String,
}

impl Pom {
    /// Validates every outcome and completeness.
    pub fn new(dim: usize, outcomes: Vec<CMatrix>, label: impl Into<String>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if outcomes.is_empty() {
            return Err(Error::InvalidArgument("a POM needs at least one outcome".into()));
        }
        let mut total = CMatrix::zeros(dim, dim);
        for (index, op) in outcomes.iter().enumerate() {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::InvalidOutcome {
                    index,
                    reason: format!("shape {}x{}, expected {dim}x{dim}", op.nrows(), op.ncols()),
                });
            }
            let herm = linalg::hermiticity_defect(op);
            if herm > STRUCTURE_TOL {
                return Err(Error::InvalidOutcome {
                    index,
                    reason: format!("not Hermitian (defect {herm:.3e})"),
                });
            }
            let lowest = linalg::hermitian_eigenvalues(op)[0];
            if lowest < -PSD_SLACK {
                return Err(Error::InvalidOutcome {
                    index,
                    reason: format!("not positive (eigenvalue {lowest:.3e})"),
                });
            }
            total += op;
        }
        let deviation = linalg::max_abs_diff(&total, &linalg::identity(dim));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::Incomplete { deviation });
        }
        Ok(Self { dim, outcomes, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes `M`.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[CMatrix] {
        &self.outcomes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn traces(&self) -> Vec<f64> {
        self.outcomes.iter().map(|op| op.trace().re).collect()
    }

    /// Numerical rank of outcome `j`: eigenvalues above `tol · λ_max`.
    pub fn outcome_rank(&self, j: usize, tol: f64) -> usize {
        let ev = linalg::hermitian_eigenvalues(&self.outcomes[j]);
        let hi = ev.last().copied().unwrap_or(0.0);
        ev.iter().filter(|&&v| v > tol * hi).count()
    }

    pub fn is_rank_one(&self, tol: f64) -> bool {
        (0..self.len()).all(|j| self.outcome_rank(j, tol) <= 1)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&PomFile::from(self)).expect("POM serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<PomFile>(text)?.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// On-disk layout: row-major matrices of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PomFile {
    pub dim: usize,
    pub outcomes: Vec<Vec<Vec<[f64; 2]>>>,
    pub label: String,
}

impl From<&Pom> for PomFile {
    fn from(pom: &Pom) -> Self {
        let outcomes = pom
            .outcomes
            .iter()
            .map(|op| {
                (0..pom.dim)
                    .map(|i| (0..pom.dim).map(|j| [op[(i, j)].re, op[(i, j)].im]).collect())
                    .collect()
            })
            .collect();
        PomFile { dim: pom.dim, outcomes, label: pom.label.clone() }
    }
}

impl TryFrom<PomFile> for Pom {
    type Error = Error;

    fn try_from(file: PomFile) -> Result<Pom> {
        let d = file.dim;
        let mut outcomes = Vec::with_capacity(file.outcomes.len());
        for (index, rows) in file.outcomes.iter().enumerate() {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidOutcome { index, reason: format!("expected {d}x{d} rows") });
            }
            outcomes.push(CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])));
        }
        Pom::new(d, outcomes, file.label)
    }
}

fn projector(v: &DVector<Complex64>, weight: f64) -> CMatrix {
    let u = v / Complex64::from(v.norm());
    (&u * u.adjoint()) * Complex64::from(weight)
}

/// Qubit tetrahedron SIC, `Π_j = (1 + a_j·σ/√3)/4`.
pub fn qubit_sic() -> Pom {
    const VERTICES: [[f64; 3]; 4] = [[-1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, 1.0], [-1.0, -1.0, -1.0]];
    let s = 1.0 / 3f64.sqrt();
    let outcomes = VERTICES
        .iter()
        .map(|a| {
            let (x, y, z) = (a[0] * s, a[1] * s, a[2] * s);
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(1.0 + z, 0.0),
                    Complex64::new(x, -y),
                    Complex64::new(x, y),
                    Complex64::new(1.0 - z, 0.0),
                ],
            ) * Complex64::from(0.25)
        })
        .collect();
    Pom { dim: 2, outcomes, label: "sic2".into() }
}

fn omega(d: usize, power: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (power % d) as f64 / d as f64)
}

/// SIC POM for `D ∈ {2, 3}`; the qutrit one is the Weyl–Heisenberg orbit of
/// `(0, 1, −1)/√2`.
pub fn sic_povm(dim: usize) -> Result<Pom> {
    match dim {
        2 => Ok(qubit_sic()),
        3 => {
            let fiducial = DVector::from_vec(vec![ZERO, ONE, -ONE]);
            let mut outcomes = Vec::with_capacity(9);
            for shift in 0..3 {
                for phase in 0..3 {
                    // X^shift Z^phase |fiducial⟩
                    let mut v = DVector::from_element(3, ZERO);
                    for n in 0..3 {
                        v[(n + shift) % 3] = fiducial[n] * omega(3, phase * n);
                    }
                    outcomes.push(projector(&v, 1.0 / 3.0));
                }
            }
            Ok(Pom { dim: 3, outcomes, label: "sic3".into() })
        }
        _ => Err(Error::UnsupportedDimension { dim, what: "SIC POM" }),
    }
}

/// Complete set of mutually unbiased bases for `D ∈ {2, 3}`, each vector
/// weighted by `1/(D+1)`.
pub fn mub_povm(dim: usize) -> Result<Pom> {
    let bases: Vec<Vec<DVector<Complex64>>> = match dim {
        2 => {
            let i = Complex64::i();
            vec![
                vec![DVector::from_vec(vec![ONE, ZERO]), DVector::from_vec(vec![ZERO, ONE])],
                vec![DVector::from_vec(vec![ONE, ONE]), DVector::from_vec(vec![ONE, -ONE])],
                vec![DVector::from_vec(vec![ONE, i]), DVector::from_vec(vec![ONE, -i])],
            ]
        }
        3 => {
            let mut bases = vec![(0..3)
                .map(|k| DVector::from_fn(3, |n, _| if n == k { ONE } else { ZERO }))
                .collect()];
            for m in 0..3 {
                bases.push(
                    (0..3)
                        .map(|k| DVector::from_fn(3, |n, _| omega(3, m * n * n + k * n)))
                        .collect(),
                );
            }
            bases
        }
        _ => return Err(Error::UnsupportedDimension { dim, what: "MUB POM" }),
    };
    let w = 1.0 / (dim + 1) as f64;
    let outcomes = bases.iter().flatten().map(|v| projector(v, w)).collect();
    Ok(Pom { dim, outcomes, label: format!("mub{dim}") })
}

fn normalize_frame(dim: usize, blocks: Vec<CMatrix>, label: String) -> Option<Pom> {
    let mut frame = CMatrix::zeros(dim, dim);
    for b in &blocks {
        frame += b;
    }
    let inv_sqrt = linalg::hermitian_inverse_sqrt(&frame, MAX_FRAME_CONDITION)?;
    let outcomes = blocks.iter().map(|b| linalg::sandwich(&inv_sqrt, b)).collect();
    Some(Pom { dim, outcomes, label })
}

/// Random POM: `B_j = A_j†A_j / Tr(A_j†A_j)` with Gaussian `rank × D` matrices
/// `A_j`, then `Π_j = S^{-1/2} B_j S^{-1/2}`, `S = Σ B_j`.
pub fn random_pom<R: Rng + ?Sized>(dim: usize, outcomes: usize, rank: usize, rng: &mut R) -> Result<Pom> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!("rank {rank} must lie in 1..={dim}")));
    }
    if outcomes * rank < dim {
        return Err(Error::InvalidArgument(format!(
            "{outcomes} outcomes of rank {rank} cannot span dimension {dim}"
        )));
    }
    let label = format!("random(D={dim},M={outcomes},rank={rank})");
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let blocks = (0..outcomes)
            .map(|_| {
                let a = CMatrix::from_fn(rank, dim, |_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                let b = a.adjoint() * a;
                let tr = b.trace().re;
                b / Complex64::from(tr)
            })
            .collect();
        if let Some(pom) = normalize_frame(dim, blocks, label.clone()) {
            return Ok(pom);
        }
    }
    Err(Error::DegenerateDraw { attempts: MAX_DRAW_ATTEMPTS })
}

/// Admixes white noise to every outcome and restores completeness.
///
/// `B_j = Π_j + ε Tr(Π_j)/D · 1`, i.e. the normalized outcome plus `ε/D`
/// weighted by its trace, followed by the `S^{-1/2}` sandwich. `ε = 0`
/// leaves the POM unchanged.
pub fn admix_white_noise(pom: &Pom, epsilon: f64) -> Result<Pom> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("noise level {epsilon} must be non-negative")));
    }
    let d = pom.dim;
    let blocks = pom
        .outcomes
        .iter()
        .map(|op| op + linalg::identity(d) * Complex64::from(epsilon * op.trace().re / d as f64))
        .collect();
    let label = format!("{}+noise({epsilon})", pom.label);
    normalize_frame(d, blocks, label).ok_or(Error::DegenerateDraw { attempts: 1 })
}

/// Splits outcome `index` (zero-based) into proportional copies `w·Π_index`.
pub fn duplicate_outcome(pom: &Pom, index: usize, weights: &[f64]) -> Result<Pom> {
    if index >= pom.len() {
        return Err(Error::InvalidArgument(format!(
            "outcome index {index} out of range for {} outcomes",
            pom.len()
        )));
    }
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || weights.iter().any(|&w| !(w > 0.0)) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("weights {weights:?} must be positive and sum to 1")));
    }
    let mut outcomes = Vec::with_capacity(pom.len() + weights.len() - 1);
    outcomes.extend_from_slice(&pom.outcomes[..index]);
    outcomes.extend(weights.iter().map(|&w| &pom.outcomes[index] * Complex64::from(w)));
    outcomes.extend_from_slice(&pom.outcomes[index + 1..]);
    Ok(Pom { dim: pom.dim, outcomes, label: format!("{}+dup({index})", pom.label) })
}

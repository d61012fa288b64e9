//! Finite-sample tomography: multinomial click simulation, linear-inversion
//! estimators and scaled mean-squared-error experiments.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::{self, AccuracyEvaluator, P_FLOOR};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::operators::{bloch_coords, haar_pure_state, DensityMatrix, HermitianBasis};
use crate::pom::Pom;
use crate::qttf::{self, QttfEstimate, SampleStats};
use crate::rng;

/// Smallest probability used as a least-squares weight.
pub const WEIGHT_FLOOR: f64 = 1e-9;
/// Reweighting passes of [`LinearInversion::weighted`].
pub const MAX_REWEIGHTS: usize = 20;

/// Estimator used in MSE experiments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// [`LinearInversion::reduced`].
    Linear,
    /// [`LinearInversion::weighted`].
    #[default]
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClickRecord {
    pub counts: Vec<u64>,
    pub n_total: u64,
    pub pom_label: String,
}

impl ClickRecord {
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_total as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Multinomial counts drawn as a chain of conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(p: &[f64], n_total: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0; p.len()];
    let mut left = n_total;
    let mut mass = 1.0f64;
    for (j, &pj) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if j + 1 == p.len() {
            counts[j] = left;
            break;
        }
        let q = if mass > 0.0 { (pj.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, q).expect("probability in [0, 1]").sample(rng);
        counts[j] = k;
        left -= k;
        mass -= pj.max(0.0);
    }
    counts
}

pub fn sample_clicks<R: Rng + ?Sized>(rho: &DensityMatrix, pom: &Pom, n_total: u64, rng: &mut R) -> Result<ClickRecord> {
    if n_total == 0 {
        return Err(Error::InvalidArgument("at least one sampling event is required".into()));
    }
    let p = fisher::probabilities(rho, pom)?;
    Ok(ClickRecord { counts: multinomial(&p, n_total, rng), n_total, pom_label: pom.label().to_owned() })
}

/// A Hermitian, unit-trace reconstruction; not necessarily positive.
#[derive(Debug, Clone)]
pub struct StateEstimate {
    pub matrix: CMatrix,
    /// Coefficients on the traceless basis operators.
    pub coords: Vec<f64>,
}

/// Unit-trace constrained least squares over the full `D²` basis.
#[derive(Debug, Clone)]
pub struct FullEstimate {
    pub estimate: StateEstimate,
    pub chi: f64,
    /// Trace of the unconstrained pseudo-inverse solution `C̃⁻ f`.
    pub raw_trace: f64,
}

/// Precomputed linear-inversion operators for one POM.
#[derive(Debug, Clone)]
pub struct LinearInversion {
    basis: HermitianBasis,
    traces: Vec<f64>,
    c: RMatrix,
    c_pinv: RMatrix,
    c_tilde: RMatrix,
    c_tilde_pinv: RMatrix,
    gram_tilde_inv: RMatrix,
}

impl LinearInversion {
    pub fn new(pom: &Pom, basis: &HermitianBasis) -> Result<Self> {
        let tm = fisher::measurement_matrices(pom, basis)?;
        let c_pinv = linalg::full_rank_pseudo_inverse(&tm.c_matrix, fisher::IC_REL_TOL)
            .ok_or(Error::NotInformationallyComplete { s_min: tm.s_min() })?;
        let s_min_tilde = tm.singular_values_c_tilde.last().copied().unwrap_or(0.0);
        let c_tilde_pinv = linalg::full_rank_pseudo_inverse(&tm.c_tilde, fisher::IC_REL_TOL)
            .ok_or(Error::NotInformationallyComplete { s_min: s_min_tilde })?;
        let gram_tilde_inv = linalg::spd_inverse(&(tm.c_tilde.transpose() * &tm.c_tilde), 1e-14)
            .ok_or(Error::NotInformationallyComplete { s_min: s_min_tilde })?;
        Ok(Self {
            basis: basis.clone(),
            traces: pom.traces(),
            c: tm.c_matrix,
            c_pinv,
            c_tilde: tm.c_tilde,
            c_tilde_pinv,
            gram_tilde_inv,
        })
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.traces.len() {
            return Err(Error::DimensionMismatch { expected: self.traces.len(), found: f.len() });
        }
        Ok(())
    }

    /// `t = C⁻ f′` with `f′_j = f_j − Tr(Π_j)/D` and `ρ̂ = 1/D + Σ t_k Ω_k`.
    pub fn reduced(&self, frequencies: &[f64]) -> Result<StateEstimate> {
        self.check_len(frequencies)?;
        let d = self.basis.dim() as f64;
        let shifted: Vec<f64> = frequencies.iter().zip(&self.traces).map(|(f, t)| f - t / d).collect();
        let t = &self.c_pinv * nalgebra::DVector::from_vec(shifted);
        let coords: Vec<f64> = t.iter().copied().collect();
        Ok(StateEstimate { matrix: self.basis.reconstruct(&coords)?, coords })
    }

    /// Least squares with weights `1/p̂_j`, where `p̂` are the probabilities of
    /// the previous estimate, starting from [`reduced`](Self::reduced).
    ///
    /// Its scaled MSE tends to `Tr F(ρ)⁻¹` for every informationally complete
    /// POM. Plain inversion reaches that bound only for minimally complete
    /// ones; for the qubit MUB it gives `(9 − |r|²)/2` instead of
    /// `(3/2)(3 − |r|²)`.
    pub fn weighted(&self, frequencies: &[f64]) -> Result<StateEstimate> {
        let start = self.reduced(frequencies)?;
        let d = self.basis.dim() as f64;
        let shifted = nalgebra::DVector::from_iterator(
            frequencies.len(),
            frequencies.iter().zip(&self.traces).map(|(f, t)| f - t / d),
        );
        let mut t = nalgebra::DVector::from_vec(start.coords);
        for _ in 0..MAX_REWEIGHTS {
            let p = &self.c * &t;
            let w: Vec<f64> =
                p.iter().zip(&self.traces).map(|(dp, tr)| 1.0 / (dp + tr / d).max(WEIGHT_FLOOR)).collect();
            let cw = RMatrix::from_fn(self.c.nrows(), self.c.ncols(), |j, k| self.c[(j, k)] * w[j]);
            let normal = self.c.transpose() * &cw;
            let next = match normal.cholesky() {
                Some(ch) => ch.solve(&(cw.transpose() * &shifted)),
                None => break,
            };
            let change = (&next - &t).amax();
            t = next;
            if change < 1e-14 {
                break;
            }
        }
        let coords: Vec<f64> = t.iter().copied().collect();
        Ok(StateEstimate { matrix: self.basis.reconstruct(&coords)?, coords })
    }

    pub fn estimate(&self, estimator: Estimator, frequencies: &[f64]) -> Result<StateEstimate> {
        match estimator {
            Estimator::Linear => self.reduced(frequencies),
            Estimator::Weighted => self.weighted(frequencies),
        }
    }

    /// Least squares over `Γ = (1/√D, Ω_1, …)` with the unit-trace correction
    /// `χ (C̃ᵀC̃)⁻¹ e`.
    pub fn full(&self, frequencies: &[f64]) -> Result<FullEstimate> {
        self.check_len(frequencies)?;
        let sqrt_d = (self.basis.dim() as f64).sqrt();
        let f = nalgebra::DVector::from_column_slice(frequencies);
        let raw = &self.c_tilde_pinv * f;
        let g_e = self.gram_tilde_inv.column(0).into_owned();
        let chi = (1.0 - sqrt_d * raw[0]) / (sqrt_d * g_e[0]);
        let coef = &raw + g_e * chi;
        let mut matrix = self.basis.identity_op() * Complex64::from(coef[0]);
        for (k, op) in self.basis.traceless_ops().iter().enumerate() {
            matrix += op * Complex64::from(coef[k + 1]);
        }
        Ok(FullEstimate {
            estimate: StateEstimate { matrix, coords: coef.iter().skip(1).copied().collect() },
            chi,
            raw_trace: sqrt_d * raw[0],
        })
    }

    pub fn c_tilde(&self) -> &RMatrix {
        &self.c_tilde
    }
}

pub fn lin_estimator_reduced(clicks: &ClickRecord, pom: &Pom, basis: &HermitianBasis) -> Result<StateEstimate> {
    LinearInversion::new(pom, basis)?.reduced(&clicks.frequencies())
}

pub fn lin_estimator_full(clicks: &ClickRecord, pom: &Pom, basis: &HermitianBasis) -> Result<FullEstimate> {
    LinearInversion::new(pom, basis)?.full(&clicks.frequencies())
}

/// Squared Hilbert–Schmidt (Frobenius) distance.
pub fn hs_distance_sq(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MseReport {
    pub n_total: u64,
    pub n_trials: usize,
    /// `N ·` mean squared Hilbert–Schmidt error.
    pub scaled_mse: f64,
    pub std_error: f64,
    /// `Tr F(ρ)⁻¹`.
    pub predicted: f64,
    pub rel_gap: f64,
}

/// Scaled MSE of the reduced linear-inversion estimator at a fixed state.
///
/// Trial `i` draws from stream `i` of `seed`.
pub fn mse_experiment(
    rho: &DensityMatrix,
    pom: &Pom,
    basis: &HermitianBasis,
    n_total: u64,
    n_trials: usize,
    seed: u64,
) -> Result<MseReport> {
    mse_experiment_with(Estimator::Linear, rho, pom, basis, n_total, n_trials, seed)
}

pub fn mse_experiment_with(
    estimator: Estimator,
    rho: &DensityMatrix,
    pom: &Pom,
    basis: &HermitianBasis,
    n_total: u64,
    n_trials: usize,
    seed: u64,
) -> Result<MseReport> {
    let lin = LinearInversion::new(pom, basis)?;
    mse_with(&lin, estimator, rho, pom, basis, n_total, n_trials, seed)
}

#[allow(clippy::too_many_arguments)]
fn mse_with(
    lin: &LinearInversion,
    estimator: Estimator,
    rho: &DensityMatrix,
    pom: &Pom,
    basis: &HermitianBasis,
    n_total: u64,
    n_trials: usize,
    seed: u64,
) -> Result<MseReport> {
    if n_trials < 2 {
        return Err(Error::InvalidArgument("an MSE experiment needs at least two trials".into()));
    }
    if n_total == 0 {
        return Err(Error::InvalidArgument("at least one sampling event is required".into()));
    }
    let p = fisher::probabilities(rho, pom)?;
    let predicted = AccuracyEvaluator::new(pom, basis)?.at_probabilities(&p)?;
    let truth = bloch_coords(rho, basis)?;
    let errors: Vec<f64> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let counts = multinomial(&p, n_total, &mut r);
            let f: Vec<f64> = counts.iter().map(|&c| c as f64 / n_total as f64).collect();
            let est = lin.estimate(estimator, &f).expect("frequency length matches");
            let sq: f64 = est.coords.iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum();
            n_total as f64 * sq
        })
        .collect();
    let stats = SampleStats::new(&errors);
    Ok(MseReport {
        n_total,
        n_trials,
        scaled_mse: stats.mean,
        std_error: stats.std_error,
        predicted,
        rel_gap: (stats.mean - predicted).abs() / predicted,
    })
}

/// Mixing weight `w` such that `w|ψ⟩⟨ψ| + (1−w)/D` has the given purity.
pub fn weight_for_purity(dim: usize, purity: f64) -> Result<f64> {
    let d = dim as f64;
    if !(purity >= 1.0 / d - 1e-15 && purity < 1.0) {
        return Err(Error::InvalidArgument(format!("target purity {purity} outside [1/D, 1)")));
    }
    Ok(((purity * d - 1.0).max(0.0) / (d - 1.0)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SweepConfig {
    /// Purity of every test state, in `[1/D, 1)`.
    pub purity: f64,
    pub n_states: usize,
    pub shots: u64,
    pub trials: usize,
    /// Haar samples for the accompanying Monte-Carlo qTTF.
    pub mc_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub estimator: Estimator,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub mean_scaled_mse: f64,
    pub std_error: f64,
    /// Mean of `Tr F(ρ)⁻¹` over the test states.
    pub mean_predicted: f64,
    pub qttf_mc: QttfEstimate,
    pub qttf_series2: f64,
    pub states: Vec<MseReport>,
}

/// Scaled MSE averaged over Haar pure states mixed to a fixed purity,
/// reported next to the Monte-Carlo and second-order qTTF.
pub fn haar_mse_sweep(pom: &Pom, basis: &HermitianBasis, cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.n_states == 0 {
        return Err(Error::InvalidArgument("at least one test state is required".into()));
    }
    let weight = weight_for_purity(pom.dim(), cfg.purity)?;
    let lin = LinearInversion::new(pom, basis)?;
    let state_seed = rng::child_seed(cfg.seed, &[0]);
    let mut states = Vec::with_capacity(cfg.n_states);
    for s in 0..cfg.n_states {
        let mut r = rng::stream(state_seed, s as u64);
        let rho = loop {
            let rho = haar_pure_state(pom.dim(), &mut r)?.mix_with_identity(weight)?;
            let p = fisher::probabilities(&rho, pom)?;
            if p.iter().all(|&v| v > P_FLOOR) {
                break rho;
            }
        };
        let trial_seed = rng::child_seed(cfg.seed, &[1, s as u64]);
        states.push(mse_with(&lin, cfg.estimator, &rho, pom, basis, cfg.shots, cfg.trials, trial_seed)?);
    }
    let n = states.len() as f64;
    let mean_scaled_mse = states.iter().map(|r| r.scaled_mse).sum::<f64>() / n;
    let std_error = states.iter().map(|r| r.std_error.powi(2)).sum::<f64>().sqrt() / n;
    let mean_predicted = states.iter().map(|r| r.predicted).sum::<f64>() / n;
    let qttf_mc = qttf::qttf_monte_carlo(pom, basis, cfg.mc_samples, rng::child_seed(cfg.seed, &[2]))?;
    let qttf_series2 = qttf::qttf_series(pom, basis, 1.0, 2)?.value;
    Ok(SweepReport { mean_scaled_mse, std_error, mean_predicted, qttf_mc, qttf_series2, states })
}

//! The quantum tomographic transfer function.
//!
//! With `P̄ = diag(Tr Π_j / D)`, `F̄ = Cᵀ P̄⁻¹ C`,
//! `X = P̄⁻¹ C F̄⁻² Cᵀ P̄⁻¹` and `Y = P̄⁻¹ C F̄⁻¹ Cᵀ P̄⁻¹ − P̄⁻¹`, the identity
//!
//! ```text
//! Tr F(ρ)⁻¹ = (1/α) [ Tr F̄⁻¹ + Tr( X Δ_α (1 − Y Δ_α)⁻¹ ) ],   Δ_α = αP − P̄
//! ```
//!
//! holds for every `α > 0`, and the geometric series converges for
//! `α < α₀ = 1/(‖Y‖₂ max_j Tr Π_j)`. Averaging the `k`-th power over Haar pure
//! states, and using `X P̄ Y = 0`, `Y P̄ Y = −Y`, gives per-order contributions
//!
//! ```text
//! k ≤ 1 : Tr F̄⁻¹
//! k = 2 : α F₂
//! k = 3 : α²(F₃ − F₂) + α F₂
//! k = 4 : α³(F₄ − 2F₃ + F₂) + 2α²(F₃ − F₂) + α F₂
//! ```
//!
//! where `F_k = E_Haar Tr(X ΔP (Y ΔP)^{k−1})` is a contraction of `X`, `Y`
//! with the Gram tensors `G⁽ⁿ⁾ = Tr(Π_{j1} ⋯ Π_{jn})`. The contributions are
//! additive, and the full sum does not depend on `α`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{self, AccuracyEvaluator, TomographyMatrices, P_FLOOR};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::operators::{build_basis, haar_vector, HermitianBasis};
use crate::pom::Pom;
use crate::rng;

/// Tolerance of the `Y`-pattern tests that recognize special structures.
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Highest series order implemented.
pub const MAX_SERIES_ORDER: usize = 4;
/// Above this kurtosis a Monte-Carlo estimate is flagged as heavy-tailed.
pub const HEAVY_TAIL_KURTOSIS: f64 = 100.0;
/// Redraws allowed for a single Monte-Carlo sample.
const MAX_REDRAWS_PER_SAMPLE: usize = 64;

#[derive(Debug, Clone)]
pub struct AuxiliaryMatrices {
    pub x_matrix: RMatrix,
    pub y_matrix: RMatrix,
    pub alpha0: f64,
    pub p_bar: Vec<f64>,
    /// `Tr F̄⁻¹`, the zeroth-order term.
    pub fbar_inverse_trace: f64,
}

impl AuxiliaryMatrices {
    pub fn from_matrices(pom: &Pom, tm: &TomographyMatrices) -> Result<Self> {
        tm.require_ic()?;
        let c = &tm.c_matrix;
        let fbar = fisher::fisher_from_probabilities(c, &tm.p_bar)?;
        let fbar_inv = linalg::spd_inverse(&fbar, fisher::SINGULAR_REL_TOL)
            .ok_or(Error::NotInformationallyComplete { s_min: tm.s_min() })?;
        let p_inv: Vec<f64> = tm.p_bar.iter().map(|p| 1.0 / p).collect();
        let left = linalg::diag(&p_inv) * c;
        let y_core = &left * &fbar_inv * left.transpose();
        let x_matrix = sym(&left * &fbar_inv * &fbar_inv * left.transpose());
        let y_matrix = sym(y_core - linalg::diag(&p_inv));
        let max_trace = pom.traces().into_iter().fold(0.0, f64::max);
        let alpha0 = 1.0 / (linalg::spectral_norm(&y_matrix) * max_trace);
        Ok(Self {
            fbar_inverse_trace: fbar_inv.trace(),
            x_matrix,
            y_matrix,
            alpha0,
            p_bar: tm.p_bar.clone(),
        })
    }

    /// Spectral radius of `Y (αP − P̄)`; below one the series converges.
    pub fn deformation_spectral_radius(&self, p: &[f64], alpha: f64) -> f64 {
        let delta: Vec<f64> = p.iter().zip(&self.p_bar).map(|(p, pb)| alpha * p - pb).collect();
        let m = &self.y_matrix * linalg::diag(&delta);
        m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn sym(m: RMatrix) -> RMatrix {
    (&m + m.transpose()) * 0.5
}

pub fn auxiliary_matrices(pom: &Pom, basis: &HermitianBasis) -> Result<AuxiliaryMatrices> {
    AuxiliaryMatrices::from_matrices(pom, &fisher::measurement_matrices(pom, basis)?)
}

/// Limits on the fourth-order contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesBudget {
    /// Bytes allowed for materialized Gram tensors.
    pub memory_bytes: u64,
    /// Largest number of index tuples a single series term may visit.
    pub max_terms: u128,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        Self { memory_bytes: 1 << 30, max_terms: 1 << 33 }
    }
}

impl SeriesBudget {
    fn check(&self, outcomes: usize, order: u32) -> Result<()> {
        let required = (outcomes as u128).pow(order);
        if required > self.max_terms {
            return Err(Error::BudgetExceeded { required, budget: self.max_terms, unit: "contractions" });
        }
        Ok(())
    }

    /// Fails when the `M²` cached pair products `Π_a Π_b` would not fit.
    fn check_pair_cache(&self, outcomes: usize, dim: usize) -> Result<()> {
        let required = ((outcomes * outcomes * dim * dim) as u128).saturating_mul(16);
        if required > self.memory_bytes as u128 {
            return Err(Error::BudgetExceeded { required, budget: self.memory_bytes as u128, unit: "bytes" });
        }
        Ok(())
    }

    fn fits(&self, entries: u128) -> bool {
        entries.saturating_mul(16) <= self.memory_bytes as u128
    }
}

/// Gram tensors of a POM up to fourth order.
///
/// `G²` is always stored; `G³` and `G⁴` are stored when they fit the memory
/// budget and otherwise evaluated from cached pair products `Π_a Π_b`.
/// Nothing beyond `G²` is built when `max_order < 3`.
#[derive(Debug, Clone)]
pub struct GramTensors {
    outcomes: usize,
    dim: usize,
    pub g2: RMatrix,
    ops: Vec<CMatrix>,
    pairs: Vec<CMatrix>,
    g3: Option<Vec<Complex64>>,
    g4: Option<Vec<Complex64>>,
}

impl GramTensors {
    pub fn new(pom: &Pom, budget: &SeriesBudget, max_order: usize) -> Result<Self> {
        let m = pom.len();
        let ops = pom.outcomes();
        let g2 = RMatrix::from_fn(m, m, |a, b| linalg::trace_product(&ops[a], &ops[b]).re);
        let mut g = Self { outcomes: m, dim: pom.dim(), g2, ops: ops.to_vec(), pairs: Vec::new(), g3: None, g4: None };
        if max_order < 3 {
            return Ok(g);
        }
        budget.check_pair_cache(m, pom.dim())?;
        g.pairs = (0..m * m).into_par_iter().map(|ab| &ops[ab / m] * &ops[ab % m]).collect();
        let m128 = m as u128;
        if budget.fits(m128.pow(3)) {
            let g3 = (0..m * m * m)
                .into_par_iter()
                .map(|i| linalg::trace_product(&g.pairs[i / m], &ops[i % m]))
                .collect();
            g.g3 = Some(g3);
        }
        if max_order >= 4 && budget.fits(m128.pow(4)) && budget.max_terms >= m128.pow(4) {
            let mm = m * m;
            let g4 = (0..mm * mm)
                .into_par_iter()
                .map(|i| linalg::trace_product(&g.pairs[i / mm], &g.pairs[i % mm]))
                .collect();
            g.g4 = Some(g4);
        }
        Ok(g)
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn g3_materialized(&self) -> bool {
        self.g3.is_some()
    }

    pub fn g4_materialized(&self) -> bool {
        self.g4.is_some()
    }

    /// `Tr(Π_a Π_b Π_c)`.
    pub fn g3(&self, a: usize, b: usize, c: usize) -> Complex64 {
        let m = self.outcomes;
        match &self.g3 {
            Some(t) => t[(a * m + b) * m + c],
            None => linalg::trace_product(&self.pairs[a * m + b], &self.ops[c]),
        }
    }

    /// `Tr(Π_a Π_b Π_c Π_d)`.
    pub fn g4(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        let m = self.outcomes;
        match &self.g4 {
            Some(t) => t[((a * m + b) * m + c) * m + d],
            None => linalg::trace_product(&self.pairs[a * m + b], &self.pairs[c * m + d]),
        }
    }
}

/// Evaluates the series terms `F₂`, `F₃`, `F₄` for one POM.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    pub aux: AuxiliaryMatrices,
    pub gram: GramTensors,
    budget: SeriesBudget,
    max_order: usize,
}

impl SeriesTerms {
    /// Prepares every term up to fourth order.
    pub fn new(pom: &Pom, basis: &HermitianBasis, budget: SeriesBudget) -> Result<Self> {
        Self::with_order(pom, basis, budget, MAX_SERIES_ORDER)
    }

    pub fn with_order(pom: &Pom, basis: &HermitianBasis, budget: SeriesBudget, max_order: usize) -> Result<Self> {
        if max_order > MAX_SERIES_ORDER {
            return Err(Error::UnsupportedOrder(max_order));
        }
        let aux = auxiliary_matrices(pom, basis)?;
        let gram = GramTensors::new(pom, &budget, max_order)?;
        Ok(Self { aux, gram, budget, max_order })
    }

    fn require_order(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(Error::InvalidArgument(format!(
                "series terms were prepared up to order {}, not {order}",
                self.max_order
            )));
        }
        Ok(())
    }

    fn dim(&self) -> f64 {
        self.gram.dim as f64
    }

    /// `Σ X_{j2 j1} Y_{j1 j2} G²_{j1 j2}`.
    fn s2(&self) -> f64 {
        let (x, y, g) = (&self.aux.x_matrix, &self.aux.y_matrix, &self.gram.g2);
        x.iter().zip(y.iter()).zip(g.iter()).map(|((x, y), g)| x * y * g).sum()
    }

    /// `Σ X_{j3 j1} Y_{j1 j2} Y_{j2 j3} Re G³_{j1 j2 j3}`.
    fn s3(&self) -> f64 {
        let m = self.gram.outcomes;
        let (x, y) = (&self.aux.x_matrix, &self.aux.y_matrix);
        let partial: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|a| {
                let mut acc = 0.0;
                for b in 0..m {
                    let yab = y[(a, b)];
                    if yab == 0.0 {
                        continue;
                    }
                    for c in 0..m {
                        acc += x[(c, a)] * yab * y[(b, c)] * self.gram.g3(a, b, c).re;
                    }
                }
                acc
            })
            .collect();
        partial.iter().sum()
    }

    fn s4(&self) -> f64 {
        let m = self.gram.outcomes;
        let (x, y, g2) = (&self.aux.x_matrix, &self.aux.y_matrix, &self.gram.g2);
        let g = &self.gram;
        let partial: Vec<f64> = (0..m * m)
            .into_par_iter()
            .map(|ab| {
                let (a, b) = (ab / m, ab % m);
                let yab = y[(a, b)];
                if yab == 0.0 {
                    return 0.0;
                }
                let mut acc = 0.0;
                for c in 0..m {
                    let ybc = y[(b, c)];
                    if ybc == 0.0 {
                        continue;
                    }
                    for d in 0..m {
                        let w = x[(d, a)] * yab * ybc * y[(c, d)];
                        if w == 0.0 {
                            continue;
                        }
                        let cycles = (g.g4(a, b, c, d) + g.g4(a, b, d, c) + g.g4(a, c, b, d)).re;
                        let pairs = g2[(a, b)] * g2[(c, d)] + g2[(a, c)] * g2[(b, d)] + g2[(a, d)] * g2[(b, c)];
                        acc += w * (2.0 * cycles + pairs);
                    }
                }
                acc
            })
            .collect();
        partial.iter().sum()
    }

    pub fn f2(&self) -> f64 {
        let d = self.dim();
        self.s2() / (d * (d + 1.0))
    }

    pub fn f3(&self) -> Result<f64> {
        self.require_order(3)?;
        self.budget.check(self.gram.outcomes, 3)?;
        let d = self.dim();
        Ok(2.0 * (self.s2() + self.s3()) / (d * (d + 1.0) * (d + 2.0)))
    }

    pub fn f4(&self) -> Result<f64> {
        self.require_order(4)?;
        self.budget.check(self.gram.outcomes, 4)?;
        let d = self.dim();
        let numer = (6.0 - d) * self.s2() + 12.0 * self.s3() + self.s4();
        Ok(numer / (d * (d + 1.0) * (d + 2.0) * (d + 3.0)))
    }
}

/// Second-order Haar correction `F₂`.
pub fn series_term_f2(pom: &Pom) -> Result<f64> {
    Ok(SeriesTerms::new(pom, &build_basis(pom.dim())?, SeriesBudget::default())?.f2())
}

/// Third-order Haar correction `F₃`.
pub fn series_term_f3(pom: &Pom) -> Result<f64> {
    SeriesTerms::new(pom, &build_basis(pom.dim())?, SeriesBudget::default())?.f3()
}

/// Fourth-order Haar correction `F₄`.
pub fn series_term_f4(pom: &Pom) -> Result<f64> {
    SeriesTerms::new(pom, &build_basis(pom.dim())?, SeriesBudget::default())?.f4()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QttfMethod {
    ClosedMinimal,
    ClosedMinimalBases,
    Series { order: usize, alpha: f64 },
    MonteCarlo { n_samples: usize, seed: u64 },
}

impl QttfMethod {
    pub fn name(&self) -> &'static str {
        match self {
            QttfMethod::ClosedMinimal => "closed_minimal",
            QttfMethod::ClosedMinimalBases => "closed_minimal_bases",
            QttfMethod::Series { .. } => "series",
            QttfMethod::MonteCarlo { .. } => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloDiagnostics {
    /// Haar draws discarded because some probability fell below the floor.
    pub redraws: usize,
    pub kurtosis: f64,
    pub heavy_tailed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QttfEstimate {
    pub value: f64,
    pub method: QttfMethod,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<MonteCarloDiagnostics>,
}

impl QttfEstimate {
    fn exact(value: f64, method: QttfMethod) -> Self {
        Self { value, method, std_error: 0.0, diagnostics: None }
    }
}

/// Sum of the per-order contributions up to `max_order` at scale `alpha`.
pub fn series_value(terms: &SeriesTerms, alpha: f64, max_order: usize) -> Result<f64> {
    if max_order > MAX_SERIES_ORDER {
        return Err(Error::UnsupportedOrder(max_order));
    }
    let mut value = terms.aux.fbar_inverse_trace;
    if max_order < 2 {
        return Ok(value);
    }
    let f2 = terms.f2();
    value += alpha * f2;
    if max_order < 3 {
        return Ok(value);
    }
    let f3 = terms.f3()?;
    value += alpha * alpha * (f3 - f2) + alpha * f2;
    if max_order < 4 {
        return Ok(value);
    }
    let f4 = terms.f4()?;
    let a2 = alpha * alpha;
    value += a2 * alpha * (f4 - 2.0 * f3 + f2) + 2.0 * a2 * (f3 - f2) + alpha * f2;
    Ok(value)
}

pub fn qttf_series(pom: &Pom, basis: &HermitianBasis, alpha: f64, max_order: usize) -> Result<QttfEstimate> {
    qttf_series_with_budget(pom, basis, alpha, max_order, SeriesBudget::default())
}

pub fn qttf_series_with_budget(
    pom: &Pom,
    basis: &HermitianBasis,
    alpha: f64,
    max_order: usize,
    budget: SeriesBudget,
) -> Result<QttfEstimate> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if max_order > MAX_SERIES_ORDER {
        return Err(Error::UnsupportedOrder(max_order));
    }
    let terms = SeriesTerms::with_order(pom, basis, budget, max_order)?;
    if max_order >= 3 && alpha >= terms.aux.alpha0 {
        log::warn!(
            "alpha = {alpha} is not below the convergence radius {:.6}; higher orders may diverge",
            terms.aux.alpha0
        );
    }
    Ok(QttfEstimate::exact(
        series_value(&terms, alpha, max_order)?,
        QttfMethod::Series { order: max_order, alpha },
    ))
}

fn y_max_deviation(y: &RMatrix, expected: impl Fn(usize, usize) -> f64) -> f64 {
    let m = y.nrows();
    let mut worst = 0.0f64;
    for j in 0..m {
        for k in 0..m {
            worst = worst.max((y[(j, k)] - expected(j, k)).abs());
        }
    }
    worst
}

/// `Y_jk = −1` for all `j, k` and `M = D²`.
pub fn is_minimal(pom: &Pom, aux: &AuxiliaryMatrices) -> std::result::Result<(), String> {
    let d = pom.dim();
    if pom.len() != d * d {
        return Err(format!("{} outcomes, expected {}", pom.len(), d * d));
    }
    let dev = y_max_deviation(&aux.y_matrix, |_, _| -1.0);
    if dev > STRUCTURE_TOL {
        return Err(format!("Y deviates from -1 by {dev:.3e}"));
    }
    Ok(())
}

/// Groups the outcomes into `D+1` rank-one bases, checked through the block
/// pattern of `Y` (entries `−(D+1)` within a basis, zero across).
pub fn minimal_bases_groups(pom: &Pom, aux: &AuxiliaryMatrices) -> std::result::Result<Vec<Vec<usize>>, String> {
    let d = pom.dim();
    let m = pom.len();
    if m != d * (d + 1) {
        return Err(format!("{m} outcomes, expected {}", d * (d + 1)));
    }
    let block = -((d + 1) as f64);
    let y = &aux.y_matrix;
    let mut group_of = vec![usize::MAX; m];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in 0..m {
        if group_of[j] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|&k| (y[(j, k)] - block).abs() < STRUCTURE_TOL).collect();
        if members.len() != d {
            return Err(format!("outcome {j} has {} partners in Y, expected {d}", members.len()));
        }
        for &k in &members {
            if group_of[k] != usize::MAX {
                return Err(format!("outcome {k} belongs to two blocks"));
            }
            group_of[k] = groups.len();
        }
        groups.push(members);
    }
    let dev = y_max_deviation(y, |j, k| if group_of[j] == group_of[k] { block } else { 0.0 });
    if dev > STRUCTURE_TOL {
        return Err(format!("Y deviates from the block pattern by {dev:.3e}"));
    }
    for (j, op) in pom.outcomes().iter().enumerate() {
        if pom.outcome_rank(j, 1e-8) != 1 {
            return Err(format!("outcome {j} is not rank one"));
        }
        if (op.trace().re - 1.0 / (d + 1) as f64).abs() > STRUCTURE_TOL {
            return Err(format!("outcome {j} does not have trace 1/(D+1)"));
        }
    }
    let target = linalg::identity(d) / Complex64::from((d + 1) as f64);
    for g in &groups {
        let mut total = CMatrix::zeros(d, d);
        for &j in g {
            total += &pom.outcomes()[j];
        }
        let dev = linalg::max_abs_diff(&total, &target);
        if dev > STRUCTURE_TOL {
            return Err(format!("basis {g:?} does not sum to 1/(D+1) (deviation {dev:.3e})"));
        }
    }
    Ok(groups)
}

/// `Tr F̄⁻¹ − 1 + 1/D` for minimally complete POMs.
pub fn qttf_closed_minimal(pom: &Pom, basis: &HermitianBasis) -> Result<QttfEstimate> {
    let aux = auxiliary_matrices(pom, basis)?;
    is_minimal(pom, &aux).map_err(Error::NotMinimal)?;
    let d = pom.dim() as f64;
    Ok(QttfEstimate::exact(aux.fbar_inverse_trace - 1.0 + 1.0 / d, QttfMethod::ClosedMinimal))
}

/// `Tr (CᵀC)⁻¹ / (D+1)²` for `D+1` rank-one bases.
pub fn qttf_closed_minimal_bases(pom: &Pom, basis: &HermitianBasis) -> Result<QttfEstimate> {
    let tm = fisher::measurement_matrices(pom, basis)?;
    let aux = AuxiliaryMatrices::from_matrices(pom, &tm)?;
    minimal_bases_groups(pom, &aux).map_err(Error::NotMinimalBases)?;
    let ctc = tm.c_matrix.transpose() * &tm.c_matrix;
    let inv = linalg::spd_inverse(&ctc, fisher::SINGULAR_REL_TOL)
        .ok_or(Error::NotInformationallyComplete { s_min: tm.s_min() })?;
    let d1 = (pom.dim() + 1) as f64;
    Ok(QttfEstimate::exact(inv.trace() / (d1 * d1), QttfMethod::ClosedMinimalBases))
}

/// Haar average of `Tr F(ρ)⁻¹` over `n_samples` pure states.
///
/// Sample `i` draws from stream `i` of `seed`. A draw with some probability at
/// or below [`P_FLOOR`] is discarded and redrawn from the same stream.
pub fn qttf_monte_carlo(pom: &Pom, basis: &HermitianBasis, n_samples: usize, seed: u64) -> Result<QttfEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least two samples".into()));
    }
    let tm = fisher::measurement_matrices(pom, basis)?;
    tm.require_ic()?;
    let eval = AccuracyEvaluator::from_matrix(pom, tm.c_matrix);
    let draws: Vec<Result<(f64, usize)>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let mut redraws = 0;
            loop {
                let psi = haar_vector(pom.dim(), &mut r);
                let p: Vec<f64> = pom
                    .outcomes()
                    .iter()
                    .map(|op| (psi.adjoint() * op * &psi)[(0, 0)].re)
                    .collect();
                if p.iter().all(|&v| v > P_FLOOR) {
                    return eval.at_probabilities(&p).map(|v| (v, redraws));
                }
                redraws += 1;
                if redraws > MAX_REDRAWS_PER_SAMPLE {
                    return Ok((f64::NAN, redraws));
                }
            }
        })
        .collect();
    let mut values = Vec::with_capacity(n_samples);
    let mut redraws = 0;
    for d in draws {
        let (v, r) = d?;
        redraws += r;
        if v.is_finite() {
            values.push(v);
        }
    }
    if redraws > n_samples || values.len() < 2 {
        return Err(Error::PathologicalPom { rejected: redraws, drawn: redraws + values.len() });
    }
    let stats = SampleStats::new(&values);
    let heavy_tailed = stats.kurtosis > HEAVY_TAIL_KURTOSIS;
    if heavy_tailed {
        log::warn!("Tr F^-1 samples are heavy-tailed (kurtosis {:.1}); increase the sample count", stats.kurtosis);
    }
    Ok(QttfEstimate {
        value: stats.mean,
        method: QttfMethod::MonteCarlo { n_samples, seed },
        std_error: stats.std_error,
        diagnostics: Some(MonteCarloDiagnostics { redraws, kurtosis: stats.kurtosis, heavy_tailed }),
    })
}

/// Mean, standard error and kurtosis of a sample.
#[derive(Debug, Clone, Copy)]
pub struct SampleStats {
    pub mean: f64,
    pub std_dev: f64,
    pub std_error: f64,
    pub kurtosis: f64,
}

impl SampleStats {
    pub fn new(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        let std_dev = (m2 * n / (n - 1.0).max(1.0)).sqrt();
        Self {
            mean,
            std_dev,
            std_error: std_dev / n.sqrt(),
            kurtosis: if m2 > 0.0 { m4 / (m2 * m2) } else { 0.0 },
        }
    }
}

/// Known values of the transfer function and its bounds in dimension `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceValues {
    /// SIC POMs, `D² + D − 2`.
    pub sic: f64,
    /// Complete MUB, `D² − 1`.
    pub mub: f64,
    /// Lower bound of `Tr F̄⁻¹`, `(D+1)(D²−1)/D`.
    pub zeroth_bound: f64,
    /// Covariant measurement, `2(D−1)`.
    pub covariant: f64,
    /// Relative error of the second-order approximation in the covariant
    /// limit, `D/(D+2)`.
    pub limit_rel_error: f64,
}

impl ReferenceValues {
    /// Limit of the halved relative error, `D/(2(D+2))`.
    pub fn halved_limit(&self) -> f64 {
        self.limit_rel_error / 2.0
    }
}

pub fn reference_values(dim: usize) -> Result<ReferenceValues> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let d = dim as f64;
    Ok(ReferenceValues {
        sic: d * d + d - 2.0,
        mub: d * d - 1.0,
        zeroth_bound: (d + 1.0) * (d * d - 1.0) / d,
        covariant: 2.0 * (d - 1.0),
        limit_rel_error: d / (d + 2.0),
    })
}

/// Options for [`qttf_auto`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutoOptions {
    /// Use the second-order series while `M ≤ series_factor · D²`.
    pub series_factor: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub budget: SeriesBudget,
}

impl Default for AutoOptions {
    fn default() -> Self {
        Self { series_factor: 4, mc_samples: 10_000, seed: 0, budget: SeriesBudget::default() }
    }
}

/// Closed form when the structure is recognized, otherwise the second-order
/// series at `α = 1` for moderate `M`, otherwise Monte Carlo.
pub fn qttf_auto(pom: &Pom, basis: &HermitianBasis, opts: &AutoOptions) -> Result<QttfEstimate> {
    let tm = fisher::measurement_matrices(pom, basis)?;
    let aux = AuxiliaryMatrices::from_matrices(pom, &tm)?;
    if is_minimal(pom, &aux).is_ok() {
        return qttf_closed_minimal(pom, basis);
    }
    if minimal_bases_groups(pom, &aux).is_ok() {
        return qttf_closed_minimal_bases(pom, basis);
    }
    let d = pom.dim();
    if pom.len() <= opts.series_factor * d * d {
        qttf_series_with_budget(pom, basis, 1.0, 2, opts.budget)
    } else {
        qttf_monte_carlo(pom, basis, opts.mc_samples, opts.seed)
    }
}

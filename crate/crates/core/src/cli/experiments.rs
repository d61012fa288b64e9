//! Experiment runners behind the `compare`, `fig1` and `fig2` commands.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{haar_mse_sweep, SweepConfig};
use crate::fisher::measurement_matrices;
use crate::operators::build_basis;
use crate::pom::{admix_white_noise, random_pom, Pom};
use crate::qttf::{self, qttf_auto, qttf_monte_carlo, qttf_series, AutoOptions, QttfEstimate};
use crate::rng;

/// Relative tolerance under which two quantifier values count as equal.
const TIE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub label: String,
    pub outcomes: usize,
    pub kappa_c: f64,
    pub kappa_c_tilde: f64,
    pub fbar_inverse_trace: f64,
    pub qttf: QttfEstimate,
    pub aqttf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareTable {
    pub rows: Vec<CompareRow>,
    /// Pairs whose ordering by `κ(C̃)` disagrees with their ordering by qTTF.
    pub inversions: Vec<(usize, usize)>,
    /// Row with the smallest qTTF.
    pub best: usize,
}

fn ordering(a: f64, b: f64, slack: f64) -> i8 {
    if (a - b).abs() <= slack {
        0
    } else if a < b {
        -1
    } else {
        1
    }
}

pub fn compare_poms(poms: &[Pom], opts: &AutoOptions) -> Result<CompareTable> {
    if poms.len() < 2 {
        return Err(Error::InvalidArgument("compare needs at least two POMs".into()));
    }
    let dim = poms[0].dim();
    if let Some(p) = poms.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
    }
    let basis = build_basis(dim)?;
    let mut rows = Vec::with_capacity(poms.len());
    for pom in poms {
        let tm = measurement_matrices(pom, &basis)?;
        let aux = qttf::AuxiliaryMatrices::from_matrices(pom, &tm)?;
        rows.push(CompareRow {
            label: pom.label().to_owned(),
            outcomes: pom.len(),
            kappa_c: tm.kappa_c,
            kappa_c_tilde: tm.kappa_c_tilde,
            fbar_inverse_trace: aux.fbar_inverse_trace,
            qttf: qttf_auto(pom, &basis, opts)?,
            aqttf: qttf_series(pom, &basis, 1.0, 2)?.value,
        });
    }
    let mut inversions = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let k_slack = TIE_REL_TOL * a.kappa_c_tilde.max(b.kappa_c_tilde);
            let q_slack = (TIE_REL_TOL * a.qttf.value.max(b.qttf.value))
                .max(3.0 * a.qttf.std_error.hypot(b.qttf.std_error));
            if ordering(a.kappa_c_tilde, b.kappa_c_tilde, k_slack) != ordering(a.qttf.value, b.qttf.value, q_slack) {
                inversions.push((i, j));
            }
        }
    }
    let best = (0..rows.len())
        .min_by(|&a, &b| rows[a].qttf.value.total_cmp(&rows[b].qttf.value))
        .unwrap_or(0);
    Ok(CompareTable { rows, inversions, best })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Config {
    pub dims: Vec<usize>,
    pub mus: Vec<f64>,
    pub ranks: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub n_poms: usize,
    pub n_haar: usize,
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self {
            dims: vec![2],
            mus: vec![1.25, 1.5, 2.0, 3.0],
            ranks: vec![1],
            epsilons: vec![0.0, 0.05],
            n_poms: 50,
            n_haar: 500,
            bootstrap: 2000,
            seed: 0,
        }
    }
}

/// One `(D, μ, rank, ε)` cell of the relative-error study.
#[derive(Debug, Clone, Serialize)]
pub struct Fig1Cell {
    pub dim: usize,
    pub mu: f64,
    pub outcomes: usize,
    pub rank: usize,
    pub epsilon: f64,
    pub halved_rel_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `D/(2(D+2))`.
    pub limit: f64,
    /// Halved relative error of every POM, in POM-index order.
    pub samples: Vec<f64>,
    pub skipped: Option<String>,
}

/// `M = μD²`, which must be a whole number.
pub fn outcomes_for(dim: usize, mu: f64) -> Result<usize> {
    let m = mu * (dim * dim) as f64;
    if !(m >= 1.0) || (m - m.round()).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("mu = {mu} gives a non-integral M = {m} for D = {dim}")));
    }
    Ok(m.round() as usize)
}

/// `(aqTTF − qTTF) / (2 qTTF)` for one POM, with the Monte-Carlo qTTF taken
/// as reference.
pub fn halved_relative_error(pom: &Pom, n_haar: usize, seed: u64) -> Result<f64> {
    let basis = build_basis(pom.dim())?;
    let aq = qttf_series(pom, &basis, 1.0, 2)?.value;
    let q = qttf_monte_carlo(pom, &basis, n_haar, seed)?.value;
    Ok((aq - q) / (2.0 * q))
}

/// Percentile bootstrap interval of the mean.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, level: f64, seed: u64) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut r = rng::from_seed(seed);
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples.max(1))
        .map(|_| (0..n).map(|_| values[r.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let at = |q: f64| means[((q * (means.len() - 1) as f64).round() as usize).min(means.len() - 1)];
    (at(tail), at(1.0 - tail))
}

/// Bootstrap interval of the mean paired difference `a − b`.
pub fn paired_difference_ci(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<(f64, f64, f64)> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidArgument("paired samples must be non-empty and of equal length".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let (lo, hi) = bootstrap_mean_ci(&diffs, resamples, 0.95, seed);
    Ok((mean, lo, hi))
}

pub fn run_fig1(cfg: &Fig1Config) -> Result<Vec<Fig1Cell>> {
    for &d in &cfg.dims {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        for &mu in &cfg.mus {
            outcomes_for(d, mu)?;
        }
    }
    if let Some(e) = cfg.epsilons.iter().find(|e| !(**e >= 0.0)) {
        return Err(Error::InvalidArgument(format!("noise level {e} must be non-negative")));
    }
    if cfg.n_poms == 0 {
        return Ok(Vec::new());
    }
    let mut cells = Vec::new();
    for &dim in &cfg.dims {
        for &mu in &cfg.mus {
            let m = outcomes_for(dim, mu)?;
            for &rank in &cfg.ranks {
                let pom_seed = rng::child_seed(cfg.seed, &[dim as u64, m as u64, rank as u64]);
                for &epsilon in &cfg.epsilons {
                    cells.push(fig1_cell(cfg, dim, mu, m, rank, epsilon, pom_seed));
                }
            }
        }
    }
    Ok(cells)
}

fn fig1_cell(cfg: &Fig1Config, dim: usize, mu: f64, m: usize, rank: usize, epsilon: f64, pom_seed: u64) -> Fig1Cell {
    // same base POMs and Haar samples for every ε of this (D, M, rank)
    let results: Result<Vec<f64>> = (0..cfg.n_poms)
        .into_par_iter()
        .map(|k| {
            let base = random_pom(dim, m, rank, &mut rng::stream(pom_seed, k as u64))?;
            let pom = if epsilon > 0.0 { admix_white_noise(&base, epsilon)? } else { base };
            halved_relative_error(&pom, cfg.n_haar, rng::child_seed(pom_seed, &[k as u64]))
        })
        .collect();
    let limit = dim as f64 / (2.0 * (dim as f64 + 2.0));
    let mut cell = Fig1Cell {
        dim,
        mu,
        outcomes: m,
        rank,
        epsilon,
        halved_rel_err: f64::NAN,
        ci_lo: f64::NAN,
        ci_hi: f64::NAN,
        limit,
        samples: Vec::new(),
        skipped: None,
    };
    match results {
        Ok(samples) => {
            cell.halved_rel_err = samples.iter().sum::<f64>() / samples.len() as f64;
            let (lo, hi) = bootstrap_mean_ci(&samples, cfg.bootstrap, 0.95, rng::child_seed(pom_seed, &[u64::MAX]));
            cell.ci_lo = lo;
            cell.ci_hi = hi;
            cell.samples = samples;
        }
        Err(e) => cell.skipped = Some(e.to_string()),
    }
    cell
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub dim: usize,
    pub outcome_choices: Vec<usize>,
    pub rank: usize,
    /// Candidates drawn per attempt.
    pub pool_per_attempt: usize,
    pub attempts: usize,
    pub mc_samples: usize,
    /// Required gap in units of the combined standard error.
    pub min_sigma: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            outcome_choices: vec![6, 8],
            rank: 1,
            pool_per_attempt: 8,
            attempts: 20,
            mc_samples: 4000,
            min_sigma: 5.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub pom: Pom,
    pub kappa_c_tilde: f64,
    pub qttf: QttfEstimate,
}

/// Two POMs with `κ₁ < κ₂` and `qTTF₁ > qTTF₂`.
#[derive(Debug, Clone)]
pub struct CounterexamplePair {
    pub first: Candidate,
    pub second: Candidate,
    /// `(qTTF₁ − qTTF₂)` over the combined standard error.
    pub sigma: f64,
    pub attempts_used: usize,
}

/// Random search for a pair of POMs that the condition number ranks the
/// wrong way round.
pub fn search_counterexample(cfg: &SearchConfig) -> Result<CounterexamplePair> {
    if cfg.outcome_choices.is_empty() {
        return Err(Error::InvalidArgument("no outcome counts to search over".into()));
    }
    let basis = build_basis(cfg.dim)?;
    let mut pool: Vec<Candidate> = Vec::new();
    for attempt in 0..cfg.attempts {
        let fresh: Result<Vec<Candidate>> = (0..cfg.pool_per_attempt)
            .into_par_iter()
            .map(|k| {
                let index = (attempt * cfg.pool_per_attempt + k) as u64;
                let m = cfg.outcome_choices[index as usize % cfg.outcome_choices.len()];
                let pom = random_pom(cfg.dim, m, cfg.rank, &mut rng::stream(cfg.seed, index))?
                    .with_label(format!("search(D={},M={m},rank={},seed={},index={index})", cfg.dim, cfg.rank, cfg.seed));
                let kappa_c_tilde = measurement_matrices(&pom, &basis)?.kappa_c_tilde;
                let qttf = qttf_monte_carlo(&pom, &basis, cfg.mc_samples, rng::child_seed(cfg.seed, &[index]))?;
                Ok(Candidate { pom, kappa_c_tilde, qttf })
            })
            .collect();
        pool.extend(fresh?);
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, a) in pool.iter().enumerate() {
            for (j, b) in pool.iter().enumerate() {
                if a.kappa_c_tilde < b.kappa_c_tilde && a.qttf.value > b.qttf.value {
                    let sigma = (a.qttf.value - b.qttf.value) / a.qttf.std_error.hypot(b.qttf.std_error);
                    if sigma >= cfg.min_sigma && best.is_none_or(|(_, _, s)| sigma > s) {
                        best = Some((i, j, sigma));
                    }
                }
            }
        }
        if let Some((i, j, sigma)) = best {
            return Ok(CounterexamplePair {
                first: pool[i].clone(),
                second: pool[j].clone(),
                sigma,
                attempts_used: attempt + 1,
            });
        }
    }
    Err(Error::SearchExhausted { attempts: cfg.attempts })
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Row {
    pub label: String,
    pub kappa_c_tilde: f64,
    pub qttf_mc: f64,
    pub qttf_mc_std_error: f64,
    pub aqttf: f64,
    pub mean_scaled_mse: f64,
    pub mse_std_error: f64,
}

/// Quantifier comparison of a POM pair: `κ(C̃)`, Monte-Carlo qTTF, aqTTF and
/// the scaled MSE of linear inversion over nearly pure test states.
pub fn run_fig2(poms: [&Pom; 2], sweep: &SweepConfig) -> Result<Vec<Fig2Row>> {
    if poms[0].dim() != poms[1].dim() {
        return Err(Error::DimensionMismatch { expected: poms[0].dim(), found: poms[1].dim() });
    }
    let basis = build_basis(poms[0].dim())?;
    poms.iter()
        .map(|pom| {
            let tm = measurement_matrices(pom, &basis)?;
            let rep = haar_mse_sweep(pom, &basis, sweep)?;
            Ok(Fig2Row {
                label: pom.label().to_owned(),
                kappa_c_tilde: tm.kappa_c_tilde,
                qttf_mc: rep.qttf_mc.value,
                qttf_mc_std_error: rep.qttf_mc.std_error,
                aqttf: rep.qttf_series2,
                mean_scaled_mse: rep.mean_scaled_mse,
                mse_std_error: rep.std_error,
            })
        })
        .collect()
}

/// Convenience wrapper used by the `auto` comparisons.
pub fn auto_options(samples: usize, seed: u64) -> AutoOptions {
    AutoOptions { mc_samples: samples, seed, ..AutoOptions::default() }
}

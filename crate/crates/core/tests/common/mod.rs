//! Independent reference computations shared by the integration tests.
//!
//! Nothing here goes through the crate's operator basis, Gram tensors or
//! moment code: Haar moments come from explicit symmetrizers on the n-fold
//! tensor product, and the auxiliary matrices from pseudo-inverses in
//! real-vectorized matrix coordinates.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qttf::Pom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type CMat = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Haar-random unit vector.
pub fn haar_ket<R: Rng>(dim: usize, r: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)));
    let n = v.norm();
    v / Complex64::from(n)
}

pub fn probabilities_of(pom: &Pom, psi: &DVector<Complex64>) -> Vec<f64> {
    pom.outcomes().iter().map(|op| (psi.adjoint() * op * psi)[(0, 0)].re).collect()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `E_ψ Π_i ⟨ψ|A_i|ψ⟩ = Tr(Π_sym A_1⊗…⊗A_n) / dim Sym_n`.
pub fn raw_moment(ops: &[&CMat], dim: usize) -> f64 {
    let n = ops.len();
    if n == 0 {
        return 1.0;
    }
    let mut k = ops[0].clone();
    for op in &ops[1..] {
        k = kron(&k, op);
    }
    let size = dim.pow(n as u32);
    let digits = |mut idx: usize| {
        let mut d = vec![0; n];
        for slot in (0..n).rev() {
            d[slot] = idx % dim;
            idx /= dim;
        }
        d
    };
    let undigits = |d: &[usize]| d.iter().fold(0, |acc, &x| acc * dim + x);
    let mut total = Complex64::new(0.0, 0.0);
    let perms = permutations(n);
    for sigma in &perms {
        for idx in 0..size {
            let d = digits(idx);
            let permuted: Vec<usize> = (0..n).map(|s| d[sigma[s]]).collect();
            total += k[(undigits(&permuted), idx)];
        }
    }
    let mut sym_dim = 1.0;
    for i in 0..n {
        sym_dim *= (dim + i) as f64 / (i + 1) as f64;
    }
    total.re / (perms.len() as f64 * sym_dim)
}

/// Raw Haar moments of outcome probabilities, cached by sorted index multiset.
pub struct MomentOracle<'a> {
    pom: &'a Pom,
    cache: HashMap<Vec<usize>, f64>,
}

impl<'a> MomentOracle<'a> {
    pub fn new(pom: &'a Pom) -> Self {
        Self { pom, cache: HashMap::new() }
    }

    pub fn raw(&mut self, indices: &[usize]) -> f64 {
        let mut key = indices.to_vec();
        key.sort_unstable();
        if let Some(v) = self.cache.get(&key) {
            return *v;
        }
        let ops: Vec<&CMat> = key.iter().map(|&j| &self.pom.outcomes()[j]).collect();
        let v = raw_moment(&ops, self.pom.dim());
        self.cache.insert(key, v);
        v
    }

    /// `E Π_i (α p_{j_i} − p̄_{j_i})`.
    pub fn shifted(&mut self, indices: &[usize], alpha: f64, p_bar: &[f64]) -> f64 {
        let n = indices.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let mut coeff = 1.0;
            let mut chosen = Vec::new();
            for (i, &j) in indices.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    coeff *= alpha;
                    chosen.push(j);
                } else {
                    coeff *= -p_bar[j];
                }
            }
            total += coeff * self.raw(&chosen);
        }
        total
    }
}

/// Pseudo-inverse of a symmetric matrix keeping its `rank` largest eigenvalues.
pub fn pinv_rank(a: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut out = DMatrix::zeros(a.nrows(), a.ncols());
    for &i in &order[..rank] {
        let v = eig.eigenvectors.column(i);
        out += v * v.transpose() / eig.eigenvalues[i];
    }
    out
}

/// `X`, `Y`, `p̄` and `Tr F̄⁻¹` computed in real-vectorized coordinates.
pub struct Aux {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub p_bar: Vec<f64>,
    pub tr_fbar_inv: f64,
}

pub fn aux_of(pom: &Pom) -> Aux {
    let d = pom.dim();
    let m = pom.len();
    // rows: traceless part of each outcome as [Re entries, Im entries]
    let mut c = DMatrix::<f64>::zeros(m, 2 * d * d);
    for (j, op) in pom.outcomes().iter().enumerate() {
        let tr = op.trace().re / d as f64;
        for a in 0..d {
            for b in 0..d {
                let mut v = op[(a, b)];
                if a == b {
                    v -= tr;
                }
                c[(j, a * d + b)] = v.re;
                c[(j, d * d + a * d + b)] = v.im;
            }
        }
    }
    let p_bar: Vec<f64> = pom.outcomes().iter().map(|op| op.trace().re / d as f64).collect();
    let p_inv = DMatrix::from_diagonal(&DVector::from_iterator(m, p_bar.iter().map(|p| 1.0 / p)));
    let fbar = c.transpose() * &p_inv * &c;
    let fbar_pinv = pinv_rank(&fbar, d * d - 1);
    let x = &p_inv * &c * &fbar_pinv * &fbar_pinv * c.transpose() * &p_inv;
    let y = &p_inv * &c * &fbar_pinv * c.transpose() * &p_inv - &p_inv;
    Aux { x, y, tr_fbar_inv: fbar_pinv.trace(), p_bar }
}

/// `E Tr(X Δ (YΔ)^{k−1})` with `Δ = αP − P̄`, contracted over all index tuples.
pub fn series_term(pom: &Pom, aux: &Aux, oracle: &mut MomentOracle, k: usize, alpha: f64) -> f64 {
    let m = pom.len();
    let mut total = 0.0;
    let mut idx = vec![0usize; k];
    loop {
        let mut w = aux.x[(idx[k - 1], idx[0])];
        for s in 0..k - 1 {
            w *= aux.y[(idx[s], idx[s + 1])];
        }
        if w != 0.0 {
            total += w * oracle.shifted(&idx, alpha, &aux.p_bar);
        }
        let mut s = 0;
        loop {
            if s == k {
                return total;
            }
            idx[s] += 1;
            if idx[s] < m {
                break;
            }
            idx[s] = 0;
            s += 1;
        }
    }
}

/// Truncated series `(1/α)(Tr F̄⁻¹ + Σ_{k=1}^{n} E Tr(XΔ(YΔ)^{k−1}))`.
pub fn series_oracle(pom: &Pom, alpha: f64, order: usize) -> f64 {
    let aux = aux_of(pom);
    let mut oracle = MomentOracle::new(pom);
    let mut total = aux.tr_fbar_inv;
    for k in 1..=order {
        total += series_term(pom, &aux, &mut oracle, k, alpha);
    }
    total / alpha
}

/// The same quantity at one state, `Tr(XΔ(YΔ)^{k−1})`.
pub fn pointwise_term(aux: &Aux, p: &[f64], k: usize, alpha: f64) -> f64 {
    let m = p.len();
    let delta = DMatrix::from_diagonal(&DVector::from_iterator(m, (0..m).map(|j| alpha * p[j] - aux.p_bar[j])));
    let mut prod = &aux.x * &delta;
    for _ in 1..k {
        prod = prod * &aux.y * &delta;
    }
    prod.trace()
}

/// `Tr F(ρ)⁻¹` from the vectorized coordinates.
pub fn trace_inverse_fisher(pom: &Pom, p: &[f64]) -> f64 {
    let d = pom.dim();
    let m = pom.len();
    let mut c = DMatrix::<f64>::zeros(m, 2 * d * d);
    for (j, op) in pom.outcomes().iter().enumerate() {
        let tr = op.trace().re / d as f64;
        for a in 0..d {
            for b in 0..d {
                let mut v = op[(a, b)];
                if a == b {
                    v -= tr;
                }
                c[(j, a * d + b)] = v.re;
                c[(j, d * d + a * d + b)] = v.im;
            }
        }
    }
    let p_inv = DMatrix::from_diagonal(&DVector::from_iterator(m, p.iter().map(|x| 1.0 / x)));
    let f = c.transpose() * p_inv * &c;
    pinv_rank(&f, d * d - 1).trace()
}

/// Mean and standard error.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

mod common;

use common::*;
use qttf::operators::{build_basis, haar_probability_moment};
use qttf::pom::{mub_povm, qubit_sic, random_pom, sic_povm};
use qttf::qttf::{auxiliary_matrices, series_value, SeriesBudget, SeriesTerms};
use qttf::rng;

fn alpha0(aux: &Aux, pom: &qttf::Pom) -> f64 {
    let y_norm = aux.y.clone().singular_values().max();
    let max_tr = pom.traces().into_iter().fold(0.0, f64::max);
    1.0 / (y_norm * max_tr)
}

#[test]
fn oracle_resums_to_trace_inverse_fisher() {
    let pom = random_pom(2, 6, 1, &mut rng::from_seed(41)).unwrap();
    let aux = aux_of(&pom);
    let alpha = 0.9 * alpha0(&aux, &pom);
    let mut r = common::rng(5);
    for _ in 0..5 {
        let p = probabilities_of(&pom, &haar_ket(2, &mut r));
        let mut sum = aux.tr_fbar_inv;
        for k in 1..400 {
            sum += pointwise_term(&aux, &p, k, alpha);
        }
        let exact = trace_inverse_fisher(&pom, &p);
        assert!((sum / alpha - exact).abs() < 1e-8 * exact, "{} vs {exact}", sum / alpha);
    }
}

#[test]
fn raw_moments_match_haar_sampling() {
    let pom = random_pom(3, 10, 2, &mut rng::from_seed(3)).unwrap();
    let mut oracle = MomentOracle::new(&pom);
    let idx = [0usize, 1, 1, 4];
    let exact = oracle.raw(&idx);
    let mut r = common::rng(8);
    let samples: Vec<f64> = (0..200_000)
        .map(|_| {
            let p = probabilities_of(&pom, &haar_ket(3, &mut r));
            idx.iter().map(|&j| p[j]).product()
        })
        .collect();
    let (mean, se) = mean_se(&samples);
    assert!((mean - exact).abs() < 4.0 * se, "{mean} ± {se} vs {exact}");
}

#[test]
fn library_moments_match_symmetrizer() {
    let pom = random_pom(3, 9, 2, &mut rng::from_seed(12)).unwrap();
    let mut oracle = MomentOracle::new(&pom);
    for idx in [vec![2], vec![0, 5], vec![1, 1, 7], vec![3, 8, 0, 4], vec![6, 6, 6, 6]] {
        let lib = haar_probability_moment(&idx, &pom).unwrap();
        assert!((lib - oracle.raw(&idx)).abs() < 1e-12, "{idx:?}");
    }
}

#[test]
fn series_terms_match_contraction_oracle() {
    for (seed, dim, m, rank) in [(1u64, 2usize, 4usize, 1usize), (2, 2, 5, 1), (3, 2, 6, 2), (4, 3, 9, 1), (5, 3, 10, 2)] {
        let pom = random_pom(dim, m, rank, &mut rng::from_seed(seed)).unwrap();
        let basis = build_basis(dim).unwrap();
        let terms = SeriesTerms::new(&pom, &basis, SeriesBudget::default()).unwrap();
        let aux = aux_of(&pom);
        let mut oracle = MomentOracle::new(&pom);
        let lib = [terms.f2(), terms.f3().unwrap(), terms.f4().unwrap()];
        for (k, value) in (2..=4).zip(lib) {
            let want = series_term(&pom, &aux, &mut oracle, k, 1.0);
            assert!((value - want).abs() < 1e-9 * want.abs().max(1.0), "D={dim} M={m} F{k}: {value} vs {want}");
        }
    }
}

#[test]
fn deformed_series_matches_oracle() {
    let pom = random_pom(2, 6, 1, &mut rng::from_seed(77)).unwrap();
    let basis = build_basis(2).unwrap();
    let terms = SeriesTerms::new(&pom, &basis, SeriesBudget::default()).unwrap();
    for alpha in [0.3, 0.9 * terms.aux.alpha0, 1.0, 1.7] {
        // the zeroth and first orders are reported together
        assert_eq!(series_value(&terms, alpha, 0).unwrap(), series_value(&terms, alpha, 1).unwrap());
        for order in 1..=4 {
            let lib = series_value(&terms, alpha, order).unwrap();
            let want = series_oracle(&pom, alpha, order);
            assert!((lib - want).abs() < 1e-9 * want.abs(), "alpha={alpha} order={order}: {lib} vs {want}");
        }
    }
}

#[test]
fn auxiliary_matrices_are_basis_independent() {
    for pom in [qubit_sic(), mub_povm(3).unwrap(), sic_povm(3).unwrap()] {
        let lib = auxiliary_matrices(&pom, &build_basis(pom.dim()).unwrap()).unwrap();
        let reference = aux_of(&pom);
        assert!((&lib.x_matrix - &reference.x).amax() < 1e-9);
        assert!((&lib.y_matrix - &reference.y).amax() < 1e-9);
        assert!((lib.fbar_inverse_trace - reference.tr_fbar_inv).abs() < 1e-9);
        assert!((lib.alpha0 - alpha0(&reference, &pom)).abs() < 1e-9);
    }
}

//! Numerical results checked against independent computations.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use cascadelab::eigen::DenseMatrix;
use cascadelab::filter::DEFAULT_QMF_TOL;
use cascadelab::transfer::{
    optimal_matching_error, pn_function, rho2_estimate, theta_eigenvalues_closed_form,
    DEFAULT_CLUSTER_TOL,
};
use cascadelab::{ruelle_matrix, spectrum, LaurentPolynomial, Theta, WaveletFilter};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const D6: [f64; 6] = [
    0.3326705529500826,
    0.8068915093110925,
    0.4598775021184915,
    -0.1350110200102546,
    -0.0854412738820267,
    0.0352262918857095,
];

fn complex_filter() -> WaveletFilter {
    let k = 1.0 / (2.0 * SQRT_2);
    WaveletFilter::new(vec![
        Complex64::new(k, k),
        Complex64::new(k, -k),
        Complex64::new(k, -k),
        Complex64::new(k, k),
    ])
    .unwrap()
}

fn nalgebra_eigenvalues(m: &DenseMatrix) -> Vec<Complex64> {
    let n = m.dim();
    let real = DMatrix::from_row_slice(n, n, &m.row_major().iter().map(|c| c.re).collect::<Vec<_>>());
    real.complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect()
}

#[test]
fn qr_matches_nalgebra_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=12 {
        for _ in 0..5 {
            let data: Vec<Complex64> = (0..n * n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
                .collect();
            let m = DenseMatrix::from_row_major(n, data);
            let ours = m.eigenvalues().unwrap();
            let theirs = nalgebra_eigenvalues(&m);
            let err = optimal_matching_error(&ours, &theirs).unwrap();
            assert!(err < 1e-9, "n = {n}: {err}");
        }
    }
}

#[test]
fn ruelle_spectra_match_nalgebra() {
    let mut filters = vec![WaveletFilter::haar(), WaveletFilter::from_real(&D6).unwrap()];
    filters.extend((0..=10).map(|i| {
        WaveletFilter::theta_family(Theta::new(-FRAC_PI_2 + PI * i as f64 / 10.0).unwrap())
    }));
    for f in filters {
        let m = ruelle_matrix(&f);
        let ours = m.matrix().eigenvalues().unwrap();
        let theirs = nalgebra_eigenvalues(m.matrix());
        // eigenvalues of multiplicity two are only determined to about √ε
        assert!(optimal_matching_error(&ours, &theirs).unwrap() < 1e-7);
    }
}

#[test]
fn closed_form_spectrum_on_41_angles() {
    for i in 0..41 {
        let theta = Theta::new(-FRAC_PI_2 + PI * i as f64 / 40.0).unwrap();
        let m = ruelle_matrix(&WaveletFilter::theta_family(theta));
        let numeric = m.matrix().eigenvalues().unwrap();
        let err = optimal_matching_error(&numeric, &theta_eigenvalues_closed_form(theta)).unwrap();
        assert!(err < 1e-9, "theta = {}: {err}", theta.radians());
    }
}

#[test]
fn daubechies_six_satisfies_condition_e() {
    let f = WaveletFilter::from_real(&D6).unwrap();
    assert!(f.validate_qmf(1e-12).is_valid());
    let report = spectrum(&ruelle_matrix(&f), DEFAULT_CLUSTER_TOL).unwrap();
    assert!(report.condition_e);
    assert_eq!(report.total_multiplicity(), 11);
    assert!(report.gap < 1.0);
}

#[test]
fn complex_filter_spectrum() {
    let f = complex_filter();
    assert!(f.validate_qmf(DEFAULT_QMF_TOL).is_valid());
    let m = ruelle_matrix(&f);
    // columns sum to 1, so the all-ones row vector is a left eigenvector
    for j in 0..m.dim() {
        let col: Complex64 = (0..m.dim()).map(|i| m.matrix().get(i, j)).sum();
        assert!((col - 1.0).norm() < 1e-14);
    }
    let report = spectrum(&m, DEFAULT_CLUSTER_TOL).unwrap();
    assert!(report.multiplicity_of(Complex64::new(1.0, 0.0)) >= 1);
}

/// `p_n(t) = 2^{-n} Σ_{j < 2^n} Π_{k=1}^{n} |m_0((t + 2πj)/2^k)|⁴`.
fn pn_direct(f: &WaveletFilter, n: u32, t: f64) -> f64 {
    let count = 1u64 << n;
    let total: f64 = (0..count)
        .map(|j| {
            let s = t + TAU * j as f64;
            (1..=n)
                .map(|k| f.m0(s / (1u64 << k) as f64).norm_sqr().powi(2))
                .product::<f64>()
        })
        .sum();
    total / count as f64
}

#[test]
fn pn_recursion_matches_direct_sum() {
    let filters = [
        WaveletFilter::haar(),
        WaveletFilter::from_real(&D6).unwrap(),
        WaveletFilter::theta_family(Theta::new(0.9).unwrap()),
        complex_filter(),
    ];
    for f in &filters {
        for n in 0..=6 {
            for i in 0..16 {
                let t = TAU * i as f64 / 16.0 + 0.1;
                let a = pn_function(f, n, t);
                let b = pn_direct(f, n, t);
                assert!((a - b).abs() < 1e-12 * b.max(1.0), "n = {n}, t = {t}");
            }
        }
    }
}

#[test]
fn haar_pn_is_explicit() {
    // |m_0|⁴ = 4cos⁴(t/2); the direct sum gives p_1(0) = 2
    let f = WaveletFilter::haar();
    assert!((pn_function(&f, 1, 0.0) - 2.0).abs() < 1e-14);
    assert!((pn_function(&f, 3, 0.0) - 8.0).abs() < 1e-12);
    assert!((rho2_estimate(&f, 6, 512) - SQRT_2).abs() < 1e-12);
}

#[test]
fn theta_quarter_turn_oracle_values() {
    // θ = π/2: b = 1/2, roots (1 ± 3)/4
    let ev = theta_eigenvalues_closed_form(Theta::new(FRAC_PI_2).unwrap());
    let expect = [1.0, 0.5, 0.5, 0.5, -1.0, 1.0, -0.5];
    for (a, e) in ev.iter().zip(expect) {
        assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
    }
}

#[test]
fn ruelle_of_constant_is_exact_for_many_steps() {
    let f = WaveletFilter::from_real(&D6).unwrap();
    let mut p = LaurentPolynomial::one();
    for _ in 0..20 {
        p = cascadelab::ruelle_apply(&f, &p);
    }
    assert!(p.canonical_eq(&LaurentPolynomial::one()));
}

//! The transfer (Ruelle) operator
//! `(Rξ)(z) = ½ Σ_{w²=z} |m_0(w)|² ξ(w)` of a filter, its matrix on
//! `P[-N, N]`, the spectral verdict for cascade convergence, the
//! `L²(𝕋)` adjoint, and the `p_n` functions bracketing the spectral radius.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::eigen::DenseMatrix;
use crate::error::{Error, Result};
use crate::filter::{Theta, WaveletFilter};
use crate::laurent::{div_ceil, LaurentPolynomial};

/// Default clustering tolerance for [`spectrum`].
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;

/// Coefficient form: `(R̂x)_k = Σ_j Σ_l conj(a_j) a_l x_{j-l+2k}`.
///
/// The output index range is `ceil((lo-N)/2) ..= floor((hi+N)/2)`.
pub fn ruelle_apply(filter: &WaveletFilter, xi: &LaurentPolynomial) -> LaurentPolynomial {
    let n = filter.degree() as i64;
    let r = filter.autocorrelation();
    let lo = div_ceil(xi.lo() - n, 2);
    let hi = (xi.hi() + n).div_euclid(2);
    let coeffs = (lo..=hi)
        .map(|k| {
            (-n..=n)
                .map(|d| r[(d + n) as usize] * xi.coeff(d + 2 * k))
                .sum()
        })
        .collect();
    LaurentPolynomial::new(lo, coeffs)
}

/// `(R*ξ)(z) = |m_0(z)|² ξ(z²)`.
pub fn adjoint_apply(filter: &WaveletFilter, xi: &LaurentPolynomial) -> LaurentPolynomial {
    &filter.power_spectrum() * &xi.dilate()
}

/// Matrix of `R` on `P[-N, N]` in the monomial basis `z^{-N}..z^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuelleMatrix {
    degree: usize,
    matrix: DenseMatrix,
}

impl RuelleMatrix {
    /// `N`; the matrix is `(2N+1) × (2N+1)`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Entry mapping coefficient `x_col` into `(R̂x)_row`; exponents in `-N..=N`.
    pub fn entry(&self, row: i64, col: i64) -> Complex64 {
        let n = self.degree as i64;
        self.matrix.get((row + n) as usize, (col + n) as usize)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Applies the matrix to coefficients `x_{-N}..x_N`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(x)
    }

    /// Applies the matrix to a polynomial in `P[-N, N]` (other coefficients are ignored).
    pub fn apply_poly(&self, xi: &LaurentPolynomial) -> LaurentPolynomial {
        let n = self.degree as i64;
        let x: Vec<Complex64> = (-n..=n).map(|k| xi.coeff(k)).collect();
        LaurentPolynomial::new(-n, self.apply(&x))
    }
}

/// Builds the slant-Toeplitz matrix: entry `(k, m)` is `r(m - 2k)` where
/// `r(d) = Σ_l conj(a_{l+d}) a_l`.
pub fn ruelle_matrix(filter: &WaveletFilter) -> RuelleMatrix {
    let n = filter.degree() as i64;
    let dim = (2 * n + 1) as usize;
    let r = filter.autocorrelation();
    let mut matrix = DenseMatrix::zeros(dim);
    for k in -n..=n {
        for m in -n..=n {
            let d = m - 2 * k;
            if (-n..=n).contains(&d) {
                matrix.set((k + n) as usize, (m + n) as usize, r[(d + n) as usize]);
            }
        }
    }
    RuelleMatrix {
        degree: filter.degree(),
        matrix,
    }
}

/// An eigenvalue cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl Serialize for Eigenvalue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Eigenvalue", 3)?;
        s.serialize_field("re", &self.value.re)?;
        s.serialize_field("im", &self.value.im)?;
        s.serialize_field("mult", &self.multiplicity)?;
        s.end()
    }
}

/// Clustered spectrum of a [`RuelleMatrix`] with the convergence verdict.
///
/// JSON form: `{"eigenvalues": [{"re", "im", "mult"}], "condition_e", "gap"}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    /// Clusters ordered by decreasing modulus.
    pub eigenvalues: Vec<Eigenvalue>,
    #[serde(skip)]
    pub peripheral: Vec<Eigenvalue>,
    /// 1 is a simple eigenvalue and every other eigenvalue lies inside the
    /// open unit disk (margin `cluster_tol`).
    pub condition_e: bool,
    /// Largest modulus among clusters other than the one at 1.
    pub gap: f64,
    #[serde(skip)]
    pub cluster_tol: f64,
}

impl SpectralReport {
    /// Eigenvalues expanded by multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// The cluster within `cluster_tol` of `z`, if any.
    pub fn cluster_near(&self, z: Complex64) -> Option<&Eigenvalue> {
        self.eigenvalues
            .iter()
            .filter(|e| (e.value - z).norm() <= self.cluster_tol)
            .min_by(|a, b| (a.value - z).norm().total_cmp(&(b.value - z).norm()))
    }

    pub fn multiplicity_of(&self, z: Complex64) -> usize {
        self.cluster_near(z).map_or(0, |e| e.multiplicity)
    }
}

/// Computes all eigenvalues, merges those within `cluster_tol` (single
/// linkage) and decides the convergence condition.
pub fn spectrum(matrix: &RuelleMatrix, cluster_tol: f64) -> Result<SpectralReport> {
    let raw = matrix.matrix.eigenvalues()?;
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence { iterations: 0 });
    }
    let mut eigenvalues = cluster(&raw, cluster_tol);
    eigenvalues.sort_by(|a, b| {
        b.value
            .norm()
            .total_cmp(&a.value.norm())
            .then(b.value.re.total_cmp(&a.value.re))
            .then(b.value.im.total_cmp(&a.value.im))
    });

    let one = Complex64::new(1.0, 0.0);
    let unit_index = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, e)| (e.value - one).norm() <= cluster_tol)
        .min_by(|a, b| (a.1.value - one).norm().total_cmp(&(b.1.value - one).norm()))
        .map(|(i, _)| i);

    let others = eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != unit_index)
        .map(|(_, e)| e.value.norm());
    let gap = others.clone().fold(0.0, f64::max);
    let condition_e = match unit_index {
        Some(i) => eigenvalues[i].multiplicity == 1 && others.clone().all(|m| m < 1.0 - cluster_tol),
        None => false,
    };
    let peripheral = eigenvalues
        .iter()
        .filter(|e| e.value.norm() >= 1.0 - cluster_tol)
        .copied()
        .collect();

    Ok(SpectralReport {
        eigenvalues,
        peripheral,
        condition_e,
        gap,
        cluster_tol,
    })
}

fn cluster(values: &[Complex64], tol: f64) -> Vec<Eigenvalue> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += v;
                g.2 += 1;
            }
            None => groups.push((root, v, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| Eigenvalue {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}

/// `{1, b, b, 1/2, −2b, (1 ± √(1+16b))/4}` with `b = (1 + 2 sin θ − cos 2θ)/8`.
pub fn theta_eigenvalues_closed_form(theta: Theta) -> [Complex64; 7] {
    let b = theta.b();
    let root = Complex64::new(1.0 + 16.0 * b, 0.0).sqrt();
    let re = |x: f64| Complex64::new(x, 0.0);
    [
        re(1.0),
        re(b),
        re(b),
        re(0.5),
        re(-2.0 * b),
        (1.0 + root) / 4.0,
        (1.0 - root) / 4.0,
    ]
}

/// Smallest achievable `max_i |a_i − b_σ(i)|` over bijections `σ`.
///
/// Exact bottleneck assignment by dynamic programming over subsets, so
/// `a.len()` is limited to 20. Returns `None` if the lengths differ.
pub fn optimal_matching_error(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    let n = a.len();
    if n != b.len() || n > 20 {
        return None;
    }
    // best[mask]: minimal worst error matching a[..popcount(mask)] into the set `mask` of b
    let mut best = vec![f64::INFINITY; 1 << n];
    best[0] = 0.0;
    for mask in 0usize..(1 << n) {
        let i = mask.count_ones() as usize;
        if i == n || best[mask].is_infinite() {
            continue;
        }
        for j in (0..n).filter(|j| mask & (1 << j) == 0) {
            let next = mask | (1 << j);
            let cost = best[mask].max((a[i] - b[j]).norm());
            if cost < best[next] {
                best[next] = cost;
            }
        }
    }
    Some(best[(1 << n) - 1])
}

/// `p_n(e^{-it})` by `p_n(z) = ½ Σ_{w²=z} |m_0(w)|⁴ p_{n-1}(w)`, `p_0 = 1`.
/// Values lie in `[1, 2^n]` for filters satisfying the QMF relations.
pub fn pn_function(filter: &WaveletFilter, n: u32, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let half = t / 2.0;
    let w1 = filter.m0(half).norm_sqr();
    let w2 = filter.m0(half + PI).norm_sqr();
    0.5 * (w1 * w1 * pn_function(filter, n - 1, half) + w2 * w2 * pn_function(filter, n - 1, half + PI))
}

/// `(max_grid p_n)^{1/(2n)}`, an estimate of the `L²(𝕋)` spectral radius.
pub fn rho2_estimate(filter: &WaveletFilter, n_max: u32, grid: usize) -> f64 {
    let n_max = n_max.max(1);
    let sup = crate::laurent::grid(grid.max(1))
        .map(|t| pn_function(filter, n_max, t))
        .fold(0.0, f64::max);
    sup.powf(1.0 / (2.0 * n_max as f64))
}

/// Sup of `½ Σ_{w²=z} |m_0(w)|⁴` on a grid; for QMF filters this is 2,
/// so `‖R‖ = √2` on `L²(𝕋)`.
pub fn rr_adjoint_sup(filter: &WaveletFilter, grid: usize) -> f64 {
    crate::laurent::grid(grid.max(1))
        .map(|t| pn_function(filter, 1, t))
        .fold(0.0, f64::max)
}

/// `‖R‖` on `L²(𝕋)` from [`rr_adjoint_sup`].
pub fn l2_operator_norm(filter: &WaveletFilter, grid: usize) -> f64 {
    rr_adjoint_sup(filter, grid).sqrt()
}

/// Largest coefficient gap between `flip(Rξ)` and `R(flip ξ)`.
pub fn flip_covariance_residual(filter: &WaveletFilter, xi: &LaurentPolynomial) -> Result<f64> {
    if !filter.is_real() {
        return Err(Error::ComplexFilter);
    }
    let lhs = ruelle_apply(filter, xi).flip();
    let rhs = ruelle_apply(filter, &xi.flip());
    Ok(lhs.max_abs_diff(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Independent route: multiply by `|m_0|²` and keep even exponents.
    fn ruelle_by_downsampling(f: &WaveletFilter, xi: &LaurentPolynomial) -> LaurentPolynomial {
        (&f.power_spectrum() * xi).downsample()
    }

    #[test]
    fn ruelle_fixes_constant() {
        for f in [
            WaveletFilter::haar(),
            WaveletFilter::theta_family(Theta::new(0.3).unwrap()),
        ] {
            let out = ruelle_apply(&f, &LaurentPolynomial::one());
            assert!(out.canonical_eq(&LaurentPolynomial::one()), "{out:?}");
        }
    }

    #[test]
    fn ruelle_haar_monomial() {
        let out = ruelle_apply(&WaveletFilter::haar(), &LaurentPolynomial::monomial(1, c(1.0)));
        assert!(out.canonical_eq(&LaurentPolynomial::from_real(0, &[0.5, 0.5])), "{out:?}");
    }

    #[test]
    fn ruelle_preserves_value_at_one() {
        let f = WaveletFilter::theta_family(Theta::new(1.1).unwrap());
        let xi = LaurentPolynomial::from_real(-4, &[0.3, -1.0, 2.0, 0.7, 0.0, 1.5, -2.2]);
        let out = ruelle_apply(&f, &xi);
        assert!((out.eval_at(c(1.0)) - xi.eval_at(c(1.0))).norm() < 1e-13);
    }

    #[test]
    fn ruelle_agrees_with_downsampling_route() {
        let f = WaveletFilter::theta_family(Theta::new(-0.8).unwrap());
        let xi = LaurentPolynomial::new(
            -5,
            (0..11).map(|k| Complex64::new(k as f64 * 0.3 - 1.0, 0.1 * k as f64)).collect(),
        );
        assert!(ruelle_apply(&f, &xi).max_abs_diff(&ruelle_by_downsampling(&f, &xi)) < 1e-14);
    }

    #[test]
    fn haar_matrix_rows() {
        let m = ruelle_matrix(&WaveletFilter::haar());
        assert_eq!(m.dim(), 3);
        let expected = [
            [0.5, 0.0, 0.0], //
            [0.5, 1.0, 0.5],
            [0.0, 0.0, 0.5],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!((m.entry(i as i64 - 1, j as i64 - 1) - c(v)).norm() < 1e-15);
            }
        }
        let one = m.apply(&[c(0.0), c(1.0), c(0.0)]);
        assert!((one[0].norm() + (one[1] - c(1.0)).norm() + one[2].norm()) < 1e-15);
    }

    #[test]
    fn theta_matrix_matches_slant_toeplitz_display() {
        let th = Theta::new(0.9).unwrap();
        let f = WaveletFilter::theta_family(th);
        let a: Vec<f64> = f.real_taps().unwrap();
        let b = a[3] * a[0];
        let cc = a[1] * a[0] + a[2] * a[1] + a[3] * a[2];
        assert!((b + cc - 0.5).abs() < 1e-15);
        let display = [
            [b, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [cc, 0.0, b, 0.0, 0.0, 0.0, 0.0],
            [cc, 1.0, cc, 0.0, b, 0.0, 0.0],
            [b, 0.0, cc, 1.0, cc, 0.0, b],
            [0.0, 0.0, b, 0.0, cc, 1.0, cc],
            [0.0, 0.0, 0.0, 0.0, b, 0.0, cc],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, b],
        ];
        let m = ruelle_matrix(&f);
        for (i, row) in display.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let e = m.entry(i as i64 - 3, j as i64 - 3);
                assert!((e - c(v)).norm() < 1e-15, "({i},{j}) {e} vs {v}");
            }
        }
    }

    #[test]
    fn haar_spectrum() {
        let rep = spectrum(&ruelle_matrix(&WaveletFilter::haar()), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(rep.total_multiplicity(), 3);
        assert_eq!(rep.multiplicity_of(c(1.0)), 1);
        assert_eq!(rep.multiplicity_of(c(0.5)), 2);
        assert!(rep.condition_e);
        assert!((rep.gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectrum_at_quarter_turn_fails_condition() {
        let f = WaveletFilter::theta_family(Theta::new(FRAC_PI_2).unwrap());
        let rep = spectrum(&ruelle_matrix(&f), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(rep.multiplicity_of(c(1.0)), 2);
        assert_eq!(rep.multiplicity_of(c(-1.0)), 1);
        assert_eq!(rep.multiplicity_of(c(0.5)), 3);
        assert_eq!(rep.multiplicity_of(c(-0.5)), 1);
        assert!(!rep.condition_e);
        assert_eq!(rep.peripheral.len(), 2);
        assert!((rep.gap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectrum_at_zero_angle() {
        let f = WaveletFilter::theta_family(Theta::new(0.0).unwrap());
        let rep = spectrum(&ruelle_matrix(&f), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(rep.multiplicity_of(c(1.0)), 1);
        assert_eq!(rep.multiplicity_of(c(0.5)), 2);
        assert_eq!(rep.multiplicity_of(c(0.0)), 4);
        assert!(rep.condition_e);
    }

    #[test]
    fn closed_form_examples() {
        let ev = theta_eigenvalues_closed_form(Theta::new(FRAC_PI_2).unwrap());
        let expected = [1.0, 0.5, 0.5, 0.5, -1.0, 1.0, -0.5];
        for (a, e) in ev.iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-15);
        }
        let ev = theta_eigenvalues_closed_form(Theta::new(0.0).unwrap());
        let expected = [1.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.0];
        for (a, e) in ev.iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn adjoint_of_constant_is_power_spectrum() {
        let out = adjoint_apply(&WaveletFilter::haar(), &LaurentPolynomial::one());
        assert!(out.canonical_eq(&LaurentPolynomial::from_real(-1, &[0.5, 1.0, 0.5])));
    }

    #[test]
    fn operator_norm_is_root_two() {
        for f in [
            WaveletFilter::haar(),
            WaveletFilter::theta_family(Theta::new(0.4).unwrap()),
        ] {
            assert!((rr_adjoint_sup(&f, 512) - 2.0).abs() < 1e-12);
            assert!((l2_operator_norm(&f, 512) - SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn pn_examples() {
        let haar = WaveletFilter::haar();
        assert!((pn_function(&haar, 1, 0.0) - 2.0).abs() < 1e-14);
        let f = WaveletFilter::theta_family(Theta::new(0.77).unwrap());
        let p1 = pn_function(&f, 1, 0.0);
        let direct = 0.5 * (f.m0(0.0).norm_sqr().powi(2) + f.m0(PI).norm_sqr().powi(2));
        assert!((p1 - direct).abs() < 1e-14);
        assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&p1));
        for t in crate::laurent::grid(64) {
            let v = pn_function(&f, 3, t);
            assert!((1.0 - 1e-12..=8.0 + 1e-12).contains(&v), "{v}");
        }
    }

    #[test]
    fn rho2_within_bracket() {
        for f in [
            WaveletFilter::haar(),
            WaveletFilter::theta_family(Theta::pi_fraction(1, 4).unwrap()),
        ] {
            for n in [6, 8] {
                let r = rho2_estimate(&f, n, 512);
                assert!((1.0..=1.4143).contains(&r), "{r}");
            }
        }
    }

    #[test]
    fn flip_covariance_examples() {
        let haar = WaveletFilter::haar();
        let z = LaurentPolynomial::monomial(1, c(1.0));
        assert_eq!(flip_covariance_residual(&haar, &z).unwrap(), 0.0);
        assert_eq!(
            flip_covariance_residual(&haar, &LaurentPolynomial::one()).unwrap(),
            0.0
        );
        let f = WaveletFilter::theta_family(Theta::pi_fraction(1, 5).unwrap());
        let xi = LaurentPolynomial::from_real(-3, &[0.2, -1.0, 0.5, 3.0, 1.0, -0.4, 0.9]);
        assert!(flip_covariance_residual(&f, &xi).unwrap() < 1e-12);

        let complex = WaveletFilter::new(vec![c(0.5), Complex64::new(0.0, 0.5)]).unwrap();
        assert_eq!(flip_covariance_residual(&complex, &z), Err(Error::ComplexFilter));
    }

    #[test]
    fn report_json_shape() {
        let rep = spectrum(&ruelle_matrix(&WaveletFilter::haar()), DEFAULT_CLUSTER_TOL).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["condition_e", "eigenvalues", "gap"]);
        let first = &v["eigenvalues"][0];
        assert_eq!(first["mult"], 1);
        assert!((first["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matching_is_optimal() {
        let a = [c(0.0), c(1.0), c(2.0)];
        let b = [c(2.1), c(-0.05), c(1.0)];
        assert!((optimal_matching_error(&a, &b).unwrap() - 0.1).abs() < 1e-15);
        assert!(optimal_matching_error(&a, &b[..2]).is_none());
        assert_eq!(optimal_matching_error(&[], &[]), Some(0.0));
    }
}

//! Laurent (trigonometric) polynomials `ξ(z) = Σ x_k z^k` with a finite
//! integer index range.
//!
//! Points of the circle are parametrised as `z = e^{-it}` throughout the
//! crate, so evaluating at frequency `t` means summing `x_k e^{-ikt}`.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Fringe threshold used by [`LaurentPolynomial::trimmed`] and
/// [`LaurentPolynomial::canonical_eq`].
pub const TRIM_THRESHOLD: f64 = 1e-13;

/// Number of nodes of the default trapezoid rule on `[0, 2π)`.
pub const DEFAULT_QUADRATURE_POINTS: usize = 4096;

/// A Laurent polynomial with coefficients for the indices `lo..=hi`.
///
/// The coefficient list is never empty; the zero polynomial is stored as a
/// single zero at index 0. `PartialEq` compares coefficients exactly after
/// dropping exactly-zero fringes.
#[derive(Debug, Clone)]
pub struct LaurentPolynomial {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentPolynomial {
    /// Builds `Σ coeffs[i] z^(lo + i)`. An empty list yields the zero polynomial.
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { lo, coeffs }
    }

    pub fn from_real(lo: i64, coeffs: &[f64]) -> Self {
        Self::new(lo, coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            lo: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    /// The constant polynomial `𝟙`.
    pub fn one() -> Self {
        Self::monomial(0, Complex64::new(1.0, 0.0))
    }

    /// `c z^k`.
    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self { lo: k, coeffs: vec![c] }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`; zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k < self.lo || k > self.hi() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(k - self.lo) as usize]
    }

    /// Iterates over `(index, coefficient)` pairs of the stored range.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.lo + i as i64, c))
    }

    /// `Σ x_k e^{-ikt}`.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.terms()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -(k as f64) * t))
            .sum()
    }

    /// Evaluates at an arbitrary nonzero complex point.
    pub fn eval_at(&self, z: Complex64) -> Complex64 {
        self.terms().map(|(k, c)| c * z.powi(k as i32)).sum()
    }

    /// `ξ̌(z) = ξ(z^{-1})`: reverses the index range.
    pub fn flip(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            lo: -self.hi(),
            coeffs,
        }
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// `ξ(z^2)`: spreads the coefficients to even indices.
    pub fn dilate(&self) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * self.coeffs.len() - 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c;
        }
        Self {
            lo: 2 * self.lo,
            coeffs,
        }
    }

    /// Keeps the even-index coefficients: `Σ x_{2k} z^k`.
    pub fn downsample(&self) -> Self {
        let lo = div_ceil(self.lo, 2);
        let hi = self.hi().div_euclid(2);
        if hi < lo {
            return Self::zero();
        }
        Self::new(lo, (lo..=hi).map(|k| self.coeff(2 * k)).collect())
    }

    /// Drops fringe coefficients with modulus `<= threshold`.
    pub fn trim(&self, threshold: f64) -> Self {
        let first = self.coeffs.iter().position(|c| c.norm() > threshold);
        let Some(first) = first else {
            return Self::zero();
        };
        let last = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > threshold)
            .unwrap_or(first);
        Self {
            lo: self.lo + first as i64,
            coeffs: self.coeffs[first..=last].to_vec(),
        }
    }

    /// Canonical form: fringes below [`TRIM_THRESHOLD`] removed.
    pub fn trimmed(&self) -> Self {
        self.trim(TRIM_THRESHOLD)
    }

    /// Largest coefficient difference over the union of both index ranges.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Equality up to [`TRIM_THRESHOLD`] per coefficient; zero fringes are ignored.
    pub fn canonical_eq(&self, other: &Self) -> bool {
        self.max_abs_diff(other) <= TRIM_THRESHOLD
    }

    /// `Σ |x_k|^2`, the squared `L²(𝕋)` norm by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ x_k`, which equals `ξ(1)`.
    pub fn coefficient_sum(&self) -> Complex64 {
        self.coeffs.iter().sum()
    }

    /// `max_t |ξ(e^{-it})|` sampled on a uniform grid.
    pub fn sup_norm_on_grid(&self, points: usize) -> f64 {
        grid(points)
            .map(|t| self.evaluate(t).norm())
            .fold(0.0, f64::max)
    }

    /// Debug dump with header `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (k, c) in self.terms() {
            let _ = writeln!(out, "{},{},{}", k, c.re, c.im);
        }
        out
    }
}

impl PartialEq for LaurentPolynomial {
    fn eq(&self, other: &Self) -> bool {
        let a = self.trim(0.0);
        let b = other.trim(0.0);
        a.lo == b.lo && a.coeffs == b.coeffs
    }
}

impl Default for LaurentPolynomial {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        LaurentPolynomial::new(lo, (lo..=hi).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        LaurentPolynomial::new(lo, (lo..=hi).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPolynomial::new(self.lo + rhs.lo, coeffs)
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;

    fn neg(self) -> LaurentPolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// `(1/2π) ∫ conj(ξ) η dt`, computed from coefficients.
pub fn inner_product(xi: &LaurentPolynomial, eta: &LaurentPolynomial) -> Complex64 {
    let lo = xi.lo.max(eta.lo);
    let hi = xi.hi().min(eta.hi());
    (lo..=hi).map(|k| xi.coeff(k).conj() * eta.coeff(k)).sum()
}

/// Trapezoid mean `(1/2π) ∫_0^{2π} f(t) dt` on `points` uniform nodes.
pub fn circle_mean<F>(points: usize, f: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let total: Complex64 = grid(points).map(f).sum();
    total / points as f64
}

/// Inner product on `L²(𝕋)` by quadrature rather than by coefficients.
pub fn quadrature_inner_product(
    xi: &LaurentPolynomial,
    eta: &LaurentPolynomial,
    points: usize,
) -> Complex64 {
    circle_mean(points, |t| xi.evaluate(t).conj() * eta.evaluate(t))
}

/// Uniform nodes `2πj/points`, `j = 0..points`.
pub fn grid(points: usize) -> impl Iterator<Item = f64> {
    let h = std::f64::consts::TAU / points as f64;
    (0..points).map(move |j| j as f64 * h)
}

pub(crate) fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

//! Finite low-pass filters `a_0..a_N`, the one-parameter family of 4-tap
//! filters indexed by an angle, and the quadrature-mirror checks.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPolynomial;

/// Default tolerance for [`WaveletFilter::validate_qmf`].
pub const DEFAULT_QMF_TOL: f64 = 1e-12;

/// Angle parametrising the 4-tap family, kept in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Theta(f64);

impl Theta {
    /// Wraps a finite angle into `(-π, π]`. Values already in range are kept bit-for-bit.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFiniteTheta(theta));
        }
        if theta > -PI && theta <= PI {
            return Ok(Self(theta));
        }
        let mut wrapped = theta.rem_euclid(TAU);
        if wrapped > PI {
            wrapped -= TAU;
        }
        Ok(Self(wrapped))
    }

    /// `p·π/q` for integers `p`, `q ≠ 0`.
    pub fn pi_fraction(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ThetaParse(format!("{p}pi/{q}")));
        }
        Self::new(p as f64 * PI / q as f64)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// `b(θ) = (1 + 2 sin θ − cos 2θ)/8`, equal to `a_3 a_0` of the family.
    pub fn b(self) -> f64 {
        (1.0 + 2.0 * self.0.sin() - (2.0 * self.0).cos()) / 8.0
    }
}

impl TryFrom<f64> for Theta {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Theta> for f64 {
    fn from(t: Theta) -> f64 {
        t.0
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Accepts plain radians (`0.785398`) or rational multiples of π such as
/// `pi/2`, `-9pi/20`, `3*pi/10`, `2pi`, `pi`.
impl FromStr for Theta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let raw = s.trim();
        let compact: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = compact.to_ascii_lowercase().replace('π', "pi");
        let bad = || Error::ThetaParse(raw.to_string());
        let Some(pos) = lower.find("pi") else {
            let v: f64 = lower.parse().map_err(|_| bad())?;
            return Self::new(v);
        };
        let head = lower[..pos].trim_end_matches('*');
        let tail = &lower[pos + 2..];
        let numer: i64 = match head {
            "" | "+" => 1,
            "-" => -1,
            h => h.parse().map_err(|_| bad())?,
        };
        let denom: i64 = match tail {
            "" => 1,
            t => t.strip_prefix('/').ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        if denom <= 0 {
            return Err(bad());
        }
        Self::pi_fraction(numer, denom)
    }
}

/// A finite filter `a_0..a_N` with complex taps.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    taps: Vec<Complex64>,
}

impl WaveletFilter {
    pub fn new(taps: Vec<Complex64>) -> Result<Self> {
        if taps.len() < 2 {
            return Err(Error::TooFewTaps(taps.len()));
        }
        if let Some(index) = taps.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFiniteTap { index });
        }
        Ok(Self { taps })
    }

    pub fn from_real(taps: &[f64]) -> Result<Self> {
        Self::new(taps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `(1/√2, 1/√2)`.
    pub fn haar() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { taps: vec![h, h] }
    }

    /// The 4-tap filter
    /// `a_k = (1 ∓ cos θ ± sin θ)/(2√2)` with sign patterns
    /// `(−,+), (−,−), (+,−), (+,+)` for `k = 0..3`.
    pub fn theta_family(theta: Theta) -> Self {
        let (s, c) = theta.radians().sin_cos();
        let k = 1.0 / (2.0 * SQRT_2);
        Self::from_real(&[
            k * (1.0 - c + s),
            k * (1.0 - c - s),
            k * (1.0 + c - s),
            k * (1.0 + c + s),
        ])
        .expect("four finite taps")
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Index bound `N`: taps are `a_0..a_N`.
    pub fn degree(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn is_real(&self) -> bool {
        self.taps.iter().all(|c| c.im == 0.0)
    }

    /// Real parts of the taps, or an error if any tap has an imaginary part.
    pub fn real_taps(&self) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(Error::ComplexFilter);
        }
        Ok(self.taps.iter().map(|c| c.re).collect())
    }

    /// `m_0(z) = Σ a_k z^k` as a Laurent polynomial.
    pub fn symbol(&self) -> LaurentPolynomial {
        LaurentPolynomial::new(0, self.taps.clone())
    }

    /// `m_0` at `z = e^{-it}`.
    pub fn m0(&self, t: f64) -> Complex64 {
        self.taps
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::from_polar(1.0, -(k as f64) * t))
            .sum()
    }

    /// `r(d) = Σ_l conj(a_{l+d}) a_l` for `d = -N..=N`, indexed by `d + N`.
    pub fn autocorrelation(&self) -> Vec<Complex64> {
        let n = self.degree() as i64;
        (-n..=n)
            .map(|d| {
                (0..=n)
                    .filter(|l| (0..=n).contains(&(l + d)))
                    .map(|l| self.taps[(l + d) as usize].conj() * self.taps[l as usize])
                    .sum()
            })
            .collect()
    }

    /// `|m_0(z)|^2` as a Laurent polynomial on `-N..=N`.
    pub fn power_spectrum(&self) -> LaurentPolynomial {
        let mut p = self.autocorrelation();
        // coefficient of z^e is r(-e)
        p.reverse();
        LaurentPolynomial::new(-(self.degree() as i64), p)
    }

    /// Residuals of the orthogonality relations and of the low-pass sum.
    pub fn validate_qmf(&self, tol: f64) -> QmfReport {
        let n = self.degree() as i64;
        let r = self.autocorrelation();
        let orthogonality: Vec<ShiftResidual> = (-(n / 2)..=n / 2)
            .map(|l| {
                let target = if l == 0 { 1.0 } else { 0.0 };
                ShiftResidual {
                    shift: l,
                    residual: (r[(2 * l + n) as usize] - target).norm(),
                }
            })
            .collect();
        let sum: Complex64 = self.taps.iter().sum();
        let lowpass = (sum - Complex64::new(SQRT_2, 0.0)).norm();

        let mut violations: Vec<QmfViolation> = orthogonality
            .iter()
            .filter(|s| s.residual > tol)
            .map(|s| QmfViolation::Orthogonality {
                shift: s.shift,
                residual: s.residual,
            })
            .collect();
        if lowpass > tol {
            violations.push(QmfViolation::LowPass { residual: lowpass });
        }
        QmfReport {
            tol,
            orthogonality,
            lowpass_residual: lowpass,
            violations,
        }
    }

    /// `| |m_0(t)|^2 + |m_0(t+π)|^2 − 2 |`.
    pub fn qmf_identity_residual(&self, t: f64) -> f64 {
        (self.m0(t).norm_sqr() + self.m0(t + PI).norm_sqr() - 2.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftResidual {
    pub shift: i64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum QmfViolation {
    /// `Σ conj(a_k) a_{k+2l} = δ_l` fails for this `l`.
    Orthogonality { shift: i64, residual: f64 },
    /// `Σ a_k = √2` fails.
    LowPass { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QmfReport {
    pub tol: f64,
    pub orthogonality: Vec<ShiftResidual>,
    pub lowpass_residual: f64,
    pub violations: Vec<QmfViolation>,
}

impl QmfReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// On-disk filter description.
///
/// Either `{"name": ..., "coefficients": [[re, im], ...]}` or the shorthand
/// `{"theta": number}` for the 4-tap family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FilterFile {
    Taps {
        #[serde(default)]
        name: String,
        coefficients: Vec<[f64; 2]>,
    },
    Theta {
        theta: f64,
    },
}

impl FilterFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("filter file serialises")
    }

    pub fn from_filter(name: &str, filter: &WaveletFilter) -> Self {
        Self::Taps {
            name: name.to_string(),
            coefficients: filter.taps().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    /// The angle, when this is the shorthand form.
    pub fn theta(&self) -> Option<f64> {
        match self {
            Self::Theta { theta } => Some(*theta),
            Self::Taps { .. } => None,
        }
    }

    pub fn to_filter(&self) -> Result<WaveletFilter> {
        match self {
            Self::Taps { coefficients, .. } => WaveletFilter::new(
                coefficients
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect(),
            ),
            Self::Theta { theta } => Ok(WaveletFilter::theta_family(Theta::new(*theta)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn assert_taps(f: &WaveletFilter, expected: &[f64]) {
        for (a, e) in f.taps().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0, "{a} vs {e}");
        }
    }

    #[test]
    fn theta_family_special_angles() {
        let h = FRAC_1_SQRT_2;
        assert_taps(
            &WaveletFilter::theta_family(Theta::new(FRAC_PI_2).unwrap()),
            &[h, 0.0, 0.0, h],
        );
        assert_taps(&WaveletFilter::theta_family(Theta::new(0.0).unwrap()), &[0.0, 0.0, h, h]);
        assert_taps(
            &WaveletFilter::theta_family(Theta::new(-FRAC_PI_2).unwrap()),
            &[0.0, h, h, 0.0],
        );
    }

    #[test]
    fn validate_examples() {
        assert!(WaveletFilter::haar().validate_qmf(1e-12).is_valid());

        let report = WaveletFilter::from_real(&[1.0, 0.0]).unwrap().validate_qmf(1e-12);
        assert_eq!(report.violations.len(), 1);
        match report.violations[0] {
            QmfViolation::LowPass { residual } => {
                assert!((residual - (SQRT_2 - 1.0)).abs() < 1e-15)
            }
            v => panic!("unexpected {v:?}"),
        }

        let f = WaveletFilter::theta_family(Theta::pi_fraction(9, 20).unwrap());
        assert!(f.validate_qmf(1e-12).is_valid());
    }

    #[test]
    fn unit_taps_violate_orthogonality() {
        let report = WaveletFilter::from_real(&[1.0, 1.0]).unwrap().validate_qmf(1e-12);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, QmfViolation::Orthogonality { shift: 0, residual } if (residual - 1.0).abs() < 1e-15)));
    }

    #[test]
    fn m0_examples() {
        let haar = WaveletFilter::haar();
        assert!((haar.m0(0.0) - Complex64::new(SQRT_2, 0.0)).norm() < 1e-15);
        assert!(haar.m0(PI).norm() < 1e-15);
        let f = WaveletFilter::theta_family(Theta::new(FRAC_PI_2).unwrap());
        assert!(f.m0(PI / 3.0).norm() < 1e-15);
    }

    #[test]
    fn qmf_identity_examples() {
        assert!(WaveletFilter::haar().qmf_identity_residual(0.7) <= 1e-12);
        let f = WaveletFilter::theta_family(Theta::pi_fraction(1, 5).unwrap());
        assert!(f.qmf_identity_residual(1.23) <= 1e-12);
        let bad = WaveletFilter::from_real(&[1.0, 1.0]).unwrap();
        assert!((bad.qmf_identity_residual(0.0) - 2.0).abs() < 1e-15);
        let flat = WaveletFilter::from_real(&[1.0, 0.0]).unwrap();
        assert!(flat.qmf_identity_residual(0.4) < 1e-15);
    }

    #[test]
    fn theta_grid_satisfies_qmf_and_pair_sums() {
        for i in 1..=101 {
            let theta = -PI + TAU * i as f64 / 101.0;
            let f = WaveletFilter::theta_family(Theta::new(theta).unwrap());
            let report = f.validate_qmf(1e-12);
            assert!(report.is_valid(), "theta {theta}: {report:?}");
            let c: Vec<f64> = f.taps().iter().map(|a| SQRT_2 * a.re).collect();
            assert!((c[0] + c[2] - 1.0).abs() < 1e-12);
            assert!((c[1] + c[3] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn b_matches_product_of_outer_taps() {
        for i in 0..50 {
            let th = Theta::new(-3.0 + 0.12 * i as f64).unwrap();
            let f = WaveletFilter::theta_family(th);
            let prod = (f.taps()[3] * f.taps()[0]).re;
            assert!((prod - th.b()).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_parsing() {
        let cases = [
            ("pi/2", FRAC_PI_2),
            ("9pi/20", 9.0 * PI / 20.0),
            ("-9pi/20", -9.0 * PI / 20.0),
            ("3*pi/10", 3.0 * PI / 10.0),
            ("pi", PI),
            ("-pi/4", -PI / 4.0),
            ("0", 0.0),
            ("0.785398", "0.785398".parse::<f64>().unwrap()),
            ("1.5707963", "1.5707963".parse::<f64>().unwrap()),
        ];
        for (s, v) in cases {
            assert_eq!(s.parse::<Theta>().unwrap().radians(), v, "{s}");
        }
        assert!("pi/0".parse::<Theta>().is_err());
        assert!("banana".parse::<Theta>().is_err());
        assert!("2pix".parse::<Theta>().is_err());
        assert_eq!("3pi/2".parse::<Theta>().unwrap().radians(), 1.5 * PI - TAU);
    }

    #[test]
    fn theta_rejects_nan() {
        assert!(Theta::new(f64::NAN).is_err());
        assert!(Theta::new(f64::INFINITY).is_err());
    }

    #[test]
    fn filter_file_formats() {
        let f = FilterFile::from_json(r#"{"name": "haar", "coefficients": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}"#)
            .unwrap();
        assert_eq!(f.to_filter().unwrap(), WaveletFilter::haar());

        let t = FilterFile::from_json(r#"{"theta": 0.5}"#).unwrap();
        assert_eq!(t.theta(), Some(0.5));
        assert_eq!(
            t.to_filter().unwrap(),
            WaveletFilter::theta_family(Theta::new(0.5).unwrap())
        );

        let back = FilterFile::from_json(&FilterFile::from_filter("x", &WaveletFilter::haar()).to_json()).unwrap();
        assert_eq!(back.to_filter().unwrap(), WaveletFilter::haar());

        assert!(FilterFile::from_json("").is_err());
        assert!(FilterFile::from_json(r#"{"coefficients": [[1, 0]]}"#).unwrap().to_filter().is_err());
    }

    #[test]
    fn power_spectrum_of_haar() {
        let p = WaveletFilter::haar().power_spectrum();
        let expected = LaurentPolynomial::from_real(-1, &[0.5, 1.0, 0.5]);
        assert!(p.canonical_eq(&expected));
    }
}

//! One-sided limits of the cascade at the dyadic points `n·2^{-N}` and the
//! 2×2 local iteration that gives the limits at `x = 1` and `x = 2` in closed form.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::filter::{Theta, WaveletFilter};

/// Largest supported resolution `N`.
pub const MAX_RESOLUTION: u32 = 16;

/// `|sin θ ∓ 1|` below this has no limit formula.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Right limits `ψ₊(n)` and left limits `ψ₋(n)` of a cascade iterate at
/// `x_n = n·2^{-N}`, `n = 0..=span·2^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedTrace {
    resolution: u32,
    span: usize,
    stage: u32,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl OneSidedTrace {
    /// Start for the 4-tap scheme on `[0, 3]`.
    pub fn new(resolution: u32) -> Result<Self> {
        Self::with_span(resolution, 3)
    }

    /// Start for filters with taps `a_0..a_span`, on the grid covering `[0, span]`.
    pub fn generalized(resolution: u32, span: usize) -> Result<Self> {
        Self::with_span(resolution, span.max(1))
    }

    fn with_span(resolution: u32, span: usize) -> Result<Self> {
        if !(1..=MAX_RESOLUTION).contains(&resolution) {
            return Err(Error::Resolution(resolution));
        }
        let unit = 1usize << resolution;
        let len = span * unit + 1;
        let plus = (0..len).map(|n| if n < unit { 1.0 } else { 0.0 }).collect();
        let minus = (0..len)
            .map(|n| if (1..=unit).contains(&n) { 1.0 } else { 0.0 })
            .collect();
        Ok(Self {
            resolution,
            span,
            stage: 0,
            plus,
            minus,
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn plus(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus(&self) -> &[f64] {
        &self.minus
    }

    /// `x_n = n·2^{-N}`.
    pub fn x(&self, n: usize) -> f64 {
        n as f64 * (-(self.resolution as f64)).exp2()
    }

    /// `ψ±^(m)(n) = √2 Σ_k a_k ψ±^(m−1)(2n − k·2^N)`, zero outside the grid.
    pub fn step(&self, filter: &WaveletFilter) -> Result<Self> {
        if filter.degree() != self.span {
            return Err(Error::TapCountMismatch {
                expected: self.span + 1,
                found: filter.degree() + 1,
            });
        }
        let c: Vec<f64> = filter.real_taps()?.iter().map(|a| SQRT_2 * a).collect();
        Ok(Self {
            plus: scheme_sweep(&c, &self.plus, self.resolution),
            minus: scheme_sweep(&c, &self.minus, self.resolution),
            stage: self.stage + 1,
            ..self.clone()
        })
    }

    pub fn run(&self, filter: &WaveletFilter, stages: u32) -> Result<Self> {
        let mut trace = self.clone();
        for _ in 0..stages {
            trace = trace.step(filter)?;
        }
        Ok(trace)
    }

    pub fn jumps(&self) -> impl Iterator<Item = f64> + '_ {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p - m)
    }

    /// `max_n |ψ₊(n) − ψ₋(n)|`.
    pub fn max_jump(&self) -> f64 {
        self.jumps().map(f64::abs).fold(0.0, f64::max)
    }

    /// CSV with header `n,x,psi_plus,psi_minus,jump`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.plus.len() * 64);
        out.push_str("n,x,psi_plus,psi_minus,jump\n");
        for (n, ((p, m), j)) in self.plus.iter().zip(&self.minus).zip(self.jumps()).enumerate() {
            let _ = writeln!(out, "{n},{},{p},{m},{j}", self.x(n));
        }
        out
    }
}

fn scheme_sweep(c: &[f64], old: &[f64], resolution: u32) -> Vec<f64> {
    let unit = 1i64 << resolution;
    let len = old.len() as i64;
    let mut new = vec![0.0; old.len()];
    for (k, &ck) in c.iter().enumerate() {
        if ck == 0.0 {
            continue;
        }
        let offset = k as i64 * unit;
        // 0 <= 2n - offset < len
        let n_lo = (offset + 1) / 2;
        let n_hi = ((len - 1 + offset) / 2).min(len - 1);
        for n in n_lo..=n_hi {
            new[n as usize] += ck * old[(2 * n - offset) as usize];
        }
    }
    new
}

/// Values of a step iterate on the two intervals to the left of a dyadic point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPair(pub f64, pub f64);

type Matrix2 = [[f64; 2]; 2];
type Matrix3 = [[f64; 3]; 3];

fn scaled_four_taps(filter: &WaveletFilter) -> Result<[f64; 4]> {
    if filter.degree() != 3 {
        return Err(Error::TapCountMismatch {
            expected: 4,
            found: filter.degree() + 1,
        });
    }
    let a = filter.real_taps()?;
    Ok([SQRT_2 * a[0], SQRT_2 * a[1], SQRT_2 * a[2], SQRT_2 * a[3]])
}

/// `A = [[√2a₂, √2a₀], [√2a₃, √2a₁]]`.
pub fn local_matrix(filter: &WaveletFilter) -> Result<Matrix2> {
    let c = scaled_four_taps(filter)?;
    Ok([[c[2], c[0]], [c[3], c[1]]])
}

/// Eigenpairs of [`local_matrix`]: `1` with `(1, 1)` and `−sin θ` with `(√2a₁, √2a₂)`.
pub fn local_eigen(filter: &WaveletFilter) -> Result<[(f64, [f64; 2]); 2]> {
    let c = scaled_four_taps(filter)?;
    Ok([(1.0, [1.0, 1.0]), (c[1] + c[2] - 1.0, [c[1], c[2]])])
}

/// `(sin θ, cos θ)` recovered from the taps; exact for the 4-tap family.
fn sin_cos_of(c: &[f64; 4]) -> (f64, f64) {
    (1.0 - c[1] - c[2], c[2] - c[1])
}

/// `A^k · start`.
pub fn local_iterate(filter: &WaveletFilter, start: LocalPair, k: usize) -> Result<LocalPair> {
    let a = local_matrix(filter)?;
    let mut v = start;
    for _ in 0..k {
        v = LocalPair(a[0][0] * v.0 + a[0][1] * v.1, a[1][0] * v.0 + a[1][1] * v.1);
    }
    Ok(v)
}

/// `lim_k A^k · start`; both components equal
/// `(√2a₂·s₁ − √2a₁·s₂) / (√2a₂ − √2a₁)`.
pub fn local_limit(filter: &WaveletFilter, start: LocalPair) -> Result<LocalPair> {
    let c = scaled_four_taps(filter)?;
    let (sin, cos) = sin_cos_of(&c);
    if (sin - 1.0).abs() < DEGENERACY_TOL || (sin + 1.0).abs() < DEGENERACY_TOL {
        return Err(Error::DegenerateTheta {
            theta: sin.atan2(cos),
            sin,
        });
    }
    let v = (c[2] * start.0 - c[1] * start.1) / (c[2] - c[1]);
    Ok(LocalPair(v, v))
}

/// `A′ = [[√2a₃, √2a₁, 0], [0, √2a₂, √2a₀], [0, √2a₃, √2a₁]]`.
pub fn local_matrix_3(filter: &WaveletFilter) -> Result<Matrix3> {
    let c = scaled_four_taps(filter)?;
    Ok([[c[3], c[1], 0.0], [0.0, c[2], c[0]], [0.0, c[3], c[1]]])
}

/// One row of the peak table: limits at `x = 1, 3/2, 2`, or `None` at `sin θ = ±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRow {
    pub theta: Theta,
    pub values: Option<[f64; 3]>,
}

pub fn peak_row(theta: Theta) -> PeakRow {
    let filter = WaveletFilter::theta_family(theta);
    let values = match (
        local_limit(&filter, LocalPair(0.0, 1.0)),
        local_limit(&filter, LocalPair(1.0, 0.0)),
    ) {
        (Ok(x1), Ok(x2)) => Some([x1.0, 0.0, x2.0]),
        _ => None,
    };
    PeakRow { theta, values }
}

/// `θ = kπ/20` for `k = −9..=9`.
pub fn default_peak_thetas() -> Vec<Theta> {
    (-9..=9)
        .map(|k| Theta::pi_fraction(k, 20).expect("finite"))
        .collect()
}

pub fn peak_table(thetas: &[Theta]) -> Vec<PeakRow> {
    thetas.iter().map(|&t| peak_row(t)).collect()
}

/// `½(1 + tan((θ − π/2)/2))`, the limit at `x = 1`.
pub fn peak_at_one(theta: Theta) -> f64 {
    0.5 * (1.0 + ((theta.radians() - FRAC_PI_2) / 2.0).tan())
}

/// Four decimals, ties to even, without a negative zero.
pub fn format_4dp(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

/// CSV with header `theta,x1,x15,x2`; degenerate rows print `degenerate` in each value column.
pub fn peak_table_csv(rows: &[PeakRow]) -> String {
    let mut out = String::from("theta,x1,x15,x2\n");
    for row in rows {
        let theta = row.theta.radians();
        match row.values {
            Some([a, b, c]) => {
                let _ = writeln!(out, "{theta},{},{},{}", format_4dp(a), format_4dp(b), format_4dp(c));
            }
            None => {
                let _ = writeln!(out, "{theta},degenerate,degenerate,degenerate");
            }
        }
    }
    out
}

//! Piecewise-constant functions on the dyadic grid `2^{-m} ℤ`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest grid level a step function may carry.
pub const MAX_LEVEL: u32 = 24;

/// A step function with window `[lo, hi)` (integers) at grid level `m`.
///
/// `values[i]` is the value on `[lo + i·2^{-m}, lo + (i+1)·2^{-m})`; the
/// function vanishes outside the window. Global grid index `g` denotes the
/// interval starting at `g·2^{-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicStepFunction {
    level: u32,
    lo: i64,
    hi: i64,
    values: Vec<Complex64>,
}

impl DyadicStepFunction {
    pub fn new(level: u32, lo: i64, hi: i64, values: Vec<Complex64>) -> Result<Self> {
        check_level(level)?;
        if hi <= lo {
            return Err(Error::EmptyWindow { lo, hi });
        }
        let expected = ((hi - lo) as usize) << level;
        if values.len() != expected {
            return Err(Error::ValueCount {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { level, lo, hi, values })
    }

    pub fn from_real(level: u32, lo: i64, hi: i64, values: &[f64]) -> Result<Self> {
        Self::new(
            level,
            lo,
            hi,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zeros(level: u32, lo: i64, hi: i64) -> Result<Self> {
        check_level(level)?;
        if hi <= lo {
            return Err(Error::EmptyWindow { lo, hi });
        }
        let n = ((hi - lo) as usize) << level;
        Self::new(level, lo, hi, vec![Complex64::new(0.0, 0.0); n])
    }

    /// `χ_[0,1)` at level 0 on the window `[0, support_hi)`.
    pub fn haar_initial(support_hi: i64) -> Self {
        let hi = support_hi.max(1);
        let mut values = vec![Complex64::new(0.0, 0.0); hi as usize];
        values[0] = Complex64::new(1.0, 0.0);
        Self {
            level: 0,
            lo: 0,
            hi,
            values,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Window `(lo, hi)`.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid spacing `2^{-m}`.
    pub fn spacing(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// First global grid index of the window.
    pub fn first_index(&self) -> i64 {
        self.lo << self.level
    }

    /// Value on the interval with global index `g`; zero outside the window.
    pub fn value_at_index(&self, g: i64) -> Complex64 {
        let i = g - self.first_index();
        if i < 0 || i as usize >= self.values.len() {
            return Complex64::new(0.0, 0.0);
        }
        self.values[i as usize]
    }

    /// Right-continuous value at `x`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.value_at_index((x * (self.level as f64).exp2()).floor() as i64)
    }

    /// `lim_{y→x+}`; exact when `x` is a dyadic rational.
    pub fn right_limit(&self, x: f64) -> Complex64 {
        self.evaluate(x)
    }

    /// `lim_{y→x−}`; exact when `x` is a dyadic rational.
    pub fn left_limit(&self, x: f64) -> Complex64 {
        let scaled = x * (self.level as f64).exp2();
        self.value_at_index(scaled.ceil() as i64 - 1)
    }

    /// Same function on a finer grid (values duplicated).
    pub fn refine_to(&self, level: u32) -> Result<Self> {
        check_level(level)?;
        if level <= self.level {
            return Ok(self.clone());
        }
        let factor = 1usize << (level - self.level);
        let values = self
            .values
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, factor))
            .collect();
        Ok(Self {
            level,
            lo: self.lo,
            hi: self.hi,
            values,
        })
    }

    /// Same function on a window enlarged to contain `[lo, hi)`.
    pub fn widen(&self, lo: i64, hi: i64) -> Self {
        let new_lo = lo.min(self.lo);
        let new_hi = hi.max(self.hi);
        if new_lo == self.lo && new_hi == self.hi {
            return self.clone();
        }
        let per_unit = 1usize << self.level;
        let mut values = vec![Complex64::new(0.0, 0.0); (new_hi - new_lo) as usize * per_unit];
        let offset = (self.lo - new_lo) as usize * per_unit;
        values[offset..offset + self.values.len()].copy_from_slice(&self.values);
        Self {
            level: self.level,
            lo: new_lo,
            hi: new_hi,
            values,
        }
    }

    /// `x ↦ ψ(x − k)`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            level: self.level,
            lo: self.lo + k,
            hi: self.hi + k,
            values: self.values.clone(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// `‖ψ‖₂ = (2^{-m} Σ |v_i|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spacing()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Global index of the last interval with a nonzero value.
    pub fn last_nonzero_index(&self) -> Option<i64> {
        self.values
            .iter()
            .rposition(|v| v.norm() != 0.0)
            .map(|i| self.first_index() + i as i64)
    }

    /// `ψ̂(t) = ∫ ψ(x) e^{-itx} dx`, summed interval by interval in closed form.
    pub fn fourier_transform(&self, t: f64) -> Complex64 {
        let h = self.spacing();
        let u = t * h / 2.0;
        let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
        let first = self.first_index();
        let total: Complex64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() != 0.0)
            .map(|(i, v)| {
                let mid = ((first + i as i64) as f64 + 0.5) * h;
                v * Complex64::from_polar(1.0, -t * mid)
            })
            .sum();
        total * (h * sinc)
    }

    /// CSV with header `x,re,im`, one row per interval left endpoint.
    pub fn to_csv(&self) -> String {
        let h = self.spacing();
        let first = self.first_index();
        let mut out = String::with_capacity(self.values.len() * 24 + 8);
        out.push_str("x,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            let x = (first + i as i64) as f64 * h;
            let _ = writeln!(out, "{},{},{}", x, v.re, v.im);
        }
        out
    }

    /// Parses the output of [`to_csv`](Self::to_csv). The grid level is read
    /// off the spacing of the first two rows (a single row means level 0).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("x,re,im") => {}
            other => return Err(Error::Parse(format!("bad header {other:?}"))),
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 fields", n + 2)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", n + 2)))
            };
            xs.push(parse(fields[0])?);
            values.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        if xs.is_empty() {
            return Err(Error::Parse("no data rows".into()));
        }
        let level = if xs.len() > 1 {
            let step = xs[1] - xs[0];
            let level = (-step.log2()).round();
            if !(0.0..=MAX_LEVEL as f64).contains(&level) || step != (-level).exp2() {
                return Err(Error::Parse(format!("spacing {step} is not a dyadic step")));
            }
            level as u32
        } else {
            0
        };
        let per_unit = 1usize << level;
        if values.len() % per_unit != 0 || xs[0].fract() != 0.0 {
            return Err(Error::Parse("rows do not cover whole unit intervals".into()));
        }
        let lo = xs[0] as i64;
        let hi = lo + (values.len() / per_unit) as i64;
        Self::new(level, lo, hi, values)
    }
}

pub(crate) fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::LevelCap {
            level,
            cap: MAX_LEVEL,
        });
    }
    Ok(())
}

/// Both operands on a common level and window; returns `(a, b)` refined.
pub(crate) fn align(
    a: &DyadicStepFunction,
    b: &DyadicStepFunction,
) -> Result<(DyadicStepFunction, DyadicStepFunction)> {
    let level = a.level.max(b.level);
    let lo = a.lo.min(b.lo);
    let hi = a.hi.max(b.hi);
    Ok((a.refine_to(level)?.widen(lo, hi), b.refine_to(level)?.widen(lo, hi)))
}

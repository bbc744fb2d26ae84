//! Exact cascade iteration `(Mψ)(x) = √2 Σ a_k ψ(2x − k)` on dyadic step
//! functions, the relative polynomial `p(ψ₁, ψ₂)` and the identities that
//! tie the cascade to the transfer operator.
//!
//! Every operation here is exact up to floating-point rounding: step
//! functions at level `m` map to step functions at level `m + 1`, and inner
//! products of step functions are finite sums.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::WaveletFilter;
use crate::laurent::{div_ceil, LaurentPolynomial};
use crate::step::{check_level, DyadicStepFunction, MAX_LEVEL};
use crate::transfer::ruelle_apply;

/// Stage used as a stand-in for the limit function in convergence experiments.
pub const REFERENCE_STAGE: u32 = 20;

/// `(M_mask ψ)(x) = √2 Σ_k mask_k ψ(2x − k)` for an arbitrary Laurent mask.
///
/// The output window is the smallest integer window holding the support:
/// `[floor((lo + k_min)/2), ceil((hi + k_max)/2))`.
pub fn refine_by_mask(mask: &LaurentPolynomial, psi: &DyadicStepFunction) -> Result<DyadicStepFunction> {
    let level = psi.level() + 1;
    check_level(level)?;
    let (lo, hi) = psi.window();
    let out_lo = (lo + mask.lo()).div_euclid(2);
    let out_hi = div_ceil(hi + mask.hi(), 2);
    let mut out = vec![Complex64::new(0.0, 0.0); ((out_hi - out_lo) as usize) << level];

    let per_unit_in = 1i64 << psi.level();
    let first_in = psi.first_index();
    let first_out = out_lo << level;
    let input = psi.values();
    for (k, a) in mask.terms() {
        if a.norm() == 0.0 {
            continue;
        }
        let c = a * SQRT_2;
        // output global index G reads input global index G - k·2^m
        let offset = (first_in + k * per_unit_in - first_out) as usize;
        for (dst, src) in out[offset..offset + input.len()].iter_mut().zip(input) {
            *dst += c * src;
        }
    }
    DyadicStepFunction::new(level, out_lo, out_hi, out)
}

/// One cascade step on the window of `psi`, which must contain `[0, N]`.
pub fn cascade_step(filter: &WaveletFilter, psi: &DyadicStepFunction) -> Result<DyadicStepFunction> {
    let (lo, hi) = psi.window();
    let degree = filter.degree();
    if lo > 0 || hi < degree as i64 {
        return Err(Error::SupportOverflow { lo, hi, degree });
    }
    Ok(refine_by_mask(&filter.symbol(), psi)?.widen(lo, hi))
}

/// Result of [`cascade_run`].
#[derive(Debug, Clone)]
pub struct CascadeRun {
    /// All stages `ψ^(0)..ψ^(n)`, or only `ψ^(n)` when run with `keep_all = false`.
    pub stages: Vec<DyadicStepFunction>,
    /// `‖ψ^(k)‖₂` for `k = 0..=n`.
    pub norms: Vec<f64>,
    /// `‖ψ^(k) − ψ^(k−1)‖₂` for `k = 1..=n`.
    pub step_distances: Vec<f64>,
}

impl CascadeRun {
    pub fn last(&self) -> &DyadicStepFunction {
        self.stages.last().expect("at least one stage")
    }

    /// Stage `k`; requires the run to have been made with `keep_all`.
    pub fn stage(&self, k: usize) -> Option<&DyadicStepFunction> {
        if self.stages.len() == self.norms.len() {
            self.stages.get(k)
        } else if k + 1 == self.norms.len() {
            self.stages.last()
        } else {
            None
        }
    }
}

/// Applies [`cascade_step`] `n` times.
pub fn cascade_run(
    filter: &WaveletFilter,
    psi0: &DyadicStepFunction,
    n: u32,
    keep_all: bool,
) -> Result<CascadeRun> {
    let final_level = psi0.level() + n;
    if final_level > MAX_LEVEL {
        return Err(Error::LevelCap {
            level: final_level,
            cap: MAX_LEVEL,
        });
    }
    let mut stages = vec![psi0.clone()];
    let mut norms = vec![psi0.l2_norm()];
    let mut step_distances = Vec::with_capacity(n as usize);
    let mut current = psi0.clone();
    for _ in 0..n {
        let next = cascade_step(filter, &current)?;
        norms.push(next.l2_norm());
        step_distances.push(l2_distance(&current, &next));
        if keep_all {
            stages.push(next.clone());
        }
        current = next;
    }
    if !keep_all {
        stages = vec![current];
    }
    Ok(CascadeRun {
        stages,
        norms,
        step_distances,
    })
}

/// Stage-[`REFERENCE_STAGE`] approximant from the box start.
pub fn reference_approximant(filter: &WaveletFilter) -> Result<DyadicStepFunction> {
    let psi0 = DyadicStepFunction::haar_initial(filter.degree() as i64);
    Ok(cascade_run(filter, &psi0, REFERENCE_STAGE, false)?.last().clone())
}

/// `∫ conj(ψ₁(x − k)) ψ₂(x) dx`, summed on the finer of the two grids.
fn shifted_inner(psi1: &DyadicStepFunction, psi2: &DyadicStepFunction, k: i64) -> Complex64 {
    let level = psi1.level().max(psi2.level());
    let (lo1, hi1) = psi1.window();
    let (lo2, hi2) = psi2.window();
    let lo = (lo1 + k).max(lo2);
    let hi = (hi1 + k).min(hi2);
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let s1 = level - psi1.level();
    let s2 = level - psi2.level();
    let shift1 = k << level;
    let v1 = psi1.values();
    let v2 = psi2.values();
    let first1 = psi1.first_index();
    let first2 = psi2.first_index();
    let mut total = Complex64::new(0.0, 0.0);
    for g in (lo << level)..(hi << level) {
        let a = v1[(((g - shift1) >> s1) - first1) as usize];
        let b = v2[((g >> s2) - first2) as usize];
        total += a.conj() * b;
    }
    total * (-(level as f64)).exp2()
}

/// `⟨ψ₁, ψ₂⟩ = ∫ conj(ψ₁) ψ₂`.
pub fn l2_inner(psi1: &DyadicStepFunction, psi2: &DyadicStepFunction) -> Complex64 {
    shifted_inner(psi1, psi2, 0)
}

/// `‖ψ₁ − ψ₂‖₂`.
pub fn l2_distance(psi1: &DyadicStepFunction, psi2: &DyadicStepFunction) -> f64 {
    let sq = l2_inner(psi1, psi1).re + l2_inner(psi2, psi2).re - 2.0 * l2_inner(psi1, psi2).re;
    if sq > 1e-9 {
        return sq.sqrt();
    }
    // small distances lose digits to cancellation; sum differences directly
    let (a, b) = crate::step::align(psi1, psi2).expect("both levels are within the cap");
    let diff: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    (diff * a.spacing()).sqrt()
}

/// `p(ψ₁, ψ₂)(z) = Σ_k z^k ∫ conj(ψ₁(x − k)) ψ₂(x) dx`.
pub fn relative_polynomial(psi1: &DyadicStepFunction, psi2: &DyadicStepFunction) -> LaurentPolynomial {
    let (lo1, hi1) = psi1.window();
    let (lo2, hi2) = psi2.window();
    let k_lo = lo2 - hi1 + 1;
    let k_hi = hi2 - lo1 - 1;
    if k_hi < k_lo {
        return LaurentPolynomial::zero();
    }
    LaurentPolynomial::new(
        k_lo,
        (k_lo..=k_hi).map(|k| shifted_inner(psi1, psi2, k)).collect(),
    )
}

/// `(ξ ∗ ψ)(x) = Σ_k ξ_k ψ(x − k)`.
pub fn convolve_poly(xi: &LaurentPolynomial, psi: &DyadicStepFunction) -> DyadicStepFunction {
    let (lo, hi) = psi.window();
    let out_lo = lo + xi.lo();
    let out_hi = hi + xi.hi();
    let per_unit = 1usize << psi.level();
    let mut out = vec![Complex64::new(0.0, 0.0); (out_hi - out_lo) as usize * per_unit];
    for (k, c) in xi.terms() {
        let offset = (k - xi.lo()) as usize * per_unit;
        for (dst, src) in out[offset..offset + psi.len()].iter_mut().zip(psi.values()) {
            *dst += c * src;
        }
    }
    DyadicStepFunction::new(psi.level(), out_lo, out_hi, out).expect("window and length agree")
}

/// Largest coefficient gap in `p(Mψ₁, Mψ₂) = R p(ψ₁, ψ₂)`.
pub fn verify_cascade_covariance(
    filter: &WaveletFilter,
    psi1: &DyadicStepFunction,
    psi2: &DyadicStepFunction,
) -> Result<f64> {
    let mask = filter.symbol();
    let lhs = relative_polynomial(&refine_by_mask(&mask, psi1)?, &refine_by_mask(&mask, psi2)?);
    let rhs = ruelle_apply(filter, &relative_polynomial(psi1, psi2));
    Ok(lhs.max_abs_diff(&rhs))
}

/// `Π_{k=1}^{n} m_0(t 2^{-k}) / √2`.
pub fn fourier_partial_product(filter: &WaveletFilter, n: u32, t: f64) -> Complex64 {
    (1..=n)
        .map(|k| filter.m0(t * (-(k as f64)).exp2()) / SQRT_2)
        .product()
}

/// `max_x |Σ_k ψ(x + k) − 1|` over the grid.
pub fn strang_fix_check(psi: &DyadicStepFunction) -> f64 {
    let per_unit = 1i64 << psi.level();
    let mut sums = vec![Complex64::new(0.0, 0.0); per_unit as usize];
    let first = psi.first_index();
    for (i, v) in psi.values().iter().enumerate() {
        sums[(first + i as i64).rem_euclid(per_unit) as usize] += v;
    }
    sums.iter()
        .map(|s| (s - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max)
}

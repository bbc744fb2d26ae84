//! Numerical tools for finite wavelet low-pass filters: quadrature-mirror
//! checks, Laurent polynomial arithmetic, the transfer (Ruelle) operator and
//! its spectrum, exact cascade iteration on dyadic step functions, and
//! one-sided limit analysis at dyadic points.

pub mod cascade;
pub mod eigen;
pub mod error;
pub mod filter;
pub mod jumps;
pub mod laurent;
pub mod step;
pub mod transfer;

pub use cascade::{
    cascade_run, cascade_step, convolve_poly, l2_distance, l2_inner, refine_by_mask,
    relative_polynomial, CascadeRun,
};
pub use error::{Error, Result};
pub use filter::{FilterFile, QmfReport, Theta, WaveletFilter};
pub use jumps::{LocalPair, OneSidedTrace, PeakRow};
pub use laurent::LaurentPolynomial;
pub use step::DyadicStepFunction;
pub use transfer::{ruelle_apply, ruelle_matrix, spectrum, RuelleMatrix, SpectralReport};

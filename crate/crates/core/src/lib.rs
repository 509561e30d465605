//! Numerical laboratory for generalized Cesàro (Rhaly) operators
//!
//! ```text
//!   C_(η)(f)(z) = Σ_n η_n (a_0 + … + a_n) z^n
//! ```
//!
//! acting between the weighted Dirichlet spaces `D²_α`, normed on Taylor
//! coefficients by `|a_0|² + Σ_{n≥1} n^{1−α} |a_n|²`.
//!
//! The crate is organised bottom-up:
//!
//! - [`coeffspace`]: truncated coefficient sequences and the `D²_α` weights.
//! - [`etagen`]: multiplier sequences, including moments of radial measures.
//! - [`cesaro`]: linear-time application of the operator and its reduction to
//!   a lower-triangular matrix on `ℓ²`.
//! - [`normest`]: largest singular values of finite sections (matrix-free
//!   power iteration plus a dense Jacobi SVD oracle) and compactness probes.
//! - [`criteria`]: tail-sum boundedness/compactness statistics and Carleson
//!   conditions for radial measures.
//! - [`testfuncs`]: extremal test functions and norm certificates
//!   (lower bounds, Schur test, Bennett's inequality).

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cesaro;
pub mod coeffspace;
pub mod criteria;
pub mod error;
pub mod etagen;
pub mod normest;
pub mod special;
pub mod summation;
pub mod testfuncs;

mod quadrature;

pub use num_complex::Complex64;

pub use cesaro::{apply, f_eta, section, DenseMatrix, SectionMatrix};
pub use coeffspace::{monomial, norm_sq, weight, CoeffSeq, SpaceParams};

pub use criteria::{
    carleson_statistic, criterion, decreasing_shortcut, partial_sum_form, tail_sum, CarlesonReport,
    CriterionReport, DyadicGrid, Regime, Verdict,
};
pub use error::{Error, Result};
pub use etagen::{classical_cesaro, measure_moments, power_log_family, EtaSeq, MeasureSpec};
pub use normest::{dense_svd_norm, residual_norm, section_norm, NormEstimate, PowerOptions};
pub use testfuncs::{bennett_check, g_b_alpha, h_b, lower_bound, schur_certify, Certificate};

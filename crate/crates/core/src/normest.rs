//! Largest singular values of finite sections.
//!
//! The production path is matrix-free power iteration on `M*M` using the
//! O(N) section products. `dense_svd_norm` is an independent one-sided
//! Jacobi SVD used only as an oracle on small sections.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cesaro::{section, DenseMatrix, SectionMatrix, DENSE_CAP};
use crate::error::{Error, Result};
use crate::etagen::EtaSeq;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    /// Estimated largest singular value; never above the true one (up to rounding).
    pub value: f64,
    pub iterations: usize,
    /// Estimated relative error of `value` at the last iteration.
    pub residual: f64,
    pub converged: bool,
}

impl NormEstimate {
    fn exact(value: f64) -> Self {
        Self {
            value,
            iterations: 0,
            residual: 0.0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
            seed: 42,
        }
    }
}

impl PowerOptions {
    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::OutOfRange {
                name: "tol",
                value: self.tol,
                expected: "> 0",
            });
        }
        if self.max_iter == 0 {
            return Err(Error::OutOfRange {
                name: "max_iter",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(())
    }
}

fn l2(v: &[Complex64]) -> f64 {
    // scaled to avoid overflow on badly weighted sections
    let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|z| (z / m).norm_sqr()).sum::<f64>().sqrt()
}

/// Power iteration on `M*M`.
///
/// Each step forms `w = M v`, `z = M* w` and reports `‖z‖ / ‖w‖`, the norm
/// of `M*` on a unit vector, so every iterate is a lower bound for `σ_max`.
/// The stopping rule extrapolates the observed contraction rate of the
/// iterates; a stagnating slow run comes back with `converged = false`.
pub fn section_norm(m: &SectionMatrix, opts: &PowerOptions) -> Result<NormEstimate> {
    opts.validate()?;
    let dim = m.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(0.5..1.5), 0.0))
        .collect();
    let vn = l2(&v);
    v.iter_mut().for_each(|z| *z /= vn);

    let mut prev = f64::NAN;
    let mut prev_delta = f64::NAN;
    let mut est = NormEstimate {
        value: 0.0,
        iterations: 0,
        residual: f64::INFINITY,
        converged: false,
    };
    for it in 1..=opts.max_iter {
        let w = m.apply(&v)?;
        let wn = l2(&w);
        if wn.is_nan() {
            return Err(Error::Numerical(format!("NaN in power iterate {it}")));
        }
        if wn == 0.0 {
            // v lies in the kernel; for a zero matrix this is exact
            if it == 1
                && m.apply_adjoint(&vec![Complex64::new(1.0, 0.0); dim])?
                    .iter()
                    .all(|z| *z == Complex64::new(0.0, 0.0))
            {
                return Ok(NormEstimate {
                    iterations: 1,
                    ..NormEstimate::exact(0.0)
                });
            }
            return Err(Error::Numerical("power iterate collapsed to zero".into()));
        }
        let z = m.apply_adjoint(&w)?;
        let zn = l2(&z);
        let value = zn / wn;
        if !value.is_finite() {
            return Err(Error::Numerical(format!("non-finite power iterate {it}")));
        }
        est.value = value;
        est.iterations = it;
        if it > 1 {
            let delta = (value - prev).abs() / value;
            let rate = if prev_delta > 0.0 {
                (delta / prev_delta).min(0.999)
            } else {
                0.0
            };
            est.residual = delta / (1.0 - rate);
            if it > 2 && est.residual <= opts.tol {
                est.converged = true;
                return Ok(est);
            }
            prev_delta = delta;
        }
        prev = value;
        v = z;
        v.iter_mut().for_each(|c| *c /= zn);
    }
    Ok(est)
}

/// Largest singular value by one-sided (Hestenes) Jacobi.
pub fn dense_svd_norm(m: &DenseMatrix) -> Result<f64> {
    let cap = DENSE_CAP + 1;
    if m.rows() > cap || m.cols() > cap {
        return Err(Error::DenseCapExceeded {
            dim: m.rows().max(m.cols()),
            cap,
        });
    }
    let mut cols: Vec<Vec<Complex64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    let n = cols.len();
    let tol = 1e-15;
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (left, right) = cols.split_at_mut(q);
                let (ap, aq) = (&mut left[p], &mut right[0]);
                let mut a = 0.0;
                let mut b = 0.0;
                let mut g = Complex64::new(0.0, 0.0);
                for (x, y) in ap.iter().zip(aq.iter()) {
                    a += x.norm_sqr();
                    b += y.norm_sqr();
                    g += x.conj() * y;
                }
                let gabs = g.norm();
                if gabs == 0.0 || gabs <= tol * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate (a_p, e^{-iφ} a_q) by a real Jacobi rotation
                let phase = g.conj() / gabs;
                let zeta = (b - a) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
                    let yb = *y * phase;
                    let xn = *x * c - yb * s;
                    *y = *x * s + yb * c;
                    *x = xn;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    Ok(cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}

/// Norm of the section of `C_(η) − C_{n_cut}`: rows `n_cut+1..=n_big`,
/// columns `0..=n_big`. Decay in `n_cut` is the numerical witness of
/// compactness.
pub fn residual_norm(
    eta: &EtaSeq,
    alpha: f64,
    beta: f64,
    n_cut: usize,
    n_big: usize,
    opts: &PowerOptions,
) -> Result<NormEstimate> {
    if n_big >= eta.len() {
        return Err(Error::IndexOutOfRange {
            index: n_big,
            len: eta.len(),
        });
    }
    if n_cut > n_big {
        return Err(Error::IndexOrdering(format!(
            "n_cut = {n_cut} exceeds n_big = {n_big}"
        )));
    }
    if n_cut == n_big {
        return Ok(NormEstimate::exact(0.0));
    }
    let m = section(eta, alpha, beta, n_big)?.with_rows_from(n_cut + 1);
    section_norm(&m, opts)
}

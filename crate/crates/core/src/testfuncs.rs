//! Extremal test functions and certificates for operator norms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cesaro::{apply, section};
use crate::coeffspace::{norm_sq, CoeffSeq, SpaceParams};
use crate::criteria::{classify, tail_beyond, DyadicGrid, Verdict};
use crate::error::{Error, Result};
use crate::etagen::EtaSeq;
use crate::normest::{section_norm, PowerOptions};
use crate::summation::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    LowerBound,
    SchurUpper,
    Bennett,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub value: f64,
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip)]
    pub witness: Option<CoeffSeq>,
}

impl Certificate {
    fn new(kind: CertificateKind, value: f64, params: &[(&str, f64)]) -> Self {
        Self {
            kind,
            value,
            parameters: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            witness: None,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }
}

fn check_b(b: f64) -> Result<()> {
    if !(b > 0.5 && b < 1.0) {
        return Err(Error::OutOfRange {
            name: "b",
            value: b,
            expected: "1/2 < b < 1",
        });
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            name: "N",
            value: 0.0,
            expected: ">= 1",
        });
    }
    Ok(())
}

/// Length making `b^N < e^{−16}`.
pub fn default_truncation(b: f64) -> usize {
    (16.0 / (1.0 - b)).ceil() as usize
}

/// `b = 1 − 2^{−j}` for `j` in `levels`.
pub fn b_grid(levels: std::ops::RangeInclusive<u32>) -> Vec<f64> {
    levels.map(|j| 1.0 - 0.5f64.powi(j as i32)).collect()
}

/// `h_b(z) = (log 1/(1−b))^{−1/2} log 1/(1−bz)`, coefficients `0..=N`.
pub fn h_b(b: f64, n: usize) -> Result<CoeffSeq> {
    check_b(b)?;
    check_n(n)?;
    let c = (-(1.0 - b).ln()).sqrt().recip();
    let mut bn = 1.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(Complex64::new(0.0, 0.0));
    for k in 1..=n {
        bn *= b;
        out.push(Complex64::new(c * bn / k as f64, 0.0));
    }
    CoeffSeq::new(out)
}

/// `g_{b,α}(z) = (1−b)^{α/2} Σ_{n≥1} n^{α−1} b^n z^n`, coefficients `0..=N`.
pub fn g_b_alpha(b: f64, alpha: f64, n: usize) -> Result<CoeffSeq> {
    check_b(b)?;
    check_n(n)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "> 0",
        });
    }
    let c = (1.0 - b).powf(alpha / 2.0);
    let mut bn = 1.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(Complex64::new(0.0, 0.0));
    for k in 1..=n {
        bn *= b;
        out.push(Complex64::new(c * (k as f64).powf(alpha - 1.0) * bn, 0.0));
    }
    CoeffSeq::new(out)
}

/// `‖C_(η) f‖_{D²_β} / ‖f‖_{D²_α}`, with the image taken over the full stored
/// length of `η`.
pub fn lower_bound(eta: &EtaSeq, alpha: f64, beta: f64, f: &CoeffSeq) -> Result<Certificate> {
    let sa = SpaceParams::new(alpha)?;
    let sb = SpaceParams::new(beta)?;
    let den = norm_sq(f, sa);
    if !(den > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let image = apply(eta, f)?;
    let value = (norm_sq(&image, sb) / den).sqrt();
    let mut cert = Certificate::new(
        CertificateKind::LowerBound,
        value,
        &[
            ("alpha", alpha),
            ("beta", beta),
            ("N", (eta.len() - 1) as f64),
        ],
    );
    cert.witness = Some(f.clone());
    Ok(cert)
}

/// [`lower_bound`] followed by a comparison with the power-iteration norm of
/// the finite section of the same order.
pub fn lower_bound_checked(
    eta: &EtaSeq,
    alpha: f64,
    beta: f64,
    f: &CoeffSeq,
    opts: &PowerOptions,
    tol: f64,
) -> Result<Certificate> {
    let cert = lower_bound(eta, alpha, beta, f)?;
    let est = section_norm(&section(eta, alpha, beta, eta.len() - 1)?, opts)?;
    if cert.value > est.value + tol {
        return Err(Error::Numerical(format!(
            "lower bound {} exceeds section norm {}",
            cert.value, est.value
        )));
    }
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFamily {
    /// `h_b`, suited to `α = 0`
    HB,
    /// `g_{b,α}` at the domain exponent, suited to `α > 0`
    GBAlpha,
}

/// Lower bounds along `b = 1 − 2^{−j}`, one certificate per level.
///
/// Each test function is truncated at [`default_truncation`]`(b)` and `η`
/// must be at least that long. Past the stored `η` the image coefficients are
/// `η_n f(1)`, so the norm includes `|f(1)|²` times the extrapolated tail sum
/// of `η` (recorded as parameter `tail`) and bounds the operator norm rather
/// than the norm of the finite section.
pub fn lower_bound_sweep(
    eta: &EtaSeq,
    alpha: f64,
    beta: f64,
    family: TestFamily,
    levels: std::ops::RangeInclusive<u32>,
) -> Result<Vec<Certificate>> {
    b_grid(levels)
        .into_par_iter()
        .map(|b| {
            let n = default_truncation(b);
            if n >= eta.len() {
                return Err(Error::LengthMismatch {
                    expected: n + 1,
                    actual: eta.len(),
                });
            }
            let f = match family {
                TestFamily::HB => h_b(b, n)?,
                TestFamily::GBAlpha => g_b_alpha(b, alpha, n)?,
            };
            let mut c = lower_bound(eta, alpha, beta, &f)?;
            let f1: Complex64 = f.coeffs().iter().sum();
            let tail = f1.norm_sqr() * tail_beyond(eta, beta).estimate
                / norm_sq(&f, SpaceParams::new(alpha)?);
            c.value = (c.value * c.value + tail).sqrt();
            c.parameters.insert("b".into(), b);
            c.parameters.insert("tail".into(), tail);
            c.witness = None;
            Ok(c)
        })
        .collect()
}

/// Schur test on the `N × N` kernel `kernel(j, m)`, `1 ≤ j, m ≤ N`, with
/// weights `p(j)`:
///
/// ```text
///   c1 = max_m Σ_j α_{j,m} p_j / p_m,   c2 = max_j Σ_m α_{j,m} p_m / p_j
/// ```
///
/// and `|Σ α_{j,m} z_j w_m| ≤ sqrt(c1 c2) ‖z‖ ‖w‖`.
pub fn schur_certify<K, P>(kernel: K, p: P, n: usize) -> Result<Certificate>
where
    K: Fn(usize, usize) -> f64 + Sync,
    P: Fn(usize) -> f64 + Sync,
{
    check_n(n)?;
    let w: Vec<f64> = (1..=n).map(&p).collect();
    if let Some(i) = w.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::NonPositiveWeight { index: i + 1 });
    }
    // (max ratio, first offending index)
    let sweep = |by_row: bool| -> (f64, Option<usize>) {
        (1..=n)
            .into_par_iter()
            .map(|i| {
                let mut acc = NeumaierSum::new();
                for k in 1..=n {
                    let a = if by_row { kernel(i, k) } else { kernel(k, i) };
                    if !(a >= 0.0) {
                        return (f64::NAN, Some(i));
                    }
                    acc.add(a * w[k - 1]);
                }
                (acc.value() / w[i - 1], None)
            })
            .reduce(
                || (f64::NEG_INFINITY, None),
                |x, y| match (x.1, y.1) {
                    (Some(a), Some(b)) => (f64::NAN, Some(a.min(b))),
                    (Some(_), None) => x,
                    (None, Some(_)) => y,
                    (None, None) => (x.0.max(y.0), None),
                },
            )
    };
    let (c2, bad) = sweep(true);
    if let Some(index) = bad {
        return Err(Error::NegativeEntry { index });
    }
    let (c1, _) = sweep(false);
    Ok(Certificate::new(
        CertificateKind::SchurUpper,
        (c1 * c2).sqrt(),
        &[("c1", c1), ("c2", c2), ("N", n as f64)],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BennettRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub hypothesis_ratio: f64,
    pub conclusion_ratio: f64,
}

/// Both sides of the hypothesis
/// `Σ_{n≤N} u_n (Σ_{k≤n} v_k)² ≲ Σ_{n≤N} v_n` and of the conclusion
/// `Σ_{n≤N} u_n (Σ_{k≤n} v_k w_k)² ≲ Σ_{n≤N} v_n w_n²` on the grid.
/// Slices are 1-indexed: element `i` holds index `i + 1`.
pub fn bennett_table(
    u: &[f64],
    v: &[f64],
    w: &[f64],
    grid: &DyadicGrid,
) -> Result<Vec<BennettRow>> {
    grid.validate()?;
    for s in [v, w] {
        if s.len() != u.len() {
            return Err(Error::LengthMismatch {
                expected: u.len(),
                actual: s.len(),
            });
        }
    }
    if grid.top() > u.len() {
        return Err(Error::GridTooLong {
            n: grid.top(),
            len: u.len(),
        });
    }
    for s in [u, v, w] {
        if let Some(i) = s.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::NonPositiveWeight { index: i + 1 });
        }
    }
    let points = grid.points();
    let mut rows = Vec::with_capacity(points.len());
    let (mut pv, mut pvw) = (NeumaierSum::new(), NeumaierSum::new());
    let (mut lhs1, mut lhs2) = (NeumaierSum::new(), NeumaierSum::new());
    let (mut rhs1, mut rhs2) = (NeumaierSum::new(), NeumaierSum::new());
    let mut next = 0;
    for i in 0..grid.top() {
        pv.add(v[i]);
        pvw.add(v[i] * w[i]);
        lhs1.add(u[i] * pv.value().powi(2));
        lhs2.add(u[i] * pvw.value().powi(2));
        rhs1.add(v[i]);
        rhs2.add(v[i] * w[i] * w[i]);
        if i + 1 == points[next] {
            rows.push(BennettRow {
                n: i + 1,
                hypothesis_ratio: lhs1.value() / rhs1.value(),
                conclusion_ratio: lhs2.value() / rhs2.value(),
            });
            next += 1;
        }
    }
    Ok(rows)
}

/// Value is the largest conclusion ratio on the grid. The check passes
/// unless the hypothesis ratio is classified bounded while the conclusion
/// ratio is not.
pub fn bennett_check(u: &[f64], v: &[f64], w: &[f64], grid: &DyadicGrid) -> Result<Certificate> {
    let rows = bennett_table(u, v, w, grid)?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let hyp: Vec<f64> = rows.iter().map(|r| r.hypothesis_ratio).collect();
    let con: Vec<f64> = rows.iter().map(|r| r.conclusion_ratio).collect();
    let ch = classify(&xs, &hyp);
    let cc = classify(&xs, &con);
    let passed = ch.bounded != Verdict::Holds || cc.bounded == Verdict::Holds;
    let max = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Certificate::new(
        CertificateKind::Bennett,
        max(&con),
        &[
            ("hypothesis_ratio", max(&hyp)),
            ("hypothesis_slope", ch.slope),
            ("conclusion_slope", cc.slope),
            ("passed", if passed { 1.0 } else { 0.0 }),
        ],
    ))
}

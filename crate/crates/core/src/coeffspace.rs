//! Taylor-coefficient representation of analytic functions and the weighted
//! Dirichlet norms `‖f‖²_{D²_α} = |a_0|² + Σ_{n≥1} n^{1−α} |a_n|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Truncated coefficient vector `(a_0, …, a_N)` of an analytic function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct CoeffSeq(Vec<Complex64>);

impl CoeffSeq {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        check_entries(&coeffs)?;
        Ok(Self(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// All-zero sequence of the given length (`len ≥ 1`).
    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; the invariant forbids empty sequences.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Truncation degree `N` (the sequence holds `a_0..=a_N`).
    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    /// `f(0) = a_0`.
    pub fn value_at_origin(&self) -> Complex64 {
        self.0[0]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|&a| c * a).collect())
    }

    /// Coefficientwise sum; the shorter sequence is zero-extended.
    pub fn add(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        let zero = Complex64::new(0.0, 0.0);
        Self(
            (0..len)
                .map(|i| {
                    self.0.get(i).copied().unwrap_or(zero) + other.0.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    /// Zero-extend (or truncate) to `len` entries.
    pub fn resized(&self, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptySequence);
        }
        let mut v = self.0.clone();
        v.resize(len, Complex64::new(0.0, 0.0));
        Ok(Self(v))
    }
}

impl TryFrom<Vec<Complex64>> for CoeffSeq {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CoeffSeq> for Vec<Complex64> {
    fn from(c: CoeffSeq) -> Self {
        c.0
    }
}

pub(crate) fn check_entries(v: &[Complex64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::EmptySequence);
    }
    if let Some(index) = v
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// Space exponent `α` identifying `D²_α`. Any finite real is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub alpha: f64,
}

impl SpaceParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                expected: "finite real",
            });
        }
        Ok(Self { alpha })
    }

    /// `S²`: functions with `f′ ∈ H²`.
    pub const DERIVATIVE_HARDY: SpaceParams = SpaceParams { alpha: -1.0 };
    pub const DIRICHLET: SpaceParams = SpaceParams { alpha: 0.0 };
    pub const HARDY: SpaceParams = SpaceParams { alpha: 1.0 };

    /// `A²_γ = D²_{γ+2}` for `γ > −1`.
    pub fn bergman(gamma: f64) -> Result<Self> {
        if !(gamma > -1.0) {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                expected: "> -1",
            });
        }
        Self::new(gamma + 2.0)
    }

    pub fn weight(&self, n: usize) -> f64 {
        weight(n, self.alpha)
    }
}

/// Coefficient weight of `D²_α`: 1 at `n = 0`, `n^{1−α}` for `n ≥ 1`.
#[inline]
pub fn weight(n: usize, alpha: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        (n as f64).powf(1.0 - alpha)
    }
}

/// Squared `D²_α` norm of the truncation, `Σ_{n≤N} weight(n, α) |a_n|²`.
pub fn norm_sq(f: &CoeffSeq, space: SpaceParams) -> f64 {
    let mut acc = NeumaierSum::new();
    // large n first: the tail terms are the small ones
    for (n, a) in f.coeffs().iter().enumerate().rev() {
        acc.add(weight(n, space.alpha) * a.norm_sqr());
    }
    acc.value()
}

/// The monomial `u_N(z) = z^N`.
pub fn monomial(n: usize) -> CoeffSeq {
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    v[n] = Complex64::new(1.0, 0.0);
    CoeffSeq(v)
}

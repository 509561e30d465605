//! The operator `C_(η)` on coefficient sequences, and its finite sections.
//!
//! Under `x_k = sqrt(weight(k, α)) a_k` the map `C_(η): D²_α → D²_β` becomes
//! the lower-triangular matrix on `ℓ²`
//!
//! ```text
//!   m_{n,k} = η_n · sqrt(weight(n, β) / weight(k, α)),   k ≤ n,
//! ```
//!
//! which is never formed: every product is a prefix (or suffix) sum, O(N).

use num_complex::Complex64;

use crate::coeffspace::{weight, CoeffSeq};
use crate::error::{Error, Result};
use crate::etagen::EtaSeq;
use crate::summation::ComplexSum;

/// Largest `N` for which a section may be materialized densely.
pub const DENSE_CAP: usize = 512;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `b_n = η_n (a_0 + … + a_n)` for `0 ≤ n < len(η)`; `a_k = 0` past `f`.
pub fn apply(eta: &EtaSeq, f: &CoeffSeq) -> Result<CoeffSeq> {
    if eta.len() < f.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            actual: eta.len(),
        });
    }
    let a = f.coeffs();
    let mut prefix = ComplexSum::new();
    let out = eta
        .values()
        .iter()
        .enumerate()
        .map(|(n, &e)| {
            if let Some(&an) = a.get(n) {
                prefix.add(an);
            }
            e * prefix.value()
        })
        .collect();
    CoeffSeq::new(out)
}

/// `F_(η) = C_(η)(1)`, the series with coefficients `η_n`.
pub fn f_eta(eta: &EtaSeq) -> CoeffSeq {
    CoeffSeq::new(eta.values().to_vec()).expect("EtaSeq upholds CoeffSeq invariants")
}

/// Map `f ∈ D²_α` to its `ℓ²` image `x_k = sqrt(weight(k, α)) a_k`.
pub fn to_l2(f: &CoeffSeq, alpha: f64) -> Vec<Complex64> {
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(k, &a)| a * weight(k, alpha).sqrt())
        .collect()
}

/// Inverse of [`to_l2`].
pub fn from_l2(x: &[Complex64], alpha: f64) -> Result<CoeffSeq> {
    CoeffSeq::new(
        x.iter()
            .enumerate()
            .map(|(k, &v)| v / weight(k, alpha).sqrt())
            .collect(),
    )
}

/// Implicit `(N+1) × (N+1)` section of the `ℓ²`-reduced operator.
///
/// Rows below `first_row` are zero; `first_row = 0` is the plain section and
/// `first_row = N_cut + 1` the section of `C_(η) − C_{N_cut}`.
#[derive(Debug, Clone)]
pub struct SectionMatrix {
    alpha: f64,
    beta: f64,
    first_row: usize,
    /// `sqrt(weight(n, β)) η_n`
    row_scale: Vec<Complex64>,
    /// `1 / sqrt(weight(k, α))`
    col_scale: Vec<f64>,
}

/// The section of `C_(η): D²_α → D²_β` with indices `0..=n`.
pub fn section(eta: &EtaSeq, alpha: f64, beta: f64, n: usize) -> Result<SectionMatrix> {
    if n >= eta.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: eta.len(),
        });
    }
    let row_scale = eta.values()[..=n]
        .iter()
        .enumerate()
        .map(|(i, &e)| e * weight(i, beta).sqrt())
        .collect();
    let col_scale = (0..=n).map(|k| 1.0 / weight(k, alpha).sqrt()).collect();
    Ok(SectionMatrix {
        alpha,
        beta,
        first_row: 0,
        row_scale,
        col_scale,
    })
}

impl SectionMatrix {
    /// Zero every row with index `< first_row`.
    pub fn with_rows_from(mut self, first_row: usize) -> Self {
        self.first_row = first_row;
        self
    }

    /// Dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.col_scale.len()
    }

    pub fn order(&self) -> usize {
        self.dim() - 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn first_row(&self) -> usize {
        self.first_row
    }

    pub fn entry(&self, n: usize, k: usize) -> Complex64 {
        if k > n || n < self.first_row || n >= self.dim() {
            ZERO
        } else {
            self.row_scale[n] * self.col_scale[k]
        }
    }

    /// Leading principal `(m+1) × (m+1)` block, itself the section of order `m`.
    pub fn leading(&self, m: usize) -> Result<Self> {
        if m >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: m,
                len: self.dim(),
            });
        }
        Ok(Self {
            row_scale: self.row_scale[..=m].to_vec(),
            col_scale: self.col_scale[..=m].to_vec(),
            ..self.clone()
        })
    }

    fn check_len(&self, v: &[Complex64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        Ok(())
    }

    /// `y = M x` via a running prefix sum.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x)?;
        let mut prefix = ComplexSum::new();
        let mut y = Vec::with_capacity(x.len());
        for (n, (&xn, &cs)) in x.iter().zip(&self.col_scale).enumerate() {
            prefix.add(xn * cs);
            y.push(if n < self.first_row {
                ZERO
            } else {
                self.row_scale[n] * prefix.value()
            });
        }
        Ok(y)
    }

    /// `x = M* y` via a running suffix sum.
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(y)?;
        let mut suffix = ComplexSum::new();
        let mut x = vec![ZERO; y.len()];
        for k in (0..y.len()).rev() {
            if k >= self.first_row {
                suffix.add(self.row_scale[k].conj() * y[k]);
            }
            x[k] = suffix.value() * self.col_scale[k];
        }
        Ok(x)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        if self.order() > DENSE_CAP {
            return Err(Error::DenseCapExceeded {
                dim: self.dim(),
                cap: DENSE_CAP + 1,
            });
        }
        let d = self.dim();
        Ok(DenseMatrix::from_fn(d, d, |n, k| self.entry(n, k)))
    }
}

/// `y = M x`.
pub fn apply_section(m: &SectionMatrix, x: &[Complex64]) -> Result<Vec<Complex64>> {
    m.apply(x)
}

/// `x = M* y`.
pub fn apply_adjoint(m: &SectionMatrix, y: &[Complex64]) -> Result<Vec<Complex64>> {
    m.apply_adjoint(y)
}

/// Row-major dense complex matrix; only used as an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        Ok(Self::from_fn(rows, cols, |i, j| {
            Complex64::new(values[i * cols + j], 0.0)
        }))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn adjoint_mul_vec(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![ZERO; self.cols];
        for (row, &yi) in self.data.chunks(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * yi;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffspace::{monomial, norm_sq, SpaceParams};
    use crate::etagen::{classical_cesaro, power_log_family};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    }

    #[test]
    fn constant_maps_to_f_eta() {
        let eta = power_log_family(0.7, 0.3, 40).unwrap();
        let out = apply(&eta, &CoeffSeq::from_real(&[1.0]).unwrap()).unwrap();
        assert_eq!(out, f_eta(&eta));
    }

    #[test]
    fn monomial_image_is_eta_tail() {
        let eta = power_log_family(1.3, 0.0, 30).unwrap();
        let out = apply(&eta, &monomial(7)).unwrap();
        for (n, b) in out.coeffs().iter().enumerate() {
            let want = if n >= 7 { eta.values()[n] } else { ZERO };
            assert_eq!(*b, want);
        }
    }

    #[test]
    fn cesaro_of_geometric_series_is_ones() {
        let n = 1 << 16;
        let eta = classical_cesaro(n);
        let ones = CoeffSeq::from_real(&vec![1.0; n + 1]).unwrap();
        let out = apply(&eta, &ones).unwrap();
        for b in out.coeffs() {
            assert!((b.re - 1.0).abs() <= 2.0 * f64::EPSILON && b.im == 0.0);
        }
    }

    #[test]
    fn apply_rejects_short_eta() {
        let eta = classical_cesaro(2);
        assert!(matches!(
            apply(&eta, &monomial(5)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn f_eta_examples() {
        let e = classical_cesaro(3);
        let f = f_eta(&e);
        assert_eq!(f.coeffs()[3], c(0.25, 0.0));
        let z = EtaSeq::from_real(&[0.0; 5]).unwrap();
        assert_eq!(norm_sq(&f_eta(&z), SpaceParams::HARDY), 0.0);
    }

    #[test]
    fn f_eta_norm_is_weighted_sum() {
        let eta = power_log_family(1.1, 0.5, 500).unwrap();
        let beta = 0.4;
        let direct: f64 = crate::summation::sum(
            eta.values()
                .iter()
                .enumerate()
                .map(|(n, e)| weight(n, beta) * e.norm_sqr()),
        );
        let got = norm_sq(&f_eta(&eta), SpaceParams::new(beta).unwrap());
        assert!((got - direct).abs() < 1e-14 * direct);
    }

    #[test]
    fn unit_eta_section() {
        let eta = EtaSeq::unit(4).unwrap();
        let m = section(&eta, 2.0, -3.0, 0).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.entry(0, 0), c(1.0, 0.0));
    }

    #[test]
    fn diagonal_is_eta_when_spaces_agree() {
        let eta = power_log_family(0.5, 1.0, 64).unwrap();
        let m = section(&eta, 0.7, 0.7, 64).unwrap();
        for n in 0..=64 {
            assert!((m.entry(n, n) - eta.values()[n]).norm() < 1e-15);
            if n > 0 {
                assert_eq!(m.entry(n - 1, n), ZERO);
            }
        }
    }

    #[test]
    fn section_rejects_out_of_range() {
        let eta = classical_cesaro(10);
        assert!(section(&eta, 0.0, 0.0, 11).is_err());
        assert!(section(&eta, 0.0, 0.0, 10).is_ok());
        let m = section(&eta, 0.0, 0.0, 10).unwrap();
        assert!(matches!(
            m.apply(&[ZERO; 3]),
            Err(Error::LengthMismatch {
                expected: 11,
                actual: 3
            })
        ));
        assert!(m.apply_adjoint(&[ZERO; 12]).is_err());
    }

    #[test]
    fn e0_column_is_row_scale() {
        let eta = power_log_family(0.9, 0.0, 20).unwrap();
        let (a, b) = (-1.0, 1.5);
        let m = section(&eta, a, b, 20).unwrap();
        let mut e0 = vec![ZERO; 21];
        e0[0] = c(1.0, 0.0);
        let y = m.apply(&e0).unwrap();
        for (n, yn) in y.iter().enumerate() {
            let want = eta.values()[n] * weight(n, b).sqrt();
            assert!((yn - want).norm() <= 1e-15 * want.norm());
        }
    }

    fn random_eta(rng: &mut ChaCha8Rng, len: usize) -> EtaSeq {
        EtaSeq::custom(random_vec(rng, len)).unwrap()
    }

    #[test]
    fn implicit_product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eta = random_eta(&mut rng, 65);
        for &(a, b) in &[(0.0, 0.0), (-1.0, 2.0), (1.5, -0.5)] {
            let m = section(&eta, a, b, 64).unwrap();
            let d = m.to_dense().unwrap();
            for _ in 0..100 {
                let x = random_vec(&mut rng, 65);
                let scale = d.mul_vec(&x).iter().map(|z| z.norm()).fold(1.0, f64::max);
                assert!(dist(&m.apply(&x).unwrap(), &d.mul_vec(&x)) < 1e-12 * scale);
                let y = random_vec(&mut rng, 65);
                let scale = d
                    .adjoint_mul_vec(&y)
                    .iter()
                    .map(|z| z.norm())
                    .fold(1.0, f64::max);
                assert!(
                    dist(&m.apply_adjoint(&y).unwrap(), &d.adjoint_mul_vec(&y)) < 1e-12 * scale
                );
            }
        }
    }

    #[test]
    fn adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let eta = random_eta(&mut rng, 200);
        let m = section(&eta, 0.5, 1.0, 199).unwrap();
        let r = m.clone().with_rows_from(37);
        for mat in [&m, &r] {
            for _ in 0..50 {
                let x = random_vec(&mut rng, 200);
                let y = random_vec(&mut rng, 200);
                let lhs = dot(&mat.apply(&x).unwrap(), &y);
                let rhs = dot(&x, &mat.apply_adjoint(&y).unwrap());
                assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
            }
        }
    }

    #[test]
    fn dense_cap() {
        let eta = classical_cesaro(600);
        assert!(section(&eta, 0.0, 0.0, 512).unwrap().to_dense().is_ok());
        assert!(matches!(
            section(&eta, 0.0, 0.0, 513).unwrap().to_dense(),
            Err(Error::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn residual_rows_are_zeroed() {
        let eta = classical_cesaro(30);
        let m = section(&eta, 1.0, 1.0, 30).unwrap().with_rows_from(11);
        let y = m.apply(&vec![c(1.0, 0.0); 31]).unwrap();
        assert!(y[..11].iter().all(|z| *z == ZERO));
        assert!(y[11..].iter().all(|z| z.re > 0.0));
    }

    #[test]
    fn section_norm_ratio_matches_function_norm_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eta = random_eta(&mut rng, 41);
        let (a, b) = (-0.5, 1.7);
        let m = section(&eta, a, b, 40).unwrap();
        let f = CoeffSeq::new(random_vec(&mut rng, 41)).unwrap();
        let x = to_l2(&f, a);
        let y = m.apply(&x).unwrap();
        let g = apply(&eta, &f).unwrap();
        let l2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let lhs = l2(&y) / l2(&x);
        let rhs =
            norm_sq(&g, SpaceParams::new(b).unwrap()) / norm_sq(&f, SpaceParams::new(a).unwrap());
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
        let back = from_l2(&y, b).unwrap();
        assert!(dist(back.coeffs(), g.coeffs()) < 1e-12);
    }

    #[test]
    fn leading_block_is_smaller_section() {
        let eta = power_log_family(1.0, 1.0, 50).unwrap();
        let big = section(&eta, 0.3, -0.2, 50).unwrap();
        let small = section(&eta, 0.3, -0.2, 20).unwrap();
        let lead = big.leading(20).unwrap();
        for n in 0..=20 {
            for k in 0..=20 {
                assert_eq!(lead.entry(n, k), small.entry(n, k));
            }
        }
    }

    fn cvec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), len)
            .prop_map(|v| v.into_iter().map(|(r, i)| c(r, i)).collect())
    }

    proptest! {
        #[test]
        fn linear(e in cvec(25), f in cvec(25), g in cvec(25), kr in -2.0..2.0f64, ki in -2.0..2.0f64) {
            let eta = EtaSeq::custom(e).unwrap();
            let f = CoeffSeq::new(f).unwrap();
            let g = CoeffSeq::new(g).unwrap();
            let k = c(kr, ki);
            let lhs = apply(&eta, &f.scale(k).add(&g)).unwrap();
            let rhs = apply(&eta, &f).unwrap().scale(k).add(&apply(&eta, &g).unwrap());
            prop_assert!(dist(lhs.coeffs(), rhs.coeffs()) < 1e-11);
        }

        #[test]
        fn splits_off_value_at_origin(e in cvec(25), f in cvec(25)) {
            let eta = EtaSeq::custom(e).unwrap();
            let f = CoeffSeq::new(f).unwrap();
            let f0 = f.value_at_origin();
            let mut rest = f.coeffs().to_vec();
            rest[0] = ZERO;
            let rest = CoeffSeq::new(rest).unwrap();
            let lhs = apply(&eta, &f).unwrap();
            let rhs = f_eta(&eta).scale(f0).add(&apply(&eta, &rest).unwrap());
            prop_assert!(dist(lhs.coeffs(), rhs.coeffs()) < 1e-11);
        }
    }
}

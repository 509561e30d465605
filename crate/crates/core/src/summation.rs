//! Compensated (Kahan–Babuška / Neumaier) accumulation.
//!
//! Tail sums of slowly decaying series lose most of their digits with naive
//! accumulation; every running sum in this crate goes through these types.

use num_complex::Complex64;
use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Componentwise compensated sum of complex numbers.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, rhs: Complex64) {
        self.add(rhs);
    }
}

/// Compensated sum of a sequence of reals.
pub fn sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    xs.into_iter().collect::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn harmonic_tail_matches_reverse_order() {
        let n = 1_000_000;
        let fwd = sum((1..=n).map(|k| 1.0 / k as f64));
        let rev = sum((1..=n).rev().map(|k| 1.0 / k as f64));
        assert!((fwd - rev).abs() <= 2.0 * f64::EPSILON * fwd);
    }

    #[test]
    fn complex_components_independent() {
        let mut acc = ComplexSum::new();
        for _ in 0..10 {
            acc += Complex64::new(0.1, -0.1);
        }
        let v = acc.value();
        assert_eq!(v.re, 1.0);
        assert_eq!(v.im, -1.0);
    }
}

//! Log-gamma and Beta functions.
//!
//! Lanczos (g = 7, 9 terms) below the Stirling cutoff, the Stirling series
//! above it. Ratios `Γ(x+a)/Γ(x+b)` for large `x` are formed without
//! subtracting two large logarithms, which keeps Beta moments accurate to a
//! few ulps far into the tail.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const STIRLING_CUTOFF: f64 = 10.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Stirling correction `ln Γ(x) − [(x−½) ln x − x + ½ ln 2π]` for `x ≥ 10`.
fn stirling_correction(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    // Bernoulli coefficients B_{2k} / (2k (2k−1))
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0))))))
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Natural log of `|Γ(x)|`. Returns `+∞` at the poles `x = 0, −1, −2, …`.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // reflection: Γ(x) Γ(1−x) = π / sin(πx)
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    if x >= STIRLING_CUTOFF {
        return (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_correction(x);
    }
    ln_gamma_lanczos(x)
}

/// `ln Γ(x + a) − ln Γ(x + b)`, stable when `x` is large and `a`, `b` moderate.
pub fn ln_gamma_ratio(x: f64, a: f64, b: f64) -> f64 {
    let p = x + a;
    let q = x + b;
    if p < STIRLING_CUTOFF || q < STIRLING_CUTOFF {
        return ln_gamma(p) - ln_gamma(q);
    }
    let d = a - b;
    (p - 0.5) * (d / q).ln_1p() + d * q.ln() - d + stirling_correction(p) - stirling_correction(q)
}

/// `ln B(a, b)` for `a, b > 0`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, big) = if a <= b { (a, b) } else { (b, a) };
    ln_gamma(small) + ln_gamma_ratio(big, 0.0, small)
}

/// Beta function `B(a, b) = Γ(a) Γ(b) / Γ(a + b)`.
pub fn beta(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn factorials() {
        let mut fact = 1.0f64;
        for n in 1..=25u32 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let lg = ln_gamma(n as f64);
            if n <= 2 {
                assert!(lg.abs() < 1e-15, "n={n} lg={lg}");
            } else {
                assert!(rel(lg, fact.ln()) < 1e-14, "n={n}");
            }
        }
    }

    #[test]
    fn half_integers_and_reflection() {
        assert!(rel(ln_gamma(0.5), 0.5 * PI.ln()) < 1e-14);
        // Γ(−0.5) = −2√π
        assert!(rel(ln_gamma(-0.5), (2.0 * PI.sqrt()).ln()) < 1e-14);
        assert!(ln_gamma(0.0).is_infinite());
        assert!(ln_gamma(-3.0).is_infinite());
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn large_argument() {
        // ln(10000!) to 17 digits
        assert!(rel(ln_gamma(10_001.0), 82_108.927_836_814_353) < 1e-15);
    }

    #[test]
    fn beta_closed_forms() {
        assert!(rel(beta(2.0, 3.0), 1.0 / 12.0) < 1e-14);
        assert!(rel(beta(0.5, 0.5), PI) < 1e-14);
        for n in [1.0, 10.0, 1e3, 1e4, 1e6] {
            // B(n+1, 1) = 1/(n+1), B(n+1, 2) = 1/((n+1)(n+2))
            assert!(rel(beta(n + 1.0, 1.0), 1.0 / (n + 1.0)) < 1e-14, "n={n}");
            assert!(
                rel(beta(n + 1.0, 2.0), 1.0 / ((n + 1.0) * (n + 2.0))) < 1e-14,
                "n={n}"
            );
        }
    }

    #[test]
    fn ratio_matches_direct_difference_at_crossover() {
        for x in [10.0, 12.5, 40.0] {
            let direct = ln_gamma(x + 0.3) - ln_gamma(x + 1.7);
            assert!((ln_gamma_ratio(x, 0.3, 1.7) - direct).abs() < 1e-13);
        }
    }
}

//! Boundedness and compactness statistics on dyadic grids.
//!
//! With `A_N = Σ_{n≥N} n^{1−β} |η_n|²`, the operator `C_(η): D²_α → D²_β`
//! is bounded iff `S_N = A_N φ(N)` stays bounded and compact iff `S_N → 0`,
//! where `φ ≡ 1` for `α < 0`, `φ(N) = log N` for `α = 0` and `φ(N) = N^α`
//! for `α > 0` (for `α < 0` both conditions reduce to `A_1 < ∞`).
//!
//! Big-O and little-o cannot be decided from finitely many terms, so the
//! verdicts below come from the log-log slope of the statistic over the
//! upper half of the grid:
//!
//! | verdict   | bounded                                  | compact            |
//! |-----------|------------------------------------------|--------------------|
//! | holds     | slope ≤ 0.05                             | slope ≤ −0.05      |
//! | fails     | slope ≥ 0.1 and last-octave slope ≥ 0.1  | slope ≥ −0.01      |
//!
//! Anything in between is `inconclusive`. A statistic that has vanished at
//! the top of the grid holds for both; an infinite one fails both.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etagen::{Asymptotic, EtaSeq, MeasureSpec};
use crate::quadrature::GaussLegendre;
use crate::summation::NeumaierSum;

pub const BOUNDED_HOLD_SLOPE: f64 = 0.05;
pub const BOUNDED_FAIL_SLOPE: f64 = 0.1;
pub const COMPACT_HOLD_SLOPE: f64 = -0.05;
pub const COMPACT_FAIL_SLOPE: f64 = -0.01;
/// Slack on slope comparisons so exact power laws land on the intended side.
const SLOPE_SLACK: f64 = 1e-9;
/// The tail beyond the truncation must be known to this fraction of `A_N`.
pub const TAIL_MAJORANT_FRACTION: f64 = 0.01;
pub const MIN_GRID_POINTS: usize = 4;
pub const DEFAULT_CARLESON_LEVELS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AlphaNeg,
    AlphaZero,
    AlphaPos,
}

impl Regime {
    pub fn of(alpha: f64) -> Self {
        if alpha < 0.0 {
            Regime::AlphaNeg
        } else if alpha == 0.0 {
            Regime::AlphaZero
        } else {
            Regime::AlphaPos
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Which quantity fills the `A_N` column of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `A_N = Σ_{n≥N} n^{1−β}|η_n|²`, `S_N = A_N φ(N)`
    TailSum,
    /// `A_N = Σ_{n=1}^N n^{1+2α−β}|η_n|²`, `S_N = N^{−α} A_N`
    PartialSum,
    /// `A_N = |η_N|`, `S_N = |η_N| N^{1+(α−β)/2}` (or `|η_N|` when `β ≥ α+2`)
    DecreasingShortcut,
}

/// Points `N = 2^k`, `min_exp ≤ k ≤ max_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicGrid {
    pub min_exp: u32,
    pub max_exp: u32,
}

impl Default for DyadicGrid {
    fn default() -> Self {
        Self {
            min_exp: 4,
            max_exp: 16,
        }
    }
}

impl DyadicGrid {
    pub fn new(min_exp: u32, max_exp: u32) -> Result<Self> {
        let g = Self { min_exp, max_exp };
        g.validate()?;
        Ok(g)
    }

    pub fn points(&self) -> Vec<usize> {
        (self.min_exp..=self.max_exp).map(|k| 1usize << k).collect()
    }

    pub fn len(&self) -> usize {
        (self.max_exp + 1).saturating_sub(self.min_exp) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn top(&self) -> usize {
        1usize << self.max_exp
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_exp >= 48 {
            return Err(Error::OutOfRange {
                name: "max_exp",
                value: self.max_exp as f64,
                expected: "< 48",
            });
        }
        if self.len() < MIN_GRID_POINTS {
            return Err(Error::GridTooCoarse {
                points: self.len(),
                min: MIN_GRID_POINTS,
            });
        }
        Ok(())
    }

    /// Grid whose top point leaves a factor 16 of truncation headroom.
    fn check_headroom(&self, len: usize) -> Result<()> {
        self.validate()?;
        if self.top() > len / 16 {
            return Err(Error::GridTooLong { n: self.top(), len });
        }
        Ok(())
    }

    fn check_within(&self, len: usize) -> Result<()> {
        self.validate()?;
        if self.top() >= len {
            return Err(Error::IndexOutOfRange {
                index: self.top(),
                len,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "A_N")]
    pub a_n: f64,
    #[serde(rename = "S_N")]
    pub s_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub statistic: Statistic,
    pub regime: Regime,
    pub alpha: f64,
    pub beta: f64,
    pub grid: Vec<GridPoint>,
    pub sup_s: f64,
    /// least-squares log-log slope of `S_N` over the upper half of the grid
    pub slope: f64,
    /// slope across the last octave
    pub last_slope: f64,
    pub verdict_bounded: Verdict,
    pub verdict_compact: Verdict,
    /// estimate of the part of `A_N` beyond the stored sequence
    pub tail_estimate: f64,
    /// bound on the error of `tail_estimate`
    pub tail_majorant: f64,
}

impl CriterionReport {
    /// CSV with header `N,A_N,S_N`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "A_N", "S_N"])?;
        for p in &self.grid {
            w.write_record([p.n.to_string(), fmt_f64(p.a_n), fmt_f64(p.s_n)])?;
        }
        w.flush()
    }
}

/// 17 significant digits, `.` decimal separator, no locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Verdicts from a statistic sampled at increasing abscissae.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub slope: f64,
    pub last_slope: f64,
    pub bounded: Verdict,
    pub compact: Verdict,
}

pub fn classify(xs: &[f64], stats: &[f64]) -> Classification {
    assert_eq!(xs.len(), stats.len());
    let fail = Classification {
        slope: f64::INFINITY,
        last_slope: f64::INFINITY,
        bounded: Verdict::Fails,
        compact: Verdict::Fails,
    };
    if stats.iter().any(|s| s.is_infinite() || s.is_nan()) {
        return fail;
    }
    let last = stats.len() - 1;
    if stats[last] == 0.0 {
        return Classification {
            slope: f64::NEG_INFINITY,
            last_slope: f64::NEG_INFINITY,
            bounded: Verdict::Holds,
            compact: Verdict::Holds,
        };
    }
    let pts: Vec<(f64, f64)> = (stats.len() / 2..stats.len())
        .filter(|&i| stats[i] > 0.0)
        .map(|i| (xs[i].ln(), stats[i].ln()))
        .collect();
    let slope = regression_slope(&pts);
    let last_slope = if stats[last - 1] > 0.0 {
        (stats[last] / stats[last - 1]).ln() / (xs[last] / xs[last - 1]).ln()
    } else {
        f64::INFINITY
    };
    let bounded = if slope <= BOUNDED_HOLD_SLOPE + SLOPE_SLACK {
        Verdict::Holds
    } else if slope >= BOUNDED_FAIL_SLOPE - SLOPE_SLACK
        && last_slope >= BOUNDED_FAIL_SLOPE - SLOPE_SLACK
    {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    let compact = if bounded == Verdict::Fails || slope >= COMPACT_FAIL_SLOPE - SLOPE_SLACK {
        Verdict::Fails
    } else if bounded == Verdict::Holds && slope <= COMPACT_HOLD_SLOPE + SLOPE_SLACK {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Classification {
        slope,
        last_slope,
        bounded,
        compact,
    }
}

fn regression_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[inline]
fn tail_term(n: usize, beta: f64, abs_sq: f64) -> f64 {
    (n as f64).powf(1.0 - beta) * abs_sq
}

/// Truncated tail `Σ_{n=N}^{N_max} n^{1−β}|η_n|²`, summed from the large-n end.
pub fn tail_sum(eta: &EtaSeq, beta: f64, n: usize) -> Result<f64> {
    if n == 0 || n > eta.len() {
        return Err(Error::OutOfRange {
            name: "N",
            value: n as f64,
            expected: "1 <= N <= length(eta)",
        });
    }
    let v = eta.values();
    let acc: NeumaierSum = (n..v.len())
        .rev()
        .map(|k| tail_term(k, beta, v[k].norm_sqr()))
        .collect();
    Ok(acc.value())
}

/// `Σ_{n ≥ len(η)} n^{1−β}|η_n|²` from the sequence's extension model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub estimate: f64,
    pub majorant: f64,
}

/// Span in `ln x` integrated with the exact extension before switching to
/// the leading asymptotics.
const LOG_SPAN: f64 = 40.0;

pub fn tail_beyond(eta: &EtaSeq, beta: f64) -> TailEstimate {
    let zero = TailEstimate {
        estimate: 0.0,
        majorant: 0.0,
    };
    let asym = eta.asymptotic();
    if asym == Asymptotic::Vanishing {
        return zero;
    }
    if let Asymptotic::Power {
        power, log_power, ..
    } = asym
    {
        let p = 1.0 - beta + 2.0 * power;
        let q = 2.0 * log_power;
        if p > -1.0 || (p == -1.0 && q >= -1.0) {
            return TailEstimate {
                estimate: f64::INFINITY,
                majorant: f64::INFINITY,
            };
        }
    }
    let m = eta.len() as f64;
    let g = |x: f64| x.powf(1.0 - beta) * eta.extension_abs(x).powi(2);
    // midpoint correction: Σ_{n≥M} g(n) ≈ ∫_{M−1/2}^∞ g
    let u0 = (m - 0.5).ln();
    let u1 = u0 + LOG_SPAN;
    let sup = std::cell::Cell::new(g(m - 1.0).max(g(m)));
    let h = |u: f64| {
        let x = u.exp();
        let v = g(x);
        if v > sup.get() {
            sup.set(v);
        }
        x * v
    };
    let gl = GaussLegendre::new(10);
    let body = gl.composite(u0, u1, 320, &h);
    let rest = match asym {
        Asymptotic::Power {
            ln_k,
            power,
            log_power,
        } => {
            let k = (2.0 * ln_k).exp();
            let p1 = 2.0 + 2.0 * power - beta; // p + 1
            let q = 2.0 * log_power;
            if q == 0.0 {
                k * (p1 * u1).exp() / (-p1)
            } else if p1 == 0.0 {
                k * u1.powf(q + 1.0) / (-q - 1.0)
            } else {
                // ∫_{u1}^∞ k e^{p1 v} v^q dv; e^{p1 v} has dropped by e^{-60} at the end
                let end = u1 + 60.0 / (-p1);
                gl.composite(u1, end, 400, &|v: f64| k * (p1 * v).exp() * v.powf(q))
            }
        }
        _ => 0.0,
    };
    TailEstimate {
        estimate: body + rest,
        majorant: 2.0 * sup.get(),
    }
}

fn report(
    statistic: Statistic,
    alpha: f64,
    beta: f64,
    grid: Vec<GridPoint>,
    tail: TailEstimate,
) -> CriterionReport {
    let xs: Vec<f64> = grid.iter().map(|p| p.n as f64).collect();
    let stats: Vec<f64> = grid.iter().map(|p| p.s_n).collect();
    let c = classify(&xs, &stats);
    let sup_s = stats.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CriterionReport {
        statistic,
        regime: Regime::of(alpha),
        alpha,
        beta,
        grid,
        sup_s,
        slope: c.slope,
        last_slope: c.last_slope,
        verdict_bounded: c.bounded,
        verdict_compact: c.compact,
        tail_estimate: tail.estimate,
        tail_majorant: tail.majorant,
    }
}

/// Scaled tail statistic `S_N = A_N φ(N)` over the grid.
///
/// `A_N` includes the extrapolated part of the tail beyond the stored
/// sequence; verdicts are withheld when that part is not known to within
/// [`TAIL_MAJORANT_FRACTION`] of `A_N` at the top grid point. For `α < 0`
/// compactness and boundedness coincide.
pub fn criterion(
    eta: &EtaSeq,
    alpha: f64,
    beta: f64,
    grid: &DyadicGrid,
) -> Result<CriterionReport> {
    grid.check_headroom(eta.len())?;
    let tail = tail_beyond(eta, beta);
    let v = eta.values();
    let points = grid.points();
    let mut acc = NeumaierSum::new();
    let mut truncated = vec![0.0; points.len()];
    let mut next = points.len();
    for k in (points[0]..v.len()).rev() {
        acc.add(tail_term(k, beta, v[k].norm_sqr()));
        if next > 0 && k == points[next - 1] {
            next -= 1;
            truncated[next] = acc.value();
        }
    }
    let phi = |n: usize| match Regime::of(alpha) {
        Regime::AlphaNeg => 1.0,
        Regime::AlphaZero => (n as f64).ln(),
        Regime::AlphaPos => (n as f64).powf(alpha),
    };
    let grid_pts = points
        .iter()
        .zip(&truncated)
        .map(|(&n, &t)| {
            let a_n = t + tail.estimate;
            GridPoint {
                n,
                a_n,
                s_n: a_n * phi(n),
            }
        })
        .collect::<Vec<_>>();
    let top_a = grid_pts.last().map_or(0.0, |p| p.a_n);
    let mut rep = report(Statistic::TailSum, alpha, beta, grid_pts, tail);
    if top_a.is_finite() && tail.majorant > TAIL_MAJORANT_FRACTION * top_a {
        rep.verdict_bounded = Verdict::Inconclusive;
        rep.verdict_compact = Verdict::Inconclusive;
    }
    if rep.regime == Regime::AlphaNeg {
        rep.verdict_compact = rep.verdict_bounded;
    }
    Ok(rep)
}

fn require_positive_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "> 0",
        });
    }
    Ok(())
}

/// Partial-sum form for `α > 0`: `S'_N = N^{−α} Σ_{n=1}^N n^{1+2α−β}|η_n|²`.
pub fn partial_sum_form(
    eta: &EtaSeq,
    alpha: f64,
    beta: f64,
    grid: &DyadicGrid,
) -> Result<CriterionReport> {
    require_positive_alpha(alpha)?;
    grid.check_within(eta.len())?;
    let v = eta.values();
    let points = grid.points();
    let mut acc = NeumaierSum::new();
    let mut out = Vec::with_capacity(points.len());
    let mut idx = 0;
    for (n, e) in v.iter().enumerate().take(grid.top() + 1).skip(1) {
        acc.add((n as f64).powf(1.0 + 2.0 * alpha - beta) * e.norm_sqr());
        if n == points[idx] {
            let a_n = acc.value();
            out.push(GridPoint {
                n,
                a_n,
                s_n: a_n * (n as f64).powf(-alpha),
            });
            idx += 1;
        }
    }
    Ok(report(
        Statistic::PartialSum,
        alpha,
        beta,
        out,
        TailEstimate {
            estimate: 0.0,
            majorant: 0.0,
        },
    ))
}

/// Shortcut for non-increasing `|η_n|` and `α > 0`: `|η_N| N^{1+(α−β)/2}`.
///
/// When `β ≥ α + 2` boundedness only needs `|η_N| = O(1)`, which a finite
/// non-increasing sequence always satisfies; the statistic column then holds
/// `|η_N|` and the compactness verdict still uses the scaled statistic.
pub fn decreasing_shortcut(
    eta: &EtaSeq,
    alpha: f64,
    beta: f64,
    grid: &DyadicGrid,
) -> Result<CriterionReport> {
    require_positive_alpha(alpha)?;
    grid.check_within(eta.len())?;
    let abs: Vec<f64> = eta.values().iter().map(|z| z.norm()).collect();
    if let Some(i) = abs.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::NotMonotone { index: i + 1 });
    }
    let exponent = 1.0 + (alpha - beta) / 2.0;
    let points = grid.points();
    let scaled: Vec<f64> = points
        .iter()
        .map(|&n| abs[n] * (n as f64).powf(exponent))
        .collect();
    let no_decay_needed = beta >= alpha + 2.0;
    let grid_pts = points
        .iter()
        .zip(&scaled)
        .map(|(&n, &s)| GridPoint {
            n,
            a_n: abs[n],
            s_n: if no_decay_needed { abs[n] } else { s },
        })
        .collect();
    let zero = TailEstimate {
        estimate: 0.0,
        majorant: 0.0,
    };
    let mut rep = report(Statistic::DecreasingShortcut, alpha, beta, grid_pts, zero);
    if no_decay_needed {
        let xs: Vec<f64> = points.iter().map(|&n| n as f64).collect();
        let c = classify(&xs, &scaled);
        rep.verdict_bounded = Verdict::Holds;
        rep.verdict_compact = c.compact;
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonPoint {
    pub t: f64,
    /// `1 − t`, carried separately for precision near 1
    pub gap: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub s: f64,
    pub grid: Vec<CarlesonPoint>,
    pub sup: f64,
    pub slope: f64,
    pub verdict: Verdict,
}

impl CarlesonReport {
    /// CSV with header `t,ratio`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "ratio"])?;
        for p in &self.grid {
            w.write_record([fmt_f64(p.t), fmt_f64(p.ratio)])?;
        }
        w.flush()
    }
}

/// `μ([t,1)) / (1−t)^s` at `t = 1 − 2^{−j}`, `j = 1..=levels`.
///
/// The verdict classifies the ratio against `1/(1−t)` with the same slope
/// thresholds as the boundedness criteria.
pub fn carleson_statistic(mu: &MeasureSpec, s: f64, levels: u32) -> Result<CarlesonReport> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            expected: "> 0",
        });
    }
    if levels < MIN_GRID_POINTS as u32 || levels > 52 {
        return Err(Error::OutOfRange {
            name: "levels",
            value: levels as f64,
            expected: "4..=52",
        });
    }
    mu.validate()?;
    let grid: Vec<CarlesonPoint> = (1..=levels)
        .map(|j| {
            let gap = (0.5f64).powi(j as i32);
            let t = 1.0 - gap;
            CarlesonPoint {
                t,
                gap,
                ratio: mu.tail_mass_from_gap(gap, t) / gap.powf(s),
            }
        })
        .collect();
    let xs: Vec<f64> = grid.iter().map(|p| 1.0 / p.gap).collect();
    let stats: Vec<f64> = grid.iter().map(|p| p.ratio).collect();
    let c = classify(&xs, &stats);
    Ok(CarlesonReport {
        s,
        sup: stats.iter().copied().fold(0.0, f64::max),
        slope: c.slope,
        verdict: c.bounded,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etagen::{classical_cesaro, measure_moments, power_log_family};

    const N_MAX: usize = 1 << 20;

    fn grid() -> DyadicGrid {
        DyadicGrid::default()
    }

    /// Brute-force `Σ_{n=N}^{M−1} n^{1−β} f(n)²` in plain f64, large n first.
    fn brute_tail(f: impl Fn(f64) -> f64, beta: f64, n: usize, m: usize) -> f64 {
        let mut s = 0.0;
        for k in (n..m).rev() {
            let k = k as f64;
            s += k.powf(1.0 - beta) * f(k).powi(2);
        }
        s
    }

    #[test]
    fn tail_of_unit_eta_is_zero() {
        let e = EtaSeq::unit(100).unwrap();
        for beta in [-2.0, 0.0, 3.0] {
            assert_eq!(tail_sum(&e, beta, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn tail_sum_bounds() {
        let e = classical_cesaro(10);
        assert!(tail_sum(&e, 0.0, 0).is_err());
        assert!(tail_sum(&e, 0.0, 12).is_err());
        assert_eq!(tail_sum(&e, 0.0, 11).unwrap(), 0.0);
    }

    #[test]
    fn classical_tail_grows_like_log_ratio() {
        // β = 0: summand n/(n+1)² ~ 1/n, so the truncated tail ≈ log(N_max/N)
        let e = classical_cesaro(N_MAX);
        let n = 1 << 10;
        let a = tail_sum(&e, 0.0, n).unwrap();
        let want = ((N_MAX as f64) / n as f64).ln();
        assert!((a / want - 1.0).abs() < 0.10, "{a} vs {want}");
        let brute = brute_tail(|k| 1.0 / (k + 1.0), 0.0, n, N_MAX + 1);
        assert!((a - brute).abs() < 1e-12 * a);
    }

    #[test]
    fn geometric_tail_ratio() {
        let b = 0.9f64;
        let e = measure_moments(&MeasureSpec::point_mass(b, 1.0), 2000).unwrap();
        let a16 = tail_sum(&e, 1.0, 16).unwrap();
        let a32 = tail_sum(&e, 1.0, 32).unwrap();
        // β = 1: plain geometric tail b^{2N}/(1−b²)
        assert!(a16 <= b.powi(32) / (1.0 - b * b) * (1.0 + 1e-12));
        assert!((a32 / a16 / b.powi(32) - 1.0).abs() < 0.05);
    }

    #[test]
    fn power_two_tail_at_beta_zero() {
        // η = (n+1)^{-2}, β = 0: Σ_{n≥N} n (n+1)^{-4} ≈ N^{-2}/2
        let e = power_log_family(2.0, 0.0, N_MAX).unwrap();
        for k in [8, 10, 12] {
            let n = 1usize << k;
            let a = tail_sum(&e, 0.0, n).unwrap();
            let nf = n as f64;
            assert!((a * nf * nf * 2.0 - 1.0).abs() < 0.01, "k={k}");
        }
    }

    #[test]
    fn extrapolated_tail_matches_long_sum() {
        // stored sequence of 2^12 entries, true tail summed out to 2^22 plus
        // the closed-form remainder 1/M beyond it
        type Case = (
            EtaSeq,
            f64,
            Box<dyn Fn(f64) -> f64>,
            Box<dyn Fn(f64) -> f64>,
        );
        let cases: Vec<Case> = vec![
            (
                classical_cesaro(4095),
                1.0,
                Box::new(|k: f64| 1.0 / (k + 1.0)),
                Box::new(|m: f64| 1.0 / m),
            ),
            (
                power_log_family(1.0, 1.0, 4095).unwrap(),
                0.0,
                Box::new(|k: f64| 1.0 / ((k + 1.0) * (k + 2.0).ln())),
                Box::new(|m: f64| 1.0 / m.ln()),
            ),
        ];
        let far = 1usize << 22;
        for (eta, beta, f, rem) in cases {
            let t = tail_beyond(&eta, beta);
            let long = brute_tail(&f, beta, 4096, far) + rem(far as f64);
            assert!(
                ((t.estimate - long) / long).abs() < 1e-4,
                "{} vs {long}",
                t.estimate
            );
            assert!(t.majorant < 1e-3 * long);
        }
    }

    #[test]
    fn extrapolated_tail_of_moments() {
        let mu = MeasureSpec::density(0.5, 2.0);
        let eta = measure_moments(&mu, 999).unwrap();
        let long = measure_moments(&mu, 400_000).unwrap();
        let beta = 0.5;
        // past 4·10^5 the summand is ≈ 4Γ(1.5)² n^{-2.5}
        let k = 4.0 * std::f64::consts::PI / 4.0;
        let m = 400_001f64;
        let rem = k * m.powf(-1.5) / 1.5;
        let want = tail_sum(&long, beta, 1000).unwrap() + rem;
        let got = tail_beyond(&eta, beta);
        assert!(((got.estimate - want) / want).abs() < 1e-6);
    }

    #[test]
    fn divergent_tails_are_infinite() {
        let t = tail_beyond(&classical_cesaro(100), 0.0);
        assert!(t.estimate.is_infinite());
        let t = tail_beyond(&power_log_family(1.0, 0.5, 100).unwrap(), 0.0);
        assert!(t.estimate.is_infinite());
        let t = tail_beyond(&EtaSeq::from_real(&[1.0; 10]).unwrap(), 0.0);
        assert_eq!(t.estimate, 0.0);
    }

    #[test]
    fn classical_dirichlet_fails() {
        let r = criterion(&classical_cesaro(N_MAX), 0.0, 0.0, &grid()).unwrap();
        assert_eq!(r.regime, Regime::AlphaZero);
        assert_eq!(r.verdict_bounded, Verdict::Fails);
        assert_eq!(r.verdict_compact, Verdict::Fails);
    }

    #[test]
    fn classical_hardy_bounded_not_compact() {
        let r = criterion(&classical_cesaro(N_MAX), 1.0, 1.0, &grid()).unwrap();
        assert_eq!(r.verdict_bounded, Verdict::Holds);
        assert_eq!(r.verdict_compact, Verdict::Fails);
        // A_N ≈ 1/N; brute force at one grid point
        let p = r.grid[6];
        let brute = brute_tail(|k| 1.0 / (k + 1.0), 1.0, p.n, 1 << 24) + 1.0 / (1u64 << 24) as f64;
        assert!((p.a_n - brute).abs() < 1e-9 * brute);
        for p in &r.grid {
            assert!((p.s_n - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn point_mass_compact() {
        let e = measure_moments(&MeasureSpec::point_mass(0.9, 1.0), N_MAX).unwrap();
        let r = criterion(&e, 1.0, 0.0, &grid()).unwrap();
        assert_eq!(r.verdict_bounded, Verdict::Holds);
        assert_eq!(r.verdict_compact, Verdict::Holds);
    }

    #[test]
    fn negative_alpha_compactness_equals_boundedness() {
        let e = power_log_family(2.0, 0.0, N_MAX).unwrap();
        let r = criterion(&e, -1.0, -1.0, &grid()).unwrap();
        assert_eq!(r.verdict_bounded, Verdict::Holds);
        assert_eq!(r.verdict_compact, Verdict::Holds);
        let r = criterion(&classical_cesaro(N_MAX), -1.0, -1.0, &grid()).unwrap();
        assert_eq!(r.verdict_bounded, Verdict::Fails);
        assert_eq!(r.verdict_compact, Verdict::Fails);
    }

    #[test]
    fn report_invariants() {
        let e = power_log_family(1.2, 0.3, N_MAX).unwrap();
        let r = criterion(&e, 0.5, 0.2, &grid()).unwrap();
        assert!(r
            .grid
            .windows(2)
            .all(|w| w[1].n > w[0].n && w[1].a_n <= w[0].a_n));
        let max = r.grid.iter().map(|p| p.s_n).fold(f64::MIN, f64::max);
        assert_eq!(r.sup_s, max);
    }

    #[test]
    fn grid_validation() {
        let e = classical_cesaro(1 << 10);
        assert!(matches!(
            criterion(
                &e,
                1.0,
                1.0,
                &DyadicGrid {
                    min_exp: 4,
                    max_exp: 6
                }
            ),
            Err(Error::GridTooCoarse { points: 3, .. })
        ));
        assert!(matches!(
            criterion(
                &e,
                1.0,
                1.0,
                &DyadicGrid {
                    min_exp: 2,
                    max_exp: 7
                }
            ),
            Err(Error::GridTooLong { .. })
        ));
        assert!(criterion(
            &e,
            1.0,
            1.0,
            &DyadicGrid {
                min_exp: 2,
                max_exp: 6
            }
        )
        .is_ok());
    }

    #[test]
    fn unreliable_tail_is_inconclusive() {
        // a slowly convergent tail with its extension switched off: the
        // midpoint estimate is fine but suppose we only knew a crude bound
        let e = power_log_family(1.0, 0.0, N_MAX).unwrap();
        let r = criterion(&e, 1.0, 1.0, &grid()).unwrap();
        assert!(r.tail_majorant < TAIL_MAJORANT_FRACTION * r.grid.last().unwrap().a_n);
        let finite = EtaSeq::custom(e.values().to_vec()).unwrap();
        let r = criterion(&finite, 1.0, 1.0, &grid()).unwrap();
        assert_eq!(r.tail_estimate, 0.0);
    }

    #[test]
    fn partial_sum_examples() {
        let r = partial_sum_form(&classical_cesaro(N_MAX), 1.0, 1.0, &grid()).unwrap();
        // N^{-1} Σ n²/(n+1)² = 1 − 2 ln N / N + O(1/N)
        for p in &r.grid {
            let n = p.n as f64;
            assert!((p.s_n - 1.0 + 2.0 * n.ln() / n).abs() < 1.5 / n, "{p:?}");
        }
        assert_eq!(r.verdict_bounded, Verdict::Holds);
        let r = partial_sum_form(&EtaSeq::unit(N_MAX).unwrap(), 1.0, 0.0, &grid()).unwrap();
        assert!(r.grid.iter().all(|p| p.s_n == 0.0));
        assert_eq!(r.verdict_bounded, Verdict::Holds);
        assert!(partial_sum_form(&classical_cesaro(100), 0.0, 0.0, &grid()).is_err());
    }

    #[test]
    fn shortcut_examples() {
        let leb = measure_moments(&MeasureSpec::lebesgue(), N_MAX).unwrap();
        let r = decreasing_shortcut(&leb, 1.0, 1.0, &grid()).unwrap();
        for p in &r.grid {
            let n = p.n as f64;
            assert!((p.s_n - n / (n + 1.0)).abs() < 1e-15);
        }
        assert_eq!(r.verdict_bounded, Verdict::Holds);

        let pm = measure_moments(&MeasureSpec::point_mass(0.9, 1.0), N_MAX).unwrap();
        let r = decreasing_shortcut(&pm, 1.0, 0.5, &grid()).unwrap();
        assert_eq!(r.verdict_bounded, Verdict::Holds);
        assert_eq!(r.verdict_compact, Verdict::Holds);

        for eta in [
            leb.clone(),
            pm,
            EtaSeq::from_real(&vec![1.0; 1 << 17]).unwrap(),
        ] {
            let r = decreasing_shortcut(&eta, 0.5, 2.5, &grid()).unwrap();
            assert_eq!(r.verdict_bounded, Verdict::Holds);
        }
    }

    #[test]
    fn shortcut_rejects_increasing() {
        let e = EtaSeq::from_real(&[1.0, 0.5, 0.6, 0.1]).unwrap();
        let g = DyadicGrid {
            min_exp: 0,
            max_exp: 1,
        };
        assert!(matches!(
            decreasing_shortcut(&e, 1.0, 0.0, &g),
            Err(Error::GridTooCoarse { .. })
        ));
        let long = {
            let mut v = vec![1.0; 64];
            v[40] = 2.0;
            EtaSeq::from_real(&v).unwrap()
        };
        assert_eq!(
            decreasing_shortcut(
                &long,
                1.0,
                0.0,
                &DyadicGrid {
                    min_exp: 1,
                    max_exp: 5
                }
            ),
            Err(Error::NotMonotone { index: 40 })
        );
        assert!(decreasing_shortcut(&classical_cesaro(100), -1.0, 0.0, &grid()).is_err());
    }

    #[test]
    fn carleson_lebesgue_is_flat() {
        let r = carleson_statistic(&MeasureSpec::lebesgue(), 1.0, DEFAULT_CARLESON_LEVELS).unwrap();
        for p in &r.grid {
            assert!((p.ratio - 1.0).abs() < 1e-15);
        }
        assert_eq!(r.sup, 1.0);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn carleson_exponent_comparison() {
        let r = carleson_statistic(&MeasureSpec::density(0.6, 1.0), 1.5, 40).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.slope + 0.1).abs() < 1e-9);
        let r = carleson_statistic(&MeasureSpec::density(0.4, 1.0), 1.5, 40).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!((r.slope - 0.1).abs() < 1e-9);
        assert!(carleson_statistic(&MeasureSpec::lebesgue(), 0.0, 40).is_err());
    }

    #[test]
    fn carleson_atoms_drop_out() {
        let r = carleson_statistic(&MeasureSpec::point_mass(0.75, 1.0), 2.0, 20).unwrap();
        // μ([t,1)) = 1 while t ≤ 3/4
        assert_eq!(r.grid[0].ratio, 4.0);
        assert_eq!(r.grid[1].ratio, 16.0);
        assert_eq!(r.grid[2].ratio, 0.0);
        assert_eq!(r.sup, 16.0);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn classifier_edges() {
        let xs: Vec<f64> = (0..8).map(|k| (1u32 << k) as f64).collect();
        let flat = vec![1.0; 8];
        let c = classify(&xs, &flat);
        assert_eq!((c.bounded, c.compact), (Verdict::Holds, Verdict::Fails));
        let grow: Vec<f64> = xs.iter().map(|x| x.powf(0.07)).collect();
        assert_eq!(classify(&xs, &grow).bounded, Verdict::Inconclusive);
        let decay: Vec<f64> = xs.iter().map(|x| x.powf(-0.03)).collect();
        let c = classify(&xs, &decay);
        assert_eq!(
            (c.bounded, c.compact),
            (Verdict::Holds, Verdict::Inconclusive)
        );
        let mut inf = flat.clone();
        inf[3] = f64::INFINITY;
        assert_eq!(classify(&xs, &inf).bounded, Verdict::Fails);
    }

    #[test]
    fn csv_layout() {
        let r = criterion(&classical_cesaro(N_MAX), 1.0, 1.0, &grid()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("N,A_N,S_N"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "16");
        assert_eq!(first[1].parse::<f64>().unwrap(), r.grid[0].a_n);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["regime"], "alpha_pos");
        assert_eq!(json["verdict_bounded"], "holds");
        assert_eq!(json["grid"][0]["N"], 16);
    }
}

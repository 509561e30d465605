//! Composite Gauss–Legendre rules (used for tail integrals past the
//! truncation point).

use std::f64::consts::PI;

pub(crate) struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
    pub(crate) fn new(order: usize) -> Self {
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub(crate) fn integrate(&self, a: f64, b: f64, f: &impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// `segments` equal panels on `[a, b]`.
    pub(crate) fn composite(
        &self,
        a: f64,
        b: f64,
        segments: usize,
        f: &impl Fn(f64) -> f64,
    ) -> f64 {
        let h = (b - a) / segments as f64;
        let mut acc = crate::summation::NeumaierSum::new();
        for i in 0..segments {
            let lo = a + h * i as f64;
            acc.add(self.integrate(lo, lo + h, f));
        }
        acc.value()
    }
}

//! Gauss–Legendre rules and tensor-product integration over boxes.

use std::f64::consts::PI;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Composite rule: `panels` equal sub-intervals of `[a, b]`, each with this rule.
    pub fn integrate_composite(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }

    /// Nodes and weights of the tensor-product rule over `[lo, hi]`.
    pub fn box_nodes(&self, lo: &[f64], hi: &[f64]) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::with_capacity(self.len().pow(lo.len() as u32));
        let mut points = Vec::new();
        self.integrate_box(lo, hi, |p| {
            points.push(p.to_vec());
            0.0
        });
        let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        for (idx, p) in points.into_iter().enumerate() {
            let mut rem = idx;
            let mut w = 1.0;
            for h in &half {
                w *= self.weights[rem % self.len()] * h;
                rem /= self.len();
            }
            out.push((p, w));
        }
        out
    }

    /// Tensor-product rule over the box `[lo, hi]` in `lo.len()` dimensions.
    pub fn integrate_box(&self, lo: &[f64], hi: &[f64], mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        assert_eq!(lo.len(), hi.len());
        let dim = lo.len();
        let n = self.len();
        let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let volume: f64 = half.iter().product();
        let mut index = vec![0usize; dim];
        let mut point = vec![0.0; dim];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for d in 0..dim {
                point[d] = mid[d] + half[d] * self.nodes[index[d]];
                w *= self.weights[index[d]];
            }
            total += w * f(&point);
            // odometer increment
            let mut d = 0;
            loop {
                if d == dim {
                    return total * volume;
                }
                index[d] += 1;
                if index[d] < n {
                    break;
                }
                index[d] = 0;
                d += 1;
            }
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

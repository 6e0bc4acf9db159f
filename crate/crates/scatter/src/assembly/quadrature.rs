//! Gauss–Legendre rules.

use crate::error::{Result, ScatterError};

/// One-dimensional Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Nodes in increasing order.
    pub points: Vec<f64>,
    /// Positive weights summing to 2.
    pub weights: Vec<f64>,
}

/// Gauss–Legendre rule with `n_pts` nodes, exact for polynomials of degree `2 n_pts - 1`.
pub fn gauss_rule(n_pts: usize) -> Result<QuadratureRule> {
    if n_pts == 0 || n_pts > 64 {
        return Err(ScatterError::Domain(format!("Gauss rule needs 1..=64 points, got {n_pts}")));
    }
    let n = n_pts;
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Ok(QuadratureRule { points, weights })
}

impl QuadratureRule {
    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the rule is empty.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.points.iter().zip(&self.weights).map(|(x, w)| (m + h * x, w * h)).collect()
    }

    /// Tensor-product nodes and weights on the box `[lo, hi]`, first coordinate fastest.
    pub fn tensor3(&self, lo: [f64; 3], hi: [f64; 3]) -> Vec<([f64; 3], f64)> {
        let m: Vec<Vec<(f64, f64)>> = (0..3).map(|d| self.mapped(lo[d], hi[d])).collect();
        let mut out = Vec::with_capacity(self.len().pow(3));
        for &(z, wz) in &m[2] {
            for &(y, wy) in &m[1] {
                for &(x, wx) in &m[0] {
                    out.push(([x, y, z], wx * wy * wz));
                }
            }
        }
        out
    }

    /// Tensor-product nodes and weights on the rectangle `[lo, hi]`.
    pub fn tensor2(&self, lo: [f64; 2], hi: [f64; 2]) -> Vec<([f64; 2], f64)> {
        let mx = self.mapped(lo[0], hi[0]);
        let my = self.mapped(lo[1], hi[1]);
        let mut out = Vec::with_capacity(self.len().pow(2));
        for &(y, wy) in &my {
            for &(x, wx) in &mx {
                out.push(([x, y], wx * wy));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_rules() {
        let r = gauss_rule(1).unwrap();
        assert_eq!(r.points, vec![0.0]);
        assert!((r.weights[0] - 2.0).abs() < 1e-15);
        let r = gauss_rule(2).unwrap();
        assert!((r.points[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.points[0] + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn monomial_exactness() {
        for n in 1..=12 {
            let r = gauss_rule(n).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..2 * n {
                let q: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }
}

//! Trivariate NURBS: knot vectors, basis evaluation, refinement, benchmark
//! geometries, mesh topology and text serialization.

mod geometry;
mod io;
mod refine;
mod topology;

pub use geometry::{make_fluid_shell, make_sphere, make_spherical_shell};
pub use io::{read_patch, write_patch};
pub use refine::{
    elevate_degree, greville_abscissae, insert_knots, interpolate_bspline, nurbs_to_bspline,
};
pub use topology::{build_topology, build_topology_with_positions, Element, Face, Mesh, MeshTopology, PointEval, SurfacePointEval};

use crate::error::{Result, ScatterError};

/// Open knot vector with its polynomial degree.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    /// Nondecreasing knots; the first and last have multiplicity `degree + 1`.
    pub knots: Vec<f64>,
    /// Polynomial degree p̌.
    pub degree: usize,
}

impl KnotVector {
    /// Validates and wraps a knot vector.
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(ScatterError::Domain("degree must be positive".into()));
        }
        if knots.len() < 2 * (degree + 1) {
            return Err(ScatterError::Domain(format!(
                "knot vector of length {} too short for degree {degree}",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(ScatterError::Domain("knots must be finite and nondecreasing".into()));
        }
        let first = knots[0];
        let last = *knots.last().unwrap();
        if !(last > first) {
            return Err(ScatterError::Domain("knot vector has zero length".into()));
        }
        let m = knots.len();
        if knots[..=degree].iter().any(|&k| k != first) || knots[m - degree - 1..].iter().any(|&k| k != last) {
            return Err(ScatterError::Domain("knot vector must be open".into()));
        }
        for (val, mult) in unique_with_multiplicity(&knots) {
            if mult > degree + 1 {
                return Err(ScatterError::Domain(format!("knot {val} has multiplicity {mult} > p+1")));
            }
        }
        Ok(Self { knots, degree })
    }

    /// Number of basis functions `n = len - p - 1`.
    pub fn n_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// First knot.
    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    /// Last knot.
    pub fn last(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Distinct knot values with multiplicities.
    pub fn unique(&self) -> Vec<(f64, usize)> {
        unique_with_multiplicity(&self.knots)
    }

    /// Zero-based span index `s` with `ξ_s <= xi < ξ_{s+1}`, clamped so that
    /// `xi` equal to the last knot returns the last nonzero span.
    pub fn span_index(&self, xi: f64) -> Result<usize> {
        let p = self.degree;
        let n = self.n_basis();
        if !(xi >= self.first() && xi <= self.last()) {
            return Err(ScatterError::Domain(format!(
                "parameter {xi} outside [{}, {}]",
                self.first(),
                self.last()
            )));
        }
        if xi >= self.knots[n] {
            return Ok(n - 1);
        }
        let (mut lo, mut hi) = (p, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if xi < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo)
    }

    /// Nonzero spans `(s, ξ_s, ξ_{s+1})`.
    pub fn spans(&self) -> Vec<(usize, f64, f64)> {
        let p = self.degree;
        (p..self.n_basis())
            .filter(|&s| self.knots[s + 1] > self.knots[s])
            .map(|s| (s, self.knots[s], self.knots[s + 1]))
            .collect()
    }
}

fn unique_with_multiplicity(knots: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &k in knots {
        match out.last_mut() {
            Some((v, m)) if *v == k => *m += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// One-based knot span index as used in the classical formulation: the index
/// `i` with `ξ_i <= xi < ξ_{i+1}` (knots numbered from 1), returning `n` at the
/// last knot.
pub fn find_knot_span(kv: &KnotVector, xi: f64) -> Result<usize> {
    Ok(kv.span_index(xi)? + 1)
}

/// Nonzero B-spline values and first derivatives at `xi`: the zero-based span
/// index and arrays of length `p + 1` for functions `span - p ..= span`.
pub fn bspline_basis_ders(kv: &KnotVector, xi: f64) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let span = kv.span_index(xi)?;
    let (v, d) = basis_ders_at_span(kv, span, xi);
    Ok((span, v, d))
}

/// Basis values and derivatives on a given zero-based span (the point may lie
/// on the closure of the span).
pub(crate) fn basis_ders_at_span(kv: &KnotVector, span: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let p = kv.degree;
    let u = &kv.knots;
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = xi - u[span + 1 - j];
        right[j] = u[span + j] - xi;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let vals: Vec<f64> = (0..=p).map(|j| ndu[j][p]).collect();
    let mut ders = vec![0.0; p + 1];
    for r in 0..=p {
        let mut d = 0.0;
        if r >= 1 {
            d += ndu[r - 1][p - 1] / ndu[p][r - 1];
        }
        if r < p {
            d -= ndu[r][p - 1] / ndu[p][r];
        }
        ders[r] = d * p as f64;
    }
    (vals, ders)
}

/// Trivariate NURBS patch.
#[derive(Debug, Clone, PartialEq)]
pub struct NurbsPatch {
    /// Knot vectors in the ξ, η and ζ directions.
    pub kv: [KnotVector; 3],
    /// Control points, ξ-fastest ordering.
    pub cpts: Vec<[f64; 3]>,
    /// Positive weights, same ordering as the control points.
    pub weights: Vec<f64>,
}

/// Rational basis at one parametric point of a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEval {
    /// Zero-based span indices per direction.
    pub spans: [usize; 3],
    /// `R_I` for the `(p_ξ+1)(p_η+1)(p_ζ+1)` functions nonzero on the spans, ξ-fastest.
    pub values: Vec<f64>,
    /// `∂R_I/∂(ξ, η, ζ)` in the same ordering.
    pub grads_param: Vec<[f64; 3]>,
}

impl NurbsPatch {
    /// Builds a patch, checking grid dimensions and weight positivity.
    pub fn new(kv: [KnotVector; 3], cpts: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<Self> {
        let n = kv[0].n_basis() * kv[1].n_basis() * kv[2].n_basis();
        if cpts.len() != n || weights.len() != n {
            return Err(ScatterError::Domain(format!(
                "control net has {} points and {} weights, expected {n}",
                cpts.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(ScatterError::Domain("weights must be positive".into()));
        }
        Ok(Self { kv, cpts, weights })
    }

    /// Basis counts per direction.
    pub fn dims(&self) -> [usize; 3] {
        [self.kv[0].n_basis(), self.kv[1].n_basis(), self.kv[2].n_basis()]
    }

    /// Degrees per direction.
    pub fn degrees(&self) -> [usize; 3] {
        [self.kv[0].degree, self.kv[1].degree, self.kv[2].degree]
    }

    /// Flat index of control point `(i, j, l)`.
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        let d = self.dims();
        i + d[0] * (j + d[1] * l)
    }

    /// Number of local functions per element.
    pub fn n_local(&self) -> usize {
        let p = self.degrees();
        (p[0] + 1) * (p[1] + 1) * (p[2] + 1)
    }

    /// Global control-point indices of the functions nonzero on `spans`, ξ-fastest.
    pub fn local_indices(&self, spans: [usize; 3]) -> Vec<usize> {
        let p = self.degrees();
        let mut out = Vec::with_capacity(self.n_local());
        for c in 0..=p[2] {
            for b in 0..=p[1] {
                for a in 0..=p[0] {
                    out.push(self.index(spans[0] - p[0] + a, spans[1] - p[1] + b, spans[2] - p[2] + c));
                }
            }
        }
        out
    }

    /// Rational basis on given spans at `u` (which may lie on the span closure).
    pub fn basis_on_spans(&self, spans: [usize; 3], u: [f64; 3]) -> BasisEval {
        let p = self.degrees();
        let b: Vec<(Vec<f64>, Vec<f64>)> = (0..3).map(|d| basis_ders_at_span(&self.kv[d], spans[d], u[d])).collect();
        let idx = self.local_indices(spans);
        let nl = idx.len();
        let mut values = Vec::with_capacity(nl);
        let mut grads = Vec::with_capacity(nl);
        let mut w_sum = 0.0;
        let mut dw = [0.0; 3];
        let mut k = 0;
        for c in 0..=p[2] {
            for bb in 0..=p[1] {
                for a in 0..=p[0] {
                    let w = self.weights[idx[k]];
                    let n0 = b[0].0[a] * b[1].0[bb] * b[2].0[c];
                    let g = [
                        b[0].1[a] * b[1].0[bb] * b[2].0[c],
                        b[0].0[a] * b[1].1[bb] * b[2].0[c],
                        b[0].0[a] * b[1].0[bb] * b[2].1[c],
                    ];
                    values.push(n0 * w);
                    grads.push([g[0] * w, g[1] * w, g[2] * w]);
                    w_sum += n0 * w;
                    for d in 0..3 {
                        dw[d] += g[d] * w;
                    }
                    k += 1;
                }
            }
        }
        for k in 0..nl {
            let nw = values[k];
            for d in 0..3 {
                grads[k][d] = (grads[k][d] * w_sum - nw * dw[d]) / (w_sum * w_sum);
            }
            values[k] = nw / w_sum;
        }
        BasisEval { spans, values, grads_param: grads }
    }

    /// Rational basis at `u`, locating the spans.
    pub fn basis(&self, u: [f64; 3]) -> Result<BasisEval> {
        let spans = [
            self.kv[0].span_index(u[0])?,
            self.kv[1].span_index(u[1])?,
            self.kv[2].span_index(u[2])?,
        ];
        Ok(self.basis_on_spans(spans, u))
    }

    /// Physical point, `∂x/∂(ξ,η,ζ)` (rows: Cartesian component) from a basis evaluation.
    pub fn map_with_basis(&self, be: &BasisEval) -> ([f64; 3], [[f64; 3]; 3]) {
        let idx = self.local_indices(be.spans);
        let mut x = [0.0; 3];
        let mut jac = [[0.0; 3]; 3];
        for (k, &gi) in idx.iter().enumerate() {
            let cp = self.cpts[gi];
            for i in 0..3 {
                x[i] += be.values[k] * cp[i];
                for d in 0..3 {
                    jac[i][d] += be.grads_param[k][d] * cp[i];
                }
            }
        }
        (x, jac)
    }

    /// Physical point at `u`.
    pub fn eval_point(&self, u: [f64; 3]) -> Result<[f64; 3]> {
        let be = self.basis(u)?;
        Ok(self.map_with_basis(&be).0)
    }

    /// Physical point and Jacobian at `u`.
    pub fn eval_jacobian(&self, u: [f64; 3]) -> Result<([f64; 3], [[f64; 3]; 3])> {
        let be = self.basis(u)?;
        Ok(self.map_with_basis(&be))
    }

    /// Axis-aligned bounding box of the control net.
    pub fn bbox(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.cpts {
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_kv() -> KnotVector {
        KnotVector::new(vec![0.0, 0.0, 0.0, 0.1, 0.5, 0.5, 0.8, 0.9, 1.0, 1.0, 1.0], 2).unwrap()
    }

    #[test]
    fn find_knot_span_examples() {
        let kv = example_kv();
        assert_eq!(kv.n_basis(), 8);
        assert_eq!(find_knot_span(&kv, 0.09).unwrap(), 3);
        assert_eq!(find_knot_span(&kv, 0.5).unwrap(), 6);
        assert_eq!(find_knot_span(&kv, 0.9).unwrap(), 8);
        assert_eq!(find_knot_span(&kv, 1.0).unwrap(), 8);
        assert!(find_knot_span(&kv, 1.1).is_err());
    }

    #[test]
    fn linear_hat_functions() {
        let kv = KnotVector::new(vec![0.0, 0.0, 1.0, 1.0], 1).unwrap();
        let (_, v, d) = bspline_basis_ders(&kv, 0.25).unwrap();
        assert!((v[0] - 0.75).abs() < 1e-15 && (v[1] - 0.25).abs() < 1e-15);
        assert!((d[0] + 1.0).abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn basis_derivatives_match_differences() {
        let kv = example_kv();
        for &x in &[0.03, 0.2, 0.55, 0.85, 0.97] {
            let (s, _, d) = bspline_basis_ders(&kv, x).unwrap();
            let h = 1e-6;
            let (vp, _) = basis_ders_at_span(&kv, s, x + h);
            let (vm, _) = basis_ders_at_span(&kv, s, x - h);
            for r in 0..=2 {
                let fd = (vp[r] - vm[r]) / (2.0 * h);
                assert!((fd - d[r]).abs() < 1e-6 * (1.0 + d[r].abs()));
            }
        }
    }

    #[test]
    fn rejects_bad_knot_vectors() {
        assert!(KnotVector::new(vec![0.0, 0.5, 1.0, 1.0], 1).is_err());
        assert!(KnotVector::new(vec![0.0, 0.0, 0.7, 0.5, 1.0, 1.0], 1).is_err());
    }
}

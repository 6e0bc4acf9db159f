//! Surface traces on the scatterer, the Kirchhoff representation and target strength.

use crate::assembly::QuadratureRule;
use crate::error::{Result, ScatterError};
use crate::nurbs::{Element, Face, Mesh};
use crate::par;
use crate::specfun::C64;
use std::f64::consts::PI;

/// Pressure and normal derivative at one quadrature point of `Γ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Physical point.
    pub x: [f64; 3],
    /// Unit normal pointing out of the scatterer into the fluid.
    pub normal: [f64; 3],
    /// Quadrature weight times surface measure.
    pub weight: f64,
    /// Scattered pressure.
    pub p: C64,
    /// Normal derivative of the scattered pressure along `normal`.
    pub dpdn: C64,
}

/// Traces of the scattered field sampled on the scatterer surface.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SurfaceTraces {
    /// Samples in element order.
    pub points: Vec<TracePoint>,
}

/// One far-field sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FarFieldSample {
    /// Unit observation direction.
    pub direction: [f64; 3],
    /// Far-field pattern value.
    pub p0: C64,
    /// Target strength in dB.
    pub ts: f64,
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Samples `f(surface point, element, (ξ, η), n)` at the quadrature points of the
/// `ζ = 0` face of `mesh`, where `n` points into the fluid.
pub(crate) fn surface_points<F>(mesh: &Mesh, quad: &QuadratureRule, f: F) -> Result<SurfaceTraces>
where
    F: Fn(&crate::nurbs::SurfacePointEval, &Element, [f64; 2], [f64; 3]) -> Result<(C64, C64)> + Sync + Send,
{
    let els = mesh.face_elements(Face::Inner);
    let parts = par::try_map_indexed(els.len(), |i| -> Result<Vec<TracePoint>> {
        let el = els[i];
        let mut out = Vec::with_capacity(quad.len() * quad.len());
        for ([xi, eta], w) in quad.tensor2([el.lo[0], el.lo[1]], [el.hi[0], el.hi[1]]) {
            let sp = mesh.eval_surface(el, Face::Inner, xi, eta)?;
            let n = sp.normal.map(|v| -v);
            let (p, dpdn) = f(&sp, el, [xi, eta], n)?;
            out.push(TracePoint { x: sp.point.x, normal: n, weight: sp.ds * w, p, dpdn });
        }
        Ok(out)
    })?;
    Ok(SurfaceTraces { points: parts.into_iter().flatten().collect() })
}

impl SurfaceTraces {
    /// Traces from a closure `(x, n) ↦ (p, ∂p/∂n)` on the `ζ = 0` face of `mesh`,
    /// with `n` pointing into the fluid.
    pub fn from_fn<F>(mesh: &Mesh, quad: &QuadratureRule, f: F) -> Result<Self>
    where
        F: Fn([f64; 3], [f64; 3]) -> Result<(C64, C64)> + Sync + Send,
    {
        surface_points(mesh, quad, |sp, _, _, n| f(sp.point.x, n))
    }

    /// Traces of a discrete field with coefficients `coeffs` on `mesh`. The
    /// normal derivative comes from `neumann(x, n)` when given, otherwise from
    /// the discrete gradient.
    pub fn from_solution(
        mesh: &Mesh,
        coeffs: &[C64],
        quad: &QuadratureRule,
        neumann: Option<&(dyn Fn([f64; 3], [f64; 3]) -> Result<C64> + Sync)>,
    ) -> Result<Self> {
        if coeffs.len() != mesh.n_dofs() {
            return Err(ScatterError::Consistency(format!(
                "{} coefficients for {} dofs",
                coeffs.len(),
                mesh.n_dofs()
            )));
        }
        surface_points(mesh, quad, |sp, el, _, n| {
            let dofs = mesh.dofs(el);
            let mut p = C64::new(0.0, 0.0);
            let mut g = [C64::new(0.0, 0.0); 3];
            for (a, &d) in dofs.iter().enumerate() {
                let c = coeffs[d];
                p += c * sp.point.values[a];
                for i in 0..3 {
                    g[i] += c * sp.point.grads[a][i];
                }
            }
            let dpdn = match neumann {
                Some(h) => h(sp.point.x, n)?,
                None => g[0] * n[0] + g[1] * n[1] + g[2] * n[2],
            };
            Ok((p, dpdn))
        })
    }

    /// Traces multiplied by `s`.
    pub fn scaled(&self, s: C64) -> Self {
        let points = self.points.iter().map(|t| TracePoint { p: t.p * s, dpdn: t.dpdn * s, ..*t }).collect();
        Self { points }
    }

    /// Total surface measure.
    pub fn area(&self) -> f64 {
        self.points.iter().map(|t| t.weight).sum()
    }
}

/// Kirchhoff representation `p(x) = ∫ p ∂Φ/∂n − ∂p/∂n Φ dΓ` with the free-space
/// Green's function `Φ = e^{ikR}/(4πR)`, for `x` outside the scatterer.
pub fn kirchhoff_near(traces: &SurfaceTraces, k: f64, x: [f64; 3]) -> Result<C64> {
    let mut sum = C64::new(0.0, 0.0);
    for t in &traces.points {
        let d = [x[0] - t.x[0], x[1] - t.x[1], x[2] - t.x[2]];
        let r = dot(d, d).sqrt();
        if !(r > 0.0) {
            return Err(ScatterError::Domain("observation point lies on the surface".into()));
        }
        let phi = C64::new(0.0, k * r).exp() / (4.0 * PI * r);
        let dr_dn = -dot(d, t.normal) / r;
        let dphi = phi * C64::new(-1.0 / r, k) * dr_dn;
        sum += (t.p * dphi - t.dpdn * phi) * t.weight;
    }
    Ok(sum)
}

/// Far-field pattern `p₀(x̂) = (1/4π) ∫ (−ik x̂·n p − ∂p/∂n) e^{−ik x̂·y} dΓ`,
/// so that `p(r x̂) ≈ p₀(x̂) e^{ikr}/r`.
pub fn kirchhoff_far(traces: &SurfaceTraces, k: f64, xhat: [f64; 3]) -> Result<C64> {
    let n = dot(xhat, xhat).sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(ScatterError::Domain(format!("direction must be a unit vector, |x̂| = {n}")));
    }
    let mut sum = C64::new(0.0, 0.0);
    for t in &traces.points {
        let e = C64::new(0.0, -k * dot(xhat, t.x)).exp();
        let ikn = C64::new(0.0, -k * dot(xhat, t.normal));
        sum += (ikn * t.p - t.dpdn) * e * t.weight;
    }
    Ok(sum / (4.0 * PI))
}

/// Target strength `20 log₁₀(|p₀|/|P_inc|)` in dB.
pub fn target_strength(p0: C64, p_inc: C64) -> f64 {
    20.0 * (p0.norm() / p_inc.norm()).log10()
}

/// Unit vector `(cos β cos α, cos β sin α, sin β)` for angles in radians.
pub fn direction_from_angles(alpha: f64, beta: f64) -> [f64; 3] {
    [beta.cos() * alpha.cos(), beta.cos() * alpha.sin(), beta.sin()]
}

/// Far-field samples for every direction (normalized before use).
pub fn far_field_samples(traces: &SurfaceTraces, k: f64, p_inc: C64, dirs: &[[f64; 3]]) -> Result<Vec<FarFieldSample>> {
    par::try_map_indexed(dirs.len(), |i| {
        let d = dirs[i];
        let n = dot(d, d).sqrt();
        if !(n > 0.0) {
            return Err(ScatterError::Domain("zero observation direction".into()));
        }
        let u = d.map(|v| v / n);
        let p0 = kirchhoff_far(traces, k, u)?;
        Ok(FarFieldSample { direction: u, p0, ts: target_strength(p0, p_inc) })
    })
}

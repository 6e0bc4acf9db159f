//! Energy and H¹ norms of discrete fields and their errors against exact fields.

use crate::analytic::MaterialParams;
use crate::assembly::QuadratureRule;
use crate::error::{Result, ScatterError};
use crate::nurbs::Mesh;
use crate::par;
use crate::specfun::C64;

/// Exact pressure `(p, ∇p)` at a point.
pub type PressureFn<'a> = dyn Fn([f64; 3]) -> Result<(C64, [C64; 3])> + Sync + 'a;

/// Exact displacement `(u, ∂u_i/∂x_j)` at a point.
pub type DisplacementFn<'a> = dyn Fn([f64; 3]) -> Result<([C64; 3], [[C64; 3]; 3])> + Sync + 'a;

/// Squared error and reference integrals of one or more subdomains.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorIntegrals {
    /// `‖u − u_h‖²` in the energy norm.
    pub energy_error: f64,
    /// `‖u‖²` in the energy norm.
    pub energy_reference: f64,
    /// `‖u − u_h‖²` in H¹.
    pub h1_error: f64,
    /// `‖u‖²` in H¹.
    pub h1_reference: f64,
}

impl ErrorIntegrals {
    /// `‖u − u_h‖_E / ‖u‖_E` (zero when both vanish).
    pub fn energy_relative(&self) -> f64 {
        ratio(self.energy_error, self.energy_reference)
    }

    /// `‖u − u_h‖_{H¹} / ‖u‖_{H¹}` (zero when both vanish).
    pub fn h1_relative(&self) -> f64 {
        ratio(self.h1_error, self.h1_reference)
    }

    /// Sum of `self` and `w · other` (energy parts only are weighted).
    pub fn add_weighted(&self, other: &ErrorIntegrals, w: f64) -> ErrorIntegrals {
        ErrorIntegrals {
            energy_error: self.energy_error + w * other.energy_error,
            energy_reference: self.energy_reference + w * other.energy_reference,
            h1_error: self.h1_error + other.h1_error,
            h1_reference: self.h1_reference + other.h1_reference,
        }
    }
}

fn ratio(e: f64, r: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        (e / r).sqrt()
    }
}

fn check_len(mesh: &Mesh, coeffs: &[C64], per: usize) -> Result<()> {
    if coeffs.len() != per * mesh.n_dofs() {
        return Err(ScatterError::Consistency(format!(
            "{} coefficients for {} unknowns",
            coeffs.len(),
            per * mesh.n_dofs()
        )));
    }
    Ok(())
}

fn sum_parts(parts: Vec<ErrorIntegrals>) -> ErrorIntegrals {
    parts.iter().fold(ErrorIntegrals::default(), |acc, p| acc.add_weighted(p, 1.0))
}

/// Discrete pressure and gradient at a volume point.
pub fn eval_pressure(pe: &crate::nurbs::PointEval, dofs: &[usize], coeffs: &[C64]) -> (C64, [C64; 3]) {
    let mut p = C64::new(0.0, 0.0);
    let mut g = [C64::new(0.0, 0.0); 3];
    for (a, &d) in dofs.iter().enumerate() {
        let c = coeffs[d];
        p += c * pe.values[a];
        for i in 0..3 {
            g[i] += c * pe.grads[a][i];
        }
    }
    (p, g)
}

/// Discrete displacement and gradient `∂u_i/∂x_j` at a volume point.
pub fn eval_displacement(pe: &crate::nurbs::PointEval, dofs: &[usize], coeffs: &[C64]) -> ([C64; 3], [[C64; 3]; 3]) {
    let mut u = [C64::new(0.0, 0.0); 3];
    let mut g = [[C64::new(0.0, 0.0); 3]; 3];
    for (a, &d) in dofs.iter().enumerate() {
        for i in 0..3 {
            let c = coeffs[3 * d + i];
            u[i] += c * pe.values[a];
            for j in 0..3 {
                g[i][j] += c * pe.grads[a][j];
            }
        }
    }
    (u, g)
}

fn fluid_density(p: C64, g: [C64; 3], k: f64) -> (f64, f64) {
    let g2: f64 = g.iter().map(|v| v.norm_sqr()).sum();
    let p2 = p.norm_sqr();
    (g2 + k * k * p2, g2 + p2)
}

fn solid_density(u: [C64; 3], g: [[C64; 3]; 3], mat: &MaterialParams, omega: f64) -> (f64, f64) {
    let (lam, mu) = (mat.lambda(), mat.mu());
    let div = g[0][0] + g[1][1] + g[2][2];
    let mut eps2 = 0.0;
    let mut g2 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            eps2 += (0.5 * (g[i][j] + g[j][i])).norm_sqr();
            g2 += g[i][j].norm_sqr();
        }
    }
    let u2: f64 = u.iter().map(|v| v.norm_sqr()).sum();
    (lam * div.norm_sqr() + 2.0 * mu * eps2 + mat.rho_s * omega * omega * u2, g2 + u2)
}

/// Error integrals of a pressure field with energy density `|∇p|² + k²|p|²`.
/// With `exact = None` the reference is zero and the error parts hold the norms of the discrete field.
pub fn fluid_error_integrals(
    mesh: &Mesh,
    coeffs: &[C64],
    k: f64,
    quad: &QuadratureRule,
    exact: Option<&PressureFn<'_>>,
) -> Result<ErrorIntegrals> {
    check_len(mesh, coeffs, 1)?;
    let parts = par::try_map_indexed(mesh.topo.elements.len(), |e| -> Result<ErrorIntegrals> {
        let el = &mesh.topo.elements[e];
        let dofs = mesh.dofs(el);
        let mut acc = ErrorIntegrals::default();
        for (u, w) in quad.tensor3(el.lo, el.hi) {
            let pe = mesh.eval(el, u)?;
            let jw = pe.det.abs() * w;
            let (ph, gh) = eval_pressure(&pe, dofs, coeffs);
            let (pex, gex) = match exact {
                Some(f) => f(pe.x)?,
                None => (C64::new(0.0, 0.0), [C64::new(0.0, 0.0); 3]),
            };
            let de = [gex[0] - gh[0], gex[1] - gh[1], gex[2] - gh[2]];
            let (ee, he) = fluid_density(pex - ph, de, k);
            let (er, hr) = fluid_density(pex, gex, k);
            acc.energy_error += ee * jw;
            acc.h1_error += he * jw;
            acc.energy_reference += er * jw;
            acc.h1_reference += hr * jw;
        }
        Ok(acc)
    })?;
    Ok(sum_parts(parts))
}

/// Error integrals of a displacement field with energy density
/// `λ|div u|² + 2μ ε(u):ε(ū) + ρ_s ω²|u|²`.
pub fn solid_error_integrals(
    mesh: &Mesh,
    coeffs: &[C64],
    mat: &MaterialParams,
    omega: f64,
    quad: &QuadratureRule,
    exact: Option<&DisplacementFn<'_>>,
) -> Result<ErrorIntegrals> {
    check_len(mesh, coeffs, 3)?;
    let zero = C64::new(0.0, 0.0);
    let parts = par::try_map_indexed(mesh.topo.elements.len(), |e| -> Result<ErrorIntegrals> {
        let el = &mesh.topo.elements[e];
        let dofs = mesh.dofs(el);
        let mut acc = ErrorIntegrals::default();
        for (u, w) in quad.tensor3(el.lo, el.hi) {
            let pe = mesh.eval(el, u)?;
            let jw = pe.det.abs() * w;
            let (uh, gh) = eval_displacement(&pe, dofs, coeffs);
            let (ux, gx) = match exact {
                Some(f) => f(pe.x)?,
                None => ([zero; 3], [[zero; 3]; 3]),
            };
            let du = [ux[0] - uh[0], ux[1] - uh[1], ux[2] - uh[2]];
            let mut dg = [[zero; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    dg[i][j] = gx[i][j] - gh[i][j];
                }
            }
            let (ee, he) = solid_density(du, dg, mat, omega);
            let (er, hr) = solid_density(ux, gx, mat, omega);
            acc.energy_error += ee * jw;
            acc.h1_error += he * jw;
            acc.energy_reference += er * jw;
            acc.h1_reference += hr * jw;
        }
        Ok(acc)
    })?;
    Ok(sum_parts(parts))
}

/// Fluid energy norm `(∫ |∇p|² + k²|p|²)^{1/2}` of a discrete field.
pub fn energy_norm_fluid(mesh: &Mesh, coeffs: &[C64], k: f64, quad: &QuadratureRule) -> Result<f64> {
    Ok(fluid_error_integrals(mesh, coeffs, k, quad, None)?.energy_error.sqrt())
}

/// Solid energy norm of a discrete displacement.
pub fn energy_norm_solid(mesh: &Mesh, coeffs: &[C64], mat: &MaterialParams, omega: f64, quad: &QuadratureRule) -> Result<f64> {
    Ok(solid_error_integrals(mesh, coeffs, mat, omega, quad, None)?.energy_error.sqrt())
}

/// Coupled energy norm `(‖u‖²_s + (‖p₁‖²_f + ‖p₂‖²_f)/(ρ_f ω²))^{1/2}` from per-domain norms.
pub fn energy_norm_coupled(solid: f64, fluid_outer: f64, fluid_inner: f64, mat: &MaterialParams, omega: f64) -> f64 {
    let w = 1.0 / (mat.rho_f * omega * omega);
    (solid * solid + w * (fluid_outer * fluid_outer + fluid_inner * fluid_inner)).sqrt()
}

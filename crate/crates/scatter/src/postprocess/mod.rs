//! Far-field extraction, target strength, error norms, the H¹ best
//! approximation and the SAV efficiency index.

mod farfield;
mod norms;
mod projection;

pub use farfield::{
    direction_from_angles, far_field_samples, kirchhoff_far, kirchhoff_near, target_strength, FarFieldSample,
    SurfaceTraces, TracePoint,
};
pub use norms::{
    energy_norm_coupled, energy_norm_fluid, energy_norm_solid, eval_displacement, eval_pressure, fluid_error_integrals,
    solid_error_integrals, DisplacementFn, ErrorIntegrals, PressureFn,
};
pub use projection::best_approximation;

use crate::analytic::{ElasticShell, Pulsation, RigidSphere, ShellInterior};
use crate::assembly::{Discretization, FieldSolution, ProblemKind, QuadratureRule, ScatterProblem};
use crate::error::{Result, ScatterError};
use crate::nurbs::{Element, Face, Mesh};
use crate::specfun::C64;
use std::collections::HashMap;

/// Exact solution of a benchmark problem.
pub trait ExactSolution: Sync {
    /// Scattered pressure and gradient in the exterior fluid.
    fn pressure(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])>;

    /// Far-field pattern of the scattered pressure.
    fn far_field(&self, xhat: [f64; 3]) -> Result<C64>;

    /// Solid displacement and gradient.
    fn displacement(&self, _x: [f64; 3]) -> Result<([C64; 3], [[C64; 3]; 3])> {
        Err(ScatterError::Domain("exact solution has no solid part".into()))
    }

    /// Interior fluid pressure and gradient.
    fn interior_pressure(&self, _x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        Err(ScatterError::Domain("exact solution has no interior fluid".into()))
    }
}

impl ExactSolution for RigidSphere {
    fn pressure(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        self.field(x)
    }

    fn far_field(&self, xhat: [f64; 3]) -> Result<C64> {
        RigidSphere::far_field(self, xhat)
    }
}

impl ExactSolution for ElasticShell {
    fn pressure(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        self.field(x)
    }

    fn far_field(&self, xhat: [f64; 3]) -> Result<C64> {
        ElasticShell::far_field(self, xhat)
    }

    fn displacement(&self, x: [f64; 3]) -> Result<([C64; 3], [[C64; 3]; 3])> {
        ElasticShell::displacement(self, x)
    }

    fn interior_pressure(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        self.interior_field(x)
    }
}

/// Point source scaled by an amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPulsation {
    /// Source.
    pub source: Pulsation,
    /// Amplitude.
    pub amplitude: C64,
}

impl ExactSolution for ScaledPulsation {
    fn pressure(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        let (p, g) = self.source.field(x)?;
        Ok((p * self.amplitude, g.map(|v| v * self.amplitude)))
    }

    fn far_field(&self, xhat: [f64; 3]) -> Result<C64> {
        Ok(self.source.far_field(xhat)? * self.amplitude)
    }
}

/// Exact solution of `problem` for a scatterer of outer radius `r0` (and inner radius `r1` for shells).
pub fn exact_solution(problem: &ScatterProblem, r1: f64, r0: f64) -> Result<Box<dyn ExactSolution>> {
    let ctl = problem.series;
    Ok(match problem.kind {
        ProblemKind::Shbc => Box::new(RigidSphere::new(problem.k, problem.p_inc, r0, problem.dir, ctl)?),
        ProblemKind::Ssbc | ProblemKind::Nnbc => {
            let interior = if problem.kind == ProblemKind::Ssbc { ShellInterior::Vacuum } else { ShellInterior::Fluid };
            Box::new(ElasticShell::new(problem.k, problem.p_inc, r1, r0, problem.mat, interior, problem.dir, ctl)?)
        }
        ProblemKind::Manufactured { source } => Box::new(ScaledPulsation {
            source: Pulsation { k: problem.k, y: source },
            amplitude: problem.p_inc,
        }),
    })
}

/// Surface traces of the computed scattered field on `Γ₁`. Sound-hard and
/// manufactured problems use the prescribed Neumann datum. Coupled problems use
/// the kinematic interface condition `∂p/∂n = ρ_f ω² u·n − ∂p_inc/∂n` with the
/// discrete displacement.
pub fn solution_traces(
    problem: &ScatterProblem,
    disc: &Discretization,
    sol: &FieldSolution,
    quad: &QuadratureRule,
) -> Result<SurfaceTraces> {
    match problem.kind {
        ProblemKind::Shbc => {
            let g = |x: [f64; 3], n: [f64; 3]| -> Result<C64> {
                let (_, gi) = problem.incident(x)?;
                Ok(-(gi[0] * n[0] + gi[1] * n[1] + gi[2] * n[2]))
            };
            SurfaceTraces::from_solution(&disc.fluid, sol.fluid(), quad, Some(&g))
        }
        ProblemKind::Manufactured { source } => {
            let src = Pulsation { k: problem.k, y: source };
            let g = |x: [f64; 3], n: [f64; 3]| -> Result<C64> {
                let (_, gs) = src.field(x)?;
                Ok((gs[0] * n[0] + gs[1] * n[1] + gs[2] * n[2]) * problem.p_inc)
            };
            SurfaceTraces::from_solution(&disc.fluid, sol.fluid(), quad, Some(&g))
        }
        ProblemKind::Ssbc | ProblemKind::Nnbc => {
            let solid = disc.solid.as_ref().ok_or_else(|| ScatterError::Config("missing solid mesh".into()))?;
            asi_traces(problem, &disc.fluid, solid, sol, quad)
        }
    }
}

fn asi_traces(
    problem: &ScatterProblem,
    fluid: &Mesh,
    solid: &Mesh,
    sol: &FieldSolution,
    quad: &QuadratureRule,
) -> Result<SurfaceTraces> {
    let key = |e: &Element| (e.lo[0].to_bits(), e.lo[1].to_bits());
    let solid_els: HashMap<(u64, u64), &Element> =
        solid.face_elements(Face::Outer).into_iter().map(|e| (key(e), e)).collect();
    let zs = solid.face_zeta(Face::Outer);
    let coeffs = sol.fluid();
    let disp = sol.solid();
    let rho_w2 = problem.mat.rho_f * problem.omega().powi(2);
    farfield::surface_points(fluid, quad, |sp, el, [xi, eta], n| {
        let se = solid_els
            .get(&key(el))
            .ok_or_else(|| ScatterError::Incompatible("no solid surface element matches a fluid one".into()))?;
        let (p, _) = eval_pressure(&sp.point, fluid.dofs(el), coeffs);
        let pe = solid.eval(se, [xi, eta, zs])?;
        let (u, _) = eval_displacement(&pe, solid.dofs(se), disp);
        let (_, gi) = problem.incident(sp.point.x)?;
        let un = u[0] * n[0] + u[1] * n[1] + u[2] * n[2];
        let dinc = gi[0] * n[0] + gi[1] * n[1] + gi[2] * n[2];
        Ok((p, un * rho_w2 - dinc))
    })
}

/// Relative errors of a computed solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrors {
    /// Energy-norm error over `Ω_a` (plus solid and interior fluid for coupled problems,
    /// with the fluid parts weighted by `1/(ρ_f ω²)`).
    pub energy: f64,
    /// H¹ error of the pressure over `Ω_a`.
    pub h1: f64,
    /// Largest pointwise relative far-field error over the requested directions
    /// (zero when none are requested).
    pub far_field: f64,
}

/// Energy, H¹ and far-field relative errors. The volume norms use `quad`; far
/// fields are extracted from traces sampled with `surface_quad`.
pub fn relative_errors(
    problem: &ScatterProblem,
    disc: &Discretization,
    sol: &FieldSolution,
    exact: &dyn ExactSolution,
    quad: &QuadratureRule,
    surface_quad: &QuadratureRule,
    far_dirs: &[[f64; 3]],
) -> Result<RelativeErrors> {
    let pf = |x: [f64; 3]| exact.pressure(x);
    let fluid = fluid_error_integrals(&disc.fluid, sol.fluid(), problem.k, quad, Some(&pf))?;
    let mut energy = fluid;
    if problem.kind.is_asi() {
        let w = problem.fluid_scale();
        let solid_mesh = disc.solid.as_ref().ok_or_else(|| ScatterError::Config("missing solid mesh".into()))?;
        let uf = |x: [f64; 3]| exact.displacement(x);
        let solid = solid_error_integrals(solid_mesh, sol.solid(), &problem.mat, problem.omega(), quad, Some(&uf))?;
        energy = solid.add_weighted(&fluid, w);
        if let Some(inner) = &disc.interior {
            let pi = |x: [f64; 3]| exact.interior_pressure(x);
            let fi = fluid_error_integrals(inner, sol.interior(), problem.k, quad, Some(&pi))?;
            energy = energy.add_weighted(&fi, w);
        }
    }
    let mut far = 0.0f64;
    if !far_dirs.is_empty() {
        let traces = solution_traces(problem, disc, sol, surface_quad)?;
        let samples = far_field_samples(&traces, problem.k, problem.p_inc, far_dirs)?;
        for s in &samples {
            let ex = exact.far_field(s.direction)?;
            far = far.max((ex - s.p0).norm() / ex.norm());
        }
    }
    Ok(RelativeErrors { energy: energy.energy_relative(), h1: fluid.h1_relative(), far_field: far })
}

/// SAV index `(L/2) |Γ₁| / |Ω_a|`.
pub fn sav_index(l_gamma_a: f64, area_gamma1: f64, vol_omega_a: f64) -> f64 {
    0.5 * l_gamma_a * area_gamma1 / vol_omega_a
}

/// Mesh size `h`: the longest straight edge (chord between two corners that
/// differ in one parametric direction) over all elements.
pub fn mesh_size(mesh: &crate::nurbs::Mesh) -> f64 {
    let mut h = 0.0f64;
    for el in &mesh.topo.elements {
        let corners: Vec<[f64; 3]> = (0..8)
            .map(|c| {
                let u = [0, 1, 2].map(|d| if c >> d & 1 == 1 { el.hi[d] } else { el.lo[d] });
                mesh.geometry_map(el, u).0
            })
            .collect();
        for a in 0..8 {
            for b in (a + 1..8usize).filter(|b| (a ^ b).count_ones() == 1) {
                let d: f64 = (0..3).map(|i| (corners[a][i] - corners[b][i]).powi(2)).sum::<f64>().sqrt();
                h = h.max(d);
            }
        }
    }
    h
}

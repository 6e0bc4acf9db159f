//! Scattering problems, the global unknown layout and the assembled system.
//!
//! Unknowns are ordered as: fluid dofs `κ`, then the infinite-element tails for
//! radial orders `m = 2..N` (one block of `|κ_a|` each), then the solid
//! displacement (three per control variable), then the interior fluid. For
//! acoustic–structure problems the fluid blocks are scaled by `1/(ρ_f ω²)`.

use super::infinite::{assemble_angular_integrals, assemble_infinite_elements_into};
use super::operators::{
    assemble_coupling, assemble_elasticity_into, assemble_helmholtz_into, assemble_surface_load,
    assemble_traction_load, default_points, CouplingMatrix,
};
use super::quadrature::{gauss_rule, QuadratureRule};
use super::radial::IeContext;
use super::GAMMA_A_RADIUS_TOL;
use crate::analytic::{plane_wave, truncated_plane_wave, MaterialParams, Pulsation, SeriesControl};
use crate::coords::ProlateSystem;
use crate::error::{Result, ScatterError};
use crate::linalg::{finalize, solve_with, ComplexTripletMatrix, CsrMatrix, LuFactor};
use crate::nurbs::{Face, Mesh};
use crate::specfun::C64;

/// Boundary-value problem class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemKind {
    /// Rigid scatterer (sound-hard).
    Shbc,
    /// Elastic shell with an empty interior.
    Ssbc,
    /// Elastic shell with fluid on both sides.
    Nnbc,
    /// Point source at `source` inside the scatterer, imposed through its Neumann datum.
    Manufactured {
        /// Source position.
        source: [f64; 3],
    },
}

impl ProblemKind {
    /// Whether the problem couples fluid and solid.
    pub fn is_asi(&self) -> bool {
        matches!(self, ProblemKind::Ssbc | ProblemKind::Nnbc)
    }

    /// Lower-case label.
    pub fn label(&self) -> &'static str {
        match self {
            ProblemKind::Shbc => "shbc",
            ProblemKind::Ssbc => "ssbc",
            ProblemKind::Nnbc => "nnbc",
            ProblemKind::Manufactured { .. } => "manufactured",
        }
    }
}

/// Wave, materials and boundary-condition data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterProblem {
    /// Problem class.
    pub kind: ProblemKind,
    /// Wave number in the fluid.
    pub k: f64,
    /// Incident amplitude.
    pub p_inc: C64,
    /// Unit direction of incidence `d_s`.
    pub dir: [f64; 3],
    /// Materials.
    pub mat: MaterialParams,
    /// Modal series control of the exact solution. With a fixed truncation
    /// the incident wave is truncated to the same modes, so the exact solution
    /// of the discrete problem is the truncated series.
    pub series: SeriesControl,
}

impl ScatterProblem {
    /// Validates and normalizes the incidence direction.
    pub fn new(kind: ProblemKind, k: f64, p_inc: C64, dir: [f64; 3], mat: MaterialParams) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(ScatterError::Domain(format!("wave number must be positive, got {k}")));
        }
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        if !(n > 0.0) {
            return Err(ScatterError::Domain("incidence direction has zero length".into()));
        }
        Ok(Self { kind, k, p_inc, dir: [dir[0] / n, dir[1] / n, dir[2] / n], mat, series: SeriesControl::default() })
    }

    /// Angular frequency `ω = k c_f`.
    pub fn omega(&self) -> f64 {
        self.k * self.mat.c_f
    }

    /// Weight `1/(ρ_f ω²)` of the fluid forms in coupled problems, one otherwise.
    pub fn fluid_scale(&self) -> f64 {
        if self.kind.is_asi() {
            1.0 / (self.mat.rho_f * self.omega().powi(2))
        } else {
            1.0
        }
    }

    /// Replaces the series control.
    pub fn with_series(mut self, series: SeriesControl) -> Self {
        self.series = series;
        self
    }

    /// Incident wave and gradient (truncated when the series control fixes a truncation).
    pub fn incident(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        match self.series.n_trunc {
            Some(n) => truncated_plane_wave(self.k, self.p_inc, self.dir, n, x),
            None => Ok(plane_wave(self.k, self.p_inc, self.dir, x)),
        }
    }
}

/// Meshes of the exterior fluid layer `Ω_a` (scatterer on `ζ = 0`, artificial
/// boundary on `ζ = 1`), the solid shell and the interior fluid.
#[derive(Debug, Clone)]
pub struct Discretization {
    /// Exterior fluid between the scatterer and `Γ_a`.
    pub fluid: Mesh,
    /// Solid shell (outer face `ζ = 1` on the scatterer surface).
    pub solid: Option<Mesh>,
    /// Interior fluid ball (its `ζ = 1` face on the inner shell surface).
    pub interior: Option<Mesh>,
}

impl Discretization {
    fn check(&self, kind: &ProblemKind) -> Result<()> {
        let ok = match kind {
            ProblemKind::Shbc | ProblemKind::Manufactured { .. } => self.solid.is_none() && self.interior.is_none(),
            ProblemKind::Ssbc => self.solid.is_some() && self.interior.is_none(),
            ProblemKind::Nnbc => self.solid.is_some() && self.interior.is_some(),
        };
        if !ok {
            return Err(ScatterError::Config(format!("meshes do not match the {} problem", kind.label())));
        }
        Ok(())
    }
}

/// Assembly knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Gauss points per direction; `None` uses `p̌ + 1`.
    pub quad_points: Option<usize>,
    /// Relative tolerance on the prolate radius of `Γ_a`.
    pub gamma_a_tol: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { quad_points: None, gamma_a_tol: GAMMA_A_RADIUS_TOL }
    }
}

/// Positions of the unknown blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofLayout {
    /// `|κ|`.
    pub n_fluid: usize,
    /// `|κ_a|`.
    pub n_kappa_a: usize,
    /// Number of radial functions `N`.
    pub n_radial: usize,
    /// First infinite-element tail unknown.
    pub ie_offset: usize,
    /// First solid unknown.
    pub solid_offset: usize,
    /// Number of solid unknowns (three per control variable).
    pub n_solid: usize,
    /// First interior-fluid unknown.
    pub interior_offset: usize,
    /// Number of interior-fluid unknowns.
    pub n_interior: usize,
    /// Total number of unknowns.
    pub total: usize,
}

impl DofLayout {
    fn new(disc: &Discretization, n_radial: usize) -> Self {
        let n_fluid = disc.fluid.n_dofs();
        let n_kappa_a = disc.fluid.topo.kappa_a.len();
        let ie_offset = n_fluid;
        let solid_offset = ie_offset + (n_radial - 1) * n_kappa_a;
        let n_solid = disc.solid.as_ref().map_or(0, |m| 3 * m.n_dofs());
        let interior_offset = solid_offset + n_solid;
        let n_interior = disc.interior.as_ref().map_or(0, |m| m.n_dofs());
        Self {
            n_fluid,
            n_kappa_a,
            n_radial,
            ie_offset,
            solid_offset,
            n_solid,
            interior_offset,
            n_interior,
            total: interior_offset + n_interior,
        }
    }
}

/// Assembled matrix, right-hand side and layout.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    /// System matrix.
    pub matrix: ComplexTripletMatrix,
    /// Right-hand side.
    pub rhs: Vec<C64>,
    /// Unknown layout.
    pub layout: DofLayout,
    /// Global fluid dofs on `Γ_a`.
    pub kappa_a: Vec<usize>,
}

impl GlobalSystem {
    /// Compressed copy of the matrix.
    pub fn to_csr(&self) -> CsrMatrix {
        finalize(&self.matrix)
    }
}

/// Solution coefficients with their layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSolution {
    /// Unknown layout.
    pub layout: DofLayout,
    /// Global fluid dofs on `Γ_a`.
    pub kappa_a: Vec<usize>,
    /// All coefficients.
    pub coeffs: Vec<C64>,
}

impl FieldSolution {
    /// Exterior fluid coefficients (`κ`).
    pub fn fluid(&self) -> &[C64] {
        &self.coeffs[..self.layout.n_fluid]
    }

    /// Coefficient `d_{m,J}` of radial function `m` (1-based) on the boundary function with local index `local`.
    pub fn radial(&self, m: usize, local: usize) -> C64 {
        if m == 1 {
            self.coeffs[self.kappa_a[local]]
        } else {
            self.coeffs[self.layout.ie_offset + (m - 2) * self.layout.n_kappa_a + local]
        }
    }

    /// Solid coefficients, three per control variable.
    pub fn solid(&self) -> &[C64] {
        &self.coeffs[self.layout.solid_offset..self.layout.solid_offset + self.layout.n_solid]
    }

    /// Interior fluid coefficients.
    pub fn interior(&self) -> &[C64] {
        &self.coeffs[self.layout.interior_offset..self.layout.interior_offset + self.layout.n_interior]
    }
}

fn quad_for(disc: &Discretization, opts: &AssemblyOptions) -> Result<QuadratureRule> {
    gauss_rule(opts.quad_points.unwrap_or_else(|| default_points(&disc.fluid)))
}

fn add_coupling(out: &mut ComplexTripletMatrix, c: &CouplingMatrix, row_off: usize, col_off: usize) {
    for &(r, col, v) in &c.entries {
        let v = C64::new(v, 0.0);
        out.add(row_off + r, col_off + col, v);
        out.add(col_off + col, row_off + r, v);
    }
}

/// Right-hand side of the problem on the given layout.
pub fn assemble_load(
    problem: &ScatterProblem,
    disc: &Discretization,
    layout: &DofLayout,
    quad: &QuadratureRule,
) -> Result<Vec<C64>> {
    let mut f = vec![C64::new(0.0, 0.0); layout.total];
    let fluid = &disc.fluid;
    let fluid_part = match problem.kind {
        ProblemKind::Manufactured { source } => {
            let src = Pulsation { k: problem.k, y: source };
            assemble_surface_load(fluid, Face::Inner, quad, |x, nu| {
                let (_, g) = src.field(x)?;
                Ok((0..3).map(|i| g[i] * nu[i]).sum::<C64>() * problem.p_inc)
            })?
        }
        _ => {
            let s = problem.fluid_scale();
            assemble_surface_load(fluid, Face::Inner, quad, |x, nu| {
                let (_, g) = problem.incident(x)?;
                Ok(-(0..3).map(|i| g[i] * nu[i]).sum::<C64>() * s)
            })?
        }
    };
    f[..layout.n_fluid].copy_from_slice(&fluid_part);
    if let Some(solid) = &disc.solid {
        let t = assemble_traction_load(solid, Face::Outer, quad, |x, n| {
            let (p, _) = problem.incident(x)?;
            Ok([-p * n[0], -p * n[1], -p * n[2]])
        })?;
        f[layout.solid_offset..layout.solid_offset + layout.n_solid].copy_from_slice(&t);
    }
    Ok(f)
}

/// Assembles the global system with default options.
pub fn assemble_system(problem: &ScatterProblem, disc: &Discretization, ie: &IeContext) -> Result<GlobalSystem> {
    assemble_system_with(problem, disc, ie, &AssemblyOptions::default())
}

/// Assembles `A_a + A_ie` (plus solid, coupling and interior blocks for coupled problems) and the load.
pub fn assemble_system_with(
    problem: &ScatterProblem,
    disc: &Discretization,
    ie: &IeContext,
    opts: &AssemblyOptions,
) -> Result<GlobalSystem> {
    disc.check(&problem.kind)?;
    if (ie.k - problem.k).abs() > 1e-14 * problem.k {
        return Err(ScatterError::Consistency(format!("IE wave number {} differs from the problem's {}", ie.k, problem.k)));
    }
    let quad = quad_for(disc, opts)?;
    let layout = DofLayout::new(disc, ie.n);
    let scale = problem.fluid_scale();
    let mut a = ComplexTripletMatrix::new(layout.total);
    assemble_helmholtz_into(&mut a, &disc.fluid, problem.k, &quad, 0, scale)?;
    let sys = ProlateSystem::new(ie.upsilon)?;
    let ang = assemble_angular_integrals(&disc.fluid, &sys, ie.r_a, &quad, opts.gamma_a_tol)?;
    let rad = ie.radial_table()?;
    assemble_infinite_elements_into(&mut a, &ang, ie, &rad, layout.ie_offset, scale)?;
    if let Some(solid) = &disc.solid {
        assemble_elasticity_into(&mut a, solid, &problem.mat, problem.omega(), &quad, layout.solid_offset)?;
        let c = assemble_coupling(&disc.fluid, Face::Inner, solid, Face::Outer, &quad)?;
        add_coupling(&mut a, &c, 0, layout.solid_offset);
    }
    if let (Some(solid), Some(inner)) = (&disc.solid, &disc.interior) {
        assemble_helmholtz_into(&mut a, inner, problem.k, &quad, layout.interior_offset, scale)?;
        let c = assemble_coupling(inner, Face::Outer, solid, Face::Inner, &quad)?;
        add_coupling(&mut a, &c, layout.interior_offset, layout.solid_offset);
    }
    a.compact();
    let rhs = assemble_load(problem, disc, &layout, &quad)?;
    Ok(GlobalSystem { matrix: a, rhs, layout, kappa_a: ang.kappa_a })
}

/// Equilibrates symmetrically, factorizes and solves the system (consuming it
/// to release the triplets early).
pub fn solve_system(sys: GlobalSystem) -> Result<FieldSolution> {
    let GlobalSystem { matrix, rhs, layout, kappa_a } = sys;
    let mut csr = finalize(&matrix);
    drop(matrix);
    let d = csr.equilibration();
    csr.scale_symmetric(&d);
    let rhs: Vec<C64> = rhs.iter().zip(&d).map(|(b, s)| b * s).collect();
    let lu = LuFactor::new(&csr)?;
    let y = solve_with(&lu, &csr, &rhs)?;
    let coeffs = y.iter().zip(&d).map(|(v, s)| v * s).collect();
    Ok(FieldSolution { layout, kappa_a, coeffs })
}

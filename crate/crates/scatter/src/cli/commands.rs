//! Benchmark pipeline and the `converge`, `sweep` and `farfield` commands.

use super::config::RunConfig;
use crate::assembly::{
    assemble_system_with, benchmark_mesh, gauss_rule, refine_base_patch, solve_system, AssemblyOptions, Discretization,
    FieldSolution, IeContext, MeshFamily, ProblemKind, QuadratureRule, ScatterProblem,
};
use crate::error::Result;
use crate::nurbs::{make_fluid_shell, make_sphere, make_spherical_shell};
use crate::postprocess::{
    direction_from_angles, exact_solution, kirchhoff_far, mesh_size, relative_errors, solution_traces,
    target_strength, ExactSolution, RelativeErrors, SurfaceTraces,
};
use crate::specfun::C64;
use std::time::Instant;

/// Γ_a radius tolerance for meshes whose geometry interpolates the sphere.
const FEM_ISO_GAMMA_A_TOL: f64 = 1e-3;

/// Assembled and solved benchmark case.
pub struct SolvedCase {
    /// Problem data.
    pub problem: ScatterProblem,
    /// Meshes.
    pub disc: Discretization,
    /// Infinite-element configuration.
    pub ie: IeContext,
    /// Discrete solution.
    pub solution: FieldSolution,
    /// Analytic reference.
    pub exact: Box<dyn ExactSolution>,
    /// Volume quadrature rule.
    pub quad: QuadratureRule,
    /// Surface rule for Kirchhoff traces (one point more than `quad`).
    pub surface_quad: QuadratureRule,
    /// Mesh label.
    pub label: String,
    /// Number of fluid elements.
    pub n_el: usize,
    /// Number of unknowns.
    pub n_dof: usize,
    /// Longest element edge of the fluid mesh.
    pub h_max: f64,
    /// Mesh generation and assembly time in seconds.
    pub t_sys: f64,
    /// Solve time in seconds.
    pub t_sol: f64,
}

impl SolvedCase {
    /// Relative energy, H¹ and far-field errors (far field over `dirs`).
    pub fn errors(&self, dirs: &[[f64; 3]]) -> Result<RelativeErrors> {
        relative_errors(&self.problem, &self.disc, &self.solution, self.exact.as_ref(), &self.quad, &self.surface_quad, dirs)
    }

    /// Kirchhoff traces of the computed field.
    pub fn traces(&self) -> Result<SurfaceTraces> {
        solution_traces(&self.problem, &self.disc, &self.solution, &self.surface_quad)
    }
}

/// Builds the problem data of `cfg` at wave number `k`.
pub fn build_problem(cfg: &RunConfig, k: f64) -> Result<ScatterProblem> {
    Ok(ScatterProblem::new(cfg.kind, k, cfg.p_inc, cfg.incident_direction(), cfg.material)?.with_series(cfg.series))
}

/// Builds the meshes of `cfg` at refinement `level`.
pub fn build_discretization(cfg: &RunConfig, level: usize) -> Result<Discretization> {
    let spec = cfg.mesh_spec(level);
    let fluid = benchmark_mesh(&make_fluid_shell(cfg.r0, cfg.r_a)?, &spec)?;
    let solid = if cfg.kind.is_asi() {
        let shell = make_spherical_shell(cfg.inner_radius(), cfg.r0)?;
        Some(refine_base_patch(&shell, &spec, spec.radial_elements())?)
    } else {
        None
    };
    let interior = if cfg.kind == ProblemKind::Nnbc {
        Some(benchmark_mesh(&make_sphere(cfg.inner_radius())?, &spec)?)
    } else {
        None
    };
    Ok(Discretization { fluid, solid, interior })
}

/// Meshes, assembles and solves `cfg` at `level` and wave number `k`.
pub fn solve_case(cfg: &RunConfig, level: usize, k: f64) -> Result<SolvedCase> {
    let problem = build_problem(cfg, k)?;
    let start = Instant::now();
    let disc = build_discretization(cfg, level)?;
    let ie = IeContext::new(cfg.formulation, cfg.n, cfg.basis, k, cfg.r_a, 0.0, None)?;
    let mut opts = AssemblyOptions { quad_points: cfg.quad_points, ..AssemblyOptions::default() };
    if cfg.family == MeshFamily::FemIso {
        opts.gamma_a_tol = FEM_ISO_GAMMA_A_TOL;
    }
    let sys = assemble_system_with(&problem, &disc, &ie, &opts)?;
    let t_sys = start.elapsed().as_secs_f64();
    let n_dof = sys.layout.total;
    let start = Instant::now();
    let solution = solve_system(sys)?;
    let t_sol = start.elapsed().as_secs_f64();
    let exact = exact_solution(&problem, cfg.inner_radius(), cfg.r0)?;
    let points = cfg.quad_points.unwrap_or(cfg.degree + 1);
    Ok(SolvedCase {
        label: cfg.mesh_spec(level).label(),
        n_el: disc.fluid.topo.elements.len(),
        h_max: mesh_size(&disc.fluid),
        problem,
        disc,
        ie,
        solution,
        exact,
        quad: gauss_rule(points)?,
        surface_quad: gauss_rule(points + 1)?,
        n_dof,
        t_sys,
        t_sol,
    })
}

/// One row of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    /// Mesh label.
    pub mesh: String,
    /// Fluid elements.
    pub n_el: usize,
    /// Unknowns.
    pub n_dof: usize,
    /// Longest element edge.
    pub h_max: f64,
    /// Relative energy error.
    pub energy_rel_err: f64,
    /// Relative H¹ error.
    pub h1_rel_err: f64,
    /// Assembly time (seconds, zero in deterministic mode).
    pub t_sys: f64,
    /// Solve time (seconds, zero in deterministic mode).
    pub t_sol: f64,
    /// `Δlog(energy error)/Δlog(h)` against the previous row.
    pub slope: Option<f64>,
}

/// Runs every configured level at the first wave number.
pub fn cmd_converge(cfg: &RunConfig, deterministic: bool) -> Result<Vec<ConvergeRow>> {
    let k = cfg.k_list[0];
    let mut rows: Vec<ConvergeRow> = Vec::with_capacity(cfg.levels.len());
    for &level in &cfg.levels {
        let case = solve_case(cfg, level, k)?;
        let e = case.errors(&[])?;
        let slope = rows.last().map(|prev| (e.energy / prev.energy_rel_err).ln() / (case.h_max / prev.h_max).ln());
        let (t_sys, t_sol) = if deterministic { (0.0, 0.0) } else { (case.t_sys, case.t_sol) };
        rows.push(ConvergeRow {
            mesh: case.label.clone(),
            n_el: case.n_el,
            n_dof: case.n_dof,
            h_max: case.h_max,
            energy_rel_err: e.energy,
            h1_rel_err: e.h1,
            t_sys,
            t_sol,
            slope,
        });
    }
    Ok(rows)
}

/// One row of a frequency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Wave number.
    pub k: f64,
    /// `k R₀`.
    pub k_r0: f64,
    /// Computed TS in the observation direction.
    pub ts_numeric: f64,
    /// Analytic TS in the same direction.
    pub ts_analytic: f64,
    /// Relative energy error.
    pub energy_rel_err: f64,
}

/// Solves the finest configured level at every wave number; rows are sorted by `k`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let level = *cfg.levels.last().expect("validated non-empty");
    let dir = cfg.ts_direction();
    let mut rows = Vec::with_capacity(cfg.k_list.len());
    for &k in &cfg.k_list {
        let case = solve_case(cfg, level, k)?;
        let e = case.errors(&[])?;
        let p0 = kirchhoff_far(&case.traces()?, k, dir)?;
        rows.push(SweepRow {
            k,
            k_r0: k * cfg.r0,
            ts_numeric: target_strength(p0, cfg.p_inc),
            ts_analytic: target_strength(case.exact.far_field(dir)?, cfg.p_inc),
            energy_rel_err: e.energy,
        });
    }
    rows.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok(rows)
}

/// One row of a far-field pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldRow {
    /// Aspect angle `α_f` in degrees.
    pub alpha_deg: f64,
    /// `|p₀|` of the computed field.
    pub abs_p0: f64,
    /// Computed TS.
    pub ts: f64,
    /// Analytic TS.
    pub ts_analytic: f64,
    /// Pointwise relative error against the analytic far field.
    pub rel_err: f64,
}

/// Far-field pattern over the configured angle grid at the finest level and first wave number.
pub fn cmd_farfield(cfg: &RunConfig) -> Result<Vec<FarFieldRow>> {
    let level = *cfg.levels.last().expect("validated non-empty");
    let k = cfg.k_list[0];
    let case = solve_case(cfg, level, k)?;
    let traces = case.traces()?;
    let beta = cfg.farfield.beta.to_radians();
    cfg.farfield
        .alphas_deg()
        .into_iter()
        .map(|alpha_deg| {
            let dir = direction_from_angles(alpha_deg.to_radians(), beta);
            let p0 = kirchhoff_far(&traces, k, dir)?;
            let ex = case.exact.far_field(dir)?;
            Ok(FarFieldRow {
                alpha_deg,
                abs_p0: p0.norm(),
                ts: target_strength(p0, cfg.p_inc),
                ts_analytic: target_strength(ex, cfg.p_inc),
                rel_err: relative_difference(p0, ex),
            })
        })
        .collect()
}

fn relative_difference(a: C64, b: C64) -> f64 {
    if b.norm() == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / b.norm()
    }
}

/// Tolerance violations of a convergence table: energy errors must decrease
/// strictly and the finest error must not exceed `energy_max`.
pub fn check_converge(cfg: &RunConfig, rows: &[ConvergeRow]) -> Vec<String> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        if !(w[1].energy_rel_err < w[0].energy_rel_err) {
            out.push(format!("energy error does not decrease from {} to {}", w[0].mesh, w[1].mesh));
        }
    }
    if let (Some(max), Some(last)) = (cfg.check.energy_max, rows.last()) {
        if !(last.energy_rel_err <= max) {
            out.push(format!("{}: energy error {:.3e} exceeds {max:e}", last.mesh, last.energy_rel_err));
        }
    }
    out
}

/// Tolerance violations of a sweep: TS against the target (or analytic value) and energy error per row.
pub fn check_sweep(cfg: &RunConfig, rows: &[SweepRow]) -> Vec<String> {
    let mut out = Vec::new();
    for r in rows {
        if let Some(tol) = cfg.check.ts_tol_db {
            let target = cfg.check.ts_target_db.unwrap_or(r.ts_analytic);
            if !((r.ts_numeric - target).abs() <= tol) {
                out.push(format!("k = {}: TS {:.4} dB deviates from {target:.4} dB by more than {tol} dB", r.k, r.ts_numeric));
            }
        }
        if let Some(max) = cfg.check.energy_max {
            if !(r.energy_rel_err <= max) {
                out.push(format!("k = {}: energy error {:.3e} exceeds {max:e}", r.k, r.energy_rel_err));
            }
        }
    }
    out
}

/// Tolerance violations of a far-field pattern.
pub fn check_farfield(cfg: &RunConfig, rows: &[FarFieldRow]) -> Vec<String> {
    let mut out = Vec::new();
    for r in rows {
        if let Some(max) = cfg.check.far_rel_max {
            if !(r.rel_err <= max) {
                out.push(format!("alpha = {}: far-field error {:.3e} exceeds {max:e}", r.alpha_deg, r.rel_err));
            }
        }
        if let Some(tol) = cfg.check.ts_tol_db {
            let target = cfg.check.ts_target_db.unwrap_or(r.ts_analytic);
            if !((r.ts - target).abs() <= tol) {
                out.push(format!("alpha = {}: TS {:.4} dB deviates from {target:.4} dB", r.alpha_deg, r.ts));
            }
        }
    }
    out
}


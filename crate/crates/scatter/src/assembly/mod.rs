//! Element-loop assembly of the discrete operators: interior Helmholtz, solid
//! elasticity, fluid–solid coupling, incident-wave loads and the infinite
//! element closures, plus the global system layout.
//!
//! Element blocks are computed in parallel batches and merged into the triplet
//! matrix in element order, so the assembled matrix does not depend on thread
//! scheduling.

mod infinite;
mod mesh;
mod operators;
mod quadrature;
mod radial;
mod system;

pub use infinite::{
    assemble_angular_integrals, assemble_infinite_elements, assemble_infinite_elements_into, ie_coefficients,
    AngularIntegrals, GAMMA_A_RADIUS_TOL,
};
pub use mesh::{benchmark_mesh, refine_base_patch, MeshFamily, MeshSpec};
pub use operators::{
    assemble_coupling, assemble_elasticity, assemble_elasticity_into, assemble_helmholtz, assemble_helmholtz_into,
    assemble_surface_load, assemble_traction_load, default_points, CouplingMatrix,
};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use radial::{radial_coefficients, Formulation, IeContext, RadialBasis, LAGRANGE_COND_LIMIT, MAX_RADIAL_ORDER};
pub use system::{
    assemble_load, assemble_system, assemble_system_with, solve_system, AssemblyOptions, Discretization, DofLayout,
    FieldSolution, GlobalSystem, ProblemKind, ScatterProblem,
};

use crate::error::Result;
use crate::linalg::ComplexTripletMatrix;
use crate::par;
use crate::specfun::C64;

/// Elements per parallel batch.
const BATCH: usize = 256;

/// Computes `(rows, cols, row-major block)` for every item in parallel batches and
/// adds the blocks to `out` in item order.
pub(crate) fn assemble_blocks<F>(n_items: usize, out: &mut ComplexTripletMatrix, f: F) -> Result<()>
where
    F: Fn(usize) -> Result<(Vec<usize>, Vec<usize>, Vec<C64>)> + Sync + Send,
{
    let mut start = 0;
    while start < n_items {
        let end = (start + BATCH).min(n_items);
        let blocks = par::try_map_indexed(end - start, |i| f(start + i))?;
        for (r, c, v) in blocks {
            out.add_block(&r, &c, &v);
        }
        start = end;
    }
    Ok(())
}

//! H¹ best approximation of an exact field in the discrete fluid space.

use super::norms::PressureFn;
use crate::assembly::QuadratureRule;
use crate::error::Result;
use crate::linalg::spd_solve;
use crate::nurbs::Mesh;
use crate::par;
use crate::specfun::C64;

type ElementPart = (Vec<(usize, usize, f64)>, Vec<(usize, C64)>);

/// Coefficients `c` with `(Σ c_J R_J, R_I)_{H¹} = (p, R_I)_{H¹}` for every basis function `R_I`.
pub fn best_approximation(mesh: &Mesh, quad: &QuadratureRule, exact: &PressureFn<'_>) -> Result<Vec<C64>> {
    let parts = par::try_map_indexed(mesh.topo.elements.len(), |e| -> Result<ElementPart> {
        let el = &mesh.topo.elements[e];
        let dofs = mesh.dofs(el);
        let n = dofs.len();
        let mut g = vec![0.0f64; n * n];
        let mut f = vec![C64::new(0.0, 0.0); n];
        for (u, w) in quad.tensor3(el.lo, el.hi) {
            let pe = mesh.eval(el, u)?;
            let jw = pe.det.abs() * w;
            let (p, gp) = exact(pe.x)?;
            for a in 0..n {
                let ga = pe.grads[a];
                let ra = pe.values[a];
                f[a] += (gp[0] * ga[0] + gp[1] * ga[1] + gp[2] * ga[2] + p * ra) * jw;
                for b in 0..n {
                    let gb = pe.grads[b];
                    g[a * n + b] += (ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2] + ra * pe.values[b]) * jw;
                }
            }
        }
        let mut trip = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                trip.push((dofs[a], dofs[b], g[a * n + b]));
            }
        }
        Ok((trip, dofs.iter().copied().zip(f).collect()))
    })?;
    let mut entries = Vec::new();
    let mut rhs = vec![C64::new(0.0, 0.0); mesh.n_dofs()];
    for (t, f) in parts {
        entries.extend(t);
        for (d, v) in f {
            rhs[d] += v;
        }
    }
    spd_solve(mesh.n_dofs(), &entries, &rhs)
}

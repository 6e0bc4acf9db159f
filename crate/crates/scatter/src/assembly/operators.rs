//! Volume operators, fluid–solid coupling and surface loads.

use super::quadrature::QuadratureRule;
use super::assemble_blocks;
use crate::analytic::MaterialParams;
use crate::error::{Result, ScatterError};
use crate::linalg::ComplexTripletMatrix;
use crate::nurbs::{Element, Face, Mesh};
use crate::par;
use crate::specfun::C64;
use std::collections::HashMap;

/// Number of Gauss points per direction used by default for a mesh: `p̌ + 1`.
pub fn default_points(mesh: &Mesh) -> usize {
    mesh.field.degrees().into_iter().max().unwrap_or(1) + 1
}

/// Adds `scale · B_a` for `B_a(q, p) = ∫ ∇q·∇p − k² q p` into `out` with dof offset `offset`.
pub fn assemble_helmholtz_into(
    out: &mut ComplexTripletMatrix,
    mesh: &Mesh,
    k: f64,
    quad: &QuadratureRule,
    offset: usize,
    scale: f64,
) -> Result<()> {
    let k2 = k * k;
    assemble_blocks(mesh.topo.elements.len(), out, |e| {
        let el = &mesh.topo.elements[e];
        let dofs: Vec<usize> = mesh.dofs(el).iter().map(|d| d + offset).collect();
        let n = dofs.len();
        let mut ke = vec![0.0f64; n * n];
        for (u, w) in quad.tensor3(el.lo, el.hi) {
            let pe = mesh.eval(el, u)?;
            let jw = pe.det.abs() * w * scale;
            for a in 0..n {
                let ga = pe.grads[a];
                let ra = pe.values[a];
                for b in 0..n {
                    let gb = pe.grads[b];
                    ke[a * n + b] += (ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2] - k2 * ra * pe.values[b]) * jw;
                }
            }
        }
        Ok((dofs.clone(), dofs, ke.into_iter().map(|v| C64::new(v, 0.0)).collect()))
    })
}

/// Interior Helmholtz matrix `B_a` on the mesh dofs.
pub fn assemble_helmholtz(mesh: &Mesh, k: f64, quad: &QuadratureRule) -> Result<ComplexTripletMatrix> {
    let mut out = ComplexTripletMatrix::new(mesh.n_dofs());
    assemble_helmholtz_into(&mut out, mesh, k, quad, 0, 1.0)?;
    Ok(out)
}

/// Adds `∫ v_{i,j} σ_ij − ρ_s ω² u_i v_i` into `out`. Solid dof `3 J + i` holds
/// component `i` of control variable `J`, shifted by `offset`.
pub fn assemble_elasticity_into(
    out: &mut ComplexTripletMatrix,
    mesh: &Mesh,
    mat: &MaterialParams,
    omega: f64,
    quad: &QuadratureRule,
    offset: usize,
) -> Result<()> {
    let (lam, mu) = (mat.lambda(), mat.mu());
    let mass = mat.rho_s * omega * omega;
    assemble_blocks(mesh.topo.elements.len(), out, |e| {
        let el = &mesh.topo.elements[e];
        let base = mesh.dofs(el);
        let n = base.len();
        let dofs: Vec<usize> = base.iter().flat_map(|&d| (0..3).map(move |i| offset + 3 * d + i)).collect();
        let m = 3 * n;
        let mut ke = vec![0.0f64; m * m];
        for (u, w) in quad.tensor3(el.lo, el.hi) {
            let pe = mesh.eval(el, u)?;
            let jw = pe.det.abs() * w;
            for a in 0..n {
                let ga = pe.grads[a];
                for b in 0..n {
                    let gb = pe.grads[b];
                    let dot = ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2];
                    let rr = pe.values[a] * pe.values[b];
                    for i in 0..3 {
                        for j in 0..3 {
                            let mut v = lam * ga[i] * gb[j] + mu * ga[j] * gb[i];
                            if i == j {
                                v += mu * dot - mass * rr;
                            }
                            ke[(3 * a + i) * m + 3 * b + j] += v * jw;
                        }
                    }
                }
            }
        }
        Ok((dofs.clone(), dofs, ke.into_iter().map(|v| C64::new(v, 0.0)).collect()))
    })
}

/// Solid matrix on `3 n_dofs` unknowns.
pub fn assemble_elasticity(mesh: &Mesh, mat: &MaterialParams, omega: f64, quad: &QuadratureRule) -> Result<ComplexTripletMatrix> {
    let mut out = ComplexTripletMatrix::new(3 * mesh.n_dofs());
    assemble_elasticity_into(&mut out, mesh, mat, omega, quad, 0)?;
    Ok(out)
}

/// Real rectangular block `C_{I,(3J+i)} = ∫_Γ R^f_I R^s_J n_i dΓ` with `n` out of the solid.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    /// Number of fluid dofs.
    pub rows: usize,
    /// Number of solid unknowns (three per control variable).
    pub cols: usize,
    /// Summed entries `(row, col, value)` sorted by row then column.
    pub entries: Vec<(usize, usize, f64)>,
}

impl CouplingMatrix {
    /// Transposed block.
    pub fn transpose(&self) -> CouplingMatrix {
        let mut entries: Vec<(usize, usize, f64)> = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        CouplingMatrix { rows: self.cols, cols: self.rows, entries }
    }
}

fn face_key(el: &Element) -> (u64, u64) {
    (el.lo[0].to_bits(), el.lo[1].to_bits())
}

fn check_matching_surfaces(a: &Mesh, b: &Mesh) -> Result<()> {
    for d in 0..2 {
        if a.field.kv[d] != b.field.kv[d] {
            return Err(ScatterError::Incompatible(format!(
                "surface knot vectors differ in direction {d} (degrees {} and {})",
                a.field.kv[d].degree, b.field.kv[d].degree
            )));
        }
    }
    Ok(())
}

/// Local positions of the functions that do not vanish on a ζ face.
pub(crate) fn face_local_positions(mesh: &Mesh, face: Face) -> Vec<usize> {
    let p = mesh.field.degrees();
    let l = match face {
        Face::Inner => 0,
        Face::Outer => p[2],
    };
    let per = (p[0] + 1) * (p[1] + 1);
    (0..per).map(|k| k + per * l).collect()
}

/// Coupling between the `fluid_face` of `fluid` and the `solid_face` of `solid`,
/// which must share their surface parametrization.
pub fn assemble_coupling(
    fluid: &Mesh,
    fluid_face: Face,
    solid: &Mesh,
    solid_face: Face,
    quad: &QuadratureRule,
) -> Result<CouplingMatrix> {
    check_matching_surfaces(fluid, solid)?;
    let fluid_els: HashMap<(u64, u64), &Element> =
        fluid.face_elements(fluid_face).into_iter().map(|e| (face_key(e), e)).collect();
    let solid_els = solid.face_elements(solid_face);
    if solid_els.len() != fluid_els.len() {
        return Err(ScatterError::Incompatible(format!(
            "{} fluid surface elements vs {} solid surface elements",
            fluid_els.len(),
            solid_els.len()
        )));
    }
    let fpos = face_local_positions(fluid, fluid_face);
    let spos = face_local_positions(solid, solid_face);
    let zf = fluid.face_zeta(fluid_face);
    let blocks = par::try_map_indexed(solid_els.len(), |i| -> Result<Vec<(usize, usize, f64)>> {
        let se = solid_els[i];
        let fe = fluid_els
            .get(&face_key(se))
            .ok_or_else(|| ScatterError::Incompatible("no fluid surface element matches a solid one".into()))?;
        let fd = fluid.dofs(fe);
        let sd = solid.dofs(se);
        let mut acc = vec![0.0f64; fpos.len() * spos.len() * 3];
        for ([xi, eta], w) in quad.tensor2([se.lo[0], se.lo[1]], [se.hi[0], se.hi[1]]) {
            let sp = solid.eval_surface(se, solid_face, xi, eta)?;
            let fb = fluid.field_basis(fe, [xi, eta, zf]);
            let jw = sp.ds * w;
            for (a, &fa) in fpos.iter().enumerate() {
                let rf = fb.values[fa];
                for (b, &sb) in spos.iter().enumerate() {
                    let rs = sp.point.values[sb];
                    for c in 0..3 {
                        acc[(a * spos.len() + b) * 3 + c] += rf * rs * sp.normal[c] * jw;
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(acc.len());
        for (a, &fa) in fpos.iter().enumerate() {
            for (b, &sb) in spos.iter().enumerate() {
                for c in 0..3 {
                    out.push((fd[fa], 3 * sd[sb] + c, acc[(a * spos.len() + b) * 3 + c]));
                }
            }
        }
        Ok(out)
    })?;
    let mut map: HashMap<(usize, usize), f64> = HashMap::new();
    for b in blocks {
        for (r, c, v) in b {
            *map.entry((r, c)).or_insert(0.0) += v;
        }
    }
    let mut entries: Vec<(usize, usize, f64)> = map.into_iter().map(|((r, c), v)| (r, c, v)).collect();
    entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(CouplingMatrix { rows: fluid.n_dofs(), cols: 3 * solid.n_dofs(), entries })
}

/// Surface load `∫_face R_I g(x, n) dΓ` with `n` the unit normal out of the patch.
pub fn assemble_surface_load<G>(mesh: &Mesh, face: Face, quad: &QuadratureRule, g: G) -> Result<Vec<C64>>
where
    G: Fn([f64; 3], [f64; 3]) -> Result<C64> + Sync + Send,
{
    let els = mesh.face_elements(face);
    let pos = face_local_positions(mesh, face);
    let parts = par::try_map_indexed(els.len(), |i| -> Result<Vec<(usize, C64)>> {
        let el = els[i];
        let dofs = mesh.dofs(el);
        let mut acc = vec![C64::new(0.0, 0.0); pos.len()];
        for ([xi, eta], w) in quad.tensor2([el.lo[0], el.lo[1]], [el.hi[0], el.hi[1]]) {
            let sp = mesh.eval_surface(el, face, xi, eta)?;
            let gv = g(sp.point.x, sp.normal)? * (sp.ds * w);
            for (a, &la) in pos.iter().enumerate() {
                acc[a] += gv * sp.point.values[la];
            }
        }
        Ok(pos.iter().zip(acc).map(|(&la, v)| (dofs[la], v)).collect())
    })?;
    let mut f = vec![C64::new(0.0, 0.0); mesh.n_dofs()];
    for part in parts {
        for (d, v) in part {
            f[d] += v;
        }
    }
    Ok(f)
}

/// Vector surface load `∫_face R_J t_i(x, n) dΓ` on the `3 n_dofs` solid unknowns.
pub fn assemble_traction_load<T>(mesh: &Mesh, face: Face, quad: &QuadratureRule, t: T) -> Result<Vec<C64>>
where
    T: Fn([f64; 3], [f64; 3]) -> Result<[C64; 3]> + Sync + Send,
{
    let els = mesh.face_elements(face);
    let pos = face_local_positions(mesh, face);
    let parts = par::try_map_indexed(els.len(), |i| -> Result<Vec<(usize, C64)>> {
        let el = els[i];
        let dofs = mesh.dofs(el);
        let mut acc = vec![C64::new(0.0, 0.0); 3 * pos.len()];
        for ([xi, eta], w) in quad.tensor2([el.lo[0], el.lo[1]], [el.hi[0], el.hi[1]]) {
            let sp = mesh.eval_surface(el, face, xi, eta)?;
            let tv = t(sp.point.x, sp.normal)?;
            let jw = sp.ds * w;
            for (a, &la) in pos.iter().enumerate() {
                for c in 0..3 {
                    acc[3 * a + c] += tv[c] * (sp.point.values[la] * jw);
                }
            }
        }
        Ok(pos
            .iter()
            .enumerate()
            .flat_map(|(a, &la)| (0..3).map(move |c| (3 * dofs[la] + c, a, c)))
            .map(|(d, a, c)| (d, acc[3 * a + c]))
            .collect())
    })?;
    let mut f = vec![C64::new(0.0, 0.0); 3 * mesh.n_dofs()];
    for part in parts {
        for (d, v) in part {
            f[d] += v;
        }
    }
    Ok(f)
}

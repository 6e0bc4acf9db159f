//! Angular integrals over the artificial boundary and the infinite-element matrices.

use super::operators::face_local_positions;
use super::quadrature::QuadratureRule;
use super::radial::IeContext;
use crate::coords::ProlateSystem;
use crate::error::{Result, ScatterError};
use crate::linalg::ComplexTripletMatrix;
use crate::nurbs::{Face, Mesh};
use crate::par;
use crate::specfun::{RadialIntegralTable, C64};
use std::collections::HashMap;

/// Default relative tolerance on the prolate radius of the artificial boundary.
pub const GAMMA_A_RADIUS_TOL: f64 = 1e-8;

/// The five angular integrals on `κ_a × κ_a`, stored sparsely.
///
/// Component order: `A⁽¹⁾ = ∫ R_I R_J sinϑ`, `A⁽²⁾ = ∫ ∂_ϑR_I ∂_ϑR_J sinϑ`,
/// `A⁽³⁾ = ∫ ∂_φR_I ∂_φR_J / sinϑ`, `A⁽⁴⁾ = ∫ ∂_φR_I ∂_φR_J cos²ϑ / sinϑ`,
/// `A⁽⁵⁾ = ∫ R_I R_J cos²ϑ sinϑ`, all over `dϑ dφ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularIntegrals {
    /// Global fluid dofs of the artificial boundary, sorted; local index = position.
    pub kappa_a: Vec<usize>,
    /// Entries `(i, j, [A1..A5])` over local indices, sorted by `(i, j)`.
    pub entries: Vec<(usize, usize, [f64; 5])>,
}

impl AngularIntegrals {
    /// Dense copy of component `c` (0-based), for tests and small problems.
    pub fn dense(&self, c: usize) -> Vec<f64> {
        let n = self.kappa_a.len();
        let mut out = vec![0.0; n * n];
        for &(i, j, a) in &self.entries {
            out[i * n + j] += a[c];
        }
        out
    }

    /// Sum of all entries of each component.
    pub fn totals(&self) -> [f64; 5] {
        let mut t = [0.0; 5];
        for (_, _, a) in &self.entries {
            for c in 0..5 {
                t[c] += a[c];
            }
        }
        t
    }
}

/// Integrates the angular integrals over the `ζ = 1` face of `mesh`, which must be a
/// surface of constant prolate radius `r_a` within `tol · r_a`.
pub fn assemble_angular_integrals(
    mesh: &Mesh,
    sys: &ProlateSystem,
    r_a: f64,
    quad: &QuadratureRule,
    tol: f64,
) -> Result<AngularIntegrals> {
    let kappa_a = mesh.topo.kappa_a.clone();
    let mut local = vec![usize::MAX; mesh.n_dofs()];
    for (i, &d) in kappa_a.iter().enumerate() {
        local[d] = i;
    }
    let els = mesh.face_elements(Face::Outer);
    let pos = face_local_positions(mesh, Face::Outer);
    let np = pos.len();
    let blocks = par::try_map_indexed(els.len(), |e| -> Result<(Vec<usize>, Vec<[f64; 5]>)> {
        let el = els[e];
        let dofs = mesh.dofs(el);
        let mut acc = vec![[0.0f64; 5]; np * np];
        for ([xi, eta], w) in quad.tensor2([el.lo[0], el.lo[1]], [el.hi[0], el.hi[1]]) {
            let sp = mesh.eval_surface(el, Face::Outer, xi, eta)?;
            let x = sp.point.x;
            let pp = sys.from_cartesian(x)?;
            if (pp.r - r_a).abs() > tol * r_a {
                return Err(ScatterError::Geometry(format!(
                    "artificial boundary is not at constant radius: r = {} vs r_a = {r_a} at {x:?}",
                    pp.r
                )));
            }
            let aj = sys.angular_param_jacobian(x, sp.t_xi, sp.t_eta)?;
            let (s, c) = pp.theta.sin_cos();
            let jw = aj.det.abs() * w;
            let vals: Vec<f64> = pos.iter().map(|&l| sp.point.values[l]).collect();
            let dang: Vec<[f64; 2]> = pos
                .iter()
                .map(|&l| {
                    let g = sp.point.grads_param[l];
                    [aj.inv_t[0][0] * g[0] + aj.inv_t[0][1] * g[1], aj.inv_t[1][0] * g[0] + aj.inv_t[1][1] * g[1]]
                })
                .collect();
            let f = [s * jw, s * jw, jw / s, c * c * jw / s, c * c * s * jw];
            if f.iter().any(|v| !v.is_finite()) {
                return Err(ScatterError::Geometry(format!("non-finite angular integrand at ϑ = {}", pp.theta)));
            }
            for a in 0..np {
                for b in 0..np {
                    let rr = vals[a] * vals[b];
                    let tt = dang[a][0] * dang[b][0];
                    let ff = dang[a][1] * dang[b][1];
                    let t = &mut acc[a * np + b];
                    t[0] += rr * f[0];
                    t[1] += tt * f[1];
                    t[2] += ff * f[2];
                    t[3] += ff * f[3];
                    t[4] += rr * f[4];
                }
            }
        }
        let ids = pos.iter().map(|&l| local[dofs[l]]).collect();
        Ok((ids, acc))
    })?;
    let mut map: HashMap<(usize, usize), [f64; 5]> = HashMap::new();
    for (ids, acc) in blocks {
        if ids.iter().any(|&i| i == usize::MAX) {
            return Err(ScatterError::Consistency("face function outside κ_a".into()));
        }
        for a in 0..np {
            for b in 0..np {
                let t = map.entry((ids[a], ids[b])).or_insert([0.0; 5]);
                for c in 0..5 {
                    t[c] += acc[a * np + b][c];
                }
            }
        }
    }
    let mut entries: Vec<(usize, usize, [f64; 5])> = map.into_iter().map(|((i, j), a)| (i, j, a)).collect();
    entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(AngularIntegrals { kappa_a, entries })
}

/// Per-pair coefficients multiplying `A⁽¹⁾..A⁽⁵⁾` in `B(R_I ψ_n, R_J φ_m)`, indexed `[n-1][m-1]`.
pub fn ie_coefficients(ie: &IeContext, rad: &RadialIntegralTable) -> Result<Vec<Vec<[C64; 5]>>> {
    let tol = 1e-12;
    if (rad.rho1() - ie.rho1()).abs() > tol * (1.0 + ie.rho1())
        || (rad.rho2() - ie.rho2()).abs() > tol * (1.0 + ie.rho2())
        || rad.conjugated() != ie.formulation.is_conjugated()
    {
        return Err(ScatterError::Consistency(format!(
            "radial table (ϱ₁ = {}, ϱ₂ = {}, conjugated = {}) does not match the IE context (ϱ₁ = {}, ϱ₂ = {}, conjugated = {})",
            rad.rho1(),
            rad.rho2(),
            rad.conjugated(),
            ie.rho1(),
            ie.rho2(),
            ie.formulation.is_conjugated()
        )));
    }
    if rad.n_max() < ie.radial_table_size() {
        return Err(ScatterError::Consistency(format!(
            "radial table holds {} indices, {} needed",
            rad.n_max(),
            ie.radial_table_size()
        )));
    }
    let (r1, r2, r3) = (ie.rho1(), ie.rho2(), ie.rho3());
    let conj = ie.formulation.is_conjugated();
    let bubnov = !ie.formulation.is_petrov();
    let i = C64::new(0.0, 1.0);
    let zero = C64::new(0.0, 0.0);
    let prefactor = if conj { C64::new(ie.r_a, 0.0) } else { ie.r_a * C64::new(0.0, -2.0 * r2).exp() };
    let n = ie.n;
    let mut out = vec![vec![[zero; 5]; n]; n];
    for nt in 1..=n {
        for mt in 1..=n {
            let a = (nt + ie.test_shift()) as f64;
            let b = mt as f64;
            let s = nt + ie.test_shift() + mt;
            let sf = s as f64;
            let b1 = |k: usize| rad.b1(k);
            let b2 = |k: usize| rad.b2(k);
            let mut t1 = zero;
            if conj {
                if a != b {
                    t1 += -i * r2 * (a - b) * b1(s - 1)?;
                }
                t1 += (a * b - r3 * r3) * b1(s)?;
                if a != b && r1 != 0.0 {
                    t1 += i * r1 * r3 * (a - b) * b1(s + 1)?;
                }
            } else {
                if !(bubnov && nt == 1 && mt == 1) {
                    t1 += -2.0 * r2 * r2 * b1(s - 2)?;
                }
                t1 += -i * r2 * sf * b1(s - 1)?;
                t1 += (a * b + r3 * r3) * b1(s)?;
                if r1 != 0.0 {
                    t1 += i * r1 * r3 * sf * b1(s + 1)?;
                }
            }
            if r1 != 0.0 {
                t1 += -r1 * r1 * a * b * b1(s + 2)?;
            }
            let t2 = b1(s)?;
            let t3 = b2(s - 1)?;
            let t4 = if r1 != 0.0 { -r1 * r1 * b2(s + 1)? } else { zero };
            let t5 = if r3 != 0.0 { r3 * r3 * b1(s)? } else { zero };
            let terms = [t1, t2, t3, t4, t5];
            for nn in 1..=n {
                let dt = ie.test_coef(nn, nt);
                if dt == zero {
                    continue;
                }
                for m in 1..=n {
                    let c = ie.trial_coef(m, mt) * dt * prefactor;
                    if c == zero {
                        continue;
                    }
                    for q in 0..5 {
                        out[nn - 1][m - 1][q] += c * terms[q];
                    }
                }
            }
        }
    }
    if bubnov {
        for nn in 1..=n {
            for m in 1..=n {
                out[nn - 1][m - 1][0] += -i * r2 * ie.r_a * ie.trial_coef(m, 1) * ie.test_coef(nn, 1);
            }
        }
    }
    Ok(out)
}

/// Global index of radial function `m` (1-based) on boundary function `local`.
pub(crate) fn ie_dof(ang: &AngularIntegrals, m: usize, local: usize, ie_offset: usize) -> usize {
    if m == 1 {
        ang.kappa_a[local]
    } else {
        ie_offset + (m - 2) * ang.kappa_a.len() + local
    }
}

/// Adds `scale` times the infinite-element matrix into `out`. Radial function
/// `m = 1` shares the fluid dofs on the boundary; `m >= 2` lives at
/// `ie_offset + (m - 2)|κ_a| + local`.
pub fn assemble_infinite_elements_into(
    out: &mut ComplexTripletMatrix,
    ang: &AngularIntegrals,
    ie: &IeContext,
    rad: &RadialIntegralTable,
    ie_offset: usize,
    scale: f64,
) -> Result<()> {
    let g = ie_coefficients(ie, rad)?;
    let n = ie.n;
    for &(i, j, a) in &ang.entries {
        for nn in 1..=n {
            let row = ie_dof(ang, nn, i, ie_offset);
            for m in 1..=n {
                let col = ie_dof(ang, m, j, ie_offset);
                let c = &g[nn - 1][m - 1];
                let v: C64 = (0..5).map(|q| c[q] * a[q]).sum::<C64>() * scale;
                if v != C64::new(0.0, 0.0) {
                    out.add(row, col, v);
                }
            }
        }
    }
    Ok(())
}

/// Infinite-element matrix on `n_fluid + (N-1)|κ_a|` unknowns.
pub fn assemble_infinite_elements(
    ang: &AngularIntegrals,
    ie: &IeContext,
    rad: &RadialIntegralTable,
    n_fluid: usize,
) -> Result<ComplexTripletMatrix> {
    let mut out = ComplexTripletMatrix::new(n_fluid + (ie.n - 1) * ang.kappa_a.len());
    assemble_infinite_elements_into(&mut out, ang, ie, rad, n_fluid, 1.0)?;
    Ok(out)
}

//! Elements, connectivity with periodic gluing, and basis evaluation on a mesh.
//!
//! A [`Mesh`] carries a geometry patch (the exact or approximate map) and a
//! field patch (the analysis basis). Both must share the same breakpoints so
//! that every element is a knot span of each. In the isoparametric case the two
//! patches are identical.

use super::{BasisEval, KnotVector, NurbsPatch};
use crate::error::{Result, ScatterError};
use std::collections::HashMap;

/// One element: a nonzero knot-span triple.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Position in the element list.
    pub index: usize,
    /// Zero-based spans in the field patch.
    pub spans: [usize; 3],
    /// Zero-based spans in the geometry patch.
    pub geom_spans: [usize; 3],
    /// Lower parametric corner.
    pub lo: [f64; 3],
    /// Upper parametric corner.
    pub hi: [f64; 3],
}

/// Connectivity and index sets of a field patch.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshTopology {
    /// Elements in ξ-fastest order.
    pub elements: Vec<Element>,
    /// Global dof indices of the local functions of each element, ξ-fastest.
    pub connectivity: Vec<Vec<usize>>,
    /// Child to parent map over raw control-point indices (parent = lowest index).
    pub glue_map: Vec<usize>,
    /// Global dof index of every raw control point.
    pub dof_of_raw: Vec<usize>,
    /// Number of global dofs `|κ|`.
    pub n_dofs: usize,
    /// All global dof indices.
    pub kappa: Vec<usize>,
    /// Sorted dofs nonzero on the `ζ = 1` face.
    pub kappa_a: Vec<usize>,
    /// Sorted dofs nonzero on the `ζ = 0` face.
    pub kappa_1: Vec<usize>,
}

/// Face of the patch in the ζ direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    /// `ζ = 0`.
    Inner,
    /// `ζ = 1` (the last knot).
    Outer,
}

/// Field basis and geometry at a volume point.
#[derive(Debug, Clone)]
pub struct PointEval {
    /// Physical point.
    pub x: [f64; 3],
    /// `∂x_i/∂u_d`.
    pub jac: [[f64; 3]; 3],
    /// `det ∂x/∂u`.
    pub det: f64,
    /// Field basis values in element-local order.
    pub values: Vec<f64>,
    /// Parametric gradients of the field basis.
    pub grads_param: Vec<[f64; 3]>,
    /// Physical gradients of the field basis.
    pub grads: Vec<[f64; 3]>,
}

/// Field basis and geometry at a point of a ζ face.
#[derive(Debug, Clone)]
pub struct SurfacePointEval {
    /// Volume evaluation at the face point.
    pub point: PointEval,
    /// `∂x/∂ξ`.
    pub t_xi: [f64; 3],
    /// `∂x/∂η`.
    pub t_eta: [f64; 3],
    /// Unit normal pointing out of the patch.
    pub normal: [f64; 3],
    /// Surface measure `|∂x/∂ξ × ∂x/∂η|`.
    pub ds: f64,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()
}

/// Merges points closer than `tol`, returning the child to parent map with the
/// lowest index as parent.
fn glue_points(pos: &[[f64; 3]], tol: f64) -> Vec<usize> {
    let cell = (tol * 4.0).max(f64::MIN_POSITIVE);
    let key = |p: [f64; 3]| -> [i64; 3] { [0, 1, 2].map(|i| (p[i] / cell).floor() as i64) };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut map = Vec::with_capacity(pos.len());
    for (i, &p) in pos.iter().enumerate() {
        let k = key(p);
        let mut parent = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &j in list {
                            if dist2(pos[j], p) <= tol * tol && parent.map_or(true, |q| j < q) {
                                parent = Some(j);
                            }
                        }
                    }
                }
            }
        }
        match parent {
            Some(j) => map.push(j),
            None => {
                grid.entry(k).or_default().push(i);
                map.push(i);
            }
        }
    }
    map
}

fn check_breakpoints(a: &KnotVector, b: &KnotVector, d: usize) -> Result<()> {
    let ua: Vec<f64> = a.unique().into_iter().map(|u| u.0).collect();
    let ub: Vec<f64> = b.unique().into_iter().map(|u| u.0).collect();
    if ua != ub {
        return Err(ScatterError::Incompatible(format!("field and geometry breakpoints differ in direction {d}")));
    }
    Ok(())
}

/// Builds the topology of an isoparametric patch, gluing coincident control
/// points when `periodic` is set.
pub fn build_topology(patch: &NurbsPatch, periodic: bool) -> Result<MeshTopology> {
    build_topology_with_positions(patch, patch, &patch.cpts, periodic)
}

/// Builds the topology of `field` over `geometry`, gluing field functions whose
/// anchor `positions` coincide within `1e-10` of the bounding-box diagonal.
pub fn build_topology_with_positions(
    field: &NurbsPatch,
    geometry: &NurbsPatch,
    positions: &[[f64; 3]],
    periodic: bool,
) -> Result<MeshTopology> {
    let dims = field.dims();
    let n_raw = dims[0] * dims[1] * dims[2];
    if positions.len() != n_raw {
        return Err(ScatterError::Domain(format!("{} anchor positions for {n_raw} functions", positions.len())));
    }
    for d in 0..3 {
        check_breakpoints(&field.kv[d], &geometry.kv[d], d)?;
    }
    let glue_map = if periodic {
        let (lo, hi) = geometry.bbox();
        let diag = dist2(lo, hi).sqrt();
        glue_points(positions, 1e-10 * diag)
    } else {
        (0..n_raw).collect()
    };
    let mut dof_of_raw = vec![usize::MAX; n_raw];
    let mut n_dofs = 0;
    for i in 0..n_raw {
        if glue_map[i] == i {
            dof_of_raw[i] = n_dofs;
            n_dofs += 1;
        }
    }
    for i in 0..n_raw {
        dof_of_raw[i] = dof_of_raw[glue_map[i]];
    }
    let spans: Vec<Vec<(usize, f64, f64)>> = (0..3).map(|d| field.kv[d].spans()).collect();
    let mut elements = Vec::new();
    let mut connectivity = Vec::new();
    for sz in &spans[2] {
        for sy in &spans[1] {
            for sx in &spans[0] {
                let s = [sx, sy, sz];
                let lo = [sx.1, sy.1, sz.1];
                let hi = [sx.2, sy.2, sz.2];
                let mut gs = [0; 3];
                for d in 0..3 {
                    gs[d] = geometry.kv[d].span_index(0.5 * (lo[d] + hi[d]))?;
                }
                let fs = [s[0].0, s[1].0, s[2].0];
                connectivity.push(field.local_indices(fs).into_iter().map(|r| dof_of_raw[r]).collect());
                elements.push(Element { index: elements.len(), spans: fs, geom_spans: gs, lo, hi });
            }
        }
    }
    let face = |l: usize| -> Vec<usize> {
        let mut v: Vec<usize> = (0..dims[1])
            .flat_map(|j| (0..dims[0]).map(move |i| (i, j)))
            .map(|(i, j)| dof_of_raw[field.index(i, j, l)])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let kappa_a = face(dims[2] - 1);
    let kappa_1 = face(0);
    Ok(MeshTopology {
        elements,
        connectivity,
        glue_map,
        dof_of_raw,
        n_dofs,
        kappa: (0..n_dofs).collect(),
        kappa_a,
        kappa_1,
    })
}

/// Geometry, field space and topology.
#[derive(Debug, Clone)]
pub struct Mesh {
    /// Geometry map.
    pub geometry: NurbsPatch,
    /// Analysis basis.
    pub field: NurbsPatch,
    /// Connectivity of the field basis.
    pub topo: MeshTopology,
}

fn invert3(j: &[[f64; 3]; 3]) -> ([[f64; 3]; 3], f64) {
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
            let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
            inv[r][c] = (j[r1][c1] * j[r2][c2] - j[r1][c2] * j[r2][c1]) / det;
        }
    }
    (inv, det)
}

impl Mesh {
    /// Isoparametric mesh on `patch`.
    pub fn isoparametric(patch: NurbsPatch, periodic: bool) -> Result<Self> {
        let topo = build_topology(&patch, periodic)?;
        Ok(Self { geometry: patch.clone(), field: patch, topo })
    }

    /// Mesh whose field space is the B-spline space on `field_kv` over `geometry`.
    /// Field functions are anchored at the geometry image of their Greville points.
    pub fn with_field_space(geometry: NurbsPatch, field_kv: [KnotVector; 3], periodic: bool) -> Result<Self> {
        let g: Vec<Vec<f64>> = field_kv.iter().map(super::greville_abscissae).collect();
        let mut pos = Vec::with_capacity(g[0].len() * g[1].len() * g[2].len());
        for &c in &g[2] {
            for &b in &g[1] {
                for &a in &g[0] {
                    pos.push(geometry.eval_point([a, b, c])?);
                }
            }
        }
        let w = vec![1.0; pos.len()];
        let field = NurbsPatch::new(field_kv, pos.clone(), w)?;
        let topo = build_topology_with_positions(&field, &geometry, &pos, periodic)?;
        Ok(Self { geometry, field, topo })
    }

    /// Whether the field and geometry patches coincide.
    pub fn is_isoparametric(&self) -> bool {
        self.geometry == self.field
    }

    /// Number of global dofs.
    pub fn n_dofs(&self) -> usize {
        self.topo.n_dofs
    }

    /// Elements whose closure touches the given face.
    pub fn face_elements(&self, face: Face) -> Vec<&Element> {
        let kz = &self.field.kv[2];
        let target = match face {
            Face::Inner => kz.first(),
            Face::Outer => kz.last(),
        };
        self.topo
            .elements
            .iter()
            .filter(|e| match face {
                Face::Inner => e.lo[2] == target,
                Face::Outer => e.hi[2] == target,
            })
            .collect()
    }

    /// Parametric coordinate of a face.
    pub fn face_zeta(&self, face: Face) -> f64 {
        match face {
            Face::Inner => self.field.kv[2].first(),
            Face::Outer => self.field.kv[2].last(),
        }
    }

    /// Field basis evaluated on `el` at parametric point `u` (which may lie on
    /// the element closure) without physical gradients.
    pub fn field_basis(&self, el: &Element, u: [f64; 3]) -> BasisEval {
        self.field.basis_on_spans(el.spans, u)
    }

    /// Geometry point and Jacobian on `el` at `u`.
    pub fn geometry_map(&self, el: &Element, u: [f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
        let gb = self.geometry.basis_on_spans(el.geom_spans, u);
        self.geometry.map_with_basis(&gb)
    }

    /// Full evaluation on `el` at `u`; errors when the Jacobian is singular.
    pub fn eval(&self, el: &Element, u: [f64; 3]) -> Result<PointEval> {
        let (x, jac) = self.geometry_map(el, u);
        let fb = if self.is_isoparametric() {
            self.geometry.basis_on_spans(el.geom_spans, u)
        } else {
            self.field.basis_on_spans(el.spans, u)
        };
        let (inv, det) = invert3(&jac);
        let scale: f64 = jac.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        if !(det.abs() >= 1e-14 * scale.powi(3)) || !det.is_finite() {
            return Err(ScatterError::Geometry(format!("singular Jacobian det = {det:e} at {u:?}")));
        }
        let grads = fb
            .grads_param
            .iter()
            .map(|g| {
                let mut out = [0.0; 3];
                for i in 0..3 {
                    out[i] = (0..3).map(|d| inv[d][i] * g[d]).sum();
                }
                out
            })
            .collect();
        Ok(PointEval { x, jac, det, values: fb.values, grads_param: fb.grads_param, grads })
    }

    /// Evaluation on a ζ face at `(ξ, η)`; the element must touch the face.
    pub fn eval_surface(&self, el: &Element, face: Face, xi: f64, eta: f64) -> Result<SurfacePointEval> {
        let zeta = self.face_zeta(face);
        let point = self.eval(el, [xi, eta, zeta])?;
        let t_xi = [point.jac[0][0], point.jac[1][0], point.jac[2][0]];
        let t_eta = [point.jac[0][1], point.jac[1][1], point.jac[2][1]];
        let c = cross(t_xi, t_eta);
        let ds = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(ds > 0.0) {
            return Err(ScatterError::Geometry(format!("degenerate surface point ({xi}, {eta})")));
        }
        let t_zeta = [point.jac[0][2], point.jac[1][2], point.jac[2][2]];
        let along: f64 = (0..3).map(|i| c[i] * t_zeta[i]).sum();
        let sign = match face {
            Face::Outer => along.signum(),
            Face::Inner => -along.signum(),
        };
        let normal = [sign * c[0] / ds, sign * c[1] / ds, sign * c[2] / ds];
        Ok(SurfacePointEval { point, t_xi, t_eta, normal, ds })
    }

    /// Local dofs of `el`.
    pub fn dofs(&self, el: &Element) -> &[usize] {
        &self.topo.connectivity[el.index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nurbs::{make_sphere, make_spherical_shell};

    #[test]
    fn shell_surface_gluing_count() {
        let s = make_spherical_shell(1.0, 2.0).unwrap();
        let t = build_topology(&s, true).unwrap();
        assert_eq!(t.kappa_a.len(), 26);
        assert_eq!(t.kappa_1.len(), 26);
        assert_eq!(t.n_dofs, 52);
        for (i, &p) in t.glue_map.iter().enumerate() {
            assert_eq!(t.glue_map[p], p, "idempotent at {i}");
            assert!(p <= i);
        }
    }

    #[test]
    fn unglued_topology_is_identity() {
        let s = make_spherical_shell(1.0, 2.0).unwrap();
        let t = build_topology(&s, false).unwrap();
        assert!(t.glue_map.iter().enumerate().all(|(i, &p)| i == p));
        assert_eq!(t.elements.len(), 4 * 2);
        assert!(t.connectivity.iter().all(|c| c.len() == 18));
    }

    #[test]
    fn sphere_centre_glues_to_one_function() {
        let s = make_sphere(1.0).unwrap();
        let t = build_topology(&s, true).unwrap();
        assert_eq!(t.kappa_1.len(), 1);
    }

    #[test]
    fn surface_normal_points_outward() {
        let s = make_spherical_shell(1.0, 2.0).unwrap();
        let m = Mesh::isoparametric(s, true).unwrap();
        for face in [Face::Inner, Face::Outer] {
            for el in m.face_elements(face) {
                let xi = 0.5 * (el.lo[0] + el.hi[0]);
                let eta = 0.5 * (el.lo[1] + el.hi[1]);
                let sp = m.eval_surface(el, face, xi, eta).unwrap();
                let r = sp.point.x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let dot: f64 = (0..3).map(|i| sp.normal[i] * sp.point.x[i] / r).sum();
                let expect = if face == Face::Outer { 1.0 } else { -1.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }
}

//! Refined benchmark meshes `ℳ_{m,p̌,ǩ}` on the spherical base patches.
//!
//! Level `m` has `4·2^{m-1} × 2·2^{m-1}` angular elements. The radial direction
//! has one element up to level 4 and `2^{m-4}` elements beyond. Degree `p̌`
//! applies to all three directions; new knots enter with multiplicity `p̌ − ǩ`.
//! For `p̌ = 1` the geometry stays exact (quadratic NURBS) and the field is the
//! linear B-spline space on the same breakpoints.

use crate::error::{Result, ScatterError};
use crate::nurbs::{elevate_degree, insert_knots, interpolate_bspline, KnotVector, Mesh, NurbsPatch};

/// Mesh family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshFamily {
    /// Exact NURBS geometry with the NURBS analysis basis.
    Iga,
    /// `C⁰` B-spline interpolation of the geometry (isoparametric FEM surrogate).
    FemIso,
}

impl MeshFamily {
    /// Parses `iga` or `fem-iso`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iga" => Ok(MeshFamily::Iga),
            "fem-iso" | "femiso" | "fem" => Ok(MeshFamily::FemIso),
            _ => Err(ScatterError::Config(format!("unknown mesh family {s:?}"))),
        }
    }

    /// Label used in outputs.
    pub fn label(self) -> &'static str {
        match self {
            MeshFamily::Iga => "iga",
            MeshFamily::FemIso => "fem-iso",
        }
    }
}

/// Refinement level, degree, continuity and family of a benchmark mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeshSpec {
    /// Level `m >= 1`.
    pub level: usize,
    /// Degree `p̌ >= 1`.
    pub degree: usize,
    /// Continuity `ǩ` across inserted knots, `0 <= ǩ < p̌`.
    pub continuity: usize,
    /// Family.
    pub family: MeshFamily,
}

impl MeshSpec {
    /// Maximal-continuity IGA mesh.
    pub fn iga(level: usize, degree: usize) -> Self {
        Self { level, degree, continuity: degree.saturating_sub(1), family: MeshFamily::Iga }
    }

    /// Validates the fields.
    pub fn validate(&self) -> Result<()> {
        if self.level == 0 || self.level > 10 {
            return Err(ScatterError::Config(format!("mesh level must lie in 1..=10, got {}", self.level)));
        }
        if self.degree == 0 || self.degree > 6 {
            return Err(ScatterError::Config(format!("degree must lie in 1..=6, got {}", self.degree)));
        }
        if self.continuity >= self.degree {
            return Err(ScatterError::Config(format!(
                "continuity {} must be below the degree {}",
                self.continuity, self.degree
            )));
        }
        Ok(())
    }

    /// Angular subdivisions per unit knot interval.
    pub fn angular_factor(&self) -> usize {
        1 << (self.level - 1)
    }

    /// Number of radial elements.
    pub fn radial_elements(&self) -> usize {
        if self.level <= 4 {
            1
        } else {
            1 << (self.level - 4)
        }
    }

    /// Label `M{m}_p{p}_k{k}_{family}`.
    pub fn label(&self) -> String {
        format!("M{}_p{}_k{}_{}", self.level, self.degree, self.continuity, self.family.label())
    }
}

fn interior_knots(first: f64, last: f64, per_unit: usize, mult: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let a = first.round() as i64;
    let b = last.round() as i64;
    for i in a..b {
        for j in 1..per_unit {
            let v = i as f64 + j as f64 / per_unit as f64;
            for _ in 0..mult {
                out.push(v);
            }
        }
    }
    out
}

fn field_knots(geom: &KnotVector, degree: usize, mult: usize) -> Result<KnotVector> {
    let u = geom.unique();
    let mut knots = Vec::new();
    for (k, (v, _)) in u.iter().enumerate() {
        let m = if k == 0 || k + 1 == u.len() { degree + 1 } else { mult };
        for _ in 0..m {
            knots.push(*v);
        }
    }
    KnotVector::new(knots, degree)
}

/// Refines a base patch of degrees `(2, 2, 1)` on `[0,4]×[0,2]×[0,1]` with `n_radial`
/// radial elements.
pub fn refine_base_patch(base: &NurbsPatch, spec: &MeshSpec, n_radial: usize) -> Result<Mesh> {
    spec.validate()?;
    if base.degrees() != [2, 2, 1] {
        return Err(ScatterError::Incompatible(format!("base patch degrees {:?}, expected [2, 2, 1]", base.degrees())));
    }
    let p = spec.degree;
    let mult = if p == 1 { 1 } else { p - spec.continuity };
    let mut g = base.clone();
    if p > 2 {
        g = elevate_degree(&g, 0, p - 2)?;
        g = elevate_degree(&g, 1, p - 2)?;
    }
    if p > 1 {
        g = elevate_degree(&g, 2, p - 1)?;
    }
    let f = spec.angular_factor();
    for d in 0..2 {
        let kv = &g.kv[d];
        let ins = interior_knots(kv.first(), kv.last(), f, mult);
        g = insert_knots(&g, d, &ins)?;
    }
    let kz = &g.kv[2];
    let zk: Vec<f64> = (1..n_radial)
        .flat_map(|j| std::iter::repeat(kz.first() + (kz.last() - kz.first()) * j as f64 / n_radial as f64).take(mult))
        .collect();
    g = insert_knots(&g, 2, &zk)?;
    match spec.family {
        MeshFamily::Iga => {
            if p == 1 {
                let fk = [field_knots(&g.kv[0], 1, 1)?, field_knots(&g.kv[1], 1, 1)?, field_knots(&g.kv[2], 1, 1)?];
                Mesh::with_field_space(g, fk, true)
            } else {
                Mesh::isoparametric(g, true)
            }
        }
        MeshFamily::FemIso => {
            let fm = p;
            let target = [field_knots(&g.kv[0], p, fm)?, field_knots(&g.kv[1], p, fm)?, field_knots(&g.kv[2], p, fm)?];
            let b = interpolate_bspline(&g, target)?;
            Mesh::isoparametric(b, true)
        }
    }
}

/// Refined mesh of `base` following the level schedule of `spec`.
pub fn benchmark_mesh(base: &NurbsPatch, spec: &MeshSpec) -> Result<Mesh> {
    refine_base_patch(base, spec, spec.radial_elements())
}

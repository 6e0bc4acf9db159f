//! Exact NURBS volumes for the spherical benchmark domains.

use super::{KnotVector, NurbsPatch};
use crate::error::{Result, ScatterError};
use std::f64::consts::FRAC_1_SQRT_2;

const RING: [(f64, f64); 9] = [
    (1.0, 0.0),
    (1.0, 1.0),
    (0.0, 1.0),
    (-1.0, 1.0),
    (-1.0, 0.0),
    (-1.0, -1.0),
    (0.0, -1.0),
    (1.0, -1.0),
    (1.0, 0.0),
];
const MERIDIAN_C: [f64; 5] = [0.0, 1.0, 1.0, 1.0, 0.0];
const MERIDIAN_Z: [f64; 5] = [-1.0, -1.0, 0.0, 1.0, 1.0];

fn ring_weight(i: usize) -> f64 {
    if i % 2 == 1 {
        FRAC_1_SQRT_2
    } else {
        1.0
    }
}

/// Control points of the sphere surface of radius `r`, ξ-fastest, with weights.
fn sphere_layer(r: f64) -> (Vec<[f64; 3]>, Vec<f64>) {
    let mut pts = Vec::with_capacity(45);
    let mut w = Vec::with_capacity(45);
    for j in 0..5 {
        for (i, &(sx, sy)) in RING.iter().enumerate() {
            pts.push([r * sx * MERIDIAN_C[j], r * sy * MERIDIAN_C[j], r * MERIDIAN_Z[j]]);
            w.push(ring_weight(i) * ring_weight(j));
        }
    }
    (pts, w)
}

fn angular_knots() -> Result<[KnotVector; 2]> {
    Ok([
        KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0, 4.0], 2)?,
        KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 2.0], 2)?,
    ])
}

/// Spherical shell with inner radius `r_inner` on `ζ = 0` and outer radius
/// `r_outer` on `ζ = 1`; degrees (2, 2, 1).
pub fn make_spherical_shell(r_inner: f64, r_outer: f64) -> Result<NurbsPatch> {
    if !(r_inner > 0.0 && r_outer > r_inner) || !r_outer.is_finite() {
        return Err(ScatterError::Geometry(format!(
            "shell radii must satisfy 0 < R_inner < R_outer, got {r_inner}, {r_outer}"
        )));
    }
    layered(r_inner, r_outer)
}

/// Solid sphere of radius `r0`: the `ζ = 0` layer collapses to the origin.
pub fn make_sphere(r0: f64) -> Result<NurbsPatch> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(ScatterError::Geometry(format!("sphere radius must be positive, got {r0}")));
    }
    layered(0.0, r0)
}

/// Fluid layer between the scatterer surface `r0` and the artificial boundary `r_a`.
pub fn make_fluid_shell(r0: f64, r_a: f64) -> Result<NurbsPatch> {
    make_spherical_shell(r0, r_a)
}

fn layered(r_in: f64, r_out: f64) -> Result<NurbsPatch> {
    let [kx, ky] = angular_knots()?;
    let kz = KnotVector::new(vec![0.0, 0.0, 1.0, 1.0], 1)?;
    let (mut pts, mut w) = sphere_layer(r_in);
    let (p1, w1) = sphere_layer(r_out);
    pts.extend(p1);
    w.extend(w1);
    NurbsPatch::new([kx, ky, kz], pts, w)
}

//! Prolate spheroidal coordinates `(r, ϑ, φ)` with focal half-distance `Υ`.
//!
//! `x = √(r²-Υ²) sinϑ cosφ`, `y = √(r²-Υ²) sinϑ sinφ`, `z = r cosϑ`. For `Υ = 0`
//! the system is the spherical one.

use crate::error::{Result, ScatterError};

/// Coordinate system defined by its focal half-distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProlateSystem {
    /// Focal half-distance Υ (meters), foci at `z = ±Υ`.
    pub upsilon: f64,
}

/// A point in prolate spheroidal coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProlatePoint {
    /// Radial coordinate, `r ≥ Υ`.
    pub r: f64,
    /// Polar angle in `[0, π]`.
    pub theta: f64,
    /// Azimuth in `[0, 2π)`.
    pub phi: f64,
}

/// Scale factors and volume Jacobian at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    /// `h_r`
    pub h_r: f64,
    /// `h_ϑ`
    pub h_theta: f64,
    /// `h_φ`
    pub h_phi: f64,
    /// `J₁ = h_r h_ϑ h_φ = (r² - Υ² cos²ϑ) sinϑ`
    pub j1: f64,
}

/// Angular parameter Jacobian `J₃ = ∂(ϑ, φ)/∂(ξ, η)` and `J₃^{-T}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularJacobian {
    /// `[[∂ϑ/∂ξ, ∂ϑ/∂η], [∂φ/∂ξ, ∂φ/∂η]]`
    pub j3: [[f64; 2]; 2],
    /// Inverse transpose, mapping `(∂/∂ξ, ∂/∂η)` to `(∂/∂ϑ, ∂/∂φ)`.
    pub inv_t: [[f64; 2]; 2],
    /// `det J₃`
    pub det: f64,
}

impl ProlateSystem {
    /// Creates a system, rejecting negative or non-finite focal distances.
    pub fn new(upsilon: f64) -> Result<Self> {
        if !(upsilon >= 0.0) || !upsilon.is_finite() {
            return Err(ScatterError::Domain(format!("focal distance must be >= 0, got {upsilon}")));
        }
        Ok(Self { upsilon })
    }

    /// Spherical coordinates (`Υ = 0`).
    pub fn spherical() -> Self {
        Self { upsilon: 0.0 }
    }

    /// Maps a prolate point to Cartesian coordinates.
    pub fn to_cartesian(&self, p: ProlatePoint) -> [f64; 3] {
        let a = (p.r * p.r - self.upsilon * self.upsilon).max(0.0).sqrt();
        let (st, ct) = p.theta.sin_cos();
        let (sp, cp) = p.phi.sin_cos();
        [a * st * cp, a * st * sp, p.r * ct]
    }

    /// Focal distances `d₁ = |x - (0,0,-Υ)|`, `d₂ = |x - (0,0,Υ)|`.
    fn focal_distances(&self, x: [f64; 3]) -> (f64, f64) {
        let rho2 = x[0] * x[0] + x[1] * x[1];
        let d1 = (rho2 + (x[2] + self.upsilon).powi(2)).sqrt();
        let d2 = (rho2 + (x[2] - self.upsilon).powi(2)).sqrt();
        (d1, d2)
    }

    /// Inverse map using `r = (d₁ + d₂)/2`, `ϑ = arccos(z/r)`, `φ = atan2(y, x)`.
    ///
    /// On the z-axis outside the focal segment the azimuth is defined as 0.
    pub fn from_cartesian(&self, x: [f64; 3]) -> Result<ProlatePoint> {
        let on_axis = x[0] == 0.0 && x[1] == 0.0;
        if on_axis && x[2].abs() < self.upsilon {
            return Err(ScatterError::UndefinedAzimuth(x[0], x[1], x[2]));
        }
        let (d1, d2) = self.focal_distances(x);
        let r = 0.5 * (d1 + d2);
        let theta = if r == 0.0 { 0.0 } else { (x[2] / r).clamp(-1.0, 1.0).acos() };
        let phi = if on_axis {
            0.0
        } else {
            let p = x[1].atan2(x[0]);
            if p < 0.0 {
                p + 2.0 * std::f64::consts::PI
            } else {
                p
            }
        };
        Ok(ProlatePoint { r, theta, phi })
    }

    /// Scale factors and `J₁`; requires `r > Υ`.
    pub fn metric(&self, p: ProlatePoint) -> Result<Metric> {
        let u2 = self.upsilon * self.upsilon;
        let a2 = p.r * p.r - u2;
        if !(a2 > 0.0) {
            return Err(ScatterError::SingularMetric(p.r));
        }
        let (st, ct) = p.theta.sin_cos();
        let b2 = p.r * p.r - u2 * ct * ct;
        let h_r = (b2 / a2).sqrt();
        let h_theta = b2.sqrt();
        let h_phi = a2.sqrt() * st;
        Ok(Metric { h_r, h_theta, h_phi, j1: b2 * st })
    }

    /// Surface Jacobian `J_S = √(r² - Υ² cos²ϑ) √(r² - Υ²) sinϑ` on `r = const`.
    pub fn surface_jacobian(&self, r: f64, theta: f64) -> f64 {
        let u2 = self.upsilon * self.upsilon;
        let (st, ct) = theta.sin_cos();
        (r * r - u2 * ct * ct).max(0.0).sqrt() * (r * r - u2).max(0.0).sqrt() * st
    }

    /// `∂(x, y, z)/∂(r, ϑ, φ)` with rows indexed by Cartesian component.
    pub fn forward_derivatives(&self, p: ProlatePoint) -> [[f64; 3]; 3] {
        let a = (p.r * p.r - self.upsilon * self.upsilon).max(0.0).sqrt();
        let (st, ct) = p.theta.sin_cos();
        let (sp, cp) = p.phi.sin_cos();
        let ra = if a > 0.0 { p.r / a } else { f64::INFINITY };
        [
            [ra * st * cp, a * ct * cp, -a * st * sp],
            [ra * st * sp, a * ct * sp, a * st * cp],
            [ct, -p.r * st, 0.0],
        ]
    }

    /// `∂(r, ϑ, φ)/∂(x, y, z)` with rows indexed by prolate component.
    ///
    /// Requires the point to lie off the z-axis.
    pub fn inverse_derivatives(&self, x: [f64; 3]) -> Result<[[f64; 3]; 3]> {
        let rho2 = x[0] * x[0] + x[1] * x[1];
        if rho2 == 0.0 {
            return Err(ScatterError::UndefinedAzimuth(x[0], x[1], x[2]));
        }
        let (d1, d2) = self.focal_distances(x);
        let u = self.upsilon;
        let r = 0.5 * (d1 + d2);
        let dd = d1 * d2;
        let s = (r * r - x[2] * x[2]).sqrt();
        let z = x[2];
        Ok([
            [
                x[0] * (d1 + d2) / (2.0 * dd),
                x[1] * (d1 + d2) / (2.0 * dd),
                (z * (d1 + d2) + u * (d2 - d1)) / (2.0 * dd),
            ],
            [
                x[0] * z / (dd * s),
                x[1] * z / (dd * s),
                (z * z / dd + u * z * (d2 - d1) / (dd * (d1 + d2)) - 1.0) / s,
            ],
            [-x[1] / rho2, x[0] / rho2, 0.0],
        ])
    }

    /// `J₃` for a surface point `x` with tangents `∂x/∂ξ`, `∂x/∂η`.
    pub fn angular_param_jacobian(&self, x: [f64; 3], dx_dxi: [f64; 3], dx_deta: [f64; 3]) -> Result<AngularJacobian> {
        let inv = self.inverse_derivatives(x)?;
        let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let j3 = [
            [dot(&inv[1], &dx_dxi), dot(&inv[1], &dx_deta)],
            [dot(&inv[2], &dx_dxi), dot(&inv[2], &dx_deta)],
        ];
        let det = j3[0][0] * j3[1][1] - j3[0][1] * j3[1][0];
        if !(det.abs() >= 1e-14) {
            return Err(ScatterError::DegenerateParametrization(det.abs()));
        }
        let inv_t = [
            [j3[1][1] / det, -j3[1][0] / det],
            [-j3[0][1] / det, j3[0][0] / det],
        ];
        Ok(AngularJacobian { j3, inv_t, det })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn degenerate_spherical_examples() {
        let s = ProlateSystem::spherical();
        let x = s.to_cartesian(ProlatePoint { r: 2.0, theta: PI / 2.0, phi: 0.0 });
        assert!((x[0] - 2.0).abs() < 1e-15 && x[1].abs() < 1e-15 && x[2].abs() < 1e-15);
        let s = ProlateSystem::new(0.7).unwrap();
        let x = s.to_cartesian(ProlatePoint { r: 3.0, theta: 0.0, phi: 1.2 });
        assert_eq!(x, [0.0, 0.0, 3.0]);
        let p = s.from_cartesian([0.0, 0.0, 2.0]).unwrap();
        assert_eq!((p.r, p.theta, p.phi), (2.0, 0.0, 0.0));
        assert!(matches!(s.from_cartesian([0.0, 0.0, 0.3]), Err(ScatterError::UndefinedAzimuth(..))));
    }

    #[test]
    fn metric_spherical_limit_and_product() {
        let s = ProlateSystem::spherical();
        let p = ProlatePoint { r: 1.7, theta: 0.9, phi: 2.0 };
        let m = s.metric(p).unwrap();
        assert!((m.h_r - 1.0).abs() < 1e-15);
        assert!((m.h_theta - 1.7).abs() < 1e-15);
        assert!((m.h_phi - 1.7 * 0.9f64.sin()).abs() < 1e-15);
        assert!((m.j1 - 1.7 * 1.7 * 0.9f64.sin()).abs() < 1e-14);
        let s = ProlateSystem::new(1.1).unwrap();
        let m = s.metric(p).unwrap();
        assert!((m.j1 - m.h_r * m.h_theta * m.h_phi).abs() < 1e-13 * m.j1);
        assert!((s.surface_jacobian(p.r, p.theta) - m.h_theta * m.h_phi).abs() < 1e-13);
        assert!(matches!(s.metric(ProlatePoint { r: 1.1, theta: 1.0, phi: 0.0 }), Err(ScatterError::SingularMetric(_))));
    }

    #[test]
    fn equator_scale_factors_by_substitution() {
        let u = 0.6;
        let s = ProlateSystem::new(u).unwrap();
        let r: f64 = 2.0;
        let m = s.metric(ProlatePoint { r, theta: PI / 2.0, phi: 0.3 }).unwrap();
        assert!((m.h_r - r / (r * r - u * u).sqrt()).abs() < 1e-14);
        assert!((m.h_theta - r).abs() < 1e-14);
    }

    #[test]
    fn inverse_derivatives_invert_forward() {
        for &u in &[0.0, 0.5, 3.0] {
            let s = ProlateSystem::new(u).unwrap();
            let p = ProlatePoint { r: u + 1.3, theta: 1.1, phi: 0.4 };
            let x = s.to_cartesian(p);
            let f = s.forward_derivatives(p);
            let g = s.inverse_derivatives(x).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let v: f64 = (0..3).map(|k| g[i][k] * f[k][j]).sum();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((v - e).abs() < 1e-10, "Υ={u} ({i},{j}) {v}");
                }
            }
        }
    }
}

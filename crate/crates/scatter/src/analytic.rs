//! Closed-form reference solutions: rigid sphere, elastic spherical shell and
//! the manufactured pulsation field.
//!
//! All fields use the time factor `e^{-iωt}`, the incident wave
//! `p_inc = P_inc e^{ik d·x}` and the polar angle `ϑ` measured from the
//! incidence direction `d` (`cos ϑ = x̂·d`).

use crate::error::{Result, ScatterError};
use crate::linalg::dense::DenseLu;
use crate::specfun::{sph_bessel_seq, SphBessel, C64};
use std::f64::consts::PI;

/// Elastic solid and surrounding fluid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Young's modulus (Pa).
    pub e: f64,
    /// Poisson's ratio.
    pub nu: f64,
    /// Solid density (kg/m³).
    pub rho_s: f64,
    /// Fluid density (kg/m³).
    pub rho_f: f64,
    /// Speed of sound in the fluid (m/s).
    pub c_f: f64,
}

impl MaterialParams {
    /// Validates the parameters.
    pub fn new(e: f64, nu: f64, rho_s: f64, rho_f: f64, c_f: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 0.5) {
            return Err(ScatterError::Domain(format!("Poisson's ratio must lie in (0, 0.5), got {nu}")));
        }
        if !(e > 0.0 && rho_s > 0.0 && rho_f > 0.0 && c_f > 0.0) {
            return Err(ScatterError::Domain("moduli, densities and speeds must be positive".into()));
        }
        Ok(Self { e, nu, rho_s, rho_f, c_f })
    }

    /// Steel shell in water.
    pub fn ihlenburg() -> Self {
        Self { e: 2.07e11, nu: 0.3, rho_s: 7669.0, rho_f: 1000.0, c_f: 1524.0 }
    }

    /// Lamé parameter `λ`.
    pub fn lambda(&self) -> f64 {
        self.nu * self.e / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
    }

    /// Shear modulus `μ`.
    pub fn mu(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    /// Longitudinal wave speed `c₁`.
    pub fn c1(&self) -> f64 {
        ((self.lambda() + 2.0 * self.mu()) / self.rho_s).sqrt()
    }

    /// Shear wave speed `c₂`.
    pub fn c2(&self) -> f64 {
        (self.mu() / self.rho_s).sqrt()
    }
}

/// Truncation control for modal series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Stop once three consecutive terms fall below `rel_tol` times the running sum.
    pub rel_tol: f64,
    /// Hard upper bound on the mode index; exceeding it is a convergence error.
    pub n_max: usize,
    /// Fixed truncation: sum exactly the modes `0..=n_trunc`.
    pub n_trunc: Option<usize>,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { rel_tol: 1e-15, n_max: 200, n_trunc: None }
    }
}

impl SeriesControl {
    fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(ScatterError::Config("series n_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Tracks the three-consecutive-small-terms stopping rule.
struct Stopper {
    ctl: SeriesControl,
    small: usize,
}

impl Stopper {
    fn new(ctl: SeriesControl) -> Result<Self> {
        ctl.validate()?;
        Ok(Self { ctl, small: 0 })
    }

    /// Returns true when the series should stop after mode `n`.
    fn done(&mut self, n: usize, term: f64, sum: f64) -> Result<bool> {
        if let Some(t) = self.ctl.n_trunc {
            return Ok(n >= t);
        }
        if term <= self.ctl.rel_tol * sum {
            self.small += 1;
        } else {
            self.small = 0;
        }
        if self.small >= 3 {
            return Ok(true);
        }
        if n >= self.ctl.n_max {
            return Err(ScatterError::Convergence(format!(
                "modal series not converged after {} terms (last term {term:e}, sum {sum:e})",
                n + 1
            )));
        }
        Ok(false)
    }
}

/// `Pₙ(x)`, `Pₙ′(x)`, `Pₙ″(x)` for `n = 0..=n_max` by recurrence.
pub fn legendre_with_derivatives(n_max: usize, x: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push([1.0, 0.0, 0.0]);
    if n_max >= 1 {
        out.push([x, 1.0, 0.0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let p = ((2.0 * nf + 1.0) * x * out[n][0] - nf * out[n - 1][0]) / (nf + 1.0);
        let dp = out[n - 1][1] + (2.0 * nf + 1.0) * out[n][0];
        let ddp = out[n - 1][2] + (2.0 * nf + 1.0) * out[n][1];
        out.push([p, dp, ddp]);
    }
    out
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn unit(x: [f64; 3]) -> Result<[f64; 3]> {
    let n = norm3(x);
    if !(n > 0.0) || !n.is_finite() {
        return Err(ScatterError::Domain(format!("direction {x:?} has no length")));
    }
    Ok([x[0] / n, x[1] / n, x[2] / n])
}

/// Modal coefficients of an axisymmetric field `Σ cₙ fₙ(kr) Pₙ(x̂·d)`.
fn modal_field(coef: &[C64], radial: &[(C64, C64)], k: f64, r: f64, xh: [f64; 3], d: [f64; 3]) -> (C64, [C64; 3]) {
    let c = (xh[0] * d[0] + xh[1] * d[1] + xh[2] * d[2]).clamp(-1.0, 1.0);
    let leg = legendre_with_derivatives(coef.len().saturating_sub(1), c);
    let mut p = C64::new(0.0, 0.0);
    let mut dr = C64::new(0.0, 0.0);
    let mut dt = C64::new(0.0, 0.0);
    for (n, a) in coef.iter().enumerate() {
        let (f, df) = radial[n];
        p += a * f * leg[n][0];
        dr += a * k * df * leg[n][0];
        dt += a * f * leg[n][1] / r;
    }
    let mut g = [C64::new(0.0, 0.0); 3];
    for i in 0..3 {
        g[i] = dr * xh[i] + dt * (d[i] - c * xh[i]);
    }
    (p, g)
}

/// Incident plane wave `P_inc e^{ik d·x}` and its gradient.
pub fn plane_wave(k: f64, p_inc: C64, d: [f64; 3], x: [f64; 3]) -> (C64, [C64; 3]) {
    let ph = k * (d[0] * x[0] + d[1] * x[1] + d[2] * x[2]);
    let p = p_inc * C64::new(0.0, ph).exp();
    let ik = C64::new(0.0, k);
    (p, [ik * d[0] * p, ik * d[1] * p, ik * d[2] * p])
}

/// Plane wave truncated to the modes `0..=n_max` of its Legendre expansion
/// `P_inc Σ iⁿ(2n+1) jₙ(kr) Pₙ(d·x̂)`, and its gradient (`x ≠ 0`).
pub fn truncated_plane_wave(k: f64, p_inc: C64, d: [f64; 3], n_max: usize, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
    let r = norm3(x);
    if !(r > 0.0) {
        return Err(ScatterError::Domain("truncated plane wave evaluated at the origin".into()));
    }
    let d = unit(d)?;
    let xh = [x[0] / r, x[1] / r, x[2] / r];
    let coef: Vec<C64> = (0..=n_max).map(|n| incident_mode(p_inc, n)).collect();
    let b = sph_bessel_seq(n_max, k * r)?;
    let rad: Vec<(C64, C64)> = b.iter().map(|s| (C64::new(s.j, 0.0), C64::new(s.dj, 0.0))).collect();
    Ok(modal_field(&coef, &rad, k, r, xh, d))
}

/// Scattered field of a rigid sphere, stored as modal coefficients.
#[derive(Debug, Clone)]
pub struct RigidSphere {
    /// Wave number.
    pub k: f64,
    /// Incident amplitude.
    pub p_inc: C64,
    /// Sphere radius.
    pub radius: f64,
    /// Unit incidence direction.
    pub dir: [f64; 3],
    coef: Vec<C64>,
}

fn incident_mode(p_inc: C64, n: usize) -> C64 {
    p_inc * C64::new(0.0, 1.0).powu(n as u32) * (2 * n + 1) as f64
}

impl RigidSphere {
    /// Computes modes until their surface contribution is negligible.
    pub fn new(k: f64, p_inc: C64, radius: f64, dir: [f64; 3], ctl: SeriesControl) -> Result<Self> {
        if !(k > 0.0 && radius > 0.0) {
            return Err(ScatterError::Domain("rigid sphere needs k > 0 and R > 0".into()));
        }
        let dir = unit(dir)?;
        let mut stop = Stopper::new(ctl)?;
        let mut coef = Vec::new();
        let mut sum = 0.0;
        let mut n = 0;
        loop {
            let b = sph_bessel_seq(n, k * radius)?;
            let a = -incident_mode(p_inc, n) * b[n].dj / b[n].dh();
            coef.push(a);
            let term = (a * b[n].h()).norm();
            sum += term;
            let min_n = (k * radius).ceil() as usize;
            if stop.done(n, term, sum)? && n >= min_n.min(ctl.n_trunc.unwrap_or(usize::MAX)) {
                break;
            }
            n += 1;
        }
        Ok(Self { k, p_inc, radius, dir, coef })
    }

    /// Modal coefficients `aₙ` of `Σ aₙ hₙ(kr) Pₙ(cos ϑ)`.
    pub fn coefficients(&self) -> &[C64] {
        &self.coef
    }

    /// Scattered pressure and its Cartesian gradient at `x` (`|x| >= R`).
    pub fn field(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        let r = norm3(x);
        if !(r > 0.0) {
            return Err(ScatterError::Domain("field point at the origin".into()));
        }
        let xh = [x[0] / r, x[1] / r, x[2] / r];
        let b = sph_bessel_seq(self.coef.len() - 1, self.k * r)?;
        let rad: Vec<(C64, C64)> = b.iter().map(|s| (s.h(), s.dh())).collect();
        Ok(modal_field(&self.coef, &rad, self.k, r, xh, self.dir))
    }

    /// Far-field pattern `p₀(x̂) = lim r e^{-ikr} p(r x̂)`.
    pub fn far_field(&self, xhat: [f64; 3]) -> Result<C64> {
        let xh = unit(xhat)?;
        Ok(far_field_sum(&self.coef, self.k, xh, self.dir))
    }
}

fn far_field_sum(coef: &[C64], k: f64, xh: [f64; 3], d: [f64; 3]) -> C64 {
    let c = (xh[0] * d[0] + xh[1] * d[1] + xh[2] * d[2]).clamp(-1.0, 1.0);
    let leg = legendre_with_derivatives(coef.len().saturating_sub(1), c);
    let mi = C64::new(0.0, -1.0);
    coef.iter()
        .enumerate()
        .map(|(n, a)| a * mi.powu(n as u32 + 1) / k * leg[n][0])
        .sum()
}

/// Rigid-sphere scattered pressure at `(r, ϑ)`, summed adaptively at the point.
pub fn rigid_sphere_pressure(k: f64, p_inc: C64, radius: f64, r: f64, theta: f64, ctl: SeriesControl) -> Result<C64> {
    Ok(rigid_sphere_pressure_gradient(k, p_inc, radius, r, theta, ctl)?.0)
}

/// Rigid-sphere scattered pressure with `(∂p/∂r, (1/r) ∂p/∂ϑ)`.
pub fn rigid_sphere_pressure_gradient(
    k: f64,
    p_inc: C64,
    radius: f64,
    r: f64,
    theta: f64,
    ctl: SeriesControl,
) -> Result<(C64, [C64; 2])> {
    if !(r >= radius) || !(k > 0.0) || !(radius > 0.0) {
        return Err(ScatterError::Domain(format!("need k > 0 and r >= R, got k={k}, r={r}, R={radius}")));
    }
    let mut stop = Stopper::new(ctl)?;
    let c = theta.cos();
    let s = theta.sin();
    let mut p = C64::new(0.0, 0.0);
    let mut dr = C64::new(0.0, 0.0);
    let mut dt = C64::new(0.0, 0.0);
    let mut n = 0;
    let mut cap = 16usize;
    let mut leg = legendre_with_derivatives(cap, c);
    let mut bs_r: Vec<SphBessel> = sph_bessel_seq(cap, k * r)?;
    let mut bs_a: Vec<SphBessel> = sph_bessel_seq(cap, k * radius)?;
    loop {
        if n > cap {
            cap *= 2;
            leg = legendre_with_derivatives(cap, c);
            bs_r = sph_bessel_seq(cap, k * r)?;
            bs_a = sph_bessel_seq(cap, k * radius)?;
        }
        let a = -incident_mode(p_inc, n) * bs_a[n].dj / bs_a[n].dh();
        let t = a * bs_r[n].h() * leg[n][0];
        p += t;
        dr += a * k * bs_r[n].dh() * leg[n][0];
        dt += a * bs_r[n].h() * (-s * leg[n][1]) / r;
        let scale = (a * bs_r[n].h()).norm();
        if stop.done(n, scale, p.norm().max(scale))? && n as f64 >= k * radius {
            break;
        }
        n += 1;
    }
    Ok((p, [dr, dt]))
}

/// Rigid-sphere far-field pattern at polar angle `ϑ` from the incidence direction.
pub fn rigid_sphere_farfield(k: f64, p_inc: C64, radius: f64, theta: f64, ctl: SeriesControl) -> Result<C64> {
    let rs = RigidSphere::new(k, p_inc, radius, [0.0, 0.0, 1.0], ctl)?;
    rs.far_field([theta.sin(), 0.0, theta.cos()])
}

/// Condition on the inner surface of the elastic shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellInterior {
    /// Traction-free inner surface (vacuum inside).
    Vacuum,
    /// Inner surface in contact with fluid of the same properties as outside.
    Fluid,
}

/// Per-mode coefficients of the elastic shell solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellMode {
    /// Scattered pressure coefficient of `hₙ(kr) Pₙ`.
    pub a: C64,
    /// Solid potentials `[φ jₙ(αr), ψ jₙ(βr), φ yₙ(αr), ψ yₙ(βr)]`.
    pub c: [C64; 4],
    /// Interior pressure coefficient of `jₙ(kr) Pₙ`.
    pub e: C64,
}

/// Radial profiles `(U, U′, V, V′)` of the four solid solution families and
/// their `σ_rr`, `σ_rϑ` amplitudes.
struct SolidProfiles {
    u: [f64; 4],
    du: [f64; 4],
    v: [f64; 4],
    dv: [f64; 4],
    srr: [f64; 4],
    srt: [f64; 4],
}

fn bessel_z(n: usize, x: f64) -> Result<([f64; 3], [f64; 3])> {
    let b = sph_bessel_seq(n, x)?;
    let b = b[n];
    let q = (n * (n + 1)) as f64 / (x * x);
    let ddj = -2.0 / x * b.dj - (1.0 - q) * b.j;
    let ddy = -2.0 / x * b.dy - (1.0 - q) * b.y;
    Ok(([b.j, b.dj, ddj], [b.y, b.dy, ddy]))
}

fn solid_profiles(n: usize, alpha: f64, beta: f64, lambda: f64, mu: f64, r: f64) -> Result<SolidProfiles> {
    let (ja, ya) = bessel_z(n, alpha * r)?;
    let (jb, yb) = bessel_z(n, beta * r)?;
    let nn = (n * (n + 1)) as f64;
    let mut p = SolidProfiles { u: [0.0; 4], du: [0.0; 4], v: [0.0; 4], dv: [0.0; 4], srr: [0.0; 4], srt: [0.0; 4] };
    for (t, z) in [(0usize, ja), (2, ya)] {
        let g = z[0];
        let dg = alpha * z[1];
        let ddg = alpha * alpha * z[2];
        p.u[t] = dg;
        p.du[t] = ddg;
        p.v[t] = g / r;
        p.dv[t] = dg / r - g / (r * r);
        p.srr[t] = -lambda * alpha * alpha * g + 2.0 * mu * ddg;
    }
    for (t, z) in [(1usize, jb), (3, yb)] {
        let f = z[0];
        let df = beta * z[1];
        let ddf = beta * beta * z[2];
        p.u[t] = nn * f / r;
        p.du[t] = nn * (df / r - f / (r * r));
        p.v[t] = f / r + df;
        p.dv[t] = df / r - f / (r * r) + ddf;
        p.srr[t] = 2.0 * mu * p.du[t];
    }
    for t in 0..4 {
        p.srt[t] = mu * (p.dv[t] - p.v[t] / r + p.u[t] / r);
    }
    Ok(p)
}

/// Solves the coupled modal system of one mode by a direct dense solve.
#[allow(clippy::too_many_arguments)]
fn solve_shell_mode(
    n: usize,
    k: f64,
    p_inc: C64,
    r1: f64,
    r0: f64,
    mat: &MaterialParams,
    interior: ShellInterior,
) -> Result<ShellMode> {
    let omega = k * mat.c_f;
    let alpha = omega / mat.c1();
    let beta = omega / mat.c2();
    let (lambda, mu) = (mat.lambda(), mat.mu());
    let rfw = mat.rho_f * omega * omega;
    let s0 = solid_profiles(n, alpha, beta, lambda, mu, r0)?;
    let s1 = solid_profiles(n, alpha, beta, lambda, mu, r1)?;
    let f0 = sph_bessel_seq(n, k * r0)?[n];
    let f1 = sph_bessel_seq(n, k * r1)?[n];
    let inc = incident_mode(p_inc, n);
    let solid_cols: Vec<usize> = if n == 0 { vec![0, 2] } else { vec![0, 1, 2, 3] };
    let ns = solid_cols.len();
    let with_fluid = interior == ShellInterior::Fluid;
    let dim = ns + 1 + usize::from(with_fluid);
    let col_a = ns;
    let col_e = ns + 1;
    let zero = C64::new(0.0, 0.0);
    let mut m = vec![zero; dim * dim];
    let mut rhs = vec![zero; dim];
    let mut row = 0;
    // Outer surface: σ_rr = -(p_inc + p_s), ρ_f ω² u_r = ∂_r(p_inc + p_s), σ_rϑ = 0.
    for (j, &t) in solid_cols.iter().enumerate() {
        m[row * dim + j] = C64::new(s0.srr[t], 0.0);
    }
    m[row * dim + col_a] = f0.h();
    rhs[row] = -inc * f0.j;
    row += 1;
    for (j, &t) in solid_cols.iter().enumerate() {
        m[row * dim + j] = C64::new(rfw * s0.u[t], 0.0);
    }
    m[row * dim + col_a] = -k * f0.dh();
    rhs[row] = inc * k * f0.dj;
    row += 1;
    if n > 0 {
        for (j, &t) in solid_cols.iter().enumerate() {
            m[row * dim + j] = C64::new(s0.srt[t], 0.0);
        }
        row += 1;
    }
    // Inner surface.
    for (j, &t) in solid_cols.iter().enumerate() {
        m[row * dim + j] = C64::new(s1.srr[t], 0.0);
    }
    if with_fluid {
        m[row * dim + col_e] = C64::new(f1.j, 0.0);
    }
    row += 1;
    if n > 0 {
        for (j, &t) in solid_cols.iter().enumerate() {
            m[row * dim + j] = C64::new(s1.srt[t], 0.0);
        }
        row += 1;
    }
    if with_fluid {
        for (j, &t) in solid_cols.iter().enumerate() {
            m[row * dim + j] = C64::new(rfw * s1.u[t], 0.0);
        }
        m[row * dim + col_e] = C64::new(-k * f1.dj, 0.0);
        row += 1;
    }
    debug_assert_eq!(row, dim);
    let mut colscale = vec![0.0f64; dim];
    for j in 0..dim {
        colscale[j] = (0..dim).map(|i| m[i * dim + j].norm()).fold(0.0, f64::max);
        if colscale[j] == 0.0 {
            colscale[j] = 1.0;
        }
        for i in 0..dim {
            m[i * dim + j] /= colscale[j];
        }
    }
    let lu = DenseLu::factor(dim, m).map_err(|_| ScatterError::Resonance { mode: n, det: 0.0 })?;
    let det = lu.det().norm();
    if !(det > 1e-300) {
        return Err(ScatterError::Resonance { mode: n, det });
    }
    let y = lu.solve(&rhs);
    let x: Vec<C64> = y.iter().zip(&colscale).map(|(v, s)| v / s).collect();
    let mut c = [zero; 4];
    for (j, &t) in solid_cols.iter().enumerate() {
        c[t] = x[j];
    }
    Ok(ShellMode { a: x[col_a], c, e: if with_fluid { x[col_e] } else { zero } })
}

/// Elastic spherical shell in fluid, solved mode by mode.
#[derive(Debug, Clone)]
pub struct ElasticShell {
    /// Wave number in the fluid.
    pub k: f64,
    /// Incident amplitude.
    pub p_inc: C64,
    /// Inner radius.
    pub r1: f64,
    /// Outer radius.
    pub r0: f64,
    /// Materials.
    pub mat: MaterialParams,
    /// Inner-surface condition.
    pub interior: ShellInterior,
    /// Unit incidence direction.
    pub dir: [f64; 3],
    modes: Vec<ShellMode>,
}

impl ElasticShell {
    /// Solves modes until the outer-surface pressure and displacement
    /// contributions satisfy the stopping rule.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k: f64,
        p_inc: C64,
        r1: f64,
        r0: f64,
        mat: MaterialParams,
        interior: ShellInterior,
        dir: [f64; 3],
        ctl: SeriesControl,
    ) -> Result<Self> {
        if !(k > 0.0 && r1 > 0.0 && r0 > r1) {
            return Err(ScatterError::Domain(format!("need k > 0 and 0 < R1 < R0, got {k}, {r1}, {r0}")));
        }
        let dir = unit(dir)?;
        let mut stop = Stopper::new(ctl)?;
        let mut modes = Vec::new();
        let omega = k * mat.c_f;
        let alpha = omega / mat.c1();
        let beta = omega / mat.c2();
        let mut sum_p = 0.0;
        let mut sum_u = 0.0;
        let mut n = 0;
        loop {
            let m = solve_shell_mode(n, k, p_inc, r1, r0, &mat, interior)?;
            let h = sph_bessel_seq(n, k * r0)?[n].h();
            let sp = solid_profiles(n, alpha, beta, mat.lambda(), mat.mu(), r0)?;
            let ur: C64 = (0..4).map(|t| m.c[t] * sp.u[t]).sum();
            let tp = (m.a * h).norm();
            let tu = ur.norm() * mat.rho_f * omega * omega / k;
            sum_p += tp;
            sum_u += tu;
            modes.push(m);
            let term = (tp / sum_p.max(f64::MIN_POSITIVE)).max(tu / sum_u.max(f64::MIN_POSITIVE));
            if stop.done(n, term, 1.0)? && n as f64 >= k * r0 {
                break;
            }
            n += 1;
        }
        Ok(Self { k, p_inc, r1, r0, mat, interior, dir, modes })
    }

    /// Per-mode coefficients.
    pub fn modes(&self) -> &[ShellMode] {
        &self.modes
    }

    /// Angular frequency `ω = k c_f`.
    pub fn omega(&self) -> f64 {
        self.k * self.mat.c_f
    }

    /// Scattered pressure and gradient at `|x| >= R0`.
    pub fn field(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        let r = norm3(x);
        if !(r > 0.0) {
            return Err(ScatterError::Domain("field point at the origin".into()));
        }
        let xh = [x[0] / r, x[1] / r, x[2] / r];
        let b = sph_bessel_seq(self.modes.len() - 1, self.k * r)?;
        let rad: Vec<(C64, C64)> = b.iter().map(|s| (s.h(), s.dh())).collect();
        let coef: Vec<C64> = self.modes.iter().map(|m| m.a).collect();
        Ok(modal_field(&coef, &rad, self.k, r, xh, self.dir))
    }

    /// Far-field pattern of the scattered pressure.
    pub fn far_field(&self, xhat: [f64; 3]) -> Result<C64> {
        let coef: Vec<C64> = self.modes.iter().map(|m| m.a).collect();
        Ok(far_field_sum(&coef, self.k, unit(xhat)?, self.dir))
    }

    /// Interior fluid pressure and gradient at `|x| <= R1` (zero for a vacuum interior).
    pub fn interior_field(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        let zero = C64::new(0.0, 0.0);
        if self.interior == ShellInterior::Vacuum {
            return Ok((zero, [zero; 3]));
        }
        let r = norm3(x).max(1e-12 * self.r1);
        let xh = if norm3(x) > 0.0 { [x[0] / r, x[1] / r, x[2] / r] } else { self.dir };
        let b = sph_bessel_seq(self.modes.len() - 1, self.k * r)?;
        let rad: Vec<(C64, C64)> = b.iter().map(|s| (C64::new(s.j, 0.0), C64::new(s.dj, 0.0))).collect();
        let coef: Vec<C64> = self.modes.iter().map(|m| m.e).collect();
        Ok(modal_field(&coef, &rad, self.k, r, xh, self.dir))
    }

    /// Solid displacement and its Cartesian gradient `∂u_i/∂x_j` at `R1 <= |x| <= R0`.
    pub fn displacement(&self, x: [f64; 3]) -> Result<([C64; 3], [[C64; 3]; 3])> {
        let r = norm3(x);
        if !(r > 0.0) {
            return Err(ScatterError::Domain("displacement at the origin".into()));
        }
        let xh = [x[0] / r, x[1] / r, x[2] / r];
        let d = self.dir;
        let c = (xh[0] * d[0] + xh[1] * d[1] + xh[2] * d[2]).clamp(-1.0, 1.0);
        let omega = self.omega();
        let alpha = omega / self.mat.c1();
        let beta = omega / self.mat.c2();
        let leg = legendre_with_derivatives(self.modes.len() - 1, c);
        let zero = C64::new(0.0, 0.0);
        let (mut a, mut ar, mut ac, mut b, mut br, mut bc) = (zero, zero, zero, zero, zero, zero);
        for (n, m) in self.modes.iter().enumerate() {
            let sp = solid_profiles(n, alpha, beta, self.mat.lambda(), self.mat.mu(), r)?;
            let (mut u, mut du, mut v, mut dv) = (zero, zero, zero, zero);
            for t in 0..4 {
                u += m.c[t] * sp.u[t];
                du += m.c[t] * sp.du[t];
                v += m.c[t] * sp.v[t];
                dv += m.c[t] * sp.dv[t];
            }
            let [p, dp, ddp] = leg[n];
            a += u * p - v * c * dp;
            ar += du * p - dv * c * dp;
            ac += u * dp - v * dp - v * c * ddp;
            b += v * dp;
            br += dv * dp;
            bc += v * ddp;
        }
        let mut disp = [zero; 3];
        let mut grad = [[zero; 3]; 3];
        for i in 0..3 {
            disp[i] = a * xh[i] + b * d[i];
            for j in 0..3 {
                let dc = (d[j] - c * xh[j]) / r;
                let dxh = (if i == j { 1.0 } else { 0.0 } - xh[i] * xh[j]) / r;
                grad[i][j] = (ar * xh[j] + ac * dc) * xh[i] + a * dxh + (br * xh[j] + bc * dc) * d[i];
            }
        }
        Ok((disp, grad))
    }
}

/// Elastic-shell scattered pressure at `(r, ϑ)` for a vacuum interior.
#[allow(clippy::too_many_arguments)]
pub fn elastic_shell_pressure(
    k: f64,
    p_inc: C64,
    r1: f64,
    r0: f64,
    mat: &MaterialParams,
    r: f64,
    theta: f64,
    ctl: SeriesControl,
) -> Result<C64> {
    let s = ElasticShell::new(k, p_inc, r1, r0, *mat, ShellInterior::Vacuum, [0.0, 0.0, 1.0], ctl)?;
    Ok(s.field([r * theta.sin(), 0.0, r * theta.cos()])?.0)
}

/// Closed-form impedance data of one mode of a shell with vacuum interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellModes {
    /// Mode index.
    pub n: usize,
    /// Specific acoustic impedance `zₙ`.
    pub z_acoustic: C64,
    /// Mechanical impedance `Zₙ`.
    pub z_mechanical: C64,
    /// Coefficients `Aₙ, Bₙ, Cₙ, Dₙ`.
    pub coef: [f64; 4],
    /// Determinant `∇²ₙ`.
    pub det: f64,
    /// Numerator determinants `∇²ₙ₁..∇²ₙ₄` (for `n = 0` only entries 0 and 2 are used).
    pub det_i: [f64; 4],
    /// The 4×4 (or 2×2 for `n = 0`) matrix the coefficients solve, row-major.
    pub system: [[f64; 4]; 4],
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn det4(m: [[f64; 4]; 4]) -> f64 {
    let mut d = 0.0;
    for c in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for r in 1..4 {
            let mut k = 0;
            for cc in 0..4 {
                if cc != c {
                    minor[r - 1][k] = m[r][cc];
                    k += 1;
                }
            }
        }
        let s = if c % 2 == 0 { 1.0 } else { -1.0 };
        d += s * m[0][c] * det3(minor);
    }
    d
}

/// Impedances and mode coefficients from the closed-form determinant formulas.
pub fn shell_modes(n: usize, k: f64, r1: f64, r0: f64, mat: &MaterialParams) -> Result<ShellModes> {
    let omega = k * mat.c_f;
    let alpha = omega / mat.c1();
    let beta = omega / mat.c2();
    let mu = mat.mu();
    let nf = n as f64;
    let nn = nf * (nf + 1.0);
    let ba2 = (beta / alpha).powi(2);
    let z = |i: usize, m: usize, x: f64| -> Result<f64> {
        let b = sph_bessel_seq(m, x)?[m];
        Ok(if i == 1 { b.j } else { b.y })
    };
    let t11 = |i: usize, x: f64| -> Result<f64> {
        Ok((nf * nf - nf - 0.5 * ba2 * x * x) * z(i, n, x)? + 2.0 * x * z(i, n + 1, x)?)
    };
    let t13 = |i: usize, x: f64| -> Result<f64> { Ok(nn * ((nf - 1.0) * z(i, n, x)? - x * z(i, n + 1, x)?)) };
    let t41 = |i: usize, x: f64| -> Result<f64> { Ok((nf - 1.0) * z(i, n, x)? - x * z(i, n + 1, x)?) };
    let t43 = |i: usize, x: f64| -> Result<f64> {
        Ok((nf * nf - 1.0 - 0.5 * x * x) * z(i, n, x)? + x * z(i, n + 1, x)?)
    };
    let u1 = |i: usize, x: f64| -> Result<f64> { Ok(nf * z(i, n, x)? - x * z(i, n + 1, x)?) };
    let u3 = |i: usize, x: f64| -> Result<f64> { Ok(nn * z(i, n, x)?) };
    let s = r0 * r0 / (2.0 * mu);
    let (a0, a1, b0, b1) = (alpha * r0, alpha * r1, beta * r0, beta * r1);
    let mut system = [[0.0; 4]; 4];
    let (coef, det, det_i) = if n == 0 {
        let m = [[t11(1, a0)?, t11(2, a0)?], [t11(1, a1)?, t11(2, a1)?]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        system[0][0] = m[0][0];
        system[0][1] = m[0][1];
        system[1][0] = m[1][0];
        system[1][1] = m[1][1];
        check_det(n, det, &[m[0][0], m[0][1], m[1][0], m[1][1]])?;
        let di = [s * m[1][1], 0.0, -s * m[1][0], 0.0];
        ([di[0] / det, 0.0, di[2] / det, 0.0], det, di)
    } else {
        let m = [
            [t11(1, a0)?, t13(1, b0)?, t11(2, a0)?, t13(2, b0)?],
            [t11(1, a1)?, t13(1, b1)?, t11(2, a1)?, t13(2, b1)?],
            [t41(1, a0)?, t43(1, b0)?, t41(2, a0)?, t43(2, b0)?],
            [t41(1, a1)?, t43(1, b1)?, t41(2, a1)?, t43(2, b1)?],
        ];
        system = m;
        let det = det4(m);
        let flat: Vec<f64> = m.iter().flatten().copied().collect();
        check_det(n, det, &flat)?;
        let minor = |skip_col: usize| -> [[f64; 3]; 3] {
            let mut out = [[0.0; 3]; 3];
            for r in 1..4 {
                let mut k = 0;
                for c in 0..4 {
                    if c != skip_col {
                        out[r - 1][k] = m[r][c];
                        k += 1;
                    }
                }
            }
            out
        };
        let di = [s * det3(minor(0)), -s * det3(minor(1)), s * det3(minor(2)), -s * det3(minor(3))];
        ([di[0] / det, di[1] / det, di[2] / det, di[3] / det], det, di)
    };
    let [an, bn, cn, dn] = coef;
    let mut disp = an * u1(1, a0)? + cn * u1(2, a0)?;
    if n > 0 {
        disp += bn * u3(1, b0)? + dn * u3(2, b0)?;
    }
    let z_mech = C64::new(r0, 0.0) / (C64::new(0.0, -omega) * disp);
    let bk = sph_bessel_seq(n, k * r0)?[n];
    let z_ac = C64::new(0.0, mat.rho_f * mat.c_f) * bk.h() / bk.dh();
    Ok(ShellModes { n, z_acoustic: z_ac, z_mechanical: z_mech, coef, det, det_i, system })
}

fn check_det(n: usize, det: f64, entries: &[f64]) -> Result<f64> {
    let scale = entries.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let dim = if entries.len() == 4 { 2 } else { 4 };
    if !(det.abs() > 1e-300 * scale.powi(dim)) || !det.is_finite() {
        return Err(ScatterError::Resonance { mode: n, det });
    }
    Ok(det)
}

/// Scattered-pressure coefficient of `hₙ(kr) Pₙ(cos ϑ)` from the closed-form
/// impedance expression; `z_scale` multiplies `Zₙ` (a scale of `1e12`
/// approaches the rigid limit).
pub fn shell_scattered_coefficient(p_inc: C64, k: f64, r0: f64, mat: &MaterialParams, modes: &ShellModes, z_scale: f64) -> Result<C64> {
    let n = modes.n;
    let b = sph_bessel_seq(n, k * r0)?[n];
    let rigid = -incident_mode(p_inc, n) * b.dj / b.dh();
    let elastic = p_inc * mat.rho_f * mat.c_f / (k * r0).powi(2) * C64::new(0.0, 1.0).powu(n as u32) * (2 * n + 1) as f64
        / (b.dh() * b.dh() * (modes.z_mechanical * z_scale + modes.z_acoustic));
    Ok(rigid + elastic)
}

/// Point-source field `p = e^{ikR}/(4πR)`, `R = |x − y|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulsation {
    /// Wave number.
    pub k: f64,
    /// Source point.
    pub y: [f64; 3],
}

impl Pulsation {
    /// Pressure and gradient at `x ≠ y`.
    pub fn field(&self, x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        let dx = [x[0] - self.y[0], x[1] - self.y[1], x[2] - self.y[2]];
        let r = norm3(dx);
        if !(r > 0.0) {
            return Err(ScatterError::Domain("field point coincides with the source".into()));
        }
        let e = C64::new(0.0, self.k * r).exp();
        let p = e / (4.0 * PI * r);
        let f = e / (4.0 * PI * r * r * r) * C64::new(-1.0, self.k * r);
        Ok((p, [f * dx[0], f * dx[1], f * dx[2]]))
    }

    /// Far-field pattern `(1/4π) e^{-ik x̂·y}`.
    pub fn far_field(&self, xhat: [f64; 3]) -> Result<C64> {
        let xh = unit(xhat)?;
        let ph = -self.k * (xh[0] * self.y[0] + xh[1] * self.y[1] + xh[2] * self.y[2]);
        Ok(C64::new(0.0, ph).exp() / (4.0 * PI))
    }
}

/// Pulsation pressure, gradient and Neumann datum `∂p/∂n` on a surface with normal `n`.
pub fn manufactured_pulsation(k: f64, y: [f64; 3], x: [f64; 3], normal: [f64; 3]) -> Result<(C64, [C64; 3], C64)> {
    let (p, g) = Pulsation { k, y }.field(x)?;
    let dn = g[0] * normal[0] + g[1] * normal[1] + g[2] * normal[2];
    Ok((p, g, dn))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_derivative_recurrences() {
        let x = 0.37;
        let v = legendre_with_derivatives(6, x);
        let p4 = (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0;
        let dp4 = (140.0 * x.powi(3) - 60.0 * x) / 8.0;
        let ddp4 = (420.0 * x * x - 60.0) / 8.0;
        assert!((v[4][0] - p4).abs() < 1e-15);
        assert!((v[4][1] - dp4).abs() < 1e-14);
        assert!((v[4][2] - ddp4).abs() < 1e-13);
    }

    #[test]
    fn lame_parameters() {
        let m = MaterialParams::ihlenburg();
        let (l, mu) = (m.lambda(), m.mu());
        assert!((l - 0.3 * 2.07e11 / (1.3 * 0.4)).abs() < 1e-3 * l);
        assert!((mu - 2.07e11 / 2.6).abs() < 1e-3);
        assert!(MaterialParams::new(1.0, 0.5, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_amplitude_gives_zero() {
        let v = rigid_sphere_pressure(2.0, C64::new(0.0, 0.0), 1.0, 3.0, 0.4, SeriesControl::default()).unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn pulsation_neumann_vanishes_for_tangential_normal() {
        let y = [0.1, 0.2, 0.3];
        let x = [1.1, 0.2, 0.3];
        let (_, _, g) = manufactured_pulsation(1.0, y, x, [0.0, 1.0, 0.0]).unwrap();
        assert_eq!(g, C64::new(0.0, 0.0));
    }
}

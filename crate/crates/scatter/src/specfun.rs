//! Special functions: Legendre polynomials, spherical Bessel and Hankel
//! functions, the generalized exponential integral `E_n(z)` and the radial
//! integrals consumed by the infinite-element bilinear forms.

use crate::error::{Result, ScatterError};
use num_complex::Complex64;

/// Complex scalar used for every complex-valued quantity in the crate.
pub type C64 = Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_TOL: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 500;
const CF_TOL: f64 = 1e-15;
const CF_MAX_ITER: usize = 200_000;
const RADIAL_SERIES_TOL: f64 = 1e-15;
const RADIAL_SERIES_MAX_TERMS: usize = 100_000;

/// Legendre polynomial `P_n(x)` and its derivative `P_n'(x)` on `[-1, 1]`.
///
/// Uses the three-term recursion for the value and
/// `(1 - x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x))` for the derivative, with the
/// limits `P_n'(±1) = (±1)^{n+1} n (n + 1) / 2` at the endpoints.
pub fn legendre_p(n: usize, x: f64) -> Result<(f64, f64)> {
    if !(x.abs() <= 1.0) {
        return Err(ScatterError::Domain(format!("legendre_p requires |x| <= 1, got {x}")));
    }
    if n == 0 {
        return Ok((1.0, 0.0));
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let nf = n as f64;
    let dp = if x.abs() == 1.0 {
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (p_prev - x * p) / (1.0 - x * x)
    };
    Ok((p, dp))
}

/// Legendre values `P_0(x) .. P_{n_max}(x)` in one sweep.
pub fn legendre_seq(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !(x.abs() <= 1.0) {
        return Err(ScatterError::Domain(format!("legendre_seq requires |x| <= 1, got {x}")));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(x);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let v = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(v);
    }
    Ok(out)
}

/// Spherical Bessel functions of the first and second kind with derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphBessel {
    /// `j_n(x)`
    pub j: f64,
    /// `y_n(x)`
    pub y: f64,
    /// `j_n'(x)`
    pub dj: f64,
    /// `y_n'(x)`
    pub dy: f64,
}

impl SphBessel {
    /// Spherical Hankel function of the first kind `h_n = j_n + i y_n`.
    pub fn h(&self) -> C64 {
        C64::new(self.j, self.y)
    }

    /// Derivative of the spherical Hankel function of the first kind.
    pub fn dh(&self) -> C64 {
        C64::new(self.dj, self.dy)
    }
}

/// `j_k(x)` for `k = 0..=n_max`.
///
/// Orders `k <= x` use the upward recurrence from the closed forms of `j_0` and
/// `j_1`, which is stable there. Higher orders use Miller's downward recurrence
/// started at `n_max + max(15, ceil(x))` and normalized against the upward value
/// of larger magnitude among orders `floor(x) - 1` and `floor(x)`.
fn bessel_j_downward(n_max: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let m = (x.floor() as usize).min(n_max);
    let mut up = vec![j0];
    if m >= 1 {
        up.push(s / (x * x) - c / x);
        for k in 1..m {
            let v = (2.0 * k as f64 + 1.0) / x * up[k] - up[k - 1];
            up.push(v);
        }
    }
    if m == n_max {
        return up;
    }
    let start = n_max + 15usize.max(x.ceil() as usize);
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        let v = (2.0 * k as f64 + 1.0) / x * vals[k] - vals[k + 1];
        vals[k - 1] = v;
        if v.abs() > 1e250 {
            for w in vals[k - 1..].iter_mut() {
                *w *= 1e-250;
            }
        }
    }
    let anchor = if m >= 1 && up[m - 1].abs() > up[m].abs() { m - 1 } else { m };
    let scale = up[anchor] / vals[anchor];
    vals.truncate(n_max + 1);
    for (k, v) in vals.iter_mut().enumerate() {
        *v = if k <= m { up[k] } else { *v * scale };
    }
    vals
}

/// `y_k(x)` for `k = 0..=n_max` by upward recurrence.
fn bessel_y_upward(n_max: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut vals = Vec::with_capacity(n_max + 1);
    vals.push(-c / x);
    if n_max >= 1 {
        vals.push(-c / (x * x) - s / x);
    }
    for k in 1..n_max {
        let v = (2.0 * k as f64 + 1.0) / x * vals[k] - vals[k - 1];
        vals.push(v);
    }
    vals
}

/// Spherical Bessel values and derivatives for orders `0..=n_max` at `x > 0`.
pub fn sph_bessel_seq(n_max: usize, x: f64) -> Result<Vec<SphBessel>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(ScatterError::Domain(format!("spherical Bessel functions require x > 0, got {x}")));
    }
    let j = bessel_j_downward(n_max + 1, x);
    let y = bessel_y_upward(n_max + 1, x);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let (dj, dy) = if n == 0 {
            (-j[1], -y[1])
        } else {
            let f = (n as f64 + 1.0) / x;
            (j[n - 1] - f * j[n], y[n - 1] - f * y[n])
        };
        out.push(SphBessel { j: j[n], y: y[n], dj, dy });
    }
    Ok(out)
}

/// Spherical Bessel functions `(j_n, y_n, j_n', y_n')` at `x > 0`.
pub fn sph_bessel(n: usize, x: f64) -> Result<SphBessel> {
    Ok(sph_bessel_seq(n, x)?[n])
}

/// Spherical Hankel function of the first kind and its derivative.
pub fn sph_hankel1(n: usize, x: f64) -> Result<(C64, C64)> {
    let b = sph_bessel(n, x)?;
    Ok((b.h(), b.dh()))
}

fn check_en_args(n: u32, z: C64) -> Result<Option<C64>> {
    if n == 0 {
        return Err(ScatterError::Domain("E_n requires n >= 1".into()));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(ScatterError::Domain(format!("E_n requires a finite argument, got {z}")));
    }
    if z.re < 0.0 {
        return Err(ScatterError::Domain(format!("E_n requires Re(z) >= 0, got {z}")));
    }
    if z == C64::new(0.0, 0.0) {
        if n == 1 {
            return Err(ScatterError::Divergence("E_1(0) diverges logarithmically".into()));
        }
        return Ok(Some(C64::new(1.0 / (n as f64 - 1.0), 0.0)));
    }
    Ok(None)
}

/// `E_n(z)` by the power series around the origin.
///
/// `E_n(z) = (-z)^{n-1}/(n-1)! [-ln z + ψ(n)] - Σ_{m≠n-1} (-z)^m / ((m-n+1) m!)`
/// with `ψ(n) = -γ + Σ_{k=1}^{n-1} 1/k`. The sum stops after three
/// consecutive terms below `1e-16·|partial sum|`.
pub fn exp_integral_en_series(n: u32, z: C64) -> Result<C64> {
    if let Some(v) = check_en_args(n, z)? {
        return Ok(v);
    }
    let n1 = n as usize - 1;
    let mut psi = -EULER_GAMMA;
    let mut fact = 1.0;
    for k in 1..=n1 {
        psi += 1.0 / k as f64;
        fact *= k as f64;
    }
    let mz = -z;
    let lead = mz.powu(n1 as u32) / fact * (-z.ln() + psi);
    let mut sum = C64::new(0.0, 0.0);
    let mut pow = C64::new(1.0, 0.0);
    let mut small = 0;
    for m in 0..SERIES_MAX_TERMS {
        if m > 0 {
            pow = pow * mz / m as f64;
        }
        if m == n1 {
            continue;
        }
        let term = pow / (m as f64 - n1 as f64);
        sum += term;
        if m > n1 {
            if term.norm() < SERIES_TOL * sum.norm() {
                small += 1;
                if small == 3 {
                    return Ok(lead - sum);
                }
            } else {
                small = 0;
            }
        }
    }
    Err(ScatterError::Convergence(format!(
        "E_{n}({z}) series did not converge in {SERIES_MAX_TERMS} terms"
    )))
}

/// `E_n(z)` by the continued fraction
/// `e^{-z} (1/(z+n-) 1·n/(z+n+2-) 2(n+1)/(z+n+4-) ...)` evaluated with the
/// modified Lentz method.
pub fn exp_integral_en_cf(n: u32, z: C64) -> Result<C64> {
    if let Some(v) = check_en_args(n, z)? {
        return Ok(v);
    }
    const FPMIN: f64 = 1e-300;
    let nf = n as f64;
    let mut b = z + nf;
    let mut c = C64::new(1.0 / FPMIN, 0.0);
    let mut d = C64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let fi = i as f64;
        let a = -fi * (nf - 1.0 + fi);
        b += 2.0;
        let mut den = d * a + b;
        if den.norm() < FPMIN {
            den = C64::new(FPMIN, 0.0);
        }
        d = C64::new(1.0, 0.0) / den;
        c = b + c.inv() * a;
        if c.norm() < FPMIN {
            c = C64::new(FPMIN, 0.0);
        }
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < CF_TOL {
            return Ok(h * (-z).exp());
        }
    }
    Err(ScatterError::Convergence(format!(
        "E_{n}({z}) continued fraction did not converge in {CF_MAX_ITER} iterations"
    )))
}

/// Generalized exponential integral `E_n(z) = ∫_1^∞ e^{-zρ} ρ^{-n} dρ` for `Re(z) >= 0`.
///
/// The series is used for `|z| <= 1` and the continued fraction otherwise.
pub fn exp_integral_en(n: u32, z: C64) -> Result<C64> {
    if z.norm() <= 1.0 {
        exp_integral_en_series(n, z)
    } else {
        exp_integral_en_cf(n, z)
    }
}

/// Tabulated radial integrals `B^{(1)}_n`, `B^{(2)}_n` for `n = 1..=n_max`.
///
/// `B^{(1)}_n = ∫_1^∞ e^{2iϱ₂ρ} ρ^{-n} dρ` and
/// `B^{(2)}_n = ∫_1^∞ e^{2iϱ₂ρ} / ((ρ² - ϱ₁²) ρ^{n-1}) dρ` in the unconjugated
/// case; the conjugated table drops the oscillatory factor. The conjugated
/// `B^{(1)}_1` diverges and is reported as an error by [`RadialIntegralTable::b1`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialIntegralTable {
    b1: Vec<Option<C64>>,
    b2: Vec<C64>,
    rho1: f64,
    rho2: f64,
    conjugated: bool,
}

impl RadialIntegralTable {
    /// Builds the table for `n = 1..=n_max`.
    pub fn new(rho1: f64, rho2: f64, conjugated: bool, n_max: usize) -> Result<Self> {
        if !(rho1 >= 0.0) {
            return Err(ScatterError::Domain(format!("ϱ₁ must be non-negative, got {rho1}")));
        }
        if rho1 >= 1.0 {
            return Err(ScatterError::Geometry(format!(
                "ϱ₁ = {rho1} >= 1: the artificial boundary must lie outside the foci"
            )));
        }
        if !conjugated && !(rho2 > 0.0) {
            return Err(ScatterError::Domain(format!("unconjugated radial integrals need ϱ₂ > 0, got {rho2}")));
        }
        if n_max == 0 {
            return Err(ScatterError::Domain("n_max must be at least 1".into()));
        }
        let z = C64::new(0.0, -2.0 * rho2);
        let r2 = rho1 * rho1;
        let mut b1 = Vec::with_capacity(n_max);
        let mut b2 = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            if conjugated {
                b1.push(if n == 1 { None } else { Some(C64::new(1.0 / (n as f64 - 1.0), 0.0)) });
                let mut sum = 0.0;
                let mut w = 1.0;
                let mut converged = false;
                for j in 0..RADIAL_SERIES_MAX_TERMS {
                    let term = w / (2.0 * j as f64 + n as f64);
                    sum += term;
                    if term.abs() < RADIAL_SERIES_TOL * sum.abs() {
                        converged = true;
                        break;
                    }
                    w *= r2;
                }
                if !converged {
                    return Err(ScatterError::Convergence(format!("conjugated B2_{n} series with ϱ₁ = {rho1}")));
                }
                b2.push(C64::new(sum, 0.0));
            } else {
                b1.push(Some(exp_integral_en(n as u32, z)?));
                let mut sum = C64::new(0.0, 0.0);
                let mut w = 1.0;
                let mut converged = false;
                for j in 0..RADIAL_SERIES_MAX_TERMS {
                    let term = exp_integral_en((2 * j + n + 1) as u32, z)? * w;
                    sum += term;
                    if term.norm() < RADIAL_SERIES_TOL * sum.norm() {
                        converged = true;
                        break;
                    }
                    w *= r2;
                }
                if !converged {
                    return Err(ScatterError::Convergence(format!("unconjugated B2_{n} series with ϱ₁ = {rho1}")));
                }
                b2.push(sum);
            }
        }
        Ok(Self { b1, b2, rho1, rho2, conjugated })
    }

    /// Largest tabulated index.
    pub fn n_max(&self) -> usize {
        self.b2.len()
    }

    /// ϱ₁ = Υ / r_a.
    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    /// ϱ₂ = k r_a.
    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    /// Whether the table holds conjugated integrals.
    pub fn conjugated(&self) -> bool {
        self.conjugated
    }

    /// `B^{(1)}_n`; errors for indices outside the table and for the divergent conjugated `n = 1`.
    pub fn b1(&self, n: usize) -> Result<C64> {
        if n == 0 || n > self.b1.len() {
            return Err(ScatterError::Domain(format!("B1 index {n} outside 1..={}", self.b1.len())));
        }
        self.b1[n - 1].ok_or_else(|| ScatterError::Divergence("conjugated B1_1 diverges".into()))
    }

    /// `B^{(2)}_n`; errors for indices outside the table.
    pub fn b2(&self, n: usize) -> Result<C64> {
        if n == 0 || n > self.b2.len() {
            return Err(ScatterError::Domain(format!("B2 index {n} outside 1..={}", self.b2.len())));
        }
        Ok(self.b2[n - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_trivial_values() {
        assert_eq!(legendre_p(0, 0.7).unwrap().0, 1.0);
        assert_eq!(legendre_p(1, 0.3).unwrap().0, 0.3);
        assert!((legendre_p(4, 1.0).unwrap().0 - 1.0).abs() < 1e-14);
        assert!(legendre_p(2, 1.5).is_err());
    }

    #[test]
    fn legendre_endpoint_magnitudes() {
        for n in 0..40 {
            let (p1, _) = legendre_p(n, 1.0).unwrap();
            let (pm1, _) = legendre_p(n, -1.0).unwrap();
            assert!((p1.abs() - 1.0).abs() < 1e-14);
            assert!((pm1.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn legendre_derivative_matches_difference_quotient() {
        for n in 0..12 {
            for &x in &[-0.9, -0.3, 0.0, 0.45, 0.8] {
                let h = 1e-6;
                let fd = (legendre_p(n, x + h).unwrap().0 - legendre_p(n, x - h).unwrap().0) / (2.0 * h);
                let d = legendre_p(n, x).unwrap().1;
                assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()), "n={n} x={x}");
            }
            let h = 1e-7;
            let fd = (legendre_p(n, 1.0).unwrap().0 - legendre_p(n, 1.0 - h).unwrap().0) / h;
            let d = legendre_p(n, 1.0).unwrap().1;
            assert!((fd - d).abs() < 1e-4 * (1.0 + d.abs()), "endpoint n={n}");
        }
    }

    #[test]
    fn bessel_closed_forms() {
        for &x in &[1e-3, 0.01, 0.5, 1.0, 3.3, 10.0, 77.0, 1000.0] {
            let (s, c) = f64::sin_cos(x);
            let b = sph_bessel_seq(1, x).unwrap();
            let j0 = s / x;
            let j1 = if x < 0.1 {
                x / 3.0 * (1.0 - x * x / 10.0 * (1.0 - x * x / 28.0 * (1.0 - x * x / 54.0)))
            } else {
                s / (x * x) - c / x
            };
            let y0 = -c / x;
            let y1 = -c / (x * x) - s / x;
            assert!((b[0].j - j0).abs() <= 1e-14 * j0.abs().max(1e-300), "j0 at {x}");
            assert!((b[1].j - j1).abs() <= 1e-14 * j1.abs().max(1e-300) + 1e-300, "j1 at {x}");
            assert!((b[0].y - y0).abs() <= 1e-14 * y0.abs(), "y0 at {x}");
            assert!((b[1].y - y1).abs() <= 1e-14 * y1.abs(), "y1 at {x}");
        }
    }

    #[test]
    fn hankel_zero_order_closed_form() {
        for &x in &[0.2, 1.7, 12.0] {
            let (h, _) = sph_hankel1(0, x).unwrap();
            let expected = -C64::i() * C64::new(0.0, x).exp() / x;
            assert!((h - expected).norm() < 1e-14 * expected.norm());
        }
    }

    #[test]
    fn hankel_large_argument_limit() {
        let x = 1e3;
        for n in 0..10 {
            let (h, _) = sph_hankel1(n, x).unwrap();
            let lim = C64::new(0.0, -1.0).powu(n as u32 + 1) * C64::new(0.0, x).exp() / x;
            let rel = (h - lim).norm() / lim.norm();
            assert!(rel <= (n * (n + 1)) as f64 / x + 1e-12, "n={n} rel={rel}");
            if n <= 1 {
                assert!(rel <= 1e-3);
            }
        }
    }

    #[test]
    fn exp_integral_special_cases() {
        for n in 2..10 {
            let v = exp_integral_en(n, C64::new(0.0, 0.0)).unwrap();
            assert_eq!(v, C64::new(1.0 / (n as f64 - 1.0), 0.0));
        }
        assert!(matches!(exp_integral_en(1, C64::new(0.0, 0.0)), Err(ScatterError::Divergence(_))));
        assert!(matches!(exp_integral_en(2, C64::new(-0.1, 0.0)), Err(ScatterError::Domain(_))));
    }

    #[test]
    fn exp_integral_known_real_values() {
        // E_1(1) and E_2(2) to 16 digits.
        let e11 = exp_integral_en(1, C64::new(1.0, 0.0)).unwrap();
        assert!((e11.re - 0.219_383_934_395_520_27).abs() < 1e-15);
        let e22 = exp_integral_en(2, C64::new(2.0, 0.0)).unwrap();
        assert!((e22.re - 0.037_534_261_820_490_74).abs() < 1e-15);
    }

    #[test]
    fn radial_table_trivial_cases() {
        let t = RadialIntegralTable::new(0.0, 3.0, true, 10).unwrap();
        assert!(t.b1(1).is_err());
        for n in 2..=10 {
            assert_eq!(t.b1(n).unwrap().re, 1.0 / (n as f64 - 1.0));
        }
        for n in 1..=10 {
            assert!((t.b2(n).unwrap().re - 1.0 / n as f64).abs() < 1e-15);
        }
        let u = RadialIntegralTable::new(0.0, 1.3, false, 10).unwrap();
        for n in 1..10 {
            assert!((u.b2(n).unwrap() - u.b1(n + 1).unwrap()).norm() < 1e-15);
        }
        assert!(matches!(RadialIntegralTable::new(1.0, 1.0, false, 4), Err(ScatterError::Geometry(_))));
    }
}

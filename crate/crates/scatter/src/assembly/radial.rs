//! Radial shape functions of the infinite elements.
//!
//! Trial functions are `φ_m(r) = e^{ik(r - r_a)} Q_m(r_a / r)` with
//! `Q_m(x) = Σ_m̃ D_{m m̃} x^m̃`. Petrov–Galerkin test functions use
//! `Q̃_n(x) = Σ_ñ D̃_{n ñ} x^{ñ + 2}`; Bubnov–Galerkin test functions equal the
//! trial functions. For the Lagrange basis the node phases `e^{ik(r_a - r_m)}`
//! are kept apart from the real coefficient matrices.

use crate::error::{Result, ScatterError};
use crate::linalg::dense::DenseLu;
use crate::specfun::{RadialIntegralTable, C64};

/// Largest supported number of radial functions.
pub const MAX_RADIAL_ORDER: usize = 8;

/// Condition number of the Lagrange collocation matrix above which construction fails.
pub const LAGRANGE_COND_LIMIT: f64 = 1e14;

/// Infinite-element variational formulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// Petrov–Galerkin, unconjugated.
    Pgu,
    /// Petrov–Galerkin, conjugated.
    Pgc,
    /// Bubnov–Galerkin, unconjugated.
    Bgu,
    /// Bubnov–Galerkin, conjugated.
    Bgc,
}

impl Formulation {
    /// All four formulations.
    pub const ALL: [Formulation; 4] = [Formulation::Pgu, Formulation::Pgc, Formulation::Bgu, Formulation::Bgc];

    /// Whether test functions carry the extra `x²` factor.
    pub fn is_petrov(self) -> bool {
        matches!(self, Formulation::Pgu | Formulation::Pgc)
    }

    /// Whether test functions are complex conjugated.
    pub fn is_conjugated(self) -> bool {
        matches!(self, Formulation::Pgc | Formulation::Bgc)
    }

    /// Upper-case label.
    pub fn label(self) -> &'static str {
        match self {
            Formulation::Pgu => "PGU",
            Formulation::Pgc => "PGC",
            Formulation::Bgu => "BGU",
            Formulation::Bgc => "BGC",
        }
    }

    /// Parses a label, ignoring case.
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PGU" => Ok(Formulation::Pgu),
            "PGC" => Ok(Formulation::Pgc),
            "BGU" => Ok(Formulation::Bgu),
            "BGC" => Ok(Formulation::Bgc),
            _ => Err(ScatterError::Config(format!("unknown formulation {s:?}"))),
        }
    }
}

/// Polynomial family of the radial functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadialBasis {
    /// Lagrange interpolation at node radii `r_n`.
    Lagrange,
    /// Shifted Chebyshev polynomials.
    Chebyshev,
    /// Bernstein polynomials of degree `N - 1`.
    Bernstein,
}

impl RadialBasis {
    /// Lagrange for `N <= 4`, Chebyshev otherwise.
    pub fn default_for(n: usize) -> Self {
        if n <= 4 {
            RadialBasis::Lagrange
        } else {
            RadialBasis::Chebyshev
        }
    }

    /// Lower-case label.
    pub fn label(self) -> &'static str {
        match self {
            RadialBasis::Lagrange => "lagrange",
            RadialBasis::Chebyshev => "chebyshev",
            RadialBasis::Bernstein => "bernstein",
        }
    }

    /// Parses a label, ignoring case.
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lagrange" => Ok(RadialBasis::Lagrange),
            "chebyshev" => Ok(RadialBasis::Chebyshev),
            "bernstein" => Ok(RadialBasis::Bernstein),
            _ => Err(ScatterError::Config(format!("unknown radial basis {s:?}"))),
        }
    }
}

/// Complete infinite-element configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct IeContext {
    /// Variational formulation.
    pub formulation: Formulation,
    /// Number of radial functions `N`.
    pub n: usize,
    /// Polynomial family.
    pub basis: RadialBasis,
    /// Wave number.
    pub k: f64,
    /// Radius of the artificial boundary.
    pub r_a: f64,
    /// Focal half-distance `Υ`.
    pub upsilon: f64,
    /// Node radii (Lagrange only, `r_1 = r_a`).
    pub r_nodes: Vec<f64>,
    /// Real trial coefficients `D`, row `m`, column `m̃ - 1`.
    pub d: Vec<Vec<f64>>,
    /// Real test coefficients `D̃`.
    pub d_tilde: Vec<Vec<f64>>,
    /// Trial phases `e^{ik(r_a - r_m)}` (all one except for Lagrange).
    pub phase: Vec<C64>,
    /// Condition number estimate of the collocation matrix (one for non-Lagrange bases).
    pub collocation_cond: f64,
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn chebyshev_rows(n: usize) -> Vec<Vec<f64>> {
    let mut t: Vec<Vec<f64>> = vec![vec![1.0], vec![-1.0, 2.0]];
    while t.len() < n {
        let m = t.len() - 1;
        let mut next = vec![0.0; m + 2];
        for (j, &c) in t[m].iter().enumerate() {
            next[j + 1] += 4.0 * c;
            next[j] -= 2.0 * c;
        }
        for (j, &c) in t[m - 1].iter().enumerate() {
            next[j] -= c;
        }
        t.push(next);
    }
    (1..=n)
        .map(|m| {
            let mut row = vec![0.0; n];
            if m == 1 {
                row[0] = 1.0;
            } else {
                let mut poly = t[m - 1].clone();
                poly[0] -= 1.0;
                for (j, &c) in poly.iter().enumerate() {
                    if j < n {
                        row[j] = c;
                    }
                }
            }
            row
        })
        .collect()
}

fn bernstein_rows(n: usize) -> Vec<Vec<f64>> {
    let p = n - 1;
    (1..=n)
        .map(|m| {
            let i = p + 1 - m;
            let mut row = vec![0.0; n];
            for j in 0..=(p - i) {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                row[i + j] = sign * binom(p, i) * binom(p - i, j);
            }
            row
        })
        .collect()
}

fn norm1(a: &[f64], n: usize) -> f64 {
    (0..n).map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Inverse of the collocation matrix `B_{m̃ j} = x_j^{m̃ + shift}` with `x_j = r_a / r_j`,
/// returned as rows `D_{m m̃}` satisfying `Σ_m̃ D_{m m̃} x_j^{m̃+shift} = δ_{mj}`.
fn lagrange_rows(r_a: f64, nodes: &[f64], shift: i32) -> Result<(Vec<Vec<f64>>, f64)> {
    let n = nodes.len();
    let mut b = vec![0.0; n * n];
    for mt in 0..n {
        for (j, &r) in nodes.iter().enumerate() {
            b[mt * n + j] = (r_a / r).powi(mt as i32 + 1 + shift);
        }
    }
    let nb = norm1(&b, n);
    let lu = DenseLu::factor(n, b).map_err(|_| ScatterError::Singular("Lagrange collocation matrix".into()))?;
    let mut inv = vec![0.0; n * n];
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let col = lu.solve(&e);
        for r in 0..n {
            inv[r * n + c] = col[r];
        }
    }
    let cond = nb * norm1(&inv, n);
    if !(cond < LAGRANGE_COND_LIMIT) {
        return Err(ScatterError::Singular(format!("Lagrange collocation matrix condition {cond:e} exceeds {LAGRANGE_COND_LIMIT:e}")));
    }
    // D B = I  =>  D = B^{-1}; row m of D is row m of the inverse.
    let rows = (0..n).map(|m| (0..n).map(|mt| inv[m * n + mt]).collect()).collect();
    Ok((rows, cond))
}

/// Real coefficient matrices `(D, D̃)` of the radial basis.
pub fn radial_coefficients(ie: &IeContext) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    (ie.d.clone(), ie.d_tilde.clone())
}

impl IeContext {
    /// Builds the context. `r_nodes` defaults to `r_n = n r_a` for the Lagrange basis.
    pub fn new(
        formulation: Formulation,
        n: usize,
        basis: RadialBasis,
        k: f64,
        r_a: f64,
        upsilon: f64,
        r_nodes: Option<Vec<f64>>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_RADIAL_ORDER {
            return Err(ScatterError::Domain(format!("N must lie in 1..={MAX_RADIAL_ORDER}, got {n}")));
        }
        if !(k > 0.0) {
            return Err(ScatterError::Domain(format!("wave number must be positive, got {k}")));
        }
        if !(upsilon >= 0.0) || !(r_a > upsilon) {
            return Err(ScatterError::Geometry(format!("need r_a > Υ >= 0, got r_a = {r_a}, Υ = {upsilon}")));
        }
        let (d, d_tilde, phase, nodes, cond) = match basis {
            RadialBasis::Lagrange => {
                let nodes = r_nodes.unwrap_or_else(|| (1..=n).map(|i| i as f64 * r_a).collect());
                if nodes.len() != n {
                    return Err(ScatterError::Domain(format!("expected {n} node radii, got {}", nodes.len())));
                }
                if (nodes[0] - r_a).abs() > 1e-14 * r_a || nodes.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(ScatterError::Domain("node radii must increase strictly from r_1 = r_a".into()));
                }
                let (d, c1) = lagrange_rows(r_a, &nodes, 0)?;
                let (dt, c2) = if formulation.is_petrov() { lagrange_rows(r_a, &nodes, 2)? } else { (d.clone(), c1) };
                let phase = nodes.iter().map(|&r| C64::new(0.0, k * (r_a - r)).exp()).collect();
                (d, dt, phase, nodes, c1.max(c2))
            }
            RadialBasis::Chebyshev | RadialBasis::Bernstein => {
                let d = if basis == RadialBasis::Chebyshev { chebyshev_rows(n) } else { bernstein_rows(n) };
                (d.clone(), d, vec![C64::new(1.0, 0.0); n], Vec::new(), 1.0)
            }
        };
        Ok(Self { formulation, n, basis, k, r_a, upsilon, r_nodes: nodes, d, d_tilde, phase, collocation_cond: cond })
    }

    /// `ϱ₁ = Υ / r_a`.
    pub fn rho1(&self) -> f64 {
        self.upsilon / self.r_a
    }

    /// `ϱ₂ = k r_a`.
    pub fn rho2(&self) -> f64 {
        self.k * self.r_a
    }

    /// `ϱ₃ = k Υ`.
    pub fn rho3(&self) -> f64 {
        self.k * self.upsilon
    }

    /// Exponent offset of the test polynomials (2 for Petrov–Galerkin).
    pub fn test_shift(&self) -> usize {
        if self.formulation.is_petrov() {
            2
        } else {
            0
        }
    }

    /// Effective trial coefficient of `x^{m̃}` in `Q_m`, phase included (1-based indices).
    pub fn trial_coef(&self, m: usize, mt: usize) -> C64 {
        self.phase[m - 1] * self.d[m - 1][mt - 1]
    }

    /// Effective test coefficient (1-based), conjugated for conjugated formulations.
    pub fn test_coef(&self, n: usize, nt: usize) -> C64 {
        let c = self.phase[n - 1] * self.d_tilde[n - 1][nt - 1];
        if self.formulation.is_conjugated() {
            c.conj()
        } else {
            c
        }
    }

    /// Largest radial-integral index the bilinear forms touch.
    pub fn radial_table_size(&self) -> usize {
        2 * self.n + self.test_shift() + 2
    }

    /// Radial integral table matching this context.
    pub fn radial_table(&self) -> Result<RadialIntegralTable> {
        RadialIntegralTable::new(self.rho1(), self.rho2(), self.formulation.is_conjugated(), self.radial_table_size())
    }

    /// `Q_m(x)` with its phase, as used by `φ_m` (1-based `m`).
    pub fn q_trial(&self, m: usize, x: f64) -> C64 {
        (1..=self.n).map(|mt| self.trial_coef(m, mt) * x.powi(mt as i32)).sum()
    }

    /// Trial function `φ_m(r)` and `dφ_m/dr` for `r >= r_a`, with `r` the prolate radius.
    pub fn phi(&self, m: usize, r: f64) -> (C64, C64) {
        let x = self.r_a / r;
        let e = C64::new(0.0, self.k * (r - self.r_a)).exp();
        let mut q = C64::new(0.0, 0.0);
        let mut dq = C64::new(0.0, 0.0);
        for mt in 1..=self.n {
            let c = self.trial_coef(m, mt);
            q += c * x.powi(mt as i32);
            dq += c * mt as f64 * x.powi(mt as i32 - 1);
        }
        let val = e * q;
        let der = e * (C64::new(0.0, self.k) * q - dq * self.r_a / (r * r));
        (val, der)
    }
}

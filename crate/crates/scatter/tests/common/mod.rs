//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use scatter::specfun::C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += pair * WGK[i];
        if i % 2 == 1 {
            g += pair * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand on `[a, b]`
/// to absolute tolerance `tol` (or 1e-15 relative to the local value).
pub fn adaptive_gk<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    fn rec<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> C64 {
        let (v, err) = kronrod(f, a, b);
        if depth == 0 || err <= tol.max(1e-15 * v.norm()) {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(f, a, b, tol, 40)
}

/// Sum of adaptive integrals over `pieces` equal parts of `[a, b]`.
pub fn piecewise_gk<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, pieces: usize, tol: f64) -> C64 {
    let h = (b - a) / pieces as f64;
    (0..pieces).map(|i| adaptive_gk(f, a + h * i as f64, a + h * (i + 1) as f64, tol / pieces as f64)).sum()
}

/// `Eₙ(z) = ∫₁^∞ e^{−zρ} ρ^{−n} dρ` by quadrature on `[1, R]` with `R` chosen so the
/// neglected tail is below `1e-16`.
pub fn en_oracle(n: u32, z: C64) -> C64 {
    assert!(z.re > 0.0);
    let mut r = 2.0;
    while (-z.re * r).exp() / r.powi(n as i32) / z.re > 1e-18 {
        r *= 1.5;
    }
    let f = |rho: f64| (-z * rho).exp() / rho.powi(n as i32);
    piecewise_gk(&f, 1.0, r, 64, 1e-17)
}

/// Oscillatory radial integral `∫₁^∞ e^{2iϱ₂ρ} w(ρ) dρ` along the rotated path
/// `ρ = 1 + it`, where the integrand decays like `e^{−2ϱ₂t}`.
fn rotated<W: Fn(C64) -> C64>(rho2: f64, w: W) -> C64 {
    let t_max = 40.0 / rho2;
    let f = |t: f64| {
        let rho = C64::new(1.0, t);
        (C64::new(0.0, 2.0 * rho2) * rho).exp() * w(rho) * C64::new(0.0, 1.0)
    };
    piecewise_gk(&f, 0.0, t_max, 64, 1e-15)
}

/// Unconjugated `B⁽¹⁾ₙ = ∫₁^∞ e^{2iϱ₂ρ} ρ^{−n} dρ`.
pub fn b1_unconjugated(rho2: f64, n: usize) -> C64 {
    rotated(rho2, |rho| rho.powi(-(n as i32)))
}

/// Unconjugated `B⁽²⁾ₙ = ∫₁^∞ e^{2iϱ₂ρ} / ((ρ² − ϱ₁²) ρ^{n−1}) dρ`.
pub fn b2_unconjugated(rho1: f64, rho2: f64, n: usize) -> C64 {
    rotated(rho2, |rho| (rho * rho - rho1 * rho1).inv() * rho.powi(1 - n as i32))
}

/// Conjugated `B⁽²⁾ₙ = ∫₀¹ s^{n−1} / (1 − ϱ₁² s²) ds` (substitution `ρ = 1/s`).
pub fn b2_conjugated(rho1: f64, n: usize) -> f64 {
    let f = |s: f64| C64::new(s.powi(n as i32 - 1) / (1.0 - rho1 * rho1 * s * s), 0.0);
    adaptive_gk(&f, 0.0, 1.0, 1e-16).re
}

/// Relative difference `|a − b| / |b|`.
pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

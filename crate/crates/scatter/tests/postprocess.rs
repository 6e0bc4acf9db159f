//! Kirchhoff integrals, target strength, error norms, best approximation and
//! the SAV index.

use scatter::analytic::{MaterialParams, Pulsation, RigidSphere, SeriesControl};
use scatter::assembly::*;
use scatter::nurbs::*;
use scatter::postprocess::*;
use scatter::specfun::C64;
use scatter::Result;
use std::f64::consts::PI;

const SOURCE: [f64; 3] = [0.25, 0.25, 0.25];

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn sphere_mesh(level: usize, r_a: f64) -> Mesh {
    benchmark_mesh(&make_fluid_shell(1.0, r_a).unwrap(), &MeshSpec::iga(level, 2)).unwrap()
}

fn exact_traces<E: ExactSolution>(mesh: &Mesh, quad: &QuadratureRule, e: &E) -> SurfaceTraces {
    SurfaceTraces::from_fn(mesh, quad, |x, n| {
        let (p, g) = e.pressure(x)?;
        Ok((p, g[0] * n[0] + g[1] * n[1] + g[2] * n[2]))
    })
    .unwrap()
}

fn pulsation(k: f64) -> ScaledPulsation {
    ScaledPulsation { source: Pulsation { k, y: SOURCE }, amplitude: c(1.0) }
}

fn rigid(k: f64) -> RigidSphere {
    RigidSphere::new(k, c(1.0), 1.0, [0.0, 0.0, 1.0], SeriesControl::default()).unwrap()
}

struct Constant(C64);

impl ExactSolution for Constant {
    fn pressure(&self, _x: [f64; 3]) -> Result<(C64, [C64; 3])> {
        Ok((self.0, [c(0.0); 3]))
    }

    fn far_field(&self, _xhat: [f64; 3]) -> Result<C64> {
        Ok(c(0.0))
    }
}

#[test]
fn kirchhoff_near_reproduces_exterior_fields() {
    let mesh = sphere_mesh(2, 1.5);
    let quad = gauss_rule(10).unwrap();
    let k = 2.0;
    let pul = pulsation(k);
    let tr = exact_traces(&mesh, &quad, &pul);
    for x in [[5.0, 0.0, 0.0], [0.0, -3.0, 4.0], [1.0, 2.0, 2.0]] {
        let got = kirchhoff_near(&tr, k, x).unwrap();
        assert!(rel(got, pul.pressure(x).unwrap().0) < 1e-6, "{x:?}");
    }
    let rs = rigid(k);
    let tr = exact_traces(&mesh, &quad, &rs);
    let x = [0.0, 3.0, 4.0];
    assert!(rel(kirchhoff_near(&tr, k, x).unwrap(), rs.field(x).unwrap().0) < 1e-4);
}

#[test]
fn zero_traces_give_zero_fields() {
    let mesh = sphere_mesh(1, 1.5);
    let tr = SurfaceTraces::from_fn(&mesh, &gauss_rule(4).unwrap(), |_, _| Ok((c(0.0), c(0.0)))).unwrap();
    assert!((tr.area() - 4.0 * PI).abs() < 1e-3);
    assert_eq!(kirchhoff_near(&tr, 1.0, [3.0, 0.0, 0.0]).unwrap(), c(0.0));
    assert_eq!(kirchhoff_far(&tr, 1.0, [0.0, 0.0, 1.0]).unwrap(), c(0.0));
}

#[test]
fn kirchhoff_far_matches_closed_forms() {
    let mesh = sphere_mesh(2, 1.5);
    let quad = gauss_rule(10).unwrap();
    for k in [0.5, 2.0, 4.0] {
        let pul = pulsation(k);
        let tr = exact_traces(&mesh, &quad, &pul);
        let rs = rigid(k);
        let trs = exact_traces(&mesh, &quad, &rs);
        for (a, b) in [(0.0, 0.0), (1.0, 0.3), (2.5, -1.2), (0.0, PI / 2.0)] {
            let d = direction_from_angles(a, b);
            assert!(rel(kirchhoff_far(&tr, k, d).unwrap(), pul.far_field(d).unwrap()) < 1e-6, "k={k}");
            assert!(rel(kirchhoff_far(&trs, k, d).unwrap(), rs.far_field(d).unwrap()) < 1e-5, "k={k}");
        }
    }
    assert!(kirchhoff_far(&exact_traces(&mesh, &quad, &pulsation(1.0)), 1.0, [1.0, 1.0, 0.0]).is_err());
}

#[test]
fn far_field_is_linear_in_traces() {
    let mesh = sphere_mesh(1, 1.5);
    let quad = gauss_rule(5).unwrap();
    let tr = exact_traces(&mesh, &quad, &rigid(1.5));
    let s = C64::new(-0.3, 2.2);
    let d = direction_from_angles(0.4, 0.1);
    let a = kirchhoff_far(&tr, 1.5, d).unwrap();
    let b = kirchhoff_far(&tr.scaled(s), 1.5, d).unwrap();
    assert!(rel(b, a * s) < 1e-13);
    let samples = far_field_samples(&tr, 1.5, c(1.0), &[[0.0, 0.0, 3.0]]).unwrap();
    assert_eq!(samples[0].direction, [0.0, 0.0, 1.0]);
    assert!(far_field_samples(&tr, 1.5, c(1.0), &[[0.0; 3]]).is_err());
}

#[test]
fn target_strength_conventions() {
    assert_eq!(target_strength(c(1.0), c(1.0)), 0.0);
    assert!((target_strength(C64::new(0.0, 10.0), c(1.0)) - 20.0).abs() < 1e-12);
    let p0 = C64::new(0.3, -0.7);
    let base = target_strength(p0, c(2.0));
    for s in [C64::new(0.0, 1.0), C64::new(-3.0, 4.0), c(1e-5)] {
        assert!((target_strength(p0 * s, c(2.0) * s) - base).abs() < 1e-12);
    }
    let d = direction_from_angles(0.0, 0.0);
    assert_eq!(d, [1.0, 0.0, 0.0]);
    let z = direction_from_angles(1.0, PI / 2.0);
    assert!((z[2] - 1.0).abs() < 1e-15 && z[0].abs() < 1e-15 && z[1].abs() < 1e-15);
}

#[test]
fn norms_of_trivial_fields() {
    let mesh = sphere_mesh(1, 1.3);
    let quad = gauss_rule(8).unwrap();
    let n = mesh.n_dofs();
    assert_eq!(energy_norm_fluid(&mesh, &vec![c(0.0); n], 2.0, &quad).unwrap(), 0.0);
    let vol = 4.0 * PI / 3.0 * (1.3f64.powi(3) - 1.0);
    let k = 2.0;
    let e = energy_norm_fluid(&mesh, &vec![c(1.0); n], k, &quad).unwrap();
    assert!((e * e - k * k * vol).abs() < 1e-4 * k * k * vol);
    let ints = fluid_error_integrals(&mesh, &vec![C64::new(0.0, 1.0); n], k, &quad, None).unwrap();
    assert!((ints.h1_error - vol).abs() < 1e-4 * vol);
    assert!(fluid_error_integrals(&mesh, &vec![c(1.0); n + 1], k, &quad, None).is_err());
    let mat = MaterialParams::ihlenburg();
    let w = 1.0 / (mat.rho_f * 4.0);
    assert!((energy_norm_coupled(3.0, 4.0, 0.0, &mat, 2.0) - (9.0 + 16.0 * w).sqrt()).abs() < 1e-12);
}

#[test]
fn best_approximation_recovers_constants() {
    let mesh = sphere_mesh(1, 1.3);
    let quad = gauss_rule(4).unwrap();
    let f = |_: [f64; 3]| -> Result<(C64, [C64; 3])> { Ok((C64::new(2.0, -1.0), [c(0.0); 3])) };
    let coef = best_approximation(&mesh, &quad, &f).unwrap();
    assert!(coef.iter().all(|v| (v - C64::new(2.0, -1.0)).norm() < 1e-10));
}

#[test]
fn best_approximation_beats_galerkin_in_h1() {
    let k = 2.0;
    let mesh = sphere_mesh(1, 1.2);
    let disc = Discretization { fluid: mesh, solid: None, interior: None };
    let prob = ScatterProblem::new(ProblemKind::Manufactured { source: SOURCE }, k, c(1.0), [0.0, 0.0, 1.0], MaterialParams::ihlenburg())
        .unwrap();
    let ie = IeContext::new(Formulation::Bgu, 3, RadialBasis::Lagrange, k, 1.2, 0.0, None).unwrap();
    let sol = solve_system(assemble_system(&prob, &disc, &ie).unwrap()).unwrap();
    let quad = gauss_rule(4).unwrap();
    let pul = pulsation(k);
    let f = |x: [f64; 3]| pul.pressure(x);
    let ba = best_approximation(&disc.fluid, &quad, &f).unwrap();
    let g = fluid_error_integrals(&disc.fluid, sol.fluid(), k, &quad, Some(&f)).unwrap();
    let b = fluid_error_integrals(&disc.fluid, &ba, k, &quad, Some(&f)).unwrap();
    assert!(b.h1_relative() <= g.h1_relative() * (1.0 + 1e-12), "{} vs {}", b.h1_relative(), g.h1_relative());
    assert!(b.h1_relative() > 0.0);
}

#[test]
fn sav_index_of_concentric_spheres() {
    let s = 1.217_724_603_847_938_1;
    let v = sav_index(2.0 * s, 4.0 * PI, 4.0 * PI / 3.0 * (s.powi(3) - 1.0));
    assert!((v - 3.0 * s / (s.powi(3) - 1.0)).abs() < 1e-13);
    assert!((v - 4.5).abs() < 0.05);
    assert!(sav_index(2.0, 4.0 * PI, 1e300) < 1e-298);
}

#[test]
fn relative_errors_of_exact_and_doubled_fields() {
    let k = 1.0;
    let disc = Discretization { fluid: sphere_mesh(1, 1.2), solid: None, interior: None };
    let prob = ScatterProblem::new(ProblemKind::Manufactured { source: SOURCE }, k, c(1.0), [0.0, 0.0, 1.0], MaterialParams::ihlenburg())
        .unwrap();
    let ie = IeContext::new(Formulation::Bgu, 1, RadialBasis::Lagrange, k, 1.2, 0.0, None).unwrap();
    let mut sol = solve_system(assemble_system(&prob, &disc, &ie).unwrap()).unwrap();
    let quad = gauss_rule(3).unwrap();
    let exact = Constant(C64::new(0.5, 0.5));
    for (v, want) in [(C64::new(0.5, 0.5), 0.0), (C64::new(1.0, 1.0), 1.0), (c(0.0), 1.0)] {
        sol.coeffs.iter_mut().take(disc.fluid.n_dofs()).for_each(|x| *x = v);
        let e = relative_errors(&prob, &disc, &sol, &exact, &quad, &quad, &[]).unwrap();
        assert!((e.energy - want).abs() < 1e-12 && (e.h1 - want).abs() < 1e-12, "{e:?}");
        assert_eq!(e.far_field, 0.0);
    }
}

#[test]
fn mesh_size_of_cube_and_refined_spheres() {
    let kv = KnotVector::new(vec![0.0, 0.0, 1.0, 1.0], 1).unwrap();
    let mut cpts = Vec::new();
    for l in 0..2 {
        for j in 0..2 {
            for i in 0..2 {
                cpts.push([i as f64, j as f64, l as f64]);
            }
        }
    }
    let cube = Mesh::isoparametric(NurbsPatch::new([kv.clone(), kv.clone(), kv], cpts, vec![1.0; 8]).unwrap(), false).unwrap();
    assert!((mesh_size(&cube) - 1.0).abs() < 1e-15);
    let h: Vec<f64> = (1..=3).map(|l| mesh_size(&sphere_mesh(l, 1.5))).collect();
    assert!(h[1] < h[0] && h[2] < h[1], "{h:?}");
}

//! NURBS geometry, refinement and coordinate-system properties.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatter::assembly::{benchmark_mesh, MeshSpec};
use scatter::coords::{ProlatePoint, ProlateSystem};
use scatter::nurbs::*;

fn seed() -> u64 {
    std::env::var("SCATTER_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(7)
}

fn norm(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn random_u(rng: &mut ChaCha8Rng, p: &NurbsPatch) -> [f64; 3] {
    [0, 1, 2].map(|d| p.kv[d].first() + rng.gen::<f64>() * (p.kv[d].last() - p.kv[d].first()))
}

#[test]
fn shell_faces_are_exact_at_random_points() {
    let shell = make_spherical_shell(4.992, 5.075).unwrap();
    let sphere = make_sphere(2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    for _ in 0..10_000 {
        let mut u = random_u(&mut rng, &shell);
        u[2] = 0.0;
        assert!((norm(shell.eval_point(u).unwrap()) - 4.992).abs() < 1e-12 * 4.992);
        u[2] = shell.kv[2].last();
        assert!((norm(shell.eval_point(u).unwrap()) - 5.075).abs() < 1e-12 * 5.075);
        assert!((norm(sphere.eval_point(u).unwrap()) - 2.0).abs() < 1e-12 * 2.0);
    }
}

#[test]
fn knot_insertion_and_elevation_preserve_the_map() {
    let shell = make_spherical_shell(1.0, 1.5).unwrap();
    let a = insert_knots(&shell, 2, &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
    let b = elevate_degree(&insert_knots(&a, 0, &[0.5, 0.5, 2.25]).unwrap(), 1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    for _ in 0..1000 {
        let u = random_u(&mut rng, &shell);
        let x = shell.eval_point(u).unwrap();
        for p in [&a, &b] {
            let y = p.eval_point(u).unwrap();
            assert!((0..3).all(|i| (x[i] - y[i]).abs() < 1e-10));
        }
    }
    assert_eq!(b.degrees(), [2, 4, 1]);
}

#[test]
fn repeated_knot_creates_derivative_jump() {
    let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0], 2).unwrap();
    let smooth = KnotVector::new(vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).unwrap();
    let jump = |kv: &KnotVector| {
        let n = kv.n_basis();
        let mut d = vec![0.0; 2 * n];
        for (side, xi) in [(0, 0.5 - 1e-9), (1, 0.5 + 1e-9)] {
            let (span, _, ders) = bspline_basis_ders(kv, xi).unwrap();
            for (j, v) in ders.iter().enumerate() {
                d[side * n + span + j - 2] = *v;
            }
        }
        (0..n).map(|i| (d[i] - d[n + i]).abs()).fold(0.0, f64::max)
    };
    assert!(jump(&kv) > 1.0);
    assert!(jump(&smooth) < 1e-6);
}

#[test]
fn bspline_conversion_of_polynomial_patch_is_identity() {
    let shell = make_spherical_shell(1.0, 2.0).unwrap();
    let b = nurbs_to_bspline(&shell).unwrap();
    let again = nurbs_to_bspline(&b).unwrap();
    for (p, q) in b.cpts.iter().zip(&again.cpts) {
        assert!((0..3).all(|i| (p[i] - q[i]).abs() < 1e-10));
    }
    assert!(again.weights.iter().all(|&w| w == 1.0));
}

#[test]
fn bspline_sphere_interpolates_but_is_inexact() {
    let mut errs = Vec::new();
    for level in 1..=3 {
        let f = 1 << (level - 1);
        let mut p = make_spherical_shell(1.0, 2.0).unwrap();
        for d in 0..2 {
            let last = p.kv[d].last() as usize;
            let ins: Vec<f64> = (0..last).flat_map(|i| (1..f).map(move |j| i as f64 + j as f64 / f as f64)).collect();
            p = insert_knots(&p, d, &ins).unwrap();
        }
        let b = nurbs_to_bspline(&p).unwrap();
        let g: Vec<Vec<f64>> = (0..3).map(|d| greville_abscissae(&p.kv[d])).collect();
        for &u in &g[0] {
            for &v in &g[1] {
                for &w in &g[2] {
                    let (x, y) = (p.eval_point([u, v, w]).unwrap(), b.eval_point([u, v, w]).unwrap());
                    assert!((0..3).all(|i| (x[i] - y[i]).abs() < 1e-9));
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..40 {
            for j in 0..20 {
                let u = [(i as f64 + 0.5) * 0.1, (j as f64 + 0.5) * 0.1, 1.0];
                worst = worst.max((norm(b.eval_point(u).unwrap()) - 2.0).abs());
            }
        }
        errs.push(worst);
    }
    assert!(errs[0] > 1e-6);
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn glued_topology_counts() {
    let shell = make_spherical_shell(1.0, 2.0).unwrap();
    let topo = build_topology(&shell, true).unwrap();
    assert_eq!(topo.kappa_a.len(), 26);
    assert_eq!(topo.elements.len(), 8);
    let unglued = build_topology(&shell, false).unwrap();
    assert!(unglued.glue_map.iter().enumerate().all(|(i, &p)| i == p));
    for &p in &topo.glue_map {
        assert_eq!(topo.glue_map[p], p);
    }
    for c in &topo.connectivity {
        assert_eq!(c.len(), 3 * 3 * 2);
    }
}

#[test]
fn physical_gradients_match_finite_differences() {
    let mesh = benchmark_mesh(&make_fluid_shell(1.0, 1.4).unwrap(), &MeshSpec::iga(2, 2)).unwrap();
    let el = &mesh.topo.elements[5];
    let u = [0.3 * el.lo[0] + 0.7 * el.hi[0], 0.6 * el.lo[1] + 0.4 * el.hi[1], 0.5 * (el.lo[2] + el.hi[2])];
    let pe = mesh.eval(el, u).unwrap();
    for d in 0..3 {
        let h = 1e-6;
        let mut up = u;
        let mut um = u;
        up[d] += h;
        um[d] -= h;
        let (a, b) = (mesh.eval(el, up).unwrap(), mesh.eval(el, um).unwrap());
        for i in 0..pe.values.len() {
            let fd = (a.values[i] - b.values[i]) / (2.0 * h);
            assert!((fd - pe.grads_param[i][d]).abs() < 1e-6 * pe.grads_param[i][d].abs().max(1.0));
            let dx: f64 = (0..3).map(|c| pe.grads[i][c] * pe.jac[c][d]).sum();
            assert!((dx - pe.grads_param[i][d]).abs() < 1e-10 * pe.grads_param[i][d].abs().max(1.0));
        }
    }
}

fn patches() -> Vec<NurbsPatch> {
    vec![
        make_sphere(1.0).unwrap(),
        make_spherical_shell(0.9, 1.0).unwrap(),
        elevate_degree(&make_fluid_shell(1.0, 1.3).unwrap(), 2, 1).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partition_of_unity(which in 0usize..3, a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        let p = &patches()[which];
        let u = [a * p.kv[0].last(), b * p.kv[1].last(), c * p.kv[2].last()];
        let be = p.basis(u).unwrap();
        let s: f64 = be.values.iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        for d in 0..3 {
            let g: f64 = be.grads_param.iter().map(|g| g[d]).sum();
            prop_assert!(g.abs() < 1e-9);
        }
        prop_assert!(be.values.iter().all(|&v| v >= -1e-15));
    }

    #[test]
    fn refinement_invariance(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, k in 0.05f64..0.95, t in 1usize..3) {
        let p = make_fluid_shell(1.0, 1.6).unwrap();
        let r = elevate_degree(&insert_knots(&p, 1, &[2.0 * k]).unwrap(), 0, t).unwrap();
        let r = insert_knots(&r, 2, &[k]).unwrap();
        let u = [4.0 * a, 2.0 * b, c];
        let (x, y) = (p.eval_point(u).unwrap(), r.eval_point(u).unwrap());
        prop_assert!((0..3).all(|i| (x[i] - y[i]).abs() < 1e-10));
    }

    #[test]
    fn prolate_round_trip(ups in prop::sample::select(vec![0.0, 0.5, 3.0]), dr in 1e-6f64..1.0, scale in 0.0f64..1.0,
                          theta in 0.01f64..3.13, phi in 0.0f64..6.28) {
        let s = ProlateSystem::new(ups).unwrap();
        let r = ups + dr + scale * (9.0 * ups + 10.0);
        let p = ProlatePoint { r, theta, phi };
        let x = s.to_cartesian(p);
        let q = s.from_cartesian(x).unwrap();
        prop_assert!((q.r - r).abs() < 1e-10 && (q.theta - theta).abs() < 1e-10 && (q.phi - phi).abs() < 1e-10);
        let y = s.to_cartesian(q);
        prop_assert!((0..3).all(|i| (x[i] - y[i]).abs() < 1e-10));
    }

    #[test]
    fn prolate_derivative_tables_are_inverse(ups in 0.0f64..2.0, dr in 0.1f64..5.0, theta in 0.1f64..3.0, phi in 0.0f64..6.2) {
        let s = ProlateSystem::new(ups).unwrap();
        let p = ProlatePoint { r: ups + dr, theta, phi };
        let f = s.forward_derivatives(p);
        let inv = s.inverse_derivatives(s.to_cartesian(p)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let prod: f64 = (0..3).map(|k| inv[i][k] * f[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((prod - want).abs() < 1e-10 * (1.0 + ups + dr));
            }
        }
    }

    #[test]
    fn spherical_metric_limit(r in 0.1f64..20.0, theta in 0.01f64..3.13) {
        let s = ProlateSystem::new(0.0).unwrap();
        let m = s.metric(ProlatePoint { r, theta, phi: 0.3 }).unwrap();
        prop_assert!((m.h_r - 1.0).abs() < 1e-13);
        prop_assert!((m.h_theta - r).abs() < 1e-13 * r);
        prop_assert!((m.h_phi - r * theta.sin()).abs() < 1e-13 * r);
        prop_assert!((m.j1 - r * r * theta.sin()).abs() < 1e-13 * r * r);
        prop_assert!((s.surface_jacobian(r, theta) - r * r * theta.sin()).abs() < 1e-13 * r * r);
    }
}

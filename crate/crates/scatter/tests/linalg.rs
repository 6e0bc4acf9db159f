//! Sparse storage, direct solves and condition estimation against dense references.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatter::linalg::*;
use scatter::specfun::C64;

fn random_triplets(rng: &mut ChaCha8Rng, n: usize, count: usize, dominant: bool) -> ComplexTripletMatrix {
    let mut t = ComplexTripletMatrix::new(n);
    for _ in 0..count {
        let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
        t.add(r, c, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    if dominant {
        for i in 0..n {
            t.add(i, i, C64::new(4.0 + count as f64 / n as f64, 1.0));
        }
    }
    t
}

fn dense_matvec(n: usize, a: &[C64], x: &[C64]) -> Vec<C64> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
}

fn dense_norm1(n: usize, a: &[C64]) -> f64 {
    (0..n).map(|j| (0..n).map(|i| a[i * n + j].norm()).sum::<f64>()).fold(0.0, f64::max)
}

#[test]
fn finalize_matches_dense_accumulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = random_triplets(&mut rng, 40, 600, false);
    let mut dense = vec![C64::new(0.0, 0.0); 1600];
    for (r, c, v) in t.iter() {
        dense[r * 40 + c] += v;
    }
    let csr = finalize(&t);
    let got = csr.to_dense();
    assert!(got.iter().zip(&dense).all(|(a, b)| (a - b).norm() < 1e-14));
    assert_eq!(t.to_dense().len(), 1600);
    for i in 0..40 {
        let cols = &csr.col_idx[csr.row_ptr[i]..csr.row_ptr[i + 1]];
        assert!(cols.windows(2).all(|w| w[0] < w[1]));
    }
    let tt = csr.transpose().to_dense();
    for i in 0..40 {
        for j in 0..40 {
            assert_eq!(tt[i * 40 + j], got[j * 40 + i]);
        }
    }
}

#[test]
fn random_system_solves_to_small_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 200;
    let t = random_triplets(&mut rng, n, 3000, true);
    let a = finalize(&t);
    let ad = a.to_dense();
    let b: Vec<C64> = (0..n).map(|i| C64::new((i as f64).sin(), 1.0 / (1.0 + i as f64))).collect();
    let x = solve(&a, &b).unwrap();
    let r = dense_matvec(n, &ad, &x);
    let res = r.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    assert!(res < 1e-12, "{res}");
    let f = LuFactor::new(&a).unwrap();
    let xt = f.solve_transpose(&b);
    let at = a.transpose().to_dense();
    let rt = dense_matvec(n, &at, &xt);
    assert!(rt.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-10));
}

#[test]
fn condition_estimate_is_within_factor_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100;
    let mut t = random_triplets(&mut rng, n, 800, false);
    for i in 0..n {
        t.add(i, i, C64::new(0.5 + i as f64 * 0.05, 0.0));
    }
    let a = finalize(&t);
    let f = LuFactor::new(&a).unwrap();
    let mut inv = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[j] = C64::new(1.0, 0.0);
        let col = solve_with(&f, &a, &e).unwrap();
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    let exact = dense_norm1(n, &a.to_dense()) * dense_norm1(n, &inv);
    let est = cond1_estimate(&a).unwrap();
    assert!(est <= exact * (1.0 + 1e-10) && est >= exact / 3.0, "{est} vs {exact}");
}

#[test]
fn spd_solve_matches_general_solve() {
    let n = 30;
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push((i, i, 4.0));
        if i + 1 < n {
            entries.push((i, i + 1, -1.0));
            entries.push((i + 1, i, -1.0));
        }
    }
    let b: Vec<C64> = (0..n).map(|i| C64::new(1.0, i as f64)).collect();
    let x = spd_solve(n, &entries, &b).unwrap();
    let mut t = ComplexTripletMatrix::new(n);
    for &(r, c, v) in &entries {
        t.add(r, c, C64::new(v, 0.0));
    }
    let y = solve(&finalize(&t), &b).unwrap();
    assert!(x.iter().zip(&y).all(|(u, v)| (u - v).norm() < 1e-12));
    let indefinite = vec![(0, 0, 1.0), (1, 1, -1.0)];
    assert!(spd_solve(2, &indefinite, &[C64::new(1.0, 0.0); 2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matvec_agrees_with_dense(seed in 0u64..1000, n in 1usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triplets(&mut rng, n, 3 * n, false);
        let a = finalize(&t);
        let x: Vec<C64> = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let y = a.matvec(&x);
        let z = dense_matvec(n, &a.to_dense(), &x);
        prop_assert!(y.iter().zip(&z).all(|(u, v)| (u - v).norm() < 1e-13));
        prop_assert!(a.asymmetry() >= 0.0);
        prop_assert!(a.norm_inf() >= a.max_abs());
    }
}

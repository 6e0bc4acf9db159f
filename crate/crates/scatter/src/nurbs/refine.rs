//! Knot insertion, degree elevation and B-spline interpolation of patches.

use super::{basis_ders_at_span, KnotVector, NurbsPatch};
use crate::error::{Result, ScatterError};
use crate::linalg::dense::DenseLu;

/// Greville abscissae `ξ̃_i = (ξ_{i+1} + ... + ξ_{i+p}) / p`.
pub fn greville_abscissae(kv: &KnotVector) -> Vec<f64> {
    let p = kv.degree;
    (0..kv.n_basis())
        .map(|i| kv.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
        .collect()
}

/// Row-major collocation matrix `B[r][i] = N_i(t_r)`.
fn collocation_matrix(kv: &KnotVector, sites: &[f64]) -> Result<Vec<f64>> {
    let n = kv.n_basis();
    let p = kv.degree;
    let mut m = vec![0.0; sites.len() * n];
    for (r, &t) in sites.iter().enumerate() {
        let s = kv.span_index(t)?;
        let (v, _) = basis_ders_at_span(kv, s, t);
        for a in 0..=p {
            m[r * n + s - p + a] = v[a];
        }
    }
    Ok(m)
}

/// Homogeneous control net `(w x, w y, w z, w)`.
fn homogeneous(patch: &NurbsPatch) -> Vec<[f64; 4]> {
    patch
        .cpts
        .iter()
        .zip(&patch.weights)
        .map(|(p, &w)| [p[0] * w, p[1] * w, p[2] * w, w])
        .collect()
}

fn from_homogeneous(kv: [KnotVector; 3], pw: Vec<[f64; 4]>) -> Result<NurbsPatch> {
    let mut cpts = Vec::with_capacity(pw.len());
    let mut weights = Vec::with_capacity(pw.len());
    for q in pw {
        cpts.push([q[0] / q[3], q[1] / q[3], q[2] / q[3]]);
        weights.push(q[3]);
    }
    NurbsPatch::new(kv, cpts, weights)
}

/// Applies `f` to every line of a 3D grid along direction `dir`, producing a
/// grid whose extent in `dir` is `new_len`.
fn map_lines<T: Copy + Default>(
    data: &[T],
    dims: [usize; 3],
    dir: usize,
    new_len: usize,
    f: impl Fn(&[T]) -> Vec<T>,
) -> Vec<T> {
    let mut nd = dims;
    nd[dir] = new_len;
    let mut out = vec![T::default(); nd[0] * nd[1] * nd[2]];
    let others: Vec<usize> = (0..3).filter(|&d| d != dir).collect();
    let mut line = Vec::with_capacity(dims[dir]);
    for b in 0..dims[others[1]] {
        for a in 0..dims[others[0]] {
            line.clear();
            let mut ijk = [0usize; 3];
            ijk[others[0]] = a;
            ijk[others[1]] = b;
            for t in 0..dims[dir] {
                ijk[dir] = t;
                line.push(data[ijk[0] + dims[0] * (ijk[1] + dims[1] * ijk[2])]);
            }
            let res = f(&line);
            for (t, v) in res.into_iter().enumerate() {
                ijk[dir] = t;
                out[ijk[0] + nd[0] * (ijk[1] + nd[1] * ijk[2])] = v;
            }
        }
    }
    out
}

/// Boehm insertion of a single knot into a 1D homogeneous control polygon.
fn insert_one(kv: &KnotVector, pw: &[[f64; 4]], u: f64) -> Result<(KnotVector, Vec<[f64; 4]>)> {
    let p = kv.degree;
    let k = kv.span_index(u)?;
    let k = if u == kv.last() { kv.n_basis() - 1 } else { k };
    let t = &kv.knots;
    let mut q = Vec::with_capacity(pw.len() + 1);
    for i in 0..=pw.len() {
        let v = if i + p <= k {
            pw[i]
        } else if i > k {
            pw[i - 1]
        } else {
            let alpha = (u - t[i]) / (t[i + p] - t[i]);
            let mut r = [0.0; 4];
            for c in 0..4 {
                r[c] = alpha * pw[i][c] + (1.0 - alpha) * pw[i - 1][c];
            }
            r
        };
        q.push(v);
    }
    let mut knots = t.clone();
    knots.insert(k + 1, u);
    Ok((KnotVector::new(knots, p)?, q))
}

/// Inserts `new_knots` (in any order, repeats allowed) into direction `dir`.
/// The geometric map is unchanged.
pub fn insert_knots(patch: &NurbsPatch, dir: usize, new_knots: &[f64]) -> Result<NurbsPatch> {
    if dir > 2 {
        return Err(ScatterError::Domain(format!("direction {dir} out of range")));
    }
    if new_knots.is_empty() {
        return Ok(patch.clone());
    }
    let kv0 = &patch.kv[dir];
    for &u in new_knots {
        if !(u > kv0.first() && u < kv0.last()) {
            return Err(ScatterError::Domain(format!("inserted knot {u} must lie strictly inside the knot range")));
        }
    }
    let mut sorted = new_knots.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut final_kv = kv0.clone();
    for &u in &sorted {
        let mut knots = final_kv.knots.clone();
        let pos = knots.partition_point(|&k| k <= u);
        knots.insert(pos, u);
        final_kv = KnotVector::new(knots, kv0.degree)?;
    }
    let dims = patch.dims();
    let pw = homogeneous(patch);
    let new_len = final_kv.n_basis();
    let err = std::cell::RefCell::new(None);
    let out = map_lines(&pw, dims, dir, new_len, |line| {
        let mut kv = kv0.clone();
        let mut cur = line.to_vec();
        for &u in &sorted {
            match insert_one(&kv, &cur, u) {
                Ok((k2, c2)) => {
                    kv = k2;
                    cur = c2;
                }
                Err(e) => {
                    *err.borrow_mut() = Some(e);
                    return vec![[0.0; 4]; new_len];
                }
            }
        }
        cur
    });
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let mut kv = patch.kv.clone();
    kv[dir] = final_kv;
    from_homogeneous(kv, out)
}

/// Linear map from the coefficients in `old` to those in `new` for any spline
/// of `old` that also lies in `new`, by collocation at the Greville abscissae of `new`.
fn transfer_matrix(old: &KnotVector, new: &KnotVector) -> Result<Vec<f64>> {
    let g = greville_abscissae(new);
    let n_new = new.n_basis();
    let n_old = old.n_basis();
    let bn = collocation_matrix(new, &g)?;
    let bo = collocation_matrix(old, &g)?;
    let lu = DenseLu::factor(n_new, bn)?;
    let mut m = vec![0.0; n_new * n_old];
    for j in 0..n_old {
        let col: Vec<f64> = (0..n_new).map(|r| bo[r * n_old + j]).collect();
        let x = lu.solve(&col);
        for r in 0..n_new {
            m[r * n_old + j] = x[r];
        }
    }
    Ok(m)
}

/// Raises the degree in direction `dir` by `times`, keeping the continuity at
/// every existing knot (multiplicities increase by `times`). The geometric map
/// is unchanged.
pub fn elevate_degree(patch: &NurbsPatch, dir: usize, times: usize) -> Result<NurbsPatch> {
    if dir > 2 {
        return Err(ScatterError::Domain(format!("direction {dir} out of range")));
    }
    if times == 0 {
        return Ok(patch.clone());
    }
    let old = &patch.kv[dir];
    let mut knots = Vec::new();
    for (v, m) in old.unique() {
        for _ in 0..m + times {
            knots.push(v);
        }
    }
    let new = KnotVector::new(knots, old.degree + times)?;
    let m = transfer_matrix(old, &new)?;
    let n_new = new.n_basis();
    let n_old = old.n_basis();
    let pw = homogeneous(patch);
    let out = map_lines(&pw, patch.dims(), dir, n_new, |line| {
        (0..n_new)
            .map(|r| {
                let mut acc = [0.0; 4];
                for j in 0..n_old {
                    let c = m[r * n_old + j];
                    if c != 0.0 {
                        for t in 0..4 {
                            acc[t] += c * line[j][t];
                        }
                    }
                }
                acc
            })
            .collect()
    });
    let mut kv = patch.kv.clone();
    kv[dir] = new;
    from_homogeneous(kv, out)
}

/// Polynomial (unit-weight) patch on the knot vectors `target` interpolating the
/// geometry of `patch` at the tensor grid of Greville abscissae of `target`.
pub fn interpolate_bspline(patch: &NurbsPatch, target: [KnotVector; 3]) -> Result<NurbsPatch> {
    for d in 0..3 {
        if target[d].first() != patch.kv[d].first() || target[d].last() != patch.kv[d].last() {
            return Err(ScatterError::Incompatible("target knot range differs from the patch".into()));
        }
    }
    let g: Vec<Vec<f64>> = target.iter().map(greville_abscissae).collect();
    let dims = [g[0].len(), g[1].len(), g[2].len()];
    let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for &c in &g[2] {
        for &b in &g[1] {
            for &a in &g[0] {
                let x = patch.eval_point([a, b, c])?;
                values.push([x[0], x[1], x[2], 1.0]);
            }
        }
    }
    let mut data = values;
    for d in 0..3 {
        let b = collocation_matrix(&target[d], &g[d])?;
        let lu = DenseLu::factor(dims[d], b)
            .map_err(|e| ScatterError::Singular(format!("Greville collocation in direction {d}: {e}")))?;
        data = map_lines(&data, dims, d, dims[d], |line| {
            let mut out = vec![[0.0; 4]; line.len()];
            for c in 0..3 {
                let rhs: Vec<f64> = line.iter().map(|v| v[c]).collect();
                let x = lu.solve(&rhs);
                for (k, v) in x.into_iter().enumerate() {
                    out[k][c] = v;
                    out[k][3] = 1.0;
                }
            }
            out
        });
    }
    from_homogeneous(target, data)
}

/// B-spline (all weights 1) approximation of a NURBS patch on the same knot
/// vectors, interpolating the geometry at the Greville grid.
pub fn nurbs_to_bspline(patch: &NurbsPatch) -> Result<NurbsPatch> {
    interpolate_bspline(patch, patch.kv.clone())
}

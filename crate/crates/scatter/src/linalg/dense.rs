//! Dense LU factorization with partial pivoting, generic over real and complex scalars.

use crate::error::{Result, ScatterError};
use num_complex::ComplexFloat;

/// Row-major dense LU factors `P A = L U` with unit lower `L`.
#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T> DenseLu<T>
where
    T: ComplexFloat<Real = f64> + Send + Sync,
{
    /// Factors a row-major `n × n` matrix. A pivot below `1e-13 · max|row|` of
    /// its original row is reported as singular.
    pub fn factor(n: usize, mut a: Vec<T>) -> Result<Self> {
        if a.len() != n * n {
            return Err(ScatterError::Domain(format!("dense matrix has {} entries, expected {}", a.len(), n * n)));
        }
        let row_max: Vec<f64> = (0..n)
            .map(|i| a[i * n..(i + 1) * n].iter().map(|v| v.abs()).fold(0.0, f64::max))
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            let scale = row_max[perm[piv]];
            if !(best > 1e-13 * scale) || best == 0.0 {
                return Err(ScatterError::Singular(format!(
                    "dense LU pivot {k}: |pivot| = {best:e}, row max = {scale:e}"
                )));
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let inv = T::one() / a[k * n + k];
            let (head, tail) = a.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            for row in tail.chunks_mut(n) {
                let f = row[k] * inv;
                row[k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        row[j] = row[j] - f * pivot_row[j];
                    }
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Determinant from the factors.
    pub fn det(&self) -> T {
        let mut d = T::one();
        for i in 0..self.n {
            d = d * self.lu[i * self.n + i];
        }
        let mut seen = vec![false; self.n];
        let mut odd = false;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                odd = !odd;
            }
        }
        if odd {
            T::zero() - d
        } else {
            d
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^T x = b` (plain transpose, no conjugation).
    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s = s - self.lu[j * n + i] * y[j];
            }
            y[i] = s / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s = s - self.lu[j * n + i] * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![T::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}

/// Solves a dense row-major system `A x = b` in one call.
pub fn dense_solve<T>(n: usize, a: Vec<T>, b: &[T]) -> Result<Vec<T>>
where
    T: ComplexFloat<Real = f64> + Send + Sync,
{
    Ok(DenseLu::factor(n, a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::C64;

    #[test]
    fn real_and_complex_small_systems() {
        let a = vec![2.0, 1.0, 1.0, 3.0];
        let x = dense_solve(2, a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        let a = vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 3.0)];
        let lu = DenseLu::factor(2, a).unwrap();
        let x = lu.solve(&[C64::new(4.0, 0.0), C64::new(3.0, 0.0)]);
        assert!((x[1] - C64::new(0.0, -1.0)).norm() < 1e-15);
        let xt = lu.solve_transpose(&[C64::new(4.0, 0.0), C64::new(3.0, 0.0)]);
        assert!((xt[0] - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((lu.det() - C64::new(0.0, 6.0)).norm() < 1e-15);
        let p = DenseLu::factor(2, vec![0.0, 2.0, 3.0, 1.0]).unwrap();
        assert!((p.det() + 6.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        assert!(matches!(DenseLu::factor(2, vec![1.0, 2.0, 2.0, 4.0]), Err(ScatterError::Singular(_))));
    }
}
